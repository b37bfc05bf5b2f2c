"""Parametric ground planes, the coax-fed element and their meshes."""

from .fixtures import dipole_mesh, monopole_element_mesh, wavelength_mm
from .generate import MAX_TRIANGLES, MIN_ANGLE_DEG, export_stl, generate, mesh_report, surface_area
from .mesh import (PART_ELEMENT, PART_GROUND, TAG_FEED, TAG_MASKED, TAG_METAL, TAG_NAMES,
                   TriMesh, read_stl)
from .specs import (DISH_RADIUS_REPORTED_MM, FAMILIES, SHEET_THICKNESS_MM, TABLE_WAVELENGTH_MM,
                    CoaxModel, EdgeMountedSphere, FinSphere, GeometryError, GroundPlaneSpec,
                    Planar, PlanarWithCone, PlanarWithDish, PlanarWithHorn, RibbedPlanar,
                    RingedSphere, SlottedSphere, SpikedSphere, Sphere, dish_true_radius,
                    spec_from_dict)

__all__ = [
    "CoaxModel", "DISH_RADIUS_REPORTED_MM", "EdgeMountedSphere", "FAMILIES", "FinSphere",
    "GeometryError", "GroundPlaneSpec", "MAX_TRIANGLES", "MIN_ANGLE_DEG", "PART_ELEMENT",
    "PART_GROUND", "Planar", "PlanarWithCone", "PlanarWithDish", "PlanarWithHorn",
    "RibbedPlanar", "RingedSphere", "SHEET_THICKNESS_MM", "SlottedSphere", "SpikedSphere",
    "Sphere", "TABLE_WAVELENGTH_MM", "TAG_FEED", "TAG_MASKED", "TAG_METAL", "TAG_NAMES",
    "TriMesh", "dipole_mesh", "dish_true_radius", "export_stl", "generate", "mesh_report",
    "monopole_element_mesh", "read_stl", "spec_from_dict", "surface_area", "wavelength_mm",
]
