"""Reference wire-like bodies used to validate the solver.

These thin cylinders are deliberately slender (radius 0.001 wavelength), so
their triangles are far below the 5 degree minimum-angle rule that the
ground-plane generator enforces.  They are validation fixtures only.
"""

from __future__ import annotations

import numpy as np
from scipy import constants

from .mesh import PART_ELEMENT, PART_GROUND, TAG_FEED, TAG_METAL, TriMesh, weld
from .primitives import ring, tube


def wavelength_mm(frequency: float) -> float:
    return constants.c / frequency * 1e3


def _ring_edges(vertices, z, tol=1e-9):
    idx = np.flatnonzero(np.abs(vertices[:, 2] - z) < tol)
    phi = np.arctan2(vertices[idx, 1], vertices[idx, 0])
    idx = idx[np.argsort(phi)]
    return np.stack([idx, np.roll(idx, -1)], 1)


def dipole_mesh(frequency: float, length_wl: float = 0.5, radius_wl: float = 0.001,
                edge_wl: float = 0.1, facets: int = 8) -> TriMesh:
    """Center-fed closed cylindrical dipole along z, centered at the origin.

    The axial band count is ``length / edge`` rounded up to an even number
    so that the feed ring sits exactly at ``z = 0``.
    """
    lam = wavelength_mm(frequency)
    length = length_wl * lam
    radius = radius_wl * lam
    bands = int(np.ceil(length / (edge_wl * lam) - 1e-9))
    bands += bands % 2
    half = bands // 2
    lo_v, lo_t = tube(radius, -length / 2, 0.0, facets, half, cap_bottom=True)
    hi_v, hi_t = tube(radius, 0.0, length / 2, facets, half, cap_top=True)
    v, t, tags, parts = weld([(lo_v, lo_t, TAG_METAL, PART_GROUND),
                              (hi_v, hi_t, TAG_METAL, PART_ELEMENT)])
    return TriMesh(v, t, tags, parts, feed_edges=_ring_edges(v, 0.0),
                   spec={"fixture": "dipole", "length_wl": length_wl,
                         "radius_wl": radius_wl, "facets": facets, "bands": bands},
                   edge_mm=edge_wl * lam)


def monopole_element_mesh(frequency: float, length_wl: float = 0.25,
                          radius_wl: float = 0.001, edge_wl: float = 0.1,
                          facets: int = 8) -> TriMesh:
    """Element-only cylinder on ``z >= 0`` for image-ground solves.

    The open base ring on ``z = 0`` carries half bases and the feed.  Bands
    match the corresponding arm of :func:`dipole_mesh`.
    """
    lam = wavelength_mm(frequency)
    length = length_wl * lam
    radius = radius_wl * lam
    bands = int(np.ceil(2 * length / (edge_wl * lam) - 1e-9))
    bands += bands % 2
    v, t = tube(radius, 0.0, length, facets, bands // 2, cap_top=True)
    n = len(t)
    return TriMesh(v, t, np.full(n, TAG_METAL), np.full(n, PART_ELEMENT),
                   feed_edges=_ring_edges(v, 0.0),
                   spec={"fixture": "monopole", "length_wl": length_wl,
                         "radius_wl": radius_wl, "facets": facets},
                   edge_mm=edge_wl * lam)


__all__ = ["dipole_mesh", "monopole_element_mesh", "wavelength_mm", "ring"]
