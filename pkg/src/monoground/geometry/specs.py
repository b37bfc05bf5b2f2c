"""Coax and ground-plane parameter sets.

All lengths are in mm.  Each dataclass validates itself on construction and
raises :class:`GeometryError` naming the violated constraint.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import ClassVar

import numpy as np

# 230 mm is the rounded quarter-wave design wavelength used for all table
# dimensions (57.5 mm = lambda/4, 3.6 mm = lambda/64)
TABLE_WAVELENGTH_MM = 230.0
SHEET_THICKNESS_MM = 1.5


class GeometryError(ValueError):
    """Dimensionally impossible geometry."""


def _positive(obj, *names):
    for n in names:
        v = getattr(obj, n)
        if not np.isfinite(v) or v <= 0:
            raise GeometryError(f"{type(obj).__name__}.{n} must be > 0 (got {v})")


@dataclass(frozen=True)
class CoaxModel:
    """RG402-style semi-rigid coax feeding the monopole from below.

    The element is the inner conductor standing ``element_length`` above
    the ground surface.  Its lowest ``feed_gap`` mm pass through the PTFE
    spacer; the delta-gap source sits at the element base.
    """

    inner_diameter: float = 0.92
    dielectric_diameter: float = 3.0
    outer_diameter: float = 3.58
    element_length: float = 57.5
    feed_gap: float = 2.0

    def __post_init__(self):
        _positive(self, "inner_diameter", "dielectric_diameter", "outer_diameter",
                  "element_length")
        if not (self.inner_diameter < self.dielectric_diameter < self.outer_diameter):
            raise GeometryError("coax diameters must satisfy inner < dielectric < outer")
        if self.feed_gap < 0:
            raise GeometryError("CoaxModel.feed_gap must be >= 0")
        if self.feed_gap >= self.element_length:
            raise GeometryError("CoaxModel.feed_gap must be shorter than the element")

    @property
    def element_radius(self) -> float:
        return self.inner_diameter / 2

    @property
    def hole_radius(self) -> float:
        """Mount aperture radius, equal to the outer-conductor radius."""
        return self.outer_diameter / 2

    @property
    def conductor_length(self) -> float:
        return self.element_length

    def impedance(self, eps_r: float = 2.1) -> float:
        """Characteristic impedance of the line, ohms."""
        return 59.958 / np.sqrt(eps_r) * np.log(self.dielectric_diameter / self.inner_diameter)


@dataclass(frozen=True)
class GroundPlaneSpec:
    """Base class of the ground-plane families."""

    family: ClassVar[str] = ""
    thickness: float = field(default=SHEET_THICKNESS_MM, kw_only=True)

    def validate(self, coax: CoaxModel) -> None:
        """Checks that need the coax (the mount aperture) as well."""

    def to_dict(self) -> dict:
        d = asdict(self)
        for k, v in d.items():
            if isinstance(v, tuple):
                d[k] = list(v)
        return {"family": self.family, **d}

    @property
    def is_sphere(self) -> bool:
        return False


def _check_side(spec, coax, inner):
    if spec.side / 2 <= inner:
        raise GeometryError(
            f"{type(spec).__name__}: half side {spec.side / 2:g} mm must exceed {inner:g} mm")


@dataclass(frozen=True)
class Planar(GroundPlaneSpec):
    family: ClassVar[str] = "planar"
    side: float = 115.0

    def __post_init__(self):
        _positive(self, "side", "thickness")

    def validate(self, coax):
        _check_side(self, coax, coax.hole_radius * 1.5)


@dataclass(frozen=True)
class RibbedPlanar(GroundPlaneSpec):
    """Square plate with parallel rectangular ribs running along y.

    ``rib_pitch`` defaults to ``side / rib_count`` so the ribs are spread
    uniformly with the mount midway between the two central ribs.
    """

    family: ClassVar[str] = "ribbed"
    side: float = 115.0
    rib_height: float = TABLE_WAVELENGTH_MM / 64
    rib_width: float = 1.0
    rib_count: int = 8
    rib_pitch: float | None = None

    def __post_init__(self):
        _positive(self, "side", "rib_height", "rib_width", "thickness")
        if int(self.rib_count) != self.rib_count or self.rib_count < 1:
            raise GeometryError("RibbedPlanar.rib_count must be a positive integer")
        if self.rib_pitch is not None:
            _positive(self, "rib_pitch")
        if self.pitch <= self.rib_width:
            raise GeometryError("RibbedPlanar: rib pitch must exceed rib width")
        lo, hi = self.rib_centers()[[0, -1]]
        if lo - self.rib_width / 2 <= -self.side / 2 or hi + self.rib_width / 2 >= self.side / 2:
            raise GeometryError("RibbedPlanar: ribs must fit inside the plate")

    @property
    def pitch(self) -> float:
        return self.side / self.rib_count if self.rib_pitch is None else self.rib_pitch

    def rib_centers(self) -> np.ndarray:
        return self.pitch * (np.arange(self.rib_count) - (self.rib_count - 1) / 2)

    def validate(self, coax):
        _check_side(self, coax, coax.hole_radius * 1.5)
        gap = np.abs(self.rib_centers()).min() - self.rib_width / 2
        if gap <= coax.hole_radius * 1.5:
            raise GeometryError("RibbedPlanar: a rib overlaps the mount aperture")


def dish_true_radius(parent_radius: float, cap_height: float) -> float:
    """Rim radius of a spherical cap, ``sqrt(2 R h - h**2)``."""
    if parent_radius <= 0:
        raise GeometryError("parent sphere radius must be > 0")
    if cap_height < 0 or cap_height > parent_radius:
        raise GeometryError("dish cap height must satisfy 0 <= h <= parent radius")
    return float(np.sqrt(2 * parent_radius * cap_height - cap_height ** 2))


# rim radius quoted for the R=55 mm, h=20 mm dish; the cap formula gives 42.43 mm
DISH_RADIUS_REPORTED_MM = 41.3


@dataclass(frozen=True)
class PlanarWithDish(GroundPlaneSpec):
    """Plate with a concave spherical bowl rising around the element.

    The bowl joins the plate along a circle of radius ``throat_radius``
    around the mount; from there it follows a sphere of radius
    ``parent_radius`` up to a rim ``cap_height`` above its bottom.
    """

    family: ClassVar[str] = "dish"
    side: float = 115.0
    parent_radius: float = 55.0
    cap_height: float = 20.0
    throat_radius: float = 4.5

    def __post_init__(self):
        _positive(self, "side", "parent_radius", "cap_height", "throat_radius", "thickness")
        if self.cap_height > self.parent_radius:
            raise GeometryError("PlanarWithDish: cap height must not exceed parent radius")
        if self.throat_radius >= self.parent_radius:
            raise GeometryError("PlanarWithDish: throat radius must be below parent radius")

    @property
    def throat_sag(self) -> float:
        r = self.parent_radius
        return r - np.sqrt(r * r - self.throat_radius ** 2)

    @property
    def rim_radius(self) -> float:
        return dish_true_radius(self.parent_radius, self.cap_height)

    @property
    def rim_height(self) -> float:
        """Rim height above the plate."""
        return self.cap_height - self.throat_sag

    def validate(self, coax):
        _check_side(self, coax, self.rim_radius)
        if self.throat_radius <= coax.hole_radius * 1.5:
            raise GeometryError("PlanarWithDish: throat radius must clear the mount aperture")
        if self.rim_radius <= self.throat_radius * 1.2:
            raise GeometryError("PlanarWithDish: rim radius must exceed the throat radius")


@dataclass(frozen=True)
class PlanarWithHorn(GroundPlaneSpec):
    """Square pyramidal horn (open top and bottom) standing on the plate."""

    family: ClassVar[str] = "horn"
    side: float = 115.0
    lower_length: float = 25.0
    height: float = 20.0
    flare_factor: float = 2.0

    def __post_init__(self):
        _positive(self, "side", "lower_length", "height", "flare_factor", "thickness")

    @property
    def upper_length(self) -> float:
        return self.flare_factor * self.lower_length

    def validate(self, coax):
        _check_side(self, coax, self.lower_length / 2 * 1.05)
        if self.lower_length / 2 <= coax.hole_radius * 1.5:
            raise GeometryError("PlanarWithHorn: lower length must clear the mount aperture")


@dataclass(frozen=True)
class PlanarWithCone(GroundPlaneSpec):
    """Conical funnel opening upward from a throat ring around the mount."""

    family: ClassVar[str] = "cone"
    side: float = 115.0
    cone_radius: float = 20.0
    cone_height: float = 20.0
    throat_radius: float = 4.5

    def __post_init__(self):
        _positive(self, "side", "cone_radius", "cone_height", "throat_radius", "thickness")
        if self.cone_radius <= self.throat_radius:
            raise GeometryError("PlanarWithCone: cone radius must exceed the throat radius")

    def validate(self, coax):
        _check_side(self, coax, self.throat_radius * 1.2)
        if self.throat_radius <= coax.hole_radius * 1.5:
            raise GeometryError("PlanarWithCone: throat radius must clear the mount aperture")


@dataclass(frozen=True)
class _SphereBase(GroundPlaneSpec):
    @property
    def is_sphere(self) -> bool:
        return True


@dataclass(frozen=True)
class Sphere(_SphereBase):
    family: ClassVar[str] = "sphere"
    radius: float = 57.5

    def __post_init__(self):
        _positive(self, "radius", "thickness")

    def validate(self, coax):
        if self.radius <= coax.hole_radius * 3:
            raise GeometryError("Sphere: radius must be well above the mount aperture")


@dataclass(frozen=True)
class SlottedSphere(_SphereBase):
    """Sphere with rectangular slots running down meridians from the mount."""

    family: ClassVar[str] = "slotted"
    radius: float = 57.5
    slot_length: float = 55.0
    slot_width: float = 3.6
    slot_count: int = 4
    slot_start: float = 6.0

    def __post_init__(self):
        _positive(self, "radius", "slot_length", "slot_width", "slot_start", "thickness")
        if int(self.slot_count) != self.slot_count or self.slot_count < 1:
            raise GeometryError("SlottedSphere.slot_count must be a positive integer")
        if self.slot_width >= 2 * np.pi * self.radius:
            raise GeometryError("SlottedSphere: slot width exceeds the sphere circumference")
        if self.slot_start + self.slot_length >= np.pi * self.radius:
            raise GeometryError(
                "SlottedSphere: slot start + length exceeds the half circumference pi*R")
        ring = 2 * np.pi * self.radius * np.sin(self.slot_start / self.radius)
        if self.slot_count * self.slot_width >= 0.8 * ring:
            raise GeometryError(
                "SlottedSphere: slots overlap at their start (count x width too large)")

    def validate(self, coax):
        if self.slot_start <= coax.hole_radius * 2:
            raise GeometryError("SlottedSphere: slots must start clear of the mount aperture")


@dataclass(frozen=True)
class RingedSphere(_SphereBase):
    """Sphere with latitude ring apertures; positions are geodesic from the mount."""

    family: ClassVar[str] = "ringed"
    radius: float = 57.5
    ring_widths: tuple = (3.6, 3.6, 3.6)
    ring_spacing: float = 3.6
    first_ring: float = 15.0

    def __post_init__(self):
        object.__setattr__(self, "ring_widths", tuple(float(w) for w in self.ring_widths))
        _positive(self, "radius", "ring_spacing", "first_ring", "thickness")
        if not self.ring_widths or min(self.ring_widths) <= 0:
            raise GeometryError("RingedSphere.ring_widths must be a non-empty list of values > 0")
        if self.bands()[-1][1] >= np.pi * self.radius * 0.98:
            raise GeometryError("RingedSphere: rings extend past the far pole (pi*R)")

    def bands(self):
        """Geodesic ``(start, stop)`` of each ring measured from the mount."""
        out, s = [], self.first_ring
        for w in self.ring_widths:
            out.append((s, s + w))
            s += w + self.ring_spacing
        return out

    def validate(self, coax):
        if self.first_ring <= coax.hole_radius * 2:
            raise GeometryError("RingedSphere: first ring must clear the mount aperture")


@dataclass(frozen=True)
class EdgeMountedSphere(_SphereBase):
    """Sphere with the vertical element mounted ``mount_offset`` in from its rim."""

    family: ClassVar[str] = "edge"
    radius: float = 57.5
    mount_offset: float = TABLE_WAVELENGTH_MM / 64

    def __post_init__(self):
        _positive(self, "radius", "mount_offset", "thickness")
        if self.mount_offset >= self.radius:
            raise GeometryError("EdgeMountedSphere: mount offset must be below the radius")

    def validate(self, coax):
        if self.mount_offset <= coax.hole_radius * 1.2:
            raise GeometryError("EdgeMountedSphere: mount offset must exceed the aperture radius")


@dataclass(frozen=True)
class FinSphere(_SphereBase):
    """Half-disc fins radiating from a central core, filling a spherical envelope.

    ``fin_count`` counts half-discs; the core cylinder carries the mount on
    its top cap.  Fin thickness is metadata only.
    """

    family: ClassVar[str] = "fins"
    envelope_radius: float = 57.5
    fin_count: int = 8
    fin_thickness: float = SHEET_THICKNESS_MM
    core_radius: float = 6.0

    def __post_init__(self):
        _positive(self, "envelope_radius", "fin_thickness", "core_radius", "thickness")
        if int(self.fin_count) != self.fin_count or self.fin_count < 2:
            raise GeometryError("FinSphere.fin_count must be an integer >= 2")
        if self.core_radius >= 0.5 * self.envelope_radius:
            raise GeometryError("FinSphere: core radius must be below half the envelope radius")
        gap = 2 * np.pi * self.core_radius / self.fin_count
        if self.fin_thickness >= gap:
            raise GeometryError("FinSphere: fins thicker than their spacing at the core")

    def validate(self, coax):
        if self.core_radius <= coax.hole_radius * 1.5:
            raise GeometryError("FinSphere: core radius must clear the mount aperture")


@dataclass(frozen=True)
class SpikedSphere(_SphereBase):
    """Sphere with radial cylindrical spikes on a near-uniform grid."""

    family: ClassVar[str] = "spiked"
    radius: float = 57.5
    spike_length: float = 10.0
    spike_diameter: float = 2.0
    spike_pitch: float = TABLE_WAVELENGTH_MM / 8

    def __post_init__(self):
        _positive(self, "radius", "spike_length", "spike_diameter", "spike_pitch", "thickness")
        if self.spike_pitch <= 2 * self.spike_diameter:
            raise GeometryError("SpikedSphere: spike pitch must exceed twice the spike diameter")
        if self.spike_diameter >= self.radius / 4:
            raise GeometryError("SpikedSphere: spike diameter too large for the sphere")

    def validate(self, coax):
        if self.radius <= coax.hole_radius * 3:
            raise GeometryError("SpikedSphere: radius must be well above the mount aperture")


FAMILIES = {cls.family: cls for cls in (
    Planar, RibbedPlanar, PlanarWithDish, PlanarWithHorn, PlanarWithCone, Sphere,
    SlottedSphere, RingedSphere, EdgeMountedSphere, FinSphere, SpikedSphere)}


def spec_from_dict(d: dict) -> GroundPlaneSpec:
    """Build a spec from ``{"family": name, **fields}``."""
    d = dict(d)
    fam = d.pop("family", None)
    if fam not in FAMILIES:
        raise GeometryError(f"unknown ground-plane family {fam!r}; expected one of "
                            f"{sorted(FAMILIES)}")
    cls = FAMILIES[fam]
    try:
        return cls(**d)
    except TypeError as exc:
        raise GeometryError(f"{fam}: {exc}") from None
