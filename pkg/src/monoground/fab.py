"""Fabrication planning: skin depth, coating thickness, plating current.

The plating rule keeps the plated charge per unit area fixed, so a part
with a different surface area or plating time gets its current scaled from
a reference run.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import constants

COPPER_SIGMA = 5.8e7            # S/m
DEFAULT_MULTIPLE = 50.0         # required thickness / skin depth
COPPER_MOLAR_MASS = 63.546e-3   # kg/mol
COPPER_DENSITY = 8960.0         # kg/m^3
COPPER_VALENCE = 2


@dataclass(frozen=True)
class SkinDepthQuery:
    """Conductor and frequency for a skin-depth evaluation (SI units)."""

    frequency: float
    conductivity: float = COPPER_SIGMA
    permeability: float = constants.mu_0

    def __post_init__(self):
        for name in ("frequency", "conductivity", "permeability"):
            v = getattr(self, name)
            if not np.isfinite(v) or v <= 0:
                raise ValueError(f"{name} must be positive (got {v})")


def skin_depth(query: SkinDepthQuery) -> float:
    """Skin depth ``sqrt(2 / (omega mu sigma))`` in mm."""
    omega = 2 * np.pi * query.frequency
    return float(np.sqrt(2.0 / (omega * query.permeability * query.conductivity)) * 1e3)


@dataclass(frozen=True)
class CoatingVerdict:
    thickness_mm: float
    skin_depth_mm: float
    ratio: float
    multiple: float

    @property
    def adequate(self) -> bool:
        return self.ratio >= self.multiple


def coating_adequacy(thickness_mm: float, query: SkinDepthQuery,
                     multiple: float = DEFAULT_MULTIPLE) -> CoatingVerdict:
    """Compare a metallization thickness with the skin depth.

    The coating passes when it is at least ``multiple`` skin depths thick.
    """
    if thickness_mm < 0:
        raise ValueError("thickness must be >= 0")
    d = skin_depth(query)
    return CoatingVerdict(float(thickness_mm), d, float(thickness_mm) / d, float(multiple))


@dataclass(frozen=True)
class PlatingReference:
    """A completed plating run used to scale new ones.

    Attributes
    ----------
    area_mm2 : float
        Plated surface area.
    current_a : float
        Bath current.
    hours : float
        Plating time.
    thickness_mm : float
        Copper thickness achieved.
    """

    area_mm2: float
    current_a: float
    hours: float
    thickness_mm: float

    def __post_init__(self):
        for name in ("area_mm2", "current_a", "hours", "thickness_mm"):
            v = getattr(self, name)
            if not np.isfinite(v) or v <= 0:
                raise ValueError(f"PlatingReference.{name} must be positive (got {v})")

    @classmethod
    def from_dict(cls, d: dict) -> "PlatingReference":
        return cls(**{k: float(d[k]) for k in ("area_mm2", "current_a", "hours",
                                               "thickness_mm")})


# the 57.5 mm sphere plated at 1.2 A for 4 h (Test Sphere 4)
STANDARD_SPHERE_REFERENCE = PlatingReference(
    area_mm2=4 * np.pi * 57.5 ** 2, current_a=1.2, hours=4.0, thickness_mm=0.13)


def plating_current(area_mm2: float, reference: PlatingReference, hours: float) -> float:
    """Current (A) giving the reference charge density over ``area_mm2`` in ``hours``."""
    if area_mm2 <= 0 or hours <= 0:
        raise ValueError("area and duration must be positive")
    return reference.current_a * (area_mm2 / reference.area_mm2) * (reference.hours / hours)


def faraday_thickness(current_a: float, hours: float, area_mm2: float,
                      efficiency: float = 1.0) -> float:
    """Copper thickness (mm) predicted by Faraday's law for uniform deposition.

    Diagnostic only; logged plating runs report much thicker layers than this.
    """
    charge = current_a * hours * 3600.0 * efficiency
    mass = charge / (COPPER_VALENCE * constants.physical_constants["Faraday constant"][0]) \
        * COPPER_MOLAR_MASS
    volume = mass / COPPER_DENSITY
    return float(volume / (area_mm2 * 1e-6) * 1e3)
