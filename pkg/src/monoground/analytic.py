"""Image-theory fields of a vertical monopole over an infinite perfect ground.

Phasors use the ``exp(-jkr)`` propagation factor (``exp(+jwt)`` time
dependence) throughout the package.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import constants, special

DESIGN_FREQUENCY_HZ = 1.3e9
#: c / 1.3 GHz in mm; used for all physics.
WAVELENGTH_EXACT_MM = constants.c / DESIGN_FREQUENCY_HZ * 1e3
#: Rounded design wavelength used when quoting table dimensions (mm).
WAVELENGTH_TABLE_MM = 230.0
COPPER_SIGMA = 5.8e7
DB_FLOOR = -80.0


class FarFieldWarning(UserWarning):
    """The far-field distance approximation is used too close to the source."""


@dataclass(frozen=True)
class MediumParams:
    """Free-space propagation constants at one frequency (SI units)."""

    frequency: float
    wavenumber: float
    wavelength: float
    eta: float
    sigma: float = COPPER_SIGMA
    mu: float = constants.mu_0

    def __post_init__(self):
        for name in ("frequency", "wavenumber", "wavelength", "eta", "sigma", "mu"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not math.isclose(self.wavenumber * self.wavelength, 2 * math.pi, rel_tol=1e-9):
            raise ValueError("wavenumber and wavelength are inconsistent")

    @classmethod
    def from_frequency(cls, frequency: float, sigma: float = COPPER_SIGMA,
                       mu: float = constants.mu_0) -> "MediumParams":
        if not frequency > 0:
            raise ValueError("frequency must be positive")
        lam = constants.c / frequency
        eta = math.sqrt(constants.mu_0 / constants.epsilon_0)
        return cls(frequency, 2 * math.pi / lam, lam, eta, sigma, mu)


@dataclass(frozen=True)
class MonopoleParams:
    """Element length ``h`` (m), drive current ``i0`` (A), reflection ``rv``."""

    h: float
    i0: complex = 1.0
    rv: complex = 1.0

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("element length h must be positive")


@dataclass(frozen=True)
class ObservationPoint:
    r: float
    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError("observation distance r must be positive")
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError("theta must lie in [0, pi]")


@dataclass(frozen=True)
class FieldSample:
    e_direct: complex
    e_reflected: complex
    e_total: complex
    r1: float
    r2: float


def image_distances_exact(obs: ObservationPoint, h: float) -> tuple[float, float]:
    """Distances from the source at ``z = h`` and its image at ``z = -h``."""
    if not (obs.r > 0 and h > 0):
        raise ValueError("r and h must be positive")
    c = math.cos(obs.theta)
    r1 = math.sqrt(obs.r ** 2 + h ** 2 - 2 * obs.r * h * c)
    r2 = math.sqrt(obs.r ** 2 + h ** 2 - 2 * obs.r * h * math.cos(math.pi - obs.theta))
    return r1, r2


def image_distances_farfield(obs: ObservationPoint, h: float,
                             min_ratio: float = 10.0) -> tuple[float, float]:
    """First-order distances ``r -/+ h cos(theta)``.

    Warns with :class:`FarFieldWarning` when ``r < min_ratio * h``.
    """
    if not (obs.r > 0 and h > 0):
        raise ValueError("r and h must be positive")
    if obs.r < min_ratio * h:
        warnings.warn(f"r/h = {obs.r / h:.3g} is below {min_ratio}; far-field "
                      "distances are inaccurate", FarFieldWarning, stacklevel=2)
    c = math.cos(obs.theta)
    return obs.r - h * c, obs.r + h * c


def field_components(medium: MediumParams, monopole: MonopoleParams,
                     obs: ObservationPoint, mode: str = "farfield") -> FieldSample:
    """Direct, reflected and total far electric field ``E_theta`` (V/m).

    In ``"farfield"`` mode the amplitude uses ``r`` and ``theta`` and only
    the phase uses the image distances; ``"exact"`` mode uses the exact
    distances and each source's own polar angle throughout.
    """
    if mode == "exact":
        r1, r2 = image_distances_exact(obs, monopole.h)
        a1, a2 = r1, r2
        # each source sees the observer under its own polar angle
        rho = obs.r * math.sin(obs.theta)
        s1, s2 = rho / r1, rho / r2
    elif mode == "farfield":
        r1, r2 = image_distances_farfield(obs, monopole.h)
        a1 = a2 = obs.r
        s1 = s2 = math.sin(obs.theta)
    else:
        raise ValueError("mode must be 'exact' or 'farfield'")
    k, eta = medium.wavenumber, medium.eta
    pre = 1j * eta * k * monopole.i0 * monopole.h / (4 * math.pi)
    e_d = pre * s1 * np.exp(-1j * k * r1) / a1
    e_r = monopole.rv * pre * s2 * np.exp(-1j * k * r2) / a2
    below = obs.theta > math.pi / 2
    total = 0.0 if below else e_d + e_r
    return FieldSample(complex(e_d), complex(e_r), complex(total), r1, r2)


@dataclass(frozen=True)
class AnalyticPattern:
    theta: np.ndarray
    linear: np.ndarray
    db: np.ndarray

    def clamped_db(self, floor: float = DB_FLOOR) -> np.ndarray:
        return np.maximum(self.db, floor)


def pattern_from_kh(kh: float, theta) -> AnalyticPattern:
    """Normalized ``|sin(theta) * 2 cos(kh cos(theta))|`` over a theta grid."""
    theta = np.asarray(theta, dtype=float)
    if theta.size == 0:
        raise ValueError("theta grid is empty")
    f = np.abs(np.sin(theta) * 2 * np.cos(kh * np.cos(theta)))
    f = np.where(theta > np.pi / 2 + 1e-12, 0.0, f)
    peak = f.max()
    if peak <= 0:
        raise ValueError("pattern vanishes on the whole grid")
    lin = f / peak
    with np.errstate(divide="ignore"):
        db = 20 * np.log10(lin)
    return AnalyticPattern(theta, lin, db)


def total_field_pattern(medium: MediumParams, monopole: MonopoleParams,
                        theta) -> AnalyticPattern:
    """Normalized total-field pattern for the monopole's ``k h``."""
    return pattern_from_kh(medium.wavenumber * monopole.h, theta)


def induced_emf_dipole(length_wl: float = 0.5, radius_wl: float = 0.001,
                       eta: float | None = None) -> complex:
    """Input impedance of a thin center-fed dipole by the induced-EMF method.

    Assumes a sinusoidal current; the radiation resistance and reactance
    referred to the current maximum are moved to the terminals by dividing
    by ``sin^2(kl/2)``.  For ``l = lambda/2`` this gives about ``73 + j42.5``.

    Parameters
    ----------
    length_wl, radius_wl : float
        Total length and wire radius in wavelengths.
    eta : float, optional
        Wave impedance (free space by default).
    """
    if not (length_wl > 0 and radius_wl > 0):
        raise ValueError("length and radius must be positive")
    eta = math.sqrt(constants.mu_0 / constants.epsilon_0) if eta is None else eta
    kl = 2 * math.pi * length_wl
    ka2_l = 2 * (2 * math.pi) * radius_wl ** 2 / length_wl      # 2 k a^2 / l
    si1, ci1 = special.sici(kl)
    si2, ci2 = special.sici(2 * kl)
    _, ci_a = special.sici(ka2_l)
    gamma = np.euler_gamma
    r = eta / (2 * math.pi) * (
        gamma + math.log(kl) - ci1
        + 0.5 * math.sin(kl) * (si2 - 2 * si1)
        + 0.5 * math.cos(kl) * (gamma + math.log(kl / 2) + ci2 - 2 * ci1))
    x = eta / (4 * math.pi) * (
        2 * si1 + math.cos(kl) * (2 * si1 - si2)
        - math.sin(kl) * (2 * ci1 - ci2 - ci_a))
    s2 = math.sin(kl / 2) ** 2
    if s2 < 1e-12:
        raise ValueError("terminal current vanishes for full-wave multiples")
    return complex(r / s2, x / s2)
