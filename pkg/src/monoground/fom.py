"""Figures of merit: S11, resonances and bandwidth, far field, gain, cuts."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import constants

from .efie.quadrature import triangle_rule

Z0_DEFAULT = 50.0
S11_FLOOR_DB = -100.0
DB_FLOOR = -80.0
ETA0 = float(np.sqrt(constants.mu_0 / constants.epsilon_0))


# ----------------------------------------------------------------------------
# port quantities
# ----------------------------------------------------------------------------

def reflection(zin, z0: float = Z0_DEFAULT):
    """Reflection coefficient ``(Z - Z0) / (Z + Z0)``."""
    zin = np.asarray(zin, dtype=complex)
    if z0 <= 0:
        raise ValueError("reference impedance must be positive")
    if np.any(zin.real <= -z0):
        raise ValueError("Re(Zin) <= -Z0 is not physical for a passive antenna")
    return (zin - z0) / (zin + z0)


def s11_db(zin, z0: float = Z0_DEFAULT):
    """Return loss ``20 log10 |Gamma|`` in dB, clamped at -100 dB."""
    g = np.abs(reflection(zin, z0))
    with np.errstate(divide="ignore"):
        out = np.maximum(20 * np.log10(g), S11_FLOOR_DB)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class FrequencyResponse:
    """Port response over an increasing frequency list (Hz)."""

    frequencies: np.ndarray
    zin: np.ndarray
    z0: float = Z0_DEFAULT

    def __post_init__(self):
        f = np.asarray(self.frequencies, dtype=float)
        z = np.asarray(self.zin, dtype=complex)
        if f.shape != z.shape or f.ndim != 1:
            raise ValueError("frequencies and zin must be 1-D of equal length")
        if np.any(np.diff(f) <= 0):
            raise ValueError("frequencies must be strictly increasing")
        object.__setattr__(self, "frequencies", f)
        object.__setattr__(self, "zin", z)

    @property
    def s11(self) -> np.ndarray:
        return np.atleast_1d(s11_db(self.zin, self.z0))

    @classmethod
    def from_s11(cls, frequencies, s11, z0: float = Z0_DEFAULT) -> "FrequencyResponse":
        """Synthesize a response with real ``Zin > Z0`` matching ``s11`` (dB)."""
        g = 10 ** (np.asarray(s11, dtype=float) / 20)
        return cls(np.asarray(frequencies, float), z0 * (1 + g) / (1 - g), z0)


@dataclass(frozen=True)
class Resonance:
    frequency: float
    s11_db: float
    bandwidth_pct: float
    f_lo: float
    f_hi: float
    lower_bound: bool


@dataclass(frozen=True)
class ResonanceReport:
    resonances: tuple = ()
    best_frequency: float = float("nan")
    best_s11_db: float = float("nan")

    @property
    def resonant(self) -> bool:
        return len(self.resonances) > 0


def _parabola_vertex(x, y):
    """Vertex of the parabola through three points."""
    (x0, x1, x2), (y0, y1, y2) = x, y
    den = (x0 - x1) * (x0 - x2) * (x1 - x2)
    a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / den
    b = (x2 ** 2 * (y0 - y1) + x1 ** 2 * (y2 - y0) + x0 ** 2 * (y1 - y2)) / den
    if a <= 0:
        return x1, y1
    xv = -b / (2 * a)
    if not x0 <= xv <= x2:
        return x1, y1
    c = y0 - a * x0 ** 2 - b * x0
    return xv, a * xv ** 2 + b * xv + c


def resonances(response: FrequencyResponse, threshold_db: float = -10.0) -> ResonanceReport:
    """Local S11 minima below ``threshold_db`` with their fractional bandwidths.

    Each minimum is refined by a parabola through its neighbours.  The band
    edges are the linearly interpolated threshold crossings bounding the
    contiguous region below threshold; if that region touches the end of the
    sweep the bandwidth is flagged as a lower bound.  Several minima inside
    one contiguous region are all reported and share that interval.
    """
    f = response.frequencies
    s = response.s11
    if len(f) < 3:
        raise ValueError("need at least three samples")
    ib = int(np.argmin(s))
    best_f, best_s = float(f[ib]), float(s[ib])
    if 0 < ib < len(f) - 1:
        best_f, best_s = map(float, _parabola_vertex(f[ib - 1:ib + 2], s[ib - 1:ib + 2]))
    below = s <= threshold_db
    out = []
    n = len(f)
    for i in range(n):
        if not below[i]:
            continue
        left = s[i - 1] if i > 0 else np.inf
        right = s[i + 1] if i < n - 1 else np.inf
        if not (s[i] < left and s[i] <= right):
            continue
        if 0 < i < n - 1:
            fr, sr = _parabola_vertex(f[i - 1:i + 2], s[i - 1:i + 2])
        else:
            fr, sr = f[i], s[i]
        lo = i
        while lo > 0 and below[lo - 1]:
            lo -= 1
        hi = i
        while hi < n - 1 and below[hi + 1]:
            hi += 1
        bound = lo == 0 or hi == n - 1
        f_lo = f[lo] if lo == 0 else _cross(f[lo - 1], f[lo], s[lo - 1], s[lo], threshold_db)
        f_hi = f[hi] if hi == n - 1 else _cross(f[hi], f[hi + 1], s[hi], s[hi + 1], threshold_db)
        bw = (f_hi - f_lo) / fr * 100.0
        out.append(Resonance(float(fr), float(sr), float(bw), float(f_lo), float(f_hi), bound))
    return ResonanceReport(tuple(out), best_f, best_s)


def _cross(f0, f1, s0, s1, level):
    return f0 + (level - s0) * (f1 - f0) / (s1 - s0)


# ----------------------------------------------------------------------------
# far field
# ----------------------------------------------------------------------------

def unit_vectors(theta, phi):
    """``r_hat, theta_hat, phi_hat`` on a ``(n_theta, n_phi)`` grid."""
    t, p = np.meshgrid(theta, phi, indexing="ij")
    st, ct, sp, cp = np.sin(t), np.cos(t), np.sin(p), np.cos(p)
    r = np.stack([st * cp, st * sp, ct], -1)
    th = np.stack([ct * cp, ct * sp, -st], -1)
    ph = np.stack([-sp, cp, np.zeros_like(p)], -1)
    return r, th, ph


class CurrentSource:
    """Quadrature samples of a solved surface current for radiation integrals."""

    def __init__(self, solution, order: int = 5):
        from .efie.solver import current_at
        bary, w = triangle_rule(order)
        mesh = solution.mesh
        j = current_at(solution, bary)                       # (T, n, 3)
        pts = np.einsum("nk,tkd->tnd", bary, mesh.corners * 1e-3)
        wa = (mesh.areas() * 1e-6)[:, None] * w[None, :]
        keep = wa.ravel() > 0
        self.points = pts.reshape(-1, 3)[keep]
        self.jw = (j * wa[..., None]).reshape(-1, 3)[keep]
        self.image = bool(solution.image_ground)
        self.k = 2 * np.pi * solution.frequency / constants.c
        if self.image:
            m = np.array([1.0, 1.0, -1.0])
            self.points = np.concatenate([self.points, self.points * m])
            self.jw = np.concatenate([self.jw, -self.jw * m])

    def radiation_vector(self, rhat, chunk: int = 256) -> np.ndarray:
        """``N(r_hat) = sum J w A exp(jk r_hat . r')`` for ``(..., 3)`` directions."""
        flat = rhat.reshape(-1, 3)
        out = np.empty((len(flat), 3), dtype=complex)
        for s in range(0, len(flat), chunk):
            ph = np.exp(1j * self.k * (flat[s:s + chunk] @ self.points.T))
            out[s:s + chunk] = ph @ self.jw
        out = out.reshape(rhat.shape)
        if self.image:
            out[rhat[..., 2] < -1e-12] = 0.0
        return out

    def intensity(self, rhat) -> np.ndarray:
        """Radiation intensity ``U`` (W/sr)."""
        nvec = self.radiation_vector(rhat)
        nr = np.einsum("...d,...d->...", nvec, rhat)
        perp = nvec - nr[..., None] * rhat
        return ETA0 * self.k ** 2 / (32 * np.pi ** 2) * np.sum(np.abs(perp) ** 2, -1)

    def radiated_power(self, n_theta: int = 48, n_phi: int = 48) -> float:
        """Total radiated power by Gauss-Legendre in cos(theta) x uniform phi."""
        x, w = leggauss(n_theta)
        if self.image:
            # only the upper half-space radiates
            x, w = 0.5 * (x + 1), 0.5 * w
            parts = [(x, w)]
        else:
            # split at the horizon where finite grounds can have a kink
            parts = [(0.5 * (x + 1), 0.5 * w), (0.5 * (x - 1), 0.5 * w)]
        phi = 2 * np.pi * np.arange(n_phi) / n_phi
        total = 0.0
        for xx, ww in parts:
            r, _, _ = unit_vectors(np.arccos(xx), phi)
            u = self.intensity(r)
            total += float(np.sum(u * ww[:, None]) * 2 * np.pi / n_phi)
        return total


@dataclass(frozen=True, eq=False)
class FarFieldPattern:
    """Far field on a ``(theta, phi)`` grid.

    ``e_theta`` and ``e_phi`` are ``r * E`` (V) without the ``exp(-jkr)``
    factor.  Gains are referenced to isotropic using the radiated power.
    """

    theta: np.ndarray
    phi: np.ndarray
    e_theta: np.ndarray
    e_phi: np.ndarray
    p_rad: float
    frequency: float
    image_ground: bool = False
    metadata: dict = field(default_factory=dict)

    @property
    def intensity(self) -> np.ndarray:
        return (np.abs(self.e_theta) ** 2 + np.abs(self.e_phi) ** 2) / (2 * ETA0)

    @property
    def directivity(self) -> np.ndarray:
        return 4 * np.pi * self.intensity / self.p_rad

    @property
    def gain_dbi(self) -> np.ndarray:
        return _db10(self.directivity)

    def co_cross(self):
        """Ludwig-3 co- and cross-polar gain (dBi); see :func:`co_cross_split`."""
        co, cr = co_cross_split(self)
        scale = 4 * np.pi / (2 * ETA0 * self.p_rad)
        return _db10(np.abs(co) ** 2 * scale), _db10(np.abs(cr) ** 2 * scale)


def _db10(x):
    with np.errstate(divide="ignore"):
        return np.maximum(10 * np.log10(x), DB_FLOOR)


def default_grid(step_theta_deg: float = 2.0, step_phi_deg: float = 5.0):
    theta = np.radians(np.arange(0, 180 + 1e-9, step_theta_deg))
    phi = np.radians(np.arange(0, 360 - 1e-9, step_phi_deg))
    return theta, phi


def far_field(solution, theta=None, phi=None, order: int = 5,
              power_grid: tuple[int, int] = (48, 48)) -> FarFieldPattern:
    """Radiated field of a current solution on a ``(theta, phi)`` grid (rad)."""
    if theta is None or phi is None:
        theta, phi = default_grid()
    theta = np.asarray(theta, float)
    phi = np.asarray(phi, float)
    if theta.size == 0 or phi.size == 0:
        raise ValueError("far-field grid is empty")
    src = CurrentSource(solution, order)
    r, th, ph = unit_vectors(theta, phi)
    nvec = src.radiation_vector(r)
    pre = -1j * src.k * ETA0 / (4 * np.pi)
    e_t = pre * np.einsum("...d,...d->...", nvec, th)
    e_p = pre * np.einsum("...d,...d->...", nvec, ph)
    p_rad = src.radiated_power(*power_grid)
    return FarFieldPattern(theta, phi, e_t, e_p, p_rad, solution.frequency,
                           src.image, {"p_in": solution.input_power})


def radiated_power(solution, n_theta: int = 48, n_phi: int = 48, order: int = 5) -> float:
    return CurrentSource(solution, order).radiated_power(n_theta, n_phi)


def directivity_integral(pattern: FarFieldPattern) -> float:
    """``(1/4pi) * integral of D over the sphere`` using the pattern grid.

    Trapezoid rule in theta (the grid must span 0..pi) and the uniform
    mean in phi (the grid must be uniform over a full turn).
    """
    t = pattern.theta
    if not (np.isclose(t[0], 0) and np.isclose(t[-1], np.pi)):
        raise ValueError("theta grid must span [0, pi]")
    d = pattern.directivity
    if pattern.image_ground:
        # the field is identically zero below the horizon; integrating across
        # the jump would smear the horizon value into the lower half-space
        upper = t <= np.pi / 2 + 1e-12
        t, d = t[upper], d[upper]
    ring = (d * np.sin(t)[:, None]).mean(axis=1) * 2 * np.pi
    return float(np.trapezoid(ring, t) / (4 * np.pi))


def co_cross_split(pattern: FarFieldPattern, boresight=(1.0, 0.0, 0.0),
                   reference=(0.0, 0.0, 1.0)):
    """Ludwig-3 decomposition of the field.

    The co-polar unit vector at each direction is the reference polarization
    rotated from the boresight onto that direction; the cross-polar vector
    completes the right-handed tangent frame.  The default boresight is the
    horizon along +x with vertical reference, i.e. theta-polarized on the
    E-plane.  Returns complex ``(co, cross)`` components of ``r * E``.
    """
    b = np.asarray(boresight, float)
    p = np.asarray(reference, float)
    r, th, ph = unit_vectors(pattern.theta, pattern.phi)
    e = pattern.e_theta[..., None] * th + pattern.e_phi[..., None] * ph
    rb = r @ b
    rp = r @ p
    safe = 1 + rb > 1e-9
    denom = np.where(safe, 1 + rb, 1.0)
    eco = p - (rp / denom)[..., None] * (r + b)
    eco = np.where(safe[..., None], eco, p - rp[..., None] * r)
    eco /= np.linalg.norm(eco, axis=-1, keepdims=True)
    ecr = np.cross(r, eco)
    co = np.einsum("...d,...d->...", e, eco)
    cr = np.einsum("...d,...d->...", e, ecr)
    return co, cr


def peak_gain(pattern: FarFieldPattern) -> float:
    return float(pattern.gain_dbi.max())


@dataclass(frozen=True)
class PolarTrace:
    """Pattern cut as a closed polar trace; angles in degrees."""

    angle_deg: np.ndarray
    gain_dbi: np.ndarray
    plane: str

    @property
    def normalized_db(self) -> np.ndarray:
        return np.maximum(self.gain_dbi - self.gain_dbi.max(), DB_FLOOR)


def _find(values, target, name):
    idx = np.flatnonzero(np.isclose(values, target, atol=1e-9))
    if not len(idx):
        raise ValueError(f"{name} = {np.degrees(target):g} deg is not sampled")
    return int(idx[0])


def pattern_cut(pattern: FarFieldPattern, plane: str, phi_deg: float = 0.0) -> PolarTrace:
    """E-plane (``phi`` and ``phi + 180``) or H-plane (``theta = 90``) cut.

    E-plane angles run over 0..360 degrees measured from zenith; H-plane
    angles are azimuth.
    """
    g = pattern.gain_dbi
    plane = plane.upper()
    if plane == "E":
        i0 = _find(pattern.phi, np.radians(phi_deg) % (2 * np.pi), "phi")
        i1 = _find(pattern.phi, np.radians(phi_deg + 180) % (2 * np.pi), "phi")
        t = np.degrees(pattern.theta)
        fwd = g[:, i0]
        back = g[::-1, i1]
        ang = np.round(np.concatenate([t, 360 - t[::-1]]), 9)
        val = np.concatenate([fwd, back])
        keep = np.r_[True, np.diff(ang) > 1e-9]
        ang, val = ang[keep], val[keep]
        if np.isclose(ang[-1], 360):
            ang, val = ang[:-1], val[:-1]
        return PolarTrace(ang, val, "E")
    if plane == "H":
        it = _find(pattern.theta, np.pi / 2, "theta")
        return PolarTrace(np.round(np.degrees(pattern.phi), 9), g[it].copy(), "H")
    raise ValueError("plane must be 'E' or 'H'")


def lobe_count(trace: PolarTrace, level_db: float = -10.0) -> int:
    """Number of contiguous regions of the closed trace above ``level_db``."""
    above = trace.normalized_db > level_db
    if above.all():
        return 1
    # count rising edges around the circle
    return int(np.sum(above & ~np.roll(above, 1)))
