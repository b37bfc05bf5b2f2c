"""Dense direct solution of the EFIE system with a delta-gap feed."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg
from scipy.linalg import lapack

from .assembly import Assembler, AssemblyOptions, SystemMatrix
from .basis import RwgBasisSet, build_basis

DEFAULT_MAX_UNKNOWNS = 20_000
COND_LIMIT = 1e12
RESIDUAL_LIMIT = 1e-8


class SolverError(RuntimeError):
    """Singular or ill-conditioned system, or a size/residual violation."""


@dataclass(frozen=True)
class Excitation:
    """Delta-gap source on the feed ring.

    Attributes
    ----------
    voltage : complex
        Gap voltage, V.
    gap_mm : float
        Physical gap height (metadata; the gap is idealized as infinitesimal).
    """

    voltage: complex = 1.0
    gap_mm: float = 2.0

    def __post_init__(self):
        if self.voltage == 0:
            raise ValueError("delta-gap voltage must be nonzero")

    def vector(self, basis: RwgBasisSet) -> np.ndarray:
        if not basis.feed.any():
            raise ValueError("basis set has no feed edges")
        v = np.zeros(basis.n, dtype=complex)
        v[basis.feed] = self.voltage * basis.length[basis.feed]
        return v


@dataclass(frozen=True, eq=False)
class CurrentSolution:
    """RWG coefficients (A) at one frequency plus the port quantities."""

    coefficients: np.ndarray
    frequency: float
    basis: RwgBasisSet
    excitation: Excitation
    image_ground: bool
    feed_current: complex
    cond: float
    residual: float

    @property
    def mesh(self):
        return self.basis.mesh

    @property
    def zin(self) -> complex:
        return complex(self.excitation.voltage / self.feed_current)

    @property
    def input_power(self) -> float:
        """Time-averaged input power, W."""
        return 0.5 * float(np.real(self.excitation.voltage * np.conj(self.feed_current)))

    def slot_coefficients(self) -> np.ndarray:
        """Per-triangle slot amplitudes ``(T, 3)`` (zero on triangles without bases)."""
        a = self.basis.slot_matrix().T @ self.coefficients
        return a.reshape(-1, 3)

    def scaled(self, factor: complex) -> "CurrentSolution":
        return CurrentSolution(
            coefficients=self.coefficients * factor, frequency=self.frequency,
            basis=self.basis,
            excitation=Excitation(self.excitation.voltage * factor,
                                  self.excitation.gap_mm),
            image_ground=self.image_ground, feed_current=self.feed_current * factor,
            cond=self.cond, residual=self.residual)


def _condition(lu, anorm):
    rcond, info = lapack.zgecon(lu, anorm, norm="1")
    if info != 0 or rcond <= 0:
        return np.inf
    return 1.0 / rcond


def solve(matrix: SystemMatrix, basis: RwgBasisSet, excitation: Excitation,
          max_unknowns: int = DEFAULT_MAX_UNKNOWNS) -> CurrentSolution:
    """Factor ``matrix`` and return the delta-gap current solution.

    Raises
    ------
    SolverError
        If ``N`` exceeds ``max_unknowns``, the 1-norm condition estimate
        exceeds ``1e12``, or the relative residual exceeds ``1e-8``.
    """
    z = matrix.z
    n = z.shape[0]
    if n > max_unknowns:
        raise SolverError(f"{n} unknowns exceeds the cap of {max_unknowns}")
    v = excitation.vector(basis)
    lu, piv = linalg.lu_factor(z, check_finite=True)
    cond = _condition(lu, np.linalg.norm(z, 1))
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise SolverError(f"system matrix ill-conditioned (cond estimate {cond:.3g})")
    x = linalg.lu_solve((lu, piv), v)
    res = float(np.linalg.norm(z @ x - v) / np.linalg.norm(v))
    if res > RESIDUAL_LIMIT:
        raise SolverError(f"relative residual {res:.3g} above {RESIDUAL_LIMIT}")
    i_feed = complex(np.sum(x[basis.feed] * basis.length[basis.feed]))
    return CurrentSolution(coefficients=x, frequency=matrix.frequency, basis=basis,
                           excitation=excitation, image_ground=matrix.image_ground,
                           feed_current=i_feed, cond=float(cond), residual=res)


def solve_mesh(mesh, frequency: float, excitation: Excitation | None = None,
               options: AssemblyOptions | None = None) -> CurrentSolution:
    """Free-space solve of a full mesh at one frequency."""
    basis = build_basis(mesh)
    matrix = Assembler(basis, options).matrix(frequency)
    return solve(matrix, basis, excitation or Excitation())


def solve_image_ground(mesh, frequency: float, excitation: Excitation | None = None,
                       options: AssemblyOptions | None = None) -> CurrentSolution:
    """Solve an element-only mesh above an infinite perfect ground at ``z = 0``.

    Edges lying on the ground plane become half bases that carry the feed.
    """
    if mesh.vertices[:, 2].min() < -1e-9:
        raise ValueError("image-ground geometry must lie entirely in z >= 0")
    basis = build_basis(mesh, image_plane=True)
    matrix = Assembler(basis, options, image_ground=True).matrix(frequency)
    return solve(matrix, basis, excitation or Excitation())


def current_at(solution: CurrentSolution, bary: np.ndarray) -> np.ndarray:
    """Surface current density (A/m) at barycentric points of every triangle.

    Returns ``(T, n, 3)``.
    """
    mesh = solution.mesh
    a = solution.slot_coefficients()
    verts = mesh.corners * 1e-3
    area = mesh.areas() * 1e-6
    pts = np.einsum("nk,tkd->tnd", bary, verts)
    j = np.zeros(pts.shape, dtype=complex)
    good = area > 0
    for i in range(3):
        coef = np.zeros_like(area, dtype=complex)
        coef[good] = a[good, i] / (2 * area[good])
        j += coef[:, None, None] * (pts - verts[:, i][:, None, :])
    return j


def surface_current_map(solution: CurrentSolution) -> np.ndarray:
    """Magnitude of the surface current at each triangle centroid, A/m."""
    j = current_at(solution, np.full((1, 3), 1.0 / 3.0))[:, 0]
    return np.sqrt(np.sum(np.abs(j) ** 2, axis=1))
