"""Galerkin EFIE matrix assembly over RWG bases."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import constants

from . import kernels
from .basis import RwgBasisSet
from .quadrature import map_points, triangle_rule

MU0 = constants.mu_0
EPS0 = constants.epsilon_0
MIRROR = np.array([1.0, 1.0, -1.0])


class AssemblyError(RuntimeError):
    """Raised when the system matrix contains non-finite entries."""


@dataclass(frozen=True)
class AssemblyOptions:
    """Quadrature and partitioning controls.

    Orders are polynomial degrees of the triangle rules: degree 2 is the
    3-point rule and degree 5 the 7-point rule.  A triangle pair is *near*
    when its centroid distance is below ``near_factor`` times the larger
    of the two triangles' longest edges; near pairs get singularity
    extraction with the analytic static potential.
    """

    regular_order: int = 2
    near_outer_order: int = 5
    near_inner_order: int = 5
    near_factor: float = 2.0
    block_size: int = 48
    workers: int = 1

    def doubled(self) -> "AssemblyOptions":
        return AssemblyOptions(
            regular_order=2 * self.regular_order,
            near_outer_order=2 * self.near_outer_order,
            near_inner_order=2 * self.near_inner_order,
            near_factor=self.near_factor, block_size=self.block_size,
            workers=self.workers)


@dataclass(frozen=True, eq=False)
class SystemMatrix:
    """Dense impedance matrix at one frequency."""

    z: np.ndarray
    frequency: float
    image_ground: bool
    options: AssemblyOptions
    metadata: dict = field(default_factory=dict)


class Assembler:
    """Frequency-independent geometry cache for one basis set.

    Parameters
    ----------
    basis : RwgBasisSet
    options : AssemblyOptions, optional
    image_ground : bool
        Add the mirror image in the perfect ground plane ``z = 0``.
    """

    def __init__(self, basis: RwgBasisSet, options: AssemblyOptions | None = None,
                 image_ground: bool = False):
        self.basis = basis
        self.options = options or AssemblyOptions()
        self.image_ground = image_ground
        mesh = basis.mesh
        if image_ground and mesh.vertices[:, 2].min() < -1e-9:
            raise ValueError("image-ground mode needs geometry entirely in z >= 0")

        used = np.unique(np.concatenate([basis.plus_tri[basis.plus_tri >= 0],
                                         basis.minus_tri]))
        self.tri_index = used
        local = np.full(mesh.n_triangles, -1, dtype=np.int64)
        local[used] = np.arange(len(used))
        cmat = basis.slot_matrix().tocsc()
        cols = (3 * used[:, None] + np.arange(3)).ravel()
        self.cmat = cmat[:, cols].tocsr()
        self.cmat_t = self.cmat.T.tocsr()

        self.verts = mesh.corners[used] * 1e-3
        v = self.verts
        self.centroid = v.mean(axis=1)
        edge_len = np.linalg.norm(v - np.roll(v, 1, axis=1), axis=2)
        self.size = edge_len.max(axis=1)

        o = self.options
        self.reg_bary, self.reg_w = triangle_rule(o.regular_order)
        self.out_bary, self.out_w = triangle_rule(o.near_outer_order)
        self.in_bary, self.in_w = triangle_rule(o.near_inner_order)
        self.reg_pts = map_points(v, self.reg_bary)
        if image_ground:
            self.img_verts = v * MIRROR
            self.img_pts = self.reg_pts * MIRROR
            self.img_centroid = self.centroid * MIRROR

        n_tri = len(used)
        self.blocks = [np.arange(s, min(s + o.block_size, n_tri))
                       for s in range(0, n_tri, o.block_size)]

    @property
    def n(self) -> int:
        return self.basis.n

    def _near_pairs(self, block, centroids):
        d = np.linalg.norm(self.centroid[block, None, :] - centroids[None], axis=2)
        lim = self.options.near_factor * np.maximum(self.size[block, None], self.size[None])
        bi, s = np.nonzero(d < lim)
        return block[bi], s

    def _near_values(self, t, s, src_verts, k, c_a, c_phi):
        """Near slot blocks computed with the lower triangle index as test.

        Reusing the same orientation for ``(t, s)`` and ``(s, t)`` keeps the
        assembled matrix exactly symmetric.
        """
        swap = t > s
        a = np.where(swap, s, t)
        b = np.where(swap, t, s)
        test = self.verts[a]
        src = src_verts[b]
        vals = kernels.near_slot_block(test, src, self.out_bary, self.out_w,
                                       self.in_bary, self.in_w, k, c_a, c_phi)
        vals[swap] = np.transpose(vals[swap], (0, 2, 1))
        return vals

    def _block_slots(self, block, k, c_a, c_phi):
        zs = kernels.regular_slot_block(
            self.reg_pts[block], self.reg_w, self.verts[block],
            self.reg_pts, self.reg_w, self.verts, k, c_a, c_phi)
        t, s = self._near_pairs(block, self.centroid)
        if len(t):
            vals = self._near_values(t, s, self.verts, k, c_a, c_phi)
            _scatter(zs, t - block[0], s, vals)
        if self.image_ground:
            zi = kernels.regular_slot_block(
                self.reg_pts[block], self.reg_w, self.verts[block],
                self.img_pts, self.reg_w, self.img_verts, k, c_a, c_phi)
            t, s = self._near_pairs(block, self.img_centroid)
            if len(t):
                vals = self._near_values(t, s, self.img_verts, k, c_a, c_phi)
                _scatter(zi, t - block[0], s, vals)
            zs -= zi
        return zs

    def _block_rows(self, block, k, c_a, c_phi):
        zs = self._block_slots(block, k, c_a, c_phi)
        w = (self.cmat @ zs.T).T                      # (3B, N)
        cb = self.cmat[:, 3 * block[0]:3 * (block[-1] + 1)]
        rows = np.unique(cb.nonzero()[0])
        return rows, cb[rows] @ w

    def matrix(self, frequency: float) -> SystemMatrix:
        """Assemble the ``N x N`` impedance matrix at ``frequency`` (Hz)."""
        omega = 2 * np.pi * frequency
        k = omega * np.sqrt(MU0 * EPS0)
        c_a = 1j * omega * MU0 / 4.0
        c_phi = 1.0 / (1j * omega * EPS0)
        z = np.zeros((self.n, self.n), dtype=complex)
        work = (lambda b: self._block_rows(b, k, c_a, c_phi))
        if self.options.workers > 1:
            with ThreadPoolExecutor(self.options.workers) as pool:
                parts = pool.map(work, self.blocks)
                for rows, vals in parts:
                    z[rows] += vals
        else:
            for b in self.blocks:
                rows, vals = work(b)
                z[rows] += vals
        if not np.all(np.isfinite(z)):
            bad = np.argwhere(~np.isfinite(z))[0]
            raise AssemblyError(f"non-finite matrix entry at basis pair {tuple(bad)}")
        return SystemMatrix(z=z, frequency=frequency, image_ground=self.image_ground,
                            options=self.options,
                            metadata={"backend": kernels.BACKEND,
                                      "n": self.n, "triangles": len(self.tri_index)})


def _scatter(zs, t_local, s, vals):
    """Write ``(P, 3, 3)`` pair blocks into a ``(3B, 3S)`` slot matrix."""
    r = 3 * t_local[:, None, None] + np.arange(3)[None, :, None]
    c = 3 * s[:, None, None] + np.arange(3)[None, None, :]
    zs[r, c] = vals


def assemble(basis: RwgBasisSet, frequency: float,
             options: AssemblyOptions | None = None,
             image_ground: bool = False) -> SystemMatrix:
    """One-shot assembly; prefer :class:`Assembler` for frequency sweeps."""
    return Assembler(basis, options, image_ground).matrix(frequency)
