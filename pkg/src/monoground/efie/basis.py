"""Rao-Wilton-Glisson basis functions on tagged triangle meshes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from ..geometry.mesh import TAG_MASKED, TriMesh


@dataclass(frozen=True, eq=False)
class RwgBasisSet:
    """RWG functions attached to the interior edges of a mesh.

    Each basis ``n`` is ``+l_n`` times the slot ``(plus_tri, plus_vert)`` minus
    ``l_n`` times the slot ``(minus_tri, minus_vert)``; a slot on triangle ``t``
    with free local vertex ``i`` is ``(r - v_i) / (2 A_t)``.  Half bases (used
    at the image plane) have ``plus_tri == -1``.

    Attributes
    ----------
    mesh : TriMesh
    edges : (N, 2) int array
        Vertex indices of each basis edge (sorted).
    length : (N,) float array
        Edge length in metres.
    plus_tri, plus_vert, minus_tri, minus_vert : (N,) int arrays
    feed : (N,) bool array
        Bases crossing the delta-gap ring.
    """

    mesh: TriMesh
    edges: np.ndarray
    length: np.ndarray
    plus_tri: np.ndarray
    plus_vert: np.ndarray
    minus_tri: np.ndarray
    minus_vert: np.ndarray
    feed: np.ndarray

    @property
    def n(self) -> int:
        return len(self.length)

    @property
    def feed_index(self) -> np.ndarray:
        return np.flatnonzero(self.feed)

    def slot_matrix(self) -> sparse.csr_matrix:
        """Sparse ``(N, 3T)`` map from slot coefficients to bases."""
        n = self.n
        rows, cols, vals = [], [], []
        full = self.plus_tri >= 0
        rows.append(np.flatnonzero(full))
        cols.append(3 * self.plus_tri[full] + self.plus_vert[full])
        vals.append(self.length[full])
        rows.append(np.arange(n))
        cols.append(3 * self.minus_tri + self.minus_vert)
        vals.append(-self.length)
        return sparse.csr_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(n, 3 * self.mesh.n_triangles))


def _edge_slots(tri):
    """(edge key, triangle, local free vertex) for every triangle edge."""
    t = np.arange(len(tri))
    recs = []
    for i in range(3):
        a = tri[:, (i + 1) % 3]
        b = tri[:, (i + 2) % 3]
        recs.append(np.stack([np.minimum(a, b), np.maximum(a, b), t,
                              np.full_like(t, i)], axis=1))
    return np.concatenate(recs)


def build_basis(mesh: TriMesh, image_plane: bool = False,
                z_tol_mm: float = 1e-6) -> RwgBasisSet:
    """Build the RWG basis set of ``mesh``.

    Masked triangles carry no bases.  An edge shared by ``n >= 3`` triangles
    (a junction) gets ``n - 1`` bases pairing the lowest-index triangle with
    each of the others.  On feed edges the ground-part triangle is the plus
    side so positive current flows from the ground onto the element.

    With ``image_plane=True`` boundary edges lying on ``z = 0`` receive half
    bases whose current continues into the mirror image; these form the feed.
    """
    tri = mesh.triangles
    live = mesh.tags != TAG_MASKED
    recs = _edge_slots(tri)
    recs = recs[live[recs[:, 2]]]
    order = np.lexsort((recs[:, 2], recs[:, 1], recs[:, 0]))
    recs = recs[order]
    keys = recs[:, 0] * (len(mesh.vertices) + 1) + recs[:, 1]
    starts = np.flatnonzero(np.r_[True, keys[1:] != keys[:-1]])
    ends = np.r_[starts[1:], len(recs)]

    feed_keys = set(map(tuple, mesh.feed_edges.tolist()))
    parts = mesh.parts
    verts = mesh.vertices
    edges, pt, pv, mt, mv, feed = [], [], [], [], [], []
    for s, e in zip(starts, ends):
        group = recs[s:e]
        key = (int(group[0, 0]), int(group[0, 1]))
        count = e - s
        if count == 1:
            if image_plane and np.all(np.abs(verts[list(key), 2]) <= z_tol_mm):
                edges.append(key)
                pt.append(-1)
                pv.append(0)
                mt.append(group[0, 2])
                mv.append(group[0, 3])
                feed.append(True)
            continue
        is_feed = key in feed_keys
        if is_feed:
            # ground side first, stable within equal part ids
            group = group[np.argsort(parts[group[:, 2]], kind="stable")]
        for other in group[1:]:
            edges.append(key)
            pt.append(group[0, 2])
            pv.append(group[0, 3])
            mt.append(other[2])
            mv.append(other[3])
            feed.append(is_feed)
    if not edges:
        raise ValueError("mesh has no interior edges; no basis functions")
    edges = np.array(edges, dtype=np.int64)
    length = np.linalg.norm(verts[edges[:, 1]] - verts[edges[:, 0]], axis=1) * 1e-3
    return RwgBasisSet(mesh=mesh, edges=edges, length=length,
                       plus_tri=np.array(pt, dtype=np.int64),
                       plus_vert=np.array(pv, dtype=np.int64),
                       minus_tri=np.array(mt, dtype=np.int64),
                       minus_vert=np.array(mv, dtype=np.int64),
                       feed=np.array(feed, dtype=bool))
