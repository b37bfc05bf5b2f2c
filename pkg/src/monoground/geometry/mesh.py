"""Tagged triangle meshes with topology reporting and STL/OFF export."""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import Any

import numpy as np

TAG_METAL = 0
TAG_MASKED = 1
TAG_FEED = 2
TAG_NAMES = {TAG_METAL: "metal", TAG_MASKED: "masked", TAG_FEED: "feed-ring"}
TAG_CODES = {v: k for k, v in TAG_NAMES.items()}

PART_GROUND = 0
PART_ELEMENT = 1


def _readonly(a, dtype):
    a = np.ascontiguousarray(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class TriMesh:
    """Triangulated zero-thickness PEC surface, coordinates in mm.

    Attributes
    ----------
    vertices : (V, 3) float array
    triangles : (T, 3) int array
    tags : (T,) int array
        Region tag per triangle, one of ``TAG_METAL``, ``TAG_MASKED``,
        ``TAG_FEED``.
    parts : (T,) int array
        ``PART_GROUND`` or ``PART_ELEMENT``.  The delta-gap feed sits on the
        edges shared between the two parts.
    feed_edges : (F, 2) int array
        Vertex pairs of the feed ring, sorted within each row.
    spec : object
        The generating specification (provenance).
    edge_mm : float
        Target edge length used for generation.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    tags: np.ndarray
    parts: np.ndarray
    feed_edges: np.ndarray = field(default_factory=lambda: np.zeros((0, 2), int))
    spec: Any = None
    edge_mm: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "vertices", _readonly(self.vertices, np.float64))
        tri = np.asarray(self.triangles, dtype=np.int64).reshape(-1, 3)
        object.__setattr__(self, "triangles", _readonly(tri, np.int64))
        object.__setattr__(self, "tags", _readonly(self.tags, np.int8))
        object.__setattr__(self, "parts", _readonly(self.parts, np.int8))
        fe = np.sort(np.asarray(self.feed_edges, dtype=np.int64).reshape(-1, 2), axis=1)
        object.__setattr__(self, "feed_edges", _readonly(fe, np.int64))
        n = len(self.triangles)
        if self.vertices.ndim != 2 or self.vertices.shape[1] != 3:
            raise ValueError("vertices must have shape (V, 3)")
        if len(self.tags) != n or len(self.parts) != n:
            raise ValueError("tags and parts need one entry per triangle")
        if n and (self.triangles.min() < 0
                  or self.triangles.max() >= len(self.vertices)):
            raise ValueError("triangle index out of bounds")
        bad = set(np.unique(self.tags).tolist()) - set(TAG_NAMES)
        if bad:
            raise ValueError(f"unknown region tags {sorted(bad)}")

    # ------------------------------------------------------------------
    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    @property
    def corners(self) -> np.ndarray:
        """Triangle corner coordinates, shape ``(T, 3, 3)``."""
        return self.vertices[self.triangles]

    def areas(self) -> np.ndarray:
        c = self.corners
        return 0.5 * np.linalg.norm(np.cross(c[:, 1] - c[:, 0], c[:, 2] - c[:, 0]), axis=1)

    def normals(self) -> np.ndarray:
        c = self.corners
        n = np.cross(c[:, 1] - c[:, 0], c[:, 2] - c[:, 0])
        return n / np.linalg.norm(n, axis=1)[:, None]

    def centroids(self) -> np.ndarray:
        return self.corners.mean(axis=1)

    def min_angles(self) -> np.ndarray:
        """Smallest interior angle of every triangle, degrees."""
        c = self.corners
        out = np.full(len(c), np.inf)
        for i in range(3):
            a = c[:, (i + 1) % 3] - c[:, i]
            b = c[:, (i + 2) % 3] - c[:, i]
            cosang = np.einsum("nd,nd->n", a, b) / (
                np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1))
            out = np.minimum(out, np.degrees(np.arccos(np.clip(cosang, -1, 1))))
        return out

    def edges(self) -> np.ndarray:
        """Unique undirected edges, sorted, shape ``(E, 2)``."""
        t = self.triangles
        e = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        return np.unique(np.sort(e, axis=1), axis=0)

    def euler_characteristic(self, mask=None) -> int:
        tri = self.triangles if mask is None else self.triangles[mask]
        if len(tri) == 0:
            return 0
        e = np.concatenate([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]])
        n_e = len(np.unique(np.sort(e, axis=1), axis=0))
        n_v = len(np.unique(tri))
        return int(n_v - n_e + len(tri))

    def surface_area(self, tags=None) -> float:
        """Sum of triangle areas, optionally restricted to tag names/codes."""
        a = self.areas()
        if tags is None:
            return float(a.sum())
        if isinstance(tags, (str, int)):
            tags = [tags]
        codes = [TAG_CODES[t] if isinstance(t, str) else int(t) for t in tags]
        return float(a[np.isin(self.tags, codes)].sum())

    def report(self) -> dict:
        """Summary: counts, Euler characteristic, minimum angle, area by tag."""
        return {
            "V": int(len(np.unique(self.triangles))),
            "E": int(len(self.edges())),
            "F": int(self.n_triangles),
            "euler": self.euler_characteristic(),
            "min_angle_deg": float(self.min_angles().min()) if self.n_triangles else 0.0,
            "area_by_tag_mm2": {name: self.surface_area(code)
                                for code, name in TAG_NAMES.items()},
            "feed_edges": int(len(self.feed_edges)),
        }

    # ------------------------------------------------------------------
    def to_stl(self, header: bytes = b"monoground binary STL, units mm") -> bytes:
        """Binary STL of all non-masked triangles."""
        keep = self.tags != TAG_MASKED
        tri = self.triangles[keep]
        if len(tri) == 0:
            raise ValueError("cannot export an empty mesh")
        rec = np.zeros(len(tri), dtype=np.dtype([
            ("normal", "<f4", 3), ("v0", "<f4", 3), ("v1", "<f4", 3),
            ("v2", "<f4", 3), ("attr", "<u2")]))
        c = self.vertices[tri]
        n = np.cross(c[:, 1] - c[:, 0], c[:, 2] - c[:, 0])
        n /= np.linalg.norm(n, axis=1)[:, None]
        rec["normal"] = n
        rec["v0"], rec["v1"], rec["v2"] = c[:, 0], c[:, 1], c[:, 2]
        head = header[:80].ljust(80, b"\0")
        return head + struct.pack("<I", len(tri)) + rec.tobytes()

    def to_off(self) -> str:
        """Plain-text OFF listing; a fourth face column carries the tag."""
        lines = ["OFF", f"{len(self.vertices)} {self.n_triangles} 0"]
        lines += [f"{x:.9g} {y:.9g} {z:.9g}" for x, y, z in self.vertices]
        lines += [f"3 {a} {b} {c} {t}" for (a, b, c), t in zip(self.triangles, self.tags)]
        return "\n".join(lines) + "\n"


def read_stl(data: bytes) -> np.ndarray:
    """Parse binary STL bytes into a ``(T, 3, 3)`` float32 corner array."""
    if len(data) < 84:
        raise ValueError("truncated STL header")
    (count,) = struct.unpack_from("<I", data, 80)
    if len(data) != 84 + 50 * count:
        raise ValueError("STL size does not match triangle count")
    dt = np.dtype([("normal", "<f4", 3), ("v", "<f4", (3, 3)), ("attr", "<u2")])
    rec = np.frombuffer(data, dtype=dt, count=count, offset=84)
    return rec["v"].copy()


def weld(parts, tol=1e-6):
    """Merge vertex arrays of several meshes by coordinate matching.

    Parameters
    ----------
    parts : list of (vertices, triangles, tags, part_ids)
    tol : float
        Coordinates are snapped to a grid of this size before matching.

    Returns
    -------
    vertices, triangles, tags, part_ids
    """
    verts = np.concatenate([p[0] for p in parts])
    offs = np.cumsum([0] + [len(p[0]) for p in parts[:-1]])
    tris = np.concatenate([np.asarray(p[1]) + o for p, o in zip(parts, offs)])
    tags = np.concatenate([np.broadcast_to(p[2], (len(p[1]),)) for p in parts])
    pids = np.concatenate([np.broadcast_to(p[3], (len(p[1]),)) for p in parts])
    key = np.round(verts / tol).astype(np.int64)
    _, first, inverse = np.unique(key, axis=0, return_index=True, return_inverse=True)
    inverse = inverse.ravel()
    # keep the first occurrence order so that welding is deterministic
    order = np.argsort(first, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    new_verts = verts[first[order]]
    new_tris = rank[inverse][tris]
    good = ((new_tris[:, 0] != new_tris[:, 1]) & (new_tris[:, 1] != new_tris[:, 2])
            & (new_tris[:, 0] != new_tris[:, 2]))
    return new_verts, new_tris[good], tags[good], pids[good]
