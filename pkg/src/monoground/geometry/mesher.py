"""Unstructured surface meshers for flat domains and sphere patches.

Both meshers place points on graded lattices driven by a size field, keep
the caller's boundary vertices exactly (so that pieces weld together), and
triangulate with scipy: ``Delaunay`` in the plane, ``ConvexHull`` on the
sphere (the hull of points on a sphere is their spherical Delaunay
triangulation).
"""

from __future__ import annotations

import numpy as np
from scipy.spatial import ConvexHull, Delaunay, cKDTree


class MeshingError(RuntimeError):
    """A constraint could not be honoured by the triangulation."""


# ----------------------------------------------------------------------------
# curves
# ----------------------------------------------------------------------------

def resample(curve, size_fn, closed=False, min_segments=1, multiple=1):
    """Place vertices along a densely sampled curve with local spacing ``h``.

    Parameters
    ----------
    curve : (m, d) array
        Dense samples of the curve (for closed curves, without repeating the
        first point).
    size_fn : callable
        Maps ``(m, d)`` points to target spacing.
    closed : bool
    min_segments, multiple : int
        Lower bound on, and required divisor of, the segment count.

    Returns
    -------
    (n, d) array of vertices; closed curves return ``n`` = segment count.
    """
    pts = np.asarray(curve, dtype=float)
    if closed:
        pts = np.vstack([pts, pts[:1]])
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    mid = 0.5 * (pts[1:] + pts[:-1])
    dens = seg / size_fn(mid)
    cum = np.r_[0.0, np.cumsum(dens)]
    n = max(int(np.ceil(cum[-1] - 1e-9)), min_segments)
    n = int(np.ceil(n / multiple) * multiple)
    arc = np.r_[0.0, np.cumsum(seg)]
    targets = np.linspace(0.0, cum[-1], n + 1)
    s = np.interp(targets, cum, arc)
    out = np.stack([np.interp(s, arc, pts[:, k]) for k in range(pts.shape[1])], 1)
    return out[:-1] if closed else out


def loop_edges(start, n):
    i = np.arange(n)
    return np.stack([start + i, start + (i + 1) % n], 1)


def path_edges(start, n):
    i = np.arange(n - 1)
    return np.stack([start + i, start + i + 1], 1)


# ----------------------------------------------------------------------------
# geometry helpers
# ----------------------------------------------------------------------------

def inside_loops(points, loops):
    """Even-odd point-in-region test for a set of closed 2-D loops."""
    p = np.asarray(points, dtype=float)
    inside = np.zeros(len(p), dtype=bool)
    for loop in loops:
        a = np.asarray(loop, dtype=float)
        b = np.roll(a, -1, axis=0)
        y = p[:, 1][:, None]
        x = p[:, 0][:, None]
        crosses = (a[None, :, 1] > y) != (b[None, :, 1] > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = a[None, :, 0] + (y - a[None, :, 1]) * (b[None, :, 0] - a[None, :, 0]) / (
                b[None, :, 1] - a[None, :, 1])
        hit = crosses & (x < xint)
        inside ^= (np.count_nonzero(hit, axis=1) % 2).astype(bool)
    return inside


def segment_distance(points, seg_a, seg_b):
    """Distance from each point to the nearest of a set of segments."""
    p = points[:, None, :]
    a = seg_a[None]
    ab = (seg_b - seg_a)[None]
    t = np.einsum("psd,psd->ps", p - a, ab) / np.maximum(np.einsum("psd,psd->ps", ab, ab), 1e-300)
    t = np.clip(t, 0.0, 1.0)
    d = np.linalg.norm(p - (a + t[..., None] * ab), axis=2)
    return d.min(axis=1)


def _encroaching(points, seg_a, seg_b, factor=0.55):
    """Points lying inside the (slightly enlarged) diametral circle of a segment."""
    mid = 0.5 * (seg_a + seg_b)
    rad = factor * np.linalg.norm(seg_b - seg_a, axis=1)
    tree = cKDTree(points)
    bad = np.zeros(len(points), dtype=bool)
    for m, r in zip(mid, rad):
        bad[tree.query_ball_point(m, r)] = True
    return bad


def _chunked_segment_distance(points, seg_a, seg_b, chunk=2048):
    if len(seg_a) == 0:
        return np.full(len(points), np.inf)
    out = np.empty(len(points))
    for s in range(0, len(points), chunk):
        out[s:s + chunk] = segment_distance(points[s:s + chunk], seg_a, seg_b)
    return out


def _accept(candidates, levels, fixed, size, seg_a, seg_b, spacing=0.7, wall=0.45):
    """Greedy level-by-level thinning of lattice candidates."""
    if len(candidates) == 0:
        return np.zeros((0, fixed.shape[1]))
    h = size
    d_seg = _chunked_segment_distance(candidates, seg_a, seg_b)
    ok = d_seg >= wall * h
    if len(seg_a):
        ok &= ~_encroaching(candidates, seg_a, seg_b)
    if len(fixed):
        d_fix, _ = cKDTree(fixed).query(candidates)
        ok &= d_fix >= spacing * h
    accepted = []
    for lev in np.unique(levels):
        sel = np.flatnonzero(ok & (levels == lev))
        if not len(sel):
            continue
        if accepted:
            prev = np.concatenate(accepted)
            d, _ = cKDTree(prev).query(candidates[sel])
            sel = sel[d >= spacing * h[sel]]
        accepted.append(candidates[sel])
    return np.concatenate(accepted) if accepted else np.zeros((0, fixed.shape[1]))


def _level_spacings(h_bg, h_min):
    out = [h_bg]
    while out[-1] > h_min * 1.0001:
        out.append(out[-1] / 2)
    return out


def triangle_min_angles(pts, tris):
    c = pts[tris]
    out = np.full(len(tris), np.inf)
    for i in range(3):
        a = c[:, (i + 1) % 3] - c[:, i]
        b = c[:, (i + 2) % 3] - c[:, i]
        cosang = np.einsum("nd,nd->n", a, b) / (np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1))
        out = np.minimum(out, np.degrees(np.arccos(np.clip(cosang, -1, 1))))
    return out


def _edge_set(tris):
    e = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
    e = np.sort(e, axis=1)
    return set(map(tuple, e.tolist()))


def _missing(segments, tris):
    have = _edge_set(tris)
    seg = np.sort(segments, axis=1)
    return np.array([i for i, s in enumerate(map(tuple, seg.tolist())) if s not in have], dtype=int)


# ----------------------------------------------------------------------------
# planar mesher
# ----------------------------------------------------------------------------

def hex_lattice(lo, hi, s):
    """Hexagonal lattice of spacing ``s`` covering the box ``[lo, hi]``."""
    dy = s * np.sqrt(3) / 2
    ny = int(np.ceil((hi[1] - lo[1]) / dy)) + 1
    nx = int(np.ceil((hi[0] - lo[0]) / s)) + 2
    j, i = np.meshgrid(np.arange(ny), np.arange(nx), indexing="ij")
    x = lo[0] + s * (i + 0.5 * (j % 2)) - 0.25 * s
    y = lo[1] + dy * j + 0.25 * dy
    return np.stack([x.ravel(), y.ravel()], 1)


def mesh_planar(loops, size_fn, h_bg, polylines=(), h_min=None, smooth=3):
    """Triangulate a flat region bounded by closed loops.

    Parameters
    ----------
    loops : list of (n, 2) arrays
        Closed boundary loops (outer boundary and holes) with explicit
        vertices; the region is their even-odd interior.
    size_fn : callable
        Target edge length at ``(m, 2)`` points.
    h_bg : float
        Background (maximum) spacing.
    polylines : list of (n, 2) arrays
        Interior constraint paths whose vertices and edges must appear.  A
        polyline whose last vertex equals its first is treated as closed.
    h_min : float, optional
        Finest lattice spacing; defaults to the smallest boundary segment.
    smooth : int
        Laplacian smoothing passes applied to lattice points.

    Returns
    -------
    points : (V, 2) array
        Boundary vertices first, in the order given (loops, then polylines).
    triangles : (T, 3) int array, counter-clockwise.
    """
    fixed, segs = [], []
    off = 0
    for loop in loops:
        loop = np.asarray(loop, float)
        fixed.append(loop)
        segs.append(loop_edges(off, len(loop)))
        off += len(loop)
    for pl in polylines:
        pl = np.asarray(pl, float)
        closed = len(pl) > 2 and np.allclose(pl[0], pl[-1])
        if closed:
            pl = pl[:-1]
        fixed.append(pl)
        segs.append(loop_edges(off, len(pl)) if closed else path_edges(off, len(pl)))
        off += len(pl)
    fixed = np.concatenate(fixed)
    segs = np.concatenate(segs)
    seg_a, seg_b = fixed[segs[:, 0]], fixed[segs[:, 1]]
    if h_min is None:
        h_min = np.linalg.norm(seg_b - seg_a, axis=1).min()

    lo, hi = fixed.min(axis=0), fixed.max(axis=0)
    cands, levels = [], []
    for lev, s in enumerate(_level_spacings(h_bg, h_min)):
        pts = hex_lattice(lo, hi, s)
        pts = pts[inside_loops(pts, loops)]
        if not len(pts):
            continue
        h = size_fn(pts)
        upper = np.inf if lev == 0 else 2 * s
        sel = (h >= s) & (h < upper) if lev else h >= s
        if lev == len(_level_spacings(h_bg, h_min)) - 1:
            sel = h < upper
        cands.append(pts[sel])
        levels.append(np.full(sel.sum(), lev))
    cands = np.concatenate(cands) if cands else np.zeros((0, 2))
    levels = np.concatenate(levels) if levels else np.zeros(0, int)
    size = size_fn(cands) if len(cands) else np.zeros(0)
    free = _accept(cands, levels, fixed, size, seg_a, seg_b)

    nf = len(fixed)
    for attempt in range(4):
        pts = np.vstack([fixed, free])
        tris = _delaunay_inside(pts, loops)
        miss = _missing(segs, tris)
        if not len(miss):
            break
        # drop free points that crowd the unrecovered constraint segments
        bad = _encroaching(free, seg_a[miss], seg_b[miss], factor=0.75 + 0.25 * attempt) \
            if len(free) else np.zeros(0, bool)
        if not bad.any() and attempt:
            break
        free = free[~bad]
    if len(miss):
        raise MeshingError(f"{len(miss)} constraint edges missing from planar triangulation")

    for _ in range(smooth):
        if not len(free):
            break
        free = _laplace(pts, tris, nf, loops)
        pts = np.vstack([fixed, free])
        new = _delaunay_inside(pts, loops)
        if len(_missing(segs, new)):
            break
        tris = new
    return pts, tris


def _delaunay_inside(pts, loops):
    tri = Delaunay(pts, qhull_options="QJ Pp" if len(pts) < 4 else "Qbb Qc Qz Q12")
    t = tri.simplices
    cen = pts[t].mean(axis=1)
    t = t[inside_loops(cen, loops)]
    a = pts[t]
    cross = (a[:, 1, 0] - a[:, 0, 0]) * (a[:, 2, 1] - a[:, 0, 1]) - (
        a[:, 1, 1] - a[:, 0, 1]) * (a[:, 2, 0] - a[:, 0, 0])
    t = t[np.abs(cross) > 1e-12 * np.max(np.abs(cross))]
    flip = cross[np.abs(cross) > 1e-12 * np.max(np.abs(cross))] < 0
    t[flip] = t[flip][:, [0, 2, 1]]
    return t


def _laplace(pts, tris, nf, loops, relax=0.5):
    n = len(pts)
    e = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
    e = np.concatenate([e, e[:, ::-1]])
    acc = np.zeros_like(pts)
    cnt = np.zeros(n)
    np.add.at(acc, e[:, 0], pts[e[:, 1]])
    np.add.at(cnt, e[:, 0], 1)
    avg = acc / np.maximum(cnt, 1)[:, None]
    new = pts + relax * (avg - pts)
    moved = new[nf:]
    keep = inside_loops(moved, loops) & (cnt[nf:] > 0)
    moved[~keep] = pts[nf:][~keep]
    return moved


# ----------------------------------------------------------------------------
# sphere mesher
# ----------------------------------------------------------------------------

def fibonacci_sphere(n):
    """``n`` nearly uniform unit vectors on a golden-angle spiral."""
    i = np.arange(n) + 0.5
    z = 1 - 2 * i / n
    r = np.sqrt(np.maximum(0.0, 1 - z * z))
    phi = np.pi * (3 - np.sqrt(5)) * i
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], 1)


def mesh_sphere(center, radius, size_fn, h_bg, loops=(), keep_fn=None, h_min=None,
                smooth=3, candidate_fn=None):
    """Triangulate (part of) a sphere with constrained boundary loops.

    Parameters
    ----------
    center, radius : sphere definition (mm).
    size_fn : callable
        Target edge length at ``(m, 3)`` points.
    h_bg : float
        Background spacing.
    loops : list of (n, 3) arrays
        Closed constraint loops with vertices on the sphere.
    keep_fn : callable, optional
        ``keep_fn(centroids) -> bool`` selects facets to keep; lattice points
        are also generated only where it holds.  Defaults to all.
    candidate_fn : callable, optional
        Extra filter for lattice points (e.g. keep away from removed zones).

    Returns
    -------
    points : (V, 3) array, loop vertices first.
    triangles : (T, 3) int array, outward oriented.
    """
    center = np.asarray(center, float)
    keep_fn = keep_fn or (lambda c: np.ones(len(c), bool))
    fixed = np.concatenate([np.asarray(l, float) for l in loops]) if loops else np.zeros((0, 3))
    segs = []
    off = 0
    for l in loops:
        segs.append(loop_edges(off, len(l)))
        off += len(l)
    segs = np.concatenate(segs) if segs else np.zeros((0, 2), int)
    seg_a, seg_b = fixed[segs[:, 0]], fixed[segs[:, 1]]
    if h_min is None:
        h_min = np.linalg.norm(seg_b - seg_a, axis=1).min() if len(segs) else h_bg

    cands, levels = [], []
    spacings = _level_spacings(h_bg, h_min)
    for lev, s in enumerate(spacings):
        n = int(np.ceil(4 * np.pi * radius ** 2 / (s * s * np.sqrt(3) / 2)))
        pts = center + radius * fibonacci_sphere(n)
        pts = pts[keep_fn(pts)]
        if candidate_fn is not None and len(pts):
            pts = pts[candidate_fn(pts)]
        if not len(pts):
            continue
        h = size_fn(pts)
        if lev == 0:
            sel = h >= s
        elif lev == len(spacings) - 1:
            sel = h < 2 * s
        else:
            sel = (h >= s) & (h < 2 * s)
        cands.append(pts[sel])
        levels.append(np.full(sel.sum(), lev))
    cands = np.concatenate(cands) if cands else np.zeros((0, 3))
    levels = np.concatenate(levels) if levels else np.zeros(0, int)
    size = size_fn(cands) if len(cands) else np.zeros(0)
    free = _accept(cands, levels, fixed, size, seg_a, seg_b)

    nf = len(fixed)
    miss = np.zeros(0, int)
    for attempt in range(4):
        pts = np.vstack([fixed, free])
        tris = _hull(pts, center, keep_fn)
        miss = _missing(segs, tris) if len(segs) else np.zeros(0, int)
        if not len(miss):
            break
        bad = _encroaching(free, seg_a[miss], seg_b[miss], factor=0.75 + 0.25 * attempt) \
            if len(free) else np.zeros(0, bool)
        if not bad.any() and attempt:
            break
        free = free[~bad]
    if len(miss):
        raise MeshingError(f"{len(miss)} constraint edges missing from sphere triangulation")

    for _ in range(smooth):
        if not len(free):
            break
        moved = _laplace_sphere(pts, tris, nf, center, radius)
        ok = keep_fn(moved)
        if candidate_fn is not None:
            ok &= candidate_fn(moved)
        moved[~ok] = free[~ok]
        trial = np.vstack([fixed, moved])
        new = _hull(trial, center, keep_fn)
        if len(segs) and len(_missing(segs, new)):
            break
        free, pts, tris = moved, trial, new
    return pts, tris


def _hull(pts, center, keep_fn):
    hull = ConvexHull(pts)
    t = hull.simplices.copy()
    c = pts[t]
    nrm = np.cross(c[:, 1] - c[:, 0], c[:, 2] - c[:, 0])
    flip = np.einsum("nd,nd->n", nrm, c.mean(axis=1) - center) < 0
    t[flip] = t[flip][:, [0, 2, 1]]
    # facets spanning removed regions (large flat caps) are discarded here
    return t[keep_fn(pts[t].mean(axis=1))]


def _laplace_sphere(pts, tris, nf, center, radius, relax=0.5):
    n = len(pts)
    e = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
    e = np.concatenate([e, e[:, ::-1]])
    acc = np.zeros_like(pts)
    cnt = np.zeros(n)
    np.add.at(acc, e[:, 0], pts[e[:, 1]])
    np.add.at(cnt, e[:, 0], 1)
    avg = acc / np.maximum(cnt, 1)[:, None]
    new = pts + relax * (avg - pts)
    d = new - center
    new = center + radius * d / np.linalg.norm(d, axis=1)[:, None]
    moved = new[nf:]
    moved[cnt[nf:] == 0] = pts[nf:][cnt[nf:] == 0]
    return moved
