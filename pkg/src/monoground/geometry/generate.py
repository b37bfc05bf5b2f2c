"""Build tagged meshes of the coax-fed monopole on every ground-plane family.

Coordinates are mm.  The mount aperture is centred on the z axis, the
element runs up the axis from ``z = 0`` and the feed ring is the element's
base ring.  Ground pieces are generated with shared boundary vertices and
then welded.
"""

from __future__ import annotations

import warnings

import numpy as np
from scipy import constants
from scipy.spatial import cKDTree

from .mesh import (PART_ELEMENT, PART_GROUND, TAG_FEED, TAG_MASKED, TAG_METAL,
                   TriMesh, weld)
from .mesher import fibonacci_sphere, inside_loops, mesh_planar, mesh_sphere, resample
from .primitives import orient, revolve, ring, stitch_rings
from .specs import (CoaxModel, EdgeMountedSphere, FinSphere, GeometryError, GroundPlaneSpec,
                    Planar, PlanarWithCone, PlanarWithDish, PlanarWithHorn, RibbedPlanar,
                    RingedSphere, SlottedSphere, Sphere, SpikedSphere)

MIN_ANGLE_DEG = 5.0
MAX_TRIANGLES = 20000
GRADING = 0.3          # growth of the target edge length per mm away from features
_ASPECT = np.tan(np.radians(5.5))


class SizeField:
    """Target edge length ``min(h_max, h0 + g * distance)`` over point sources."""

    def __init__(self, h_max: float, grading: float = GRADING):
        self.h_max = float(h_max)
        self.grading = grading
        self._sources = []

    def add(self, points, h0, grading=None):
        g = self.grading if grading is None else grading
        self._sources.append((cKDTree(np.atleast_2d(points)), float(h0), g))

    def __call__(self, p):
        p = np.atleast_2d(p)
        h = np.full(len(p), self.h_max)
        for tree, h0, g in self._sources:
            d, _ = tree.query(p)
            h = np.minimum(h, h0 + g * d)
        return h


# ----------------------------------------------------------------------------
# curve helpers
# ----------------------------------------------------------------------------

def _segment(a, b, size, cap=None, n=256):
    t = np.linspace(0.0, 1.0, n)[:, None]
    pts = (1 - t) * np.asarray(a, float) + t * np.asarray(b, float)
    fn = size if cap is None else (lambda p: np.minimum(size(p), cap))
    return resample(pts, fn)


def _chain(pieces):
    """Join open polylines end to start into one closed loop."""
    out = [p[:-1] for p in pieces]
    return np.concatenate(out)


def _polygon(corners, size, cap=None):
    corners = np.asarray(corners, float)
    n = len(corners)
    return _chain([_segment(corners[i], corners[(i + 1) % n], size, cap) for i in range(n)])


def _circle(radius, z, size, phase=0.0, center=(0.0, 0.0), min_n=6):
    """Horizontal circle with an even vertex count following the size field."""
    probe = ring(radius, z, 64, phase, center)
    h = size(probe).min()
    n = max(min_n, int(np.ceil(2 * np.pi * radius / h)))
    n += n % 2
    return ring(radius, z, n, phase, center)


def _lift(pts2, z=0.0):
    return np.column_stack([pts2, np.full(len(pts2), z)])


def _planar_piece(loops3, polylines3, frame, size, h_bg):
    """Mesh a flat region given 3-D boundary vertices lying in ``frame``.

    ``frame`` is ``(origin, e1, e2)``; vertices are returned in 3-D.
    """
    o, e1, e2 = (np.asarray(v, float) for v in frame)

    def to2(p):
        d = np.asarray(p) - o
        return np.column_stack([d @ e1, d @ e2])

    def to3(q):
        return o + q[:, :1] * e1 + q[:, 1:2] * e2

    loops = [to2(l) for l in loops3]
    polys = [to2(p) for p in polylines3]
    pts, tris = mesh_planar(loops, lambda q: size(to3(q)), h_bg, polylines=polys)
    return to3(pts), tris


def _strip(a, b):
    """Triangles between two polylines with equal vertex counts."""
    n = len(a)
    verts = np.concatenate([a, b])
    k = np.arange(n - 1)
    tris = np.concatenate([np.stack([k, k + 1, n + k + 1], 1), np.stack([k, n + k + 1, n + k], 1)])
    return verts, tris


def _octagon(radius, n, z=0.0):
    return ring(radius, z, n)


# ----------------------------------------------------------------------------
# ground builders; each returns (pieces, mount_ring)
# pieces: list of (vertices, triangles, tags)
# ----------------------------------------------------------------------------

def _plate_with(spec, coax, size, h_bg, n_hole, inner_polylines=()):
    half = spec.side / 2
    corners = np.array([[-half, -half, 0], [half, -half, 0], [half, half, 0], [-half, half, 0]])
    outer = _polygon(corners, size)
    hole = _octagon(coax.hole_radius, n_hole)
    frame = ((0, 0, 0), (1, 0, 0), (0, 1, 0))
    v, t = _planar_piece([outer, hole], inner_polylines, frame, size, h_bg)
    return (v, t, TAG_METAL), hole


def _ground_planar(spec: Planar, coax, size, h_bg, n_hole):
    piece, hole = _plate_with(spec, coax, size, h_bg, n_hole)
    return [piece], hole


def _ground_ribbed(spec: RibbedPlanar, coax, size, h_bg, n_hole):
    half, w, H = spec.side / 2, spec.rib_width, spec.rib_height
    # rib tops are structured strips of width w; keep their triangles above 5 deg
    cap = min(h_bg, 0.9 * w / _ASPECT)
    pieces = []
    ribs = []
    for xc in spec.rib_centers():
        ys = _segment((xc, -half, 0), (xc, half, 0), size, cap=cap)[:, 1]
        ribs.append((xc, ys))
    hole = _octagon(coax.hole_radius, n_hole)
    frame = ((0, 0, 0), (1, 0, 0), (0, 1, 0))
    edges_x = [-half] + [v for xc, _ in ribs for v in (xc - w / 2, xc + w / 2)] + [half]
    for j in range(len(ribs) + 1):
        x0, x1 = edges_x[2 * j], edges_x[2 * j + 1]
        bottom = _segment((x0, -half, 0), (x1, -half, 0), size)
        top = _segment((x1, half, 0), (x0, half, 0), size)
        if j < len(ribs):
            right = np.column_stack([np.full(len(ribs[j][1]), x1), ribs[j][1], np.zeros(len(ribs[j][1]))])
        else:
            right = _segment((x1, -half, 0), (x1, half, 0), size)
        if j > 0:
            ys = ribs[j - 1][1][::-1]
            left = np.column_stack([np.full(len(ys), x0), ys, np.zeros(len(ys))])
        else:
            left = _segment((x0, half, 0), (x0, -half, 0), size)
        loop = _chain([bottom, right, top, left])
        loops = [loop]
        if x0 < 0 < x1:
            loops.append(hole)
        v, t = _planar_piece(loops, [], frame, size, h_bg)
        pieces.append((v, t, TAG_METAL))
    for xc, ys in ribs:
        n = len(ys)
        zero, full = np.zeros(n), np.full(n, H)
        lb = np.column_stack([np.full(n, xc - w / 2), ys, zero])
        lt = np.column_stack([np.full(n, xc - w / 2), ys, full])
        rb = np.column_stack([np.full(n, xc + w / 2), ys, zero])
        rt = np.column_stack([np.full(n, xc + w / 2), ys, full])
        parts = [_strip(lb, lt), _strip(rb, rt), _strip(lt, rt)]
        for y in (-half, half):
            quad = np.array([[xc - w / 2, y, 0], [xc + w / 2, y, 0], [xc + w / 2, y, H],
                             [xc - w / 2, y, H]])
            parts.append((quad, np.array([[0, 1, 2], [0, 2, 3]])))
        for v, t in parts:
            c = v[t].mean(axis=1)
            ref = np.column_stack([np.full(len(c), xc), np.clip(c[:, 1], -half + w, half - w),
                                   np.full(len(c), H / 2)])
            pieces.append((v, orient(v, t, ref), TAG_METAL))
    return pieces, hole


def _ground_dish(spec: PlanarWithDish, coax, size, h_bg, n_hole):
    junction = _circle(spec.throat_radius, 0.0, size)
    plate, hole = _plate_with(spec, coax, size, h_bg, n_hole,
                              inner_polylines=[np.vstack([junction, junction[:1]])])
    R = spec.parent_radius
    zc = R - spec.throat_sag
    rim_z = spec.rim_height
    rim = _circle(spec.rim_radius, rim_z, size)
    tol = 1e-6 * R

    def keep(c):
        return (c[:, 2] > tol) & (c[:, 2] < rim_z - tol) & (c[:, 2] < zc + tol)

    v, t = mesh_sphere((0, 0, zc), R, size, h_bg, loops=[junction, rim], keep_fn=keep)
    return [plate, (v, t, TAG_METAL)], hole


def _ground_horn(spec: PlanarWithHorn, coax, size, h_bg, n_hole):
    lo, up, H = spec.lower_length / 2, spec.upper_length / 2, spec.height
    sq = np.array([[-1, -1], [1, -1], [1, 1], [-1, 1]], float)
    lower_c = _lift(lo * sq)
    upper_c = _lift(up * sq, H)
    sides_lo = [_segment(lower_c[i], lower_c[(i + 1) % 4], size) for i in range(4)]
    sides_up = [_segment(upper_c[i], upper_c[(i + 1) % 4], size) for i in range(4)]
    corner = [_segment(lower_c[i], upper_c[i], size) for i in range(4)]
    lower_loop = _chain(sides_lo)
    plate, hole = _plate_with(spec, coax, size, h_bg, n_hole,
                              inner_polylines=[np.vstack([lower_loop, lower_loop[:1]])])
    pieces = [plate]
    for i in range(4):
        j = (i + 1) % 4
        loop = _chain([sides_lo[i], corner[j], sides_up[i][::-1], corner[i][::-1]])
        e1 = lower_c[j] - lower_c[i]
        e1 /= np.linalg.norm(e1)
        mid_lo = 0.5 * (lower_c[i] + lower_c[j])
        mid_up = 0.5 * (upper_c[i] + upper_c[j])
        e2 = mid_up - mid_lo
        e2 -= (e2 @ e1) * e1
        e2 /= np.linalg.norm(e2)
        v, t = _planar_piece([loop], [], (mid_lo, e1, e2), size, h_bg)
        c = v[t].mean(axis=1)
        ref = np.column_stack([np.zeros((len(c), 2)), c[:, 2]])
        pieces.append((v, orient(v, t, ref), TAG_METAL))
    return pieces, hole


def _ground_cone(spec: PlanarWithCone, coax, size, h_bg, n_hole):
    r0, r1, H = spec.throat_radius, spec.cone_radius, spec.cone_height
    junction = _circle(r0, 0.0, size)
    plate, hole = _plate_with(spec, coax, size, h_bg, n_hole,
                              inner_polylines=[np.vstack([junction, junction[:1]])])
    # the frustum is developable: mesh each half in its unrolled sector
    slant = np.hypot(r1 - r0, H)
    sin_a, cos_a = (r1 - r0) / slant, H / slant
    s0 = r0 / sin_a
    top = _circle(r1, H, size)
    gen = _segment((r0, 0, 0), (r1, 0, H), size)
    s_gen = s0 + np.linalg.norm(gen - gen[0], axis=1)
    pieces = [plate]
    for half in range(2):
        mid = (half + 0.5) * np.pi

        def to3(q, mid=mid):
            s = np.hypot(q[:, 0], q[:, 1])
            phi = mid + np.arctan2(q[:, 1], q[:, 0]) / sin_a
            rho = s * sin_a
            return np.column_stack([rho * np.cos(phi), rho * np.sin(phi), (s - s0) * cos_a])

        def to2(s, phi, mid=mid):
            psi = (np.asarray(phi) - mid) * sin_a
            return np.column_stack([s * np.cos(psi), s * np.sin(psi)])

        nj, nt = len(junction) // 2, len(top) // 2
        a0, a1 = mid - np.pi / 2, mid + np.pi / 2
        inner = to2(np.full(nj + 1, s0), np.linspace(a0, a1, nj + 1))
        outer = to2(np.full(nt + 1, s0 + slant), np.linspace(a1, a0, nt + 1))
        seam1 = to2(s_gen, np.full(len(s_gen), a1))
        seam0 = to2(s_gen[::-1], np.full(len(s_gen), a0))
        loop = _chain([inner, seam1, outer, seam0])
        pts, tris = mesh_planar([loop], lambda q: size(to3(q)), h_bg)
        v = to3(pts)
        c = v[tris].mean(axis=1)
        ref = np.column_stack([np.zeros((len(c), 2)), c[:, 2]])
        pieces.append((v, orient(v, tris, ref), TAG_METAL))
    return pieces, hole


def _hole_removed(hole_xy, z_min):
    def keep(c):
        return ~(inside_loops(c[:, :2], [hole_xy]) & (c[:, 2] > z_min))
    return keep


def _sphere_hole(R, coax, n_hole):
    """Mount aperture loop on a sphere of radius ``R`` centred at ``(0, 0, -R)``."""
    r = coax.hole_radius
    return ring(r, -R + np.sqrt(R * R - r * r), n_hole)


def _ground_sphere(spec: Sphere, coax, size, h_bg, n_hole):
    R = spec.radius
    hole = _sphere_hole(R, coax, n_hole)
    keep = _hole_removed(hole[:, :2], -R)
    v, t = mesh_sphere((0, 0, -R), R, size, h_bg, loops=[hole], keep_fn=keep)
    return [(v, t, TAG_METAL)], hole


def _slot_frames(spec):
    phi = 2 * np.pi * np.arange(spec.slot_count) / spec.slot_count
    m = np.column_stack([np.cos(phi), np.sin(phi), np.zeros_like(phi)])
    n = np.column_stack([-np.sin(phi), np.cos(phi), np.zeros_like(phi)])
    return m, n


def _slot_loop(spec, m, n, center, size):
    R, hw = spec.radius, spec.slot_width / 2
    a0, a1 = spec.slot_start / R, (spec.slot_start + spec.slot_length) / R
    z_hat = np.array([0.0, 0.0, 1.0])
    k = 200

    def side(c, alpha_from, alpha_to):
        rc = np.sqrt(R * R - c * c)
        b = np.arccos(np.clip(R * np.cos(np.linspace(alpha_from, alpha_to, k)) / rc, -1, 1))
        return c * n + rc * (np.sin(b)[:, None] * m + np.cos(b)[:, None] * z_hat)

    def end(alpha, lat_from, lat_to):
        zeta = R * np.cos(alpha)
        rho = np.sqrt(R * R - zeta * zeta)
        psi = np.arcsin(np.linspace(lat_from, lat_to, k) / rho)
        return zeta * z_hat + rho * (np.cos(psi)[:, None] * m + np.sin(psi)[:, None] * n)

    pieces = [side(-hw, a0, a1), end(a1, -hw, hw), side(hw, a1, a0), end(a0, hw, -hw)]
    return _chain([resample(p + center, size) for p in pieces])


def _in_slots(spec, center):
    ms, ns = _slot_frames(spec)
    R, hw = spec.radius, spec.slot_width / 2
    zlo = R * np.cos((spec.slot_start + spec.slot_length) / R)
    zhi = R * np.cos(spec.slot_start / R)

    def test(c):
        d = c - center
        p = R * d / np.linalg.norm(d, axis=1)[:, None]
        out = np.zeros(len(c), bool)
        for m, n in zip(ms, ns):
            out |= (np.abs(p @ n) < hw) & (p @ m > 0) & (p[:, 2] > zlo) & (p[:, 2] < zhi)
        return out
    return test


def _ground_slotted(spec: SlottedSphere, coax, size, h_bg, n_hole):
    R = spec.radius
    center = np.array([0.0, 0.0, -R])
    hole = _sphere_hole(R, coax, n_hole)
    loops = [hole] + [_slot_loop(spec, m, n, center, size) for m, n in zip(*_slot_frames(spec))]
    keep = _hole_removed(hole[:, :2], -R)
    v, t = mesh_sphere(center, R, size, h_bg, loops=loops, keep_fn=keep)
    tags = np.where(_in_slots(spec, center)(v[t].mean(axis=1)), TAG_MASKED, TAG_METAL)
    return [(v, t, tags)], hole


def _ground_ringed(spec: RingedSphere, coax, size, h_bg, n_hole):
    R = spec.radius
    center = np.array([0.0, 0.0, -R])
    hole = _sphere_hole(R, coax, n_hole)
    loops = [hole]
    for a, b in spec.bands():
        for s in (a, b):
            loops.append(_circle(R * np.sin(s / R), -R + R * np.cos(s / R), size))
    keep = _hole_removed(hole[:, :2], -R)
    v, t = mesh_sphere(center, R, size, h_bg, loops=loops, keep_fn=keep)
    d = v[t].mean(axis=1) - center
    geo = R * np.arccos(np.clip(d[:, 2] / np.linalg.norm(d, axis=1), -1, 1))
    masked = np.zeros(len(t), bool)
    for a, b in spec.bands():
        masked |= (geo > a) & (geo < b)
    return [(v, t, np.where(masked, TAG_MASKED, TAG_METAL))], hole


COLLAR_MIN_HEIGHT = 1.5
COLLAR_COLUMNS = 3      # collar columns per element facet


def _ground_edge(spec: EdgeMountedSphere, coax, size, h_bg, n_hole):
    R = spec.radius
    d = R - spec.mount_offset
    # the aperture cuts a steep part of the sphere, so the collar ring is finer
    n_col = COLLAR_COLUMNS * n_hole
    oct_xy = _octagon(coax.hole_radius, n_col)[:, :2]
    surf = np.sqrt(R * R - (oct_xy[:, 0] + d) ** 2 - oct_xy[:, 1] ** 2)
    zc = COLLAR_MIN_HEIGHT - surf.min()
    center = np.array([-d, 0.0, zc])
    loop = np.column_stack([oct_xy, zc + surf])
    seg = np.linalg.norm(np.diff(np.vstack([loop, loop[:1]]), axis=0), axis=1)
    size.add(loop, np.median(seg))
    keep = _hole_removed(oct_xy, zc)
    v, t = mesh_sphere(center, R, size, h_bg, loops=[loop], keep_fn=keep)
    # collar: vertical sleeve from the aperture ring at z=0 up to the sphere,
    # meshed in unrolled (arc length, z) coordinates as two halves
    base = _lift(oct_xy)
    r = coax.hole_radius
    heights = loop[:, 2]
    u_col = r * 2 * np.pi * np.arange(n_col + 1) / n_col

    def to3(q):
        phi = q[:, 0] / r
        return np.column_stack([r * np.cos(phi), r * np.sin(phi), q[:, 1]])

    seams = {}
    for c in (0, n_col // 2):
        line = _segment((r, 0, 0), (r, 0, heights[c]), size)
        seams[c] = line[:, 2]
    pieces = [(v, t, TAG_METAL)]
    half = n_col // 2
    for lo in (0, half):
        hi = lo + half
        cols = np.arange(lo, hi + 1)
        bottom = np.column_stack([u_col[cols], np.zeros(len(cols))])
        top = np.column_stack([u_col[cols], heights[cols % n_col]])[::-1]
        right = np.column_stack([np.full(len(seams[hi % n_col]), u_col[hi]), seams[hi % n_col]])
        left = np.column_stack([np.full(len(seams[lo]), u_col[lo]), seams[lo]])[::-1]
        ring2 = _chain([bottom, right, top, left])
        pts, tris = mesh_planar([ring2], lambda q: size(to3(q)), h_bg)
        cv = to3(pts)
        c = cv[tris].mean(axis=1)
        ref = np.column_stack([np.zeros((len(c), 2)), c[:, 2]])
        pieces.append((cv, orient(cv, tris, ref), TAG_METAL))
    return pieces, base


def _ground_fins(spec: FinSphere, coax, size, h_bg, n_hole):
    R, rc, N = spec.envelope_radius, spec.core_radius, spec.fin_count
    zc = -np.sqrt(R * R - rc * rc)
    z_bot = 2 * zc
    n_core = 2 * N
    while 2 * np.pi * rc / n_core > size(np.array([[rc, 0, 0]]))[0] * 1.2:
        n_core += N
    w = 2 * rc * np.sin(np.pi / n_core)
    line = _segment((rc, 0, 0), (rc, 0, z_bot), size, cap=w / _ASPECT)
    zs = line[:, 2]
    step = n_core // N
    pieces = []
    core_rings = [ring(rc, z, n_core) for z in zs]
    # core cylinder, traversed upward for outward normals
    cv, ct, off = [], [], 0
    for k in range(len(zs) - 1, 0, -1):
        bv, bt = stitch_rings(core_rings[k], core_rings[k - 1])
        cv.append(bv)
        ct.append(bt + off)
        off += len(bv)
    pieces.append((np.concatenate(cv), np.concatenate(ct), TAG_METAL))
    hole = _octagon(coax.hole_radius, n_hole)
    frame = ((0, 0, 0), (1, 0, 0), (0, 1, 0))
    v, t = _planar_piece([core_rings[0], hole], [], frame, size, h_bg)
    pieces.append((v, t, TAG_METAL))
    v, t = _planar_piece([core_rings[-1]], [], ((0, 0, z_bot), (1, 0, 0), (0, 1, 0)), size, h_bg)
    pieces.append((v, t[:, [0, 2, 1]], TAG_METAL))
    g0 = np.arcsin(rc / R)
    gam = np.linspace(np.pi - g0, g0, 400)
    for k in range(N):
        phi = 2 * np.pi * k / N
        m = np.array([np.cos(phi), np.sin(phi), 0.0])
        inner = np.array([c[(k * step) % n_core] for c in core_rings])
        arc = (R * np.sin(gam))[:, None] * m + np.column_stack(
            [np.zeros((len(gam), 2)), zc + R * np.cos(gam)])
        arc = resample(arc, size)
        loop = _chain([inner, arc])
        v, t = _planar_piece([loop], [], ((0, 0, 0), m, (0, 0, 1)), size, h_bg)
        pieces.append((v, t, TAG_METAL))
    return pieces, hole


def _spike_sites(spec):
    R, p = spec.radius, spec.spike_pitch
    n = max(1, int(round(4 * np.pi * R * R / (p * p * np.sqrt(3) / 2))))
    u = fibonacci_sphere(n)
    clear = (0.5 * p + 4 * spec.spike_diameter) / R
    return u[u[:, 2] < np.cos(clear)]


def _tangent_frame(u):
    ref = np.where(np.abs(u[:, 2:3]) < 0.9, [[0.0, 0.0, 1.0]], [[1.0, 0.0, 0.0]])
    t1 = np.cross(ref, u)
    t1 /= np.linalg.norm(t1, axis=1)[:, None]
    t2 = np.cross(u, t1)
    return t1, t2


SPIKE_GRADING = 0.6


def _ground_spiked(spec: SpikedSphere, coax, size, h_bg, n_hole):
    R, rs, L = spec.radius, spec.spike_diameter / 2, spec.spike_length
    center = np.array([0.0, 0.0, -R])
    hole = _sphere_hole(R, coax, n_hole)
    sites = _spike_sites(spec)
    cb = np.sqrt(R * R - rs * rs)
    nb = int(np.ceil((R + L - cb) / min(4.0, rs / _ASPECT)))
    prof = [(rs, z) for z in np.linspace(cb, R + L, nb + 1)] + [(0.0, R + L)]
    lv, lt = revolve(prof, 6)
    # spikes alone already over budget: fail before meshing the sphere
    if len(sites) * len(lt) > MAX_TRIANGLES:
        raise GeometryError(
            f"SpikedSphere needs at least {len(sites) * len(lt)} triangles for "
            f"{len(sites)} spikes (limit {MAX_TRIANGLES}); increase spike_pitch")
    t1, t2 = _tangent_frame(sites)
    psi = 2 * np.pi * np.arange(6) / 6
    hexes = [center + cb * u + rs * (np.cos(psi)[:, None] * a + np.sin(psi)[:, None] * b)
             for u, a, b in zip(sites, t1, t2)]
    size.add(np.concatenate(hexes), rs, SPIKE_GRADING)
    tree = cKDTree(sites)
    apothem = rs * np.cos(np.pi / 6)
    normals = np.pi / 6 + 2 * np.pi * np.arange(6) / 6
    hole_keep = _hole_removed(hole[:, :2], -R)

    def keep(c):
        d = c - center
        u = d / np.linalg.norm(d, axis=1)[:, None]
        _, j = tree.query(u)
        x = R * np.einsum("nd,nd->n", u, t1[j])
        y = R * np.einsum("nd,nd->n", u, t2[j])
        inside = np.max(np.outer(x, np.cos(normals)) + np.outer(y, np.sin(normals)), axis=1)
        in_hex = (inside < apothem * (1 - 1e-9)) & (np.einsum("nd,nd->n", u, sites[j]) > 0)
        return hole_keep(c) & ~in_hex

    v, t = mesh_sphere(center, R, size, h_bg, loops=[hole] + hexes, keep_fn=keep)
    pieces = [(v, t, TAG_METAL)]
    for u, a, b in zip(sites, t1, t2):
        rot = np.stack([a, b, u], 1)
        pieces.append((center + lv @ rot.T, lt, TAG_METAL))
    return pieces, hole


_BUILDERS = {
    Planar: _ground_planar, RibbedPlanar: _ground_ribbed, PlanarWithDish: _ground_dish,
    PlanarWithHorn: _ground_horn, PlanarWithCone: _ground_cone, Sphere: _ground_sphere,
    SlottedSphere: _ground_slotted, RingedSphere: _ground_ringed,
    EdgeMountedSphere: _ground_edge, FinSphere: _ground_fins, SpikedSphere: _ground_spiked,
}


# ----------------------------------------------------------------------------
# element and feed
# ----------------------------------------------------------------------------

def element_body(coax: CoaxModel, edge_mm: float, facets: int = 8):
    """Closed-top cylinder for the inner conductor, open at ``z = 0``."""
    r = coax.element_radius
    dz = min(edge_mm, 2 * r * np.sin(np.pi / facets) / _ASPECT)
    zs = [0.0]
    if coax.feed_gap > 0:
        zs.append(coax.feed_gap)
    rest = coax.conductor_length - zs[-1]
    nb = int(np.ceil(rest / dz - 1e-9))
    zs = np.r_[zs[:-1], np.linspace(zs[-1], coax.conductor_length, nb + 1)]
    prof = [(r, z) for z in zs] + [(0.0, coax.conductor_length)]
    return revolve(prof, facets)


def feed_annulus(outer, inner):
    """Triangulate between the aperture ring and the element base ring (+z normals).

    ``len(outer)`` must be a multiple of ``len(inner)``; extra outer
    vertices are fanned from the inner ring.
    """
    n, m = len(inner), len(outer)
    if m % n:
        raise GeometryError("aperture ring size must be a multiple of the element facets")
    if m == n:
        return stitch_rings(outer, inner)
    k = m // n
    verts = np.concatenate([outer, inner])
    tris = []
    for i in range(n):
        vi, vn = m + i, m + (i + 1) % n
        for j in range(k):
            tris.append((vi, k * i + j, (k * i + j + 1) % m))
        tris.append((vi, (k * (i + 1)) % m, vn))
    return verts, np.array(tris)


def generate(spec: GroundPlaneSpec, coax: CoaxModel | None = None, edge_mm: float = 12.0,
             with_element: bool = True, facets: int = 8,
             max_frequency: float | None = None) -> TriMesh:
    """Mesh a ground plane with the coax-fed monopole.

    Parameters
    ----------
    spec : GroundPlaneSpec
    coax : CoaxModel, optional
        Defaults to the quarter-wave RG402 model.
    edge_mm : float
        Target (background) edge length.  The mesh is graded down to the
        aperture segment length near the mount.
    with_element : bool
        If False only the ground surface (with its aperture) is returned.
    facets : int
        Facets around the element; the aperture ring uses the same count.
    max_frequency : float, optional
        Highest frequency of interest; a warning is issued when the edge
        length exceeds a tenth of its wavelength.

    Returns
    -------
    TriMesh
    """
    coax = coax or CoaxModel()
    if not edge_mm > 0:
        raise GeometryError("target edge length must be > 0")
    if type(spec) not in _BUILDERS:
        raise GeometryError(f"unsupported ground-plane spec {type(spec).__name__}")
    spec.validate(coax)
    if max_frequency:
        lam = constants.c / max_frequency * 1e3
        if edge_mm > lam / 10:
            warnings.warn(f"edge length {edge_mm:g} mm exceeds lambda/10 = {lam / 10:.1f} mm "
                          f"at {max_frequency / 1e9:g} GHz", stacklevel=2)
    size = SizeField(edge_mm)
    hole_xy = _octagon(coax.hole_radius, facets)
    h_feed = np.linalg.norm(hole_xy[1] - hole_xy[0])
    size.add(hole_xy, h_feed)
    pieces, mount_ring = _BUILDERS[type(spec)](spec, coax, size, edge_mm, facets)

    parts = [(v, t, tag, PART_GROUND) for v, t, tag in pieces]
    base = ring(coax.element_radius, 0.0, facets)
    if with_element:
        av, at = feed_annulus(mount_ring, base)
        parts.append((av, at, TAG_FEED, PART_GROUND))
        ev, et = element_body(coax, edge_mm, facets)
        parts.append((ev, et, TAG_METAL, PART_ELEMENT))
    v, t, tags, pids = weld(parts)
    feed = np.zeros((0, 2), int)
    if with_element:
        d, idx = cKDTree(v).query(base)
        if d.max() > 1e-6:
            raise GeometryError("feed ring vertices were not welded")
        feed = np.stack([idx, np.roll(idx, -1)], 1)
    mesh = TriMesh(v, t, tags, pids, feed_edges=feed, spec=spec, edge_mm=float(edge_mm))
    if mesh.n_triangles > MAX_TRIANGLES:
        raise GeometryError(
            f"{type(spec).__name__} mesh has {mesh.n_triangles} triangles (limit "
            f"{MAX_TRIANGLES}); increase the edge length or reduce feature counts")
    worst = mesh.min_angles().min()
    if worst <= MIN_ANGLE_DEG:
        raise GeometryError(f"mesh quality check failed: minimum angle {worst:.2f} deg")
    return mesh


def surface_area(mesh: TriMesh, tags=None) -> float:
    """Total area (mm^2) of triangles whose tag is in ``tags`` (all if None)."""
    return mesh.surface_area(tags)


def mesh_report(mesh: TriMesh) -> dict:
    """Counts, Euler characteristics, minimum angle and area by tag."""
    rep = mesh.report()
    ground = mesh.parts == PART_GROUND
    rep["euler_ground"] = mesh.euler_characteristic(ground & (mesh.tags != TAG_FEED))
    return rep


def export_stl(mesh: TriMesh) -> bytes:
    """Binary STL (mm) of the conducting surface."""
    return mesh.to_stl()
