"""Structured surface pieces: tubes, caps, annuli and surfaces of revolution.

Every builder returns ``(vertices, triangles)`` in mm with outward (or +z
for flat pieces) orientation.  Pieces are combined with
:func:`monoground.geometry.mesh.weld`.
"""

from __future__ import annotations

import numpy as np


def ring(radius, z, n, phase=0.0, center=(0.0, 0.0)):
    """``n`` points on a horizontal circle."""
    phi = phase + 2 * np.pi * np.arange(n) / n
    return np.stack([center[0] + radius * np.cos(phi),
                     center[1] + radius * np.sin(phi),
                     np.full(n, float(z))], axis=1)


def stitch_rings(lower, upper):
    """Triangulate the band between two closed rings of equal size.

    Normals point along ``(phi_hat x t_hat)`` where ``t_hat`` runs from the
    lower ring to the upper one, i.e. outward for a tube traversed upward.
    """
    n = len(lower)
    if len(upper) != n:
        raise ValueError("rings must have the same number of points")
    verts = np.concatenate([lower, upper])
    j = np.arange(n)
    a, b = j, (j + 1) % n
    c, d = n + (j + 1) % n, n + j
    tris = np.concatenate([np.stack([a, b, c], 1), np.stack([a, c, d], 1)])
    return verts, tris


def revolve(profile, n, phase=0.0, stagger=False):
    """Surface of revolution of an ``(m, 2)`` profile of ``(rho, z)`` points.

    Profile points with ``rho == 0`` become single pole vertices.  With
    ``stagger`` every other ring is rotated by half a step, which gives
    better-shaped triangles on long narrow bands.
    """
    profile = np.asarray(profile, dtype=float)
    verts, tris = [], []
    offset = 0
    prev = None
    for m, (rho, z) in enumerate(profile):
        ph = phase + (np.pi / n if (stagger and m % 2) else 0.0)
        if rho <= 0.0:
            cur = np.array([[0.0, 0.0, z]])
        else:
            cur = ring(rho, z, n, ph)
        idx = offset + np.arange(len(cur))
        verts.append(cur)
        offset += len(cur)
        if prev is not None:
            tris.append(_band(prev, idx))
        prev = idx
    return np.concatenate(verts), np.concatenate(tris)


def _band(lo, hi):
    """Triangles between index rings ``lo`` and ``hi`` (either may be a pole)."""
    if len(lo) == 1 and len(hi) == 1:
        raise ValueError("degenerate band between two poles")
    if len(lo) == 1:
        n = len(hi)
        j = np.arange(n)
        return np.stack([np.full(n, lo[0]), hi[(j + 1) % n], hi[j]], 1)
    if len(hi) == 1:
        n = len(lo)
        j = np.arange(n)
        return np.stack([lo[j], lo[(j + 1) % n], np.full(n, hi[0])], 1)
    n = len(lo)
    j = np.arange(n)
    a, b = lo[j], lo[(j + 1) % n]
    c, d = hi[(j + 1) % n], hi[j]
    return np.concatenate([np.stack([a, b, c], 1), np.stack([a, c, d], 1)])


def annulus(r_in, r_out, z, n, n_rad=1):
    """Flat annulus at height ``z`` with +z normals."""
    radii = np.linspace(r_in, r_out, n_rad + 1)
    profile = np.stack([radii[::-1], np.full(len(radii), z)], 1)
    # decreasing rho with revolve yields +z normals
    return revolve(profile, n)


def tube(radius, z0, z1, n, n_bands, cap_top=False, cap_bottom=False, phase=0.0):
    """Circular cylinder with ``n`` facets between ``z0`` and ``z1``."""
    zs = np.linspace(z0, z1, n_bands + 1)
    profile = [(radius, z) for z in zs]
    if cap_bottom:
        profile = [(0.0, z0)] + profile
    if cap_top:
        profile = profile + [(0.0, z1)]
    return revolve(profile, n, phase)


def orient(vertices, triangles, reference):
    """Flip triangles so that normals point away from ``reference``.

    ``reference`` is a point (or ``(T, 3)`` array of points) inside the body.
    """
    c = vertices[triangles]
    nrm = np.cross(c[:, 1] - c[:, 0], c[:, 2] - c[:, 0])
    out = c.mean(axis=1) - np.asarray(reference)
    flip = np.einsum("nd,nd->n", nrm, out) < 0
    tri = triangles.copy()
    tri[flip] = tri[flip][:, [0, 2, 1]]
    return tri
