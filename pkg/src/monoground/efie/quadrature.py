"""Quadrature rules on the reference triangle.

Rules are returned as barycentric coordinates ``(n, 3)`` and weights that sum
to one, so that ``area * sum(w * f(points))`` integrates ``f`` over a triangle.
"""

from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss


def _sym(weight, *coords):
    """Expand a symmetric orbit of barycentric coordinates."""
    if len(coords) == 1:
        a = coords[0]
        return [(a, a, a)], [weight]
    if len(coords) == 2:
        a, b = coords
        pts = [(a, b, b), (b, a, b), (b, b, a)]
        return pts, [weight] * 3
    a, b, c = coords
    pts = [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)]
    return pts, [weight] * 6


# Dunavant (1985) symmetric rules, keyed by polynomial degree.
_DUNAVANT = {
    1: [(1.0, (1 / 3,))],
    2: [(1 / 3, (2 / 3, 1 / 6))],
    4: [
        (0.223381589678011, (0.108103018168070, 0.445948490915965)),
        (0.109951743655322, (0.816847572980459, 0.091576213509771)),
    ],
    5: [
        (0.225000000000000, (1 / 3,)),
        (0.132394152788506, (0.059715871789770, 0.470142064105115)),
        (0.125939180544827, (0.797426985353087, 0.101286507323456)),
    ],
    6: [
        (0.116786275726379, (0.501426509658179, 0.249286745170910)),
        (0.050844906370207, (0.873821971016996, 0.063089014491502)),
        (0.082851075618374,
         (0.053145049844817, 0.310352451033784, 0.636502499121399)),
    ],
}


def _collapsed_gauss(degree):
    """Conical (Duffy) product of Gauss-Legendre rules, exact to ``degree``."""
    n = (degree + 1) // 2 + 1
    x, w = leggauss(n)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    u, v = np.meshgrid(x, x, indexing="ij")
    wu, wv = np.meshgrid(w, w, indexing="ij")
    # map the unit square onto the triangle with a vertex at u = 1
    l1 = u
    l2 = (1.0 - u) * v
    l3 = 1.0 - l1 - l2
    weights = 2.0 * wu * wv * (1.0 - u)
    bary = np.stack([l1.ravel(), l2.ravel(), l3.ravel()], axis=1)
    return bary, weights.ravel()


@lru_cache(maxsize=None)
def triangle_rule(degree):
    """Return ``(barycentric, weights)`` exact for polynomials of ``degree``.

    Dunavant rules are used where tabulated; higher degrees fall back to a
    collapsed Gauss product rule.
    """
    if degree < 1:
        raise ValueError("quadrature degree must be >= 1")
    key = min((d for d in _DUNAVANT if d >= degree), default=None)
    if key is None:
        bary, weights = _collapsed_gauss(degree)
    else:
        pts, wts = [], []
        for weight, coords in _DUNAVANT[key]:
            p, w = _sym(weight, *coords)
            pts.extend(p)
            wts.extend(w)
        bary = np.array(pts, dtype=float)
        weights = np.array(wts, dtype=float)
    bary.setflags(write=False)
    weights.setflags(write=False)
    return bary, weights


def map_points(vertices, bary):
    """Map barycentric points onto triangles.

    ``vertices`` has shape ``(T, 3, 3)``; result has shape ``(T, n, 3)``.
    """
    return np.einsum("nk,tkd->tnd", bary, vertices)
