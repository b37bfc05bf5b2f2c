"""Pure numpy implementations of the EFIE interaction kernels.

The compiled extension ``_kernels`` exposes the same three functions; this
module is the fallback when it is not built and the reference it is
benchmarked against.

Slot blocks
-----------
A *slot* is a (triangle, local vertex) pair.  The RWG function attached to
slot ``(t, i)`` is ``(r - v_i) / (2 A_t)`` on triangle ``t``; a basis function
is a signed, length-weighted sum of two (or, at junctions, more) slots.  The
kernels return the Galerkin interaction between slots

    Zs[(t,i),(s,j)] = c_a * <r - v_i, r' - v_j>_G / (A_t A_s)
                      + c_phi * <1, 1>_G / (A_t A_s)

with ``c_a = j w mu / 4`` and ``c_phi = 1 / (j w eps)``, where ``<., .>_G``
is the double surface integral against ``exp(-jkR) / (4 pi R)``.
"""

import numpy as np

FOUR_PI = 4.0 * np.pi


def potential_integrals(obs, tris):
    """Analytic integrals of ``1/R`` and ``r'/R`` over flat triangles.

    Parameters
    ----------
    obs : (n, 3) array
        Observation points.
    tris : (n, 3, 3) array
        One triangle per observation point.

    Returns
    -------
    i0 : (n,) array
        ``int 1/|r - r'| dS'``.
    i1 : (n, 3) array
        ``int r'/|r - r'| dS'``.
    """
    obs = np.asarray(obs, dtype=float)
    tris = np.asarray(tris, dtype=float)
    v0, v1, v2 = tris[:, 0], tris[:, 1], tris[:, 2]
    nrm = np.cross(v1 - v0, v2 - v0)
    nrm /= np.linalg.norm(nrm, axis=1)[:, None]
    h = np.einsum("nd,nd->n", obs - v0, nrm)
    ah = np.abs(h)
    rho = obs - h[:, None] * nrm
    scale2 = np.einsum("nd,nd->n", v1 - v0, v1 - v0)
    tiny = 1e-24 * scale2

    i0 = np.zeros(len(obs))
    irho = np.zeros((len(obs), 3))
    for a, b in ((0, 1), (1, 2), (2, 0)):
        va, vb = tris[:, a], tris[:, b]
        edge = vb - va
        s_hat = edge / np.linalg.norm(edge, axis=1)[:, None]
        u_hat = np.cross(s_hat, nrm)
        lp = np.einsum("nd,nd->n", vb - rho, s_hat)
        lm = np.einsum("nd,nd->n", va - rho, s_hat)
        t0 = np.einsum("nd,nd->n", va - rho, u_hat)
        r0sq = t0 * t0 + h * h
        rp = np.sqrt(lp * lp + r0sq)
        rm = np.sqrt(lm * lm + r0sq)
        degenerate = r0sq <= tiny
        forward = (lp + lm) >= 0.0
        num = np.where(forward, rp + lp, rm - lm)
        den = np.where(forward, rm + lm, rp - lp)
        safe = ~degenerate
        f2 = np.zeros(len(obs))
        f2[safe] = np.log(num[safe] / den[safe])
        beta = (np.arctan2(t0 * lp, r0sq + ah * rp)
                - np.arctan2(t0 * lm, r0sq + ah * rm))
        i0 += t0 * f2 - ah * beta
        irho += 0.5 * u_hat * (r0sq * f2 + lp * rp - lm * rm)[:, None]
    i1 = rho * i0[:, None] + irho
    return i0, i1


def _slots_dense(s0, sp, sq, spq, vt, vs, c_a, c_phi):
    """Combine block moments into a ``(3B, 3S)`` slot matrix."""
    t2 = np.einsum("sjd,bsd->bsj", vs, sp)
    t3 = np.einsum("bid,bsd->bis", vt, sq)
    t4 = np.einsum("bid,sjd->bisj", vt, vs)
    out = (c_a * (spq[:, None, :, None] - t2[:, None, :, :]
                  - t3[:, :, :, None] + t4 * s0[:, None, :, None])
           + c_phi * s0[:, None, :, None])
    b, _, s, _ = out.shape
    return out.reshape(3 * b, 3 * s)


def regular_slot_block(test_pts, test_w, test_verts, src_pts, src_w,
                       src_verts, k, c_a, c_phi):
    """Slot interactions by plain product quadrature.

    ``test_pts`` is ``(B, q, 3)``; ``src_pts`` is ``(S, r, 3)``.  Coincident
    quadrature points contribute zero; such pairs must be overwritten by
    :func:`near_slot_block`.
    """
    diff = test_pts[:, :, None, None, :] - src_pts[None, None, :, :, :]
    dist = np.sqrt(np.einsum("bpsqd,bpsqd->bpsq", diff, diff))
    with np.errstate(divide="ignore", invalid="ignore"):
        g = np.exp(-1j * k * dist) / (FOUR_PI * dist)
    g[dist == 0.0] = 0.0
    g *= test_w[None, :, None, None] * src_w[None, None, None, :]
    s0 = g.sum(axis=(1, 3))
    sp = np.einsum("bpsq,bpd->bsd", g, test_pts)
    sq = np.einsum("bpsq,sqd->bsd", g, src_pts)
    dots = np.einsum("bpd,sqd->bpsq", test_pts, src_pts)
    spq = np.einsum("bpsq,bpsq->bs", g, dots)
    return _slots_dense(s0, sp, sq, spq, test_verts, src_verts, c_a, c_phi)


def near_slot_block(test_verts, src_verts, outer_bary, outer_w, inner_bary,
                    inner_w, k, c_a, c_phi):
    """Singularity-extracted slot interactions for paired triangles.

    ``test_verts`` and ``src_verts`` are ``(P, 3, 3)`` (one pair per row).
    The static ``1/R`` part of the kernel is integrated analytically over the
    source triangle at each outer point; the bounded remainder
    ``(exp(-jkR) - 1)/R`` uses the product rule.  Returns ``(P, 3, 3)``.
    """
    n_pairs = len(test_verts)
    po = np.einsum("nk,pkd->pnd", outer_bary, test_verts)
    pi = np.einsum("nk,pkd->pnd", inner_bary, src_verts)
    area_s = 0.5 * np.linalg.norm(
        np.cross(src_verts[:, 1] - src_verts[:, 0],
                 src_verts[:, 2] - src_verts[:, 0]), axis=1)

    n_out = po.shape[1]
    flat_obs = po.reshape(-1, 3)
    flat_tri = np.repeat(src_verts, n_out, axis=0)
    i0, i1 = potential_integrals(flat_obs, flat_tri)
    i0 = i0.reshape(n_pairs, n_out)
    i1 = i1.reshape(n_pairs, n_out, 3)
    norm = 1.0 / (FOUR_PI * area_s)
    s0 = np.einsum("n,pn->p", outer_w, i0) * norm
    sq = np.einsum("n,pnd->pd", outer_w, i1) * norm[:, None]
    sp = np.einsum("n,pn,pnd->pd", outer_w, i0, po) * norm[:, None]
    spq = np.einsum("n,pnd,pnd->p", outer_w, i1, po) * norm

    diff = po[:, :, None, :] - pi[:, None, :, :]
    dist = np.sqrt(np.einsum("pnmd,pnmd->pnm", diff, diff))
    with np.errstate(divide="ignore", invalid="ignore"):
        g = np.where(dist > 0.0, np.expm1(-1j * k * dist) / dist, -1j * k)
    g = g / FOUR_PI * outer_w[None, :, None] * inner_w[None, None, :]
    s0 = s0 + g.sum(axis=(1, 2))
    sp = sp + np.einsum("pnm,pnd->pd", g, po)
    sq = sq + np.einsum("pnm,pmd->pd", g, pi)
    spq = spq + np.einsum("pnm,pnm->p", g, np.einsum("pnd,pmd->pnm", po, pi))

    t2 = np.einsum("pjd,pd->pj", src_verts, sp)
    t3 = np.einsum("pid,pd->pi", test_verts, sq)
    t4 = np.einsum("pid,pjd->pij", test_verts, src_verts)
    return (c_a * (spq[:, None, None] - t2[:, None, :] - t3[:, :, None]
                   + t4 * s0[:, None, None])
            + c_phi * s0[:, None, None])
