# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled EFIE interaction kernels.

Same interface and conventions as ``_kernels_py``; see that module for the
definition of slot interactions.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, log, atan2, cos, sin

cnp.import_array()

cdef double FOUR_PI = 4.0 * 3.141592653589793


cdef inline double _dot(const double* a, const double* b) noexcept nogil:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


cdef inline void _cross(const double* a, const double* b, double* out) noexcept nogil:
    out[0] = a[1] * b[2] - a[2] * b[1]
    out[1] = a[2] * b[0] - a[0] * b[2]
    out[2] = a[0] * b[1] - a[1] * b[0]


cdef void _potential(const double* obs, const double* tri, double* i0, double* i1) noexcept nogil:
    """Analytic ``int 1/R`` and ``int r'/R`` over one flat triangle."""
    cdef double e1[3]
    cdef double e2[3]
    cdef double nrm[3]
    cdef double rho[3]
    cdef double d[3]
    cdef double s_hat[3]
    cdef double u_hat[3]
    cdef double irho[3]
    cdef double nn, h, ah, scale2, tiny, ln, lp, lm, t0, r0sq, rp, rm, f2, beta, acc, g
    cdef int a, b, c
    cdef const double* va
    cdef const double* vb
    for c in range(3):
        e1[c] = tri[3 + c] - tri[c]
        e2[c] = tri[6 + c] - tri[c]
    _cross(e1, e2, nrm)
    nn = sqrt(_dot(nrm, nrm))
    for c in range(3):
        nrm[c] /= nn
        d[c] = obs[c] - tri[c]
    h = _dot(d, nrm)
    ah = fabs(h)
    for c in range(3):
        rho[c] = obs[c] - h * nrm[c]
        irho[c] = 0.0
    scale2 = _dot(e1, e1)
    tiny = 1e-24 * scale2
    acc = 0.0
    for a in range(3):
        b = (a + 1) % 3
        va = tri + 3 * a
        vb = tri + 3 * b
        for c in range(3):
            s_hat[c] = vb[c] - va[c]
        ln = sqrt(_dot(s_hat, s_hat))
        for c in range(3):
            s_hat[c] /= ln
        _cross(s_hat, nrm, u_hat)
        lp = 0.0
        lm = 0.0
        t0 = 0.0
        for c in range(3):
            lp += (vb[c] - rho[c]) * s_hat[c]
            lm += (va[c] - rho[c]) * s_hat[c]
            t0 += (va[c] - rho[c]) * u_hat[c]
        r0sq = t0 * t0 + h * h
        rp = sqrt(lp * lp + r0sq)
        rm = sqrt(lm * lm + r0sq)
        if r0sq <= tiny:
            f2 = 0.0
        elif lp + lm >= 0.0:
            f2 = log((rp + lp) / (rm + lm))
        else:
            f2 = log((rm - lm) / (rp - lp))
        beta = atan2(t0 * lp, r0sq + ah * rp) - atan2(t0 * lm, r0sq + ah * rm)
        acc += t0 * f2 - ah * beta
        g = 0.5 * (r0sq * f2 + lp * rp - lm * rm)
        for c in range(3):
            irho[c] += g * u_hat[c]
    i0[0] = acc
    for c in range(3):
        i1[c] = rho[c] * acc + irho[c]


def potential_integrals(obs, tris):
    cdef const double[:, ::1] o = np.ascontiguousarray(obs, dtype=np.float64)
    cdef const double[:, :, ::1] t = np.ascontiguousarray(tris, dtype=np.float64)
    cdef Py_ssize_t n = o.shape[0], i
    out0 = np.empty(n)
    out1 = np.empty((n, 3))
    cdef double[::1] r0 = out0
    cdef double[:, ::1] r1 = out1
    with nogil:
        for i in range(n):
            _potential(&o[i, 0], &t[i, 0, 0], &r0[i], &r1[i, 0])
    return out0, out1


cdef inline void _combine(double complex* dst, Py_ssize_t stride,
                          const double* vt, const double* vs,
                          double complex s0, double complex* sp,
                          double complex* sq, double complex spq,
                          double complex c_a, double complex c_phi) noexcept nogil:
    """Fill a 3x3 slot block (row stride ``stride``) from pair moments."""
    cdef int i, j, c
    cdef double complex t2, t3, val
    cdef double dd
    for i in range(3):
        t3 = vt[3 * i] * sq[0] + vt[3 * i + 1] * sq[1] + vt[3 * i + 2] * sq[2]
        for j in range(3):
            t2 = vs[3 * j] * sp[0] + vs[3 * j + 1] * sp[1] + vs[3 * j + 2] * sp[2]
            dd = vt[3 * i] * vs[3 * j] + vt[3 * i + 1] * vs[3 * j + 1] + vt[3 * i + 2] * vs[3 * j + 2]
            val = c_a * (spq - t2 - t3 + dd * s0) + c_phi * s0
            dst[i * stride + j] = val


def regular_slot_block(test_pts, test_w, test_verts, src_pts, src_w, src_verts,
                       double k, double complex c_a, double complex c_phi):
    cdef const double[:, :, ::1] tp = np.ascontiguousarray(test_pts, dtype=np.float64)
    cdef const double[::1] tw = np.ascontiguousarray(test_w, dtype=np.float64)
    cdef const double[:, :, ::1] tv = np.ascontiguousarray(test_verts, dtype=np.float64)
    cdef const double[:, :, ::1] sp_ = np.ascontiguousarray(src_pts, dtype=np.float64)
    cdef const double[::1] sw = np.ascontiguousarray(src_w, dtype=np.float64)
    cdef const double[:, :, ::1] sv = np.ascontiguousarray(src_verts, dtype=np.float64)
    cdef Py_ssize_t nb = tp.shape[0], ns = sp_.shape[0]
    cdef Py_ssize_t nq = tp.shape[1], nr = sp_.shape[1]
    out = np.empty((3 * nb, 3 * ns), dtype=np.complex128)
    cdef double complex[:, ::1] z = out
    cdef Py_ssize_t b, s, p, q, c
    cdef double dx, dy, dz, r, w, gr, gi, pq
    cdef double complex s0, spq
    cdef double complex m_p[3]
    cdef double complex m_q[3]
    cdef double complex g
    with nogil:
        for b in range(nb):
            for s in range(ns):
                s0 = 0
                spq = 0
                for c in range(3):
                    m_p[c] = 0
                    m_q[c] = 0
                for p in range(nq):
                    for q in range(nr):
                        dx = tp[b, p, 0] - sp_[s, q, 0]
                        dy = tp[b, p, 1] - sp_[s, q, 1]
                        dz = tp[b, p, 2] - sp_[s, q, 2]
                        r = sqrt(dx * dx + dy * dy + dz * dz)
                        if r == 0.0:
                            continue
                        w = tw[p] * sw[q] / (FOUR_PI * r)
                        g = w * cos(k * r) - 1j * (w * sin(k * r))
                        s0 += g
                        pq = 0.0
                        for c in range(3):
                            m_p[c] += g * tp[b, p, c]
                            m_q[c] += g * sp_[s, q, c]
                            pq += tp[b, p, c] * sp_[s, q, c]
                        spq += g * pq
                _combine(&z[3 * b, 3 * s], 3 * ns, &tv[b, 0, 0], &sv[s, 0, 0],
                         s0, m_p, m_q, spq, c_a, c_phi)
    return out


def near_slot_block(test_verts, src_verts, outer_bary, outer_w, inner_bary, inner_w,
                    double k, double complex c_a, double complex c_phi):
    cdef const double[:, :, ::1] tv = np.ascontiguousarray(test_verts, dtype=np.float64)
    cdef const double[:, :, ::1] sv = np.ascontiguousarray(src_verts, dtype=np.float64)
    cdef const double[:, ::1] ob = np.ascontiguousarray(outer_bary, dtype=np.float64)
    cdef const double[::1] ow = np.ascontiguousarray(outer_w, dtype=np.float64)
    cdef const double[:, ::1] ib = np.ascontiguousarray(inner_bary, dtype=np.float64)
    cdef const double[::1] iw = np.ascontiguousarray(inner_w, dtype=np.float64)
    cdef Py_ssize_t npair = tv.shape[0], no = ob.shape[0], ni = ib.shape[0]
    out = np.empty((npair, 3, 3), dtype=np.complex128)
    cdef double complex[:, :, ::1] z = out
    cdef Py_ssize_t pr, n, m, c, a
    cdef double po[3]
    cdef double pi_[3]
    cdef double e1[3]
    cdef double e2[3]
    cdef double nrm[3]
    cdef double i1[3]
    cdef double i0, area, norm, w, dx, dy, dz, r, kr, pq
    cdef double complex s0, spq, g
    cdef double complex m_p[3]
    cdef double complex m_q[3]
    with nogil:
        for pr in range(npair):
            for c in range(3):
                e1[c] = sv[pr, 1, c] - sv[pr, 0, c]
                e2[c] = sv[pr, 2, c] - sv[pr, 0, c]
            _cross(e1, e2, nrm)
            area = 0.5 * sqrt(_dot(nrm, nrm))
            norm = 1.0 / (FOUR_PI * area)
            s0 = 0
            spq = 0
            for c in range(3):
                m_p[c] = 0
                m_q[c] = 0
            for n in range(no):
                for c in range(3):
                    po[c] = 0.0
                    for a in range(3):
                        po[c] += ob[n, a] * tv[pr, a, c]
                _potential(po, &sv[pr, 0, 0], &i0, i1)
                w = ow[n] * norm
                s0 += w * i0
                pq = 0.0
                for c in range(3):
                    m_p[c] += w * i0 * po[c]
                    m_q[c] += w * i1[c]
                    pq += po[c] * i1[c]
                spq += w * pq
                for m in range(ni):
                    for c in range(3):
                        pi_[c] = 0.0
                        for a in range(3):
                            pi_[c] += ib[m, a] * sv[pr, a, c]
                    dx = po[0] - pi_[0]
                    dy = po[1] - pi_[1]
                    dz = po[2] - pi_[2]
                    r = sqrt(dx * dx + dy * dy + dz * dz)
                    w = ow[n] * iw[m] / FOUR_PI
                    if r > 0.0:
                        kr = k * r
                        # (exp(-jkR) - 1) / R with the real part in a stable form
                        g = w * (-2.0 * sin(0.5 * kr) * sin(0.5 * kr) / r) - 1j * (w * sin(kr) / r)
                    else:
                        g = -1j * (w * k)
                    s0 += g
                    pq = 0.0
                    for c in range(3):
                        m_p[c] += g * po[c]
                        m_q[c] += g * pi_[c]
                        pq += po[c] * pi_[c]
                    spq += g * pq
            _combine(&z[pr, 0, 0], 3, &tv[pr, 0, 0], &sv[pr, 0, 0],
                     s0, m_p, m_q, spq, c_a, c_phi)
    return out
