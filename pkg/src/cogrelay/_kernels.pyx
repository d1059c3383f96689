# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels.  Signatures and semantics match ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, cos, sin, NAN

cnp.import_array()

cdef double AF_MARGIN = 1e-12


cdef inline void _canonical(double n1, double n2, double rho2, double gamma1,
                            double c, double p, double* lam1_out,
                            double* gamma2_out) nogil:
    cdef double one_m, A, B, C, disc, lam1, lam2, t2
    if gamma1 <= 0.0:
        lam1_out[0] = 0.0
        gamma2_out[0] = (p if p > 0.0 else 0.0) * n2 / c
        return
    if p <= 0.0 or n1 <= 0.0 or gamma1 > p * n1:
        lam1_out[0] = NAN
        gamma2_out[0] = -1.0
        return
    one_m = 1.0 - rho2
    if one_m < 0.0:
        one_m = 0.0
    A = n1 * n2 * one_m
    B = -(n2 * gamma1 + p * A + n1)
    C = (p * n2 + 1.0) * gamma1
    disc = B * B - 4.0 * A * C
    if disc < 0.0:
        disc = 0.0
    lam1 = C / (0.5 * (-B + sqrt(disc)))
    lam2 = p - lam1
    if lam2 < 0.0:
        lam2 = 0.0
    t2 = lam2 * n2 * (1.0 + lam1 * n1 * one_m) / (1.0 + lam1 * n1)
    lam1_out[0] = lam1
    gamma2_out[0] = t2 / c


def canonical_gamma2(double n1, double n2, double rho2, double gamma1,
                     double c, double p):
    cdef double lam1, gamma2
    _canonical(n1, n2, rho2, gamma1, c, p, &lam1, &gamma2)
    return lam1, gamma2


def phi_curve(ps, double hc0_sq, double hc_sq, double rho2, double p0f,
              double h0_sq, double h0c_sq, double g_sq, double gh_sq,
              double eps2, double gamma0):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] pv = np.ascontiguousarray(
        np.ravel(ps), dtype=np.float64)
    cdef Py_ssize_t n = pv.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(n)
    cdef double lead = p0f * g_sq * g_sq
    cdef double P, pt, denom, kappa, gamma1, n1, n2, lam1, g2
    cdef Py_ssize_t k
    with nogil:
        for k in range(n):
            P = pv[k]
            if P <= 0.0:
                continue
            pt = eps2 * P
            denom = lead - gamma0 * (g_sq + pt * gh_sq)
            if denom <= AF_MARGIN * lead:
                continue
            kappa = lead + g_sq + pt * gh_sq
            gamma1 = kappa * gamma0 / denom
            n1 = hc0_sq / (1.0 + pt * hc0_sq + p0f * h0_sq)
            n2 = hc_sq / (1.0 + pt * hc_sq + p0f * h0c_sq)
            _canonical(n1, n2, rho2, gamma1, 1.0, P, &lam1, &g2)
            if g2 > 0.0:
                out[k] = g2
    return out.reshape(np.shape(ps))


def oracle_grid(double a1, double alpha, double beta, double c, double gamma1,
                double p, lo, hi, int res):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ax0 = np.linspace(lo[0], hi[0], res)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ax1 = np.linspace(lo[1], hi[1], res)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ax2 = np.linspace(lo[2], hi[2], res)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ax3 = np.linspace(lo[3], hi[3], res)
    cdef Py_ssize_t m = res * res
    cdef cnp.ndarray[cnp.float64_t, ndim=1] a11 = np.empty(m)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] a21 = np.empty(m)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] a12 = np.empty(m)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] a22 = np.empty(m)
    cdef Py_ssize_t i, j, u, v, best_u = -1, best_v = -1
    cdef double ct, st, rem, q1, q2, s2, best = -1.0
    with nogil:
        for i in range(res):
            ct = cos(ax0[i])
            st = sin(ax0[i])
            for j in range(res):
                a11[i * res + j] = a1 * a1 * ct * ct
                a21[i * res + j] = (alpha * alpha * ct * ct + beta * beta * st * st
                                    + 2.0 * alpha * beta * ct * st * cos(ax1[j]))
        for i in range(res):
            ct = cos(ax2[i])
            st = sin(ax2[i])
            for j in range(res):
                a12[i * res + j] = a1 * a1 * ct * ct
                a22[i * res + j] = (alpha * alpha * ct * ct + beta * beta * st * st
                                    + 2.0 * alpha * beta * ct * st * cos(ax3[j]))
        for u in range(m):
            if gamma1 > 0.0:
                if a11[u] <= 0.0:
                    continue
                rem = p - gamma1 / a11[u]
                if rem < 0.0:
                    continue
            for v in range(m):
                if gamma1 > 0.0:
                    q2 = rem / (c * (1.0 + gamma1 * a12[v] / a11[u]))
                    q1 = gamma1 * (1.0 + c * q2 * a12[v]) / a11[u]
                    s2 = q2 * a22[v] / (1.0 + q1 * a21[u])
                else:
                    s2 = (p / c) * a22[v]
                if s2 > best:
                    best = s2
                    best_u = u
                    best_v = v
    if best_u < 0:
        return 0.0, NAN, NAN, NAN, NAN
    return (best, float(ax0[best_u // res]), float(ax1[best_u % res]),
            float(ax2[best_v // res]), float(ax3[best_v % res]))
