"""Pure-Python/numpy versions of the hot kernels.

These mirror ``_kernels.pyx`` function for function and are used whenever the
compiled extension is unavailable (or ``COGRELAY_PURE_PYTHON=1`` is set).
"""
from __future__ import annotations

import math

import numpy as np

AF_MARGIN = 1e-12


def canonical_gamma2(n1, n2, rho2, gamma1, c, p):
    """Closed-form optimum of the two-user problem from channel gains only.

    Returns ``(lambda1, gamma2)``; an infeasible instance gives
    ``(nan, -1.0)``.
    """
    if gamma1 <= 0.0:
        return 0.0, max(p, 0.0) * n2 / c
    if p <= 0.0 or n1 <= 0.0 or gamma1 > p * n1:
        return math.nan, -1.0
    one_m = 1.0 - rho2
    if one_m < 0.0:
        one_m = 0.0
    A = n1 * n2 * one_m
    B = -(n2 * gamma1 + p * A + n1)
    C = (p * n2 + 1.0) * gamma1
    disc = B * B - 4.0 * A * C
    if disc < 0.0:
        disc = 0.0
    lam1 = C / (0.5 * (-B + math.sqrt(disc)))
    lam2 = p - lam1
    if lam2 < 0.0:
        lam2 = 0.0
    t2 = lam2 * n2 * (1.0 + lam1 * n1 * one_m) / (1.0 + lam1 * n1)
    return lam1, t2 / c


def phi_curve(ps, hc0_sq, hc_sq, rho2, p0f, h0_sq, h0c_sq, g_sq, gh_sq, eps2, gamma0):
    """CU SINR of the scalable-noise FD-AF problem at each budget in ``ps``.

    At budget ``P`` the transmit noise is ``eps2 * P``; infeasible budgets
    give 0.
    """
    ps = np.asarray(ps, dtype=np.float64)
    out = np.zeros(ps.shape)
    lead = p0f * g_sq * g_sq
    for k, P in enumerate(ps.flat):
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
        _, g2 = canonical_gamma2(n1, n2, rho2, gamma1, 1.0, P)
        if g2 > 0.0:
            out.flat[k] = g2
    return out


def oracle_grid(a1, alpha, beta, c, gamma1, p, lo, hi, res):
    """Exhaustive search of user-2 SINR over a box of beamformer directions.

    Channels are in a real 2-D basis: ``h1 = (a1, 0)``, ``h2 = (alpha, beta)``.
    Each beamformer direction is ``(cos t, sin t e^{j f})``; the box is
    ``lo[k] <= x_k <= hi[k]`` for ``x = (t1, f1, t2, f2)``.  Powers are set
    per direction pair: user 1 gets exactly its target, user 2 takes the
    rest of the budget.

    Returns ``(best, t1, f1, t2, f2)``; ``best`` is 0 with NaN coordinates if
    no direction pair is feasible.
    """
    axes = [np.linspace(lo[k], hi[k], res) for k in range(4)]
    t1 = axes[0][:, None, None, None]
    f1 = axes[1][None, :, None, None]
    t2 = axes[2][None, None, :, None]
    f2 = axes[3][None, None, None, :]

    def gains(t, f):
        ct, st = np.cos(t), np.sin(t)
        g_1 = a1 * a1 * ct * ct
        g_2 = (alpha * alpha * ct * ct + beta * beta * st * st
               + 2.0 * alpha * beta * ct * st * np.cos(f))
        return g_1, g_2

    a11, a21 = gains(t1, f1)
    a12, a22 = gains(t2, f2)
    a11, a21, a12, a22 = np.broadcast_arrays(a11, a21, a12, a22)
    with np.errstate(divide="ignore", invalid="ignore"):
        if gamma1 > 0.0:
            rem = p - gamma1 / a11
            q2 = rem / (c * (1.0 + gamma1 * a12 / a11))
            q1 = gamma1 * (1.0 + c * q2 * a12) / a11
            sinr2 = q2 * a22 / (1.0 + q1 * a21)
            ok = (a11 > 0.0) & (rem >= 0.0)
            sinr2 = np.where(ok, sinr2, -1.0)
        else:
            sinr2 = (p / c) * a22
    idx = int(np.argmax(sinr2))
    best = float(sinr2.flat[idx])
    if not best >= 0.0:
        return 0.0, math.nan, math.nan, math.nan, math.nan
    i, j, k, m = np.unravel_index(idx, sinr2.shape)
    return best, float(axes[0][i]), float(axes[1][j]), float(axes[2][k]), float(axes[3][m])
