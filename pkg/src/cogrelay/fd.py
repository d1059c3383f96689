"""Full-duplex relaying under fixed or power-proportional transmit noise.

The CBS receives on ``N_r`` antennas and transmits on ``N_t``.  Residual
loop interference reaches the receive side only through the transmit noise,
so the loop matrix enters the rates as ``||H||_F^2`` (DF decoding) and
``||g^H H||^2`` (AF amplification of that noise).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelSet, SystemConfig
from .dualsolver import CanonicalProblem, solve_canonical
from .hd import CanonicalMapping, LinkSolution, _infeasible, _log2p, af_matrix, check_protocol
from .kernels import AF_MARGIN, phi_curve
from .numerics import norm_sq

GRID_POINTS = 64
GOLDEN_ITERS = 60
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class FdDerived:
    """Scalar summaries of one FD instance at a given transmit-noise power."""

    kappa_fd: float
    sigma1_sq: float
    sigma2_sq: float
    gamma0_fd: float
    pbar_c_fd: float


def gamma0_fd(cfg: SystemConfig) -> float:
    return 2.0 ** cfg.r0 - 1.0


def _sigmas(ch: ChannelSet, cfg: SystemConfig, pt: float) -> tuple[float, float]:
    p0f = cfg.p0_fd
    s1 = 1.0 + pt * norm_sq(ch.h_c0_fd) + p0f * abs(ch.h0) ** 2
    s2 = 1.0 + pt * norm_sq(ch.h_c_fd) + p0f * abs(ch.h0c) ** 2
    return s1, s2


def df_power_cap(ch: ChannelSet, cfg: SystemConfig) -> float:
    """Largest FD-DF transmit power at which the CBS still decodes the PBS.

    With transmit noise ``eps2 * p`` the decoding SNR is
    ``P0 ||g||^2 / (eps2 p ||H||^2 + 1)``; the cap is clipped to the FD budget.
    """
    g0 = gamma0_fd(cfg)
    snr = cfg.p0_fd * norm_sq(ch.g_fd)
    loop = cfg.eps2 * ch.loop_gain()
    if g0 <= 0.0:
        return cfg.pc_fd
    if loop <= 0.0:
        return cfg.pc_fd if snr >= g0 else 0.0
    return min(cfg.pc_fd, max(0.0, (snr / g0 - 1.0) / loop))


def fd_derived(ch: ChannelSet, cfg: SystemConfig, pt: float) -> FdDerived:
    gsq = norm_sq(ch.g_fd)
    s1, s2 = _sigmas(ch, cfg, pt)
    return FdDerived(
        kappa_fd=cfg.p0_fd * gsq * gsq + gsq + pt * ch.g_loop_gain(),
        sigma1_sq=s1,
        sigma2_sq=s2,
        gamma0_fd=gamma0_fd(cfg),
        pbar_c_fd=df_power_cap(ch, cfg),
    )


def map_fd_af_to_canonical(ch: ChannelSet, cfg: SystemConfig, pt: float,
                           budget: float | None = None) -> CanonicalMapping:
    """Rewrite FD-AF at transmit-noise power ``pt`` as a two-user problem."""
    budget = cfg.pc_fd if budget is None else budget
    d = fd_derived(ch, cfg, pt)
    gsq = norm_sq(ch.g_fd)
    lead = cfg.p0_fd * gsq * gsq
    denom = lead - d.gamma0_fd * (gsq + pt * ch.g_loop_gain())
    scale = 1.0 / math.sqrt(d.kappa_fd) if d.kappa_fd > 0.0 else 0.0
    if not denom > AF_MARGIN * lead or budget <= 0.0:
        return CanonicalMapping(None, scale, "relayed PU SINR cannot reach the target")
    h1 = ch.h_c0_fd / math.sqrt(d.sigma1_sq)
    h2 = ch.h_c_fd / math.sqrt(d.sigma2_sq)
    gamma1 = d.kappa_fd * d.gamma0_fd / denom
    return CanonicalMapping(CanonicalProblem(h1, h2, 1.0, gamma1, budget), scale)


def map_fd_df_to_canonical(ch: ChannelSet, cfg: SystemConfig, pt: float,
                           budget: float | None = None) -> CanonicalMapping:
    budget = cfg.pc_fd if budget is None else budget
    d = fd_derived(ch, cfg, pt)
    decode = cfg.p0_fd * norm_sq(ch.g_fd) / (pt * ch.loop_gain() + 1.0)
    if decode < d.gamma0_fd or budget <= 0.0:
        return CanonicalMapping(None, 1.0, "CBS cannot decode the PBS signal")
    h1 = ch.h_c0_fd / math.sqrt(d.sigma1_sq)
    h2 = ch.h_c_fd / math.sqrt(d.sigma2_sq)
    return CanonicalMapping(CanonicalProblem(h1, h2, 1.0, d.gamma0_fd, budget), 1.0)


def _fd_eval(ch, cfg, protocol, w_c, w_relay, pt):
    check_protocol(protocol)
    w_c = np.asarray(w_c, dtype=np.complex128)
    w_r = np.asarray(w_relay, dtype=np.complex128)
    hc0, hc, g, H = ch.h_c0_fd, ch.h_c_fd, ch.g_fd, ch.H_loop
    p0f = cfg.p0_fd
    x0 = abs(np.vdot(hc0, w_c)) ** 2
    xc = abs(np.vdot(hc, w_c)) ** 2
    if protocol == "AF":
        A = af_matrix(w_r, g)
        Ag = A @ g
        AH = A @ H
        hc0A, hcA = hc0.conj() @ A, hc.conj() @ A
        pu = p0f * abs(np.vdot(hc0, Ag)) ** 2 / (
            p0f * abs(ch.h0) ** 2 + pt * norm_sq(hc0.conj() @ AH) + pt * norm_sq(hc0)
            + norm_sq(hc0A) + x0 + 1.0)
        cu = xc / (p0f * abs(np.vdot(hc, Ag)) ** 2 + pt * norm_sq(hc.conj() @ AH)
                   + pt * norm_sq(hc) + norm_sq(hcA) + p0f * abs(ch.h0c) ** 2 + 1.0)
        power = (p0f * norm_sq(Ag) + pt * float(np.sum(np.abs(AH) ** 2))
                 + float(np.sum(np.abs(A) ** 2)) + norm_sq(w_c))
    else:
        decode = p0f * norm_sq(g) / (pt * ch.loop_gain() + 1.0)
        fwd = abs(np.vdot(hc0, w_r)) ** 2 / (
            p0f * abs(ch.h0) ** 2 + pt * norm_sq(hc0) + x0 + 1.0)
        pu = min(decode, fwd)
        cu = xc / (abs(np.vdot(hc, w_r)) ** 2 + pt * norm_sq(hc)
                   + p0f * abs(ch.h0c) ** 2 + 1.0)
        power = norm_sq(w_r) + norm_sq(w_c)
    return _log2p(pu, 1.0), _log2p(cu, 1.0), power


def fd_rates(ch: ChannelSet, cfg: SystemConfig, protocol: str, w_c, w_relay,
             pt: float) -> tuple[float, float]:
    """PU and CU rates of an FD beamformer pair from the signal model.

    The PU treats the direct PBS signal as noise; both rates have unit prelog.
    """
    return _fd_eval(ch, cfg, protocol, w_c, w_relay, pt)[:2]


def _finish(ch, cfg, protocol, mapping, pt, budget, extra=None) -> LinkSolution:
    n = ch.n_tx
    if not mapping.feasible:
        return _infeasible(ch, cfg, "FD", protocol, n, pt, budget, mapping.reason)
    sol = solve_canonical(mapping.problem)
    if not sol.feasible:
        return _infeasible(ch, cfg, "FD", protocol, n, pt, budget,
                           f"PU SINR target needs power {sol.min_power:.6g}"
                           f" > {mapping.problem.p_total:.6g}")
    w_c, w_relay = mapping.unscale(sol)
    r_pu, _, power = _fd_eval(ch, cfg, protocol, w_c, w_relay, pt)
    return LinkSolution(mode="FD", protocol=protocol, feasible=True, r_pu=r_pu,
                        r_cu=_log2p(sol.gamma2, 1.0), w_c=w_c, w_relay=w_relay,
                        pt_effective=pt, power_used=power, sinr_cu=sol.gamma2,
                        budget=budget, extra=dict(extra or {}))


def solve_fd_fixed(ch: ChannelSet, cfg: SystemConfig, protocol: str) -> LinkSolution:
    """FD solve with transmit-noise power fixed at ``cfg.pt_fixed``."""
    check_protocol(protocol)
    pt = cfg.pt_fixed
    if protocol == "AF":
        mapping = map_fd_af_to_canonical(ch, cfg, pt)
    else:
        mapping = map_fd_df_to_canonical(ch, cfg, pt)
    return _finish(ch, cfg, protocol, mapping, pt, cfg.pc_fd)


def fd_af_phi(ch: ChannelSet, cfg: SystemConfig, P) -> np.ndarray | float:
    """Best FD-AF CU SINR when the CBS spends exactly ``P`` with noise ``eps2 * P``.

    Vectorized over ``P``; infeasible budgets give 0.
    """
    gsq = norm_sq(ch.g_fd)
    out = phi_curve(np.atleast_1d(np.asarray(P, dtype=np.float64)),
                    norm_sq(ch.h_c0_fd), norm_sq(ch.h_c_fd), _rho2(ch),
                    cfg.p0_fd, abs(ch.h0) ** 2, abs(ch.h0c) ** 2, gsq, ch.g_loop_gain(),
                    cfg.eps2, gamma0_fd(cfg))
    return float(out[0]) if np.ndim(P) == 0 else out


def _rho2(ch: ChannelSet) -> float:
    a, b = ch.h_c0_fd, ch.h_c_fd
    na, nb = norm_sq(a), norm_sq(b)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return min(1.0, abs(np.vdot(a, b)) ** 2 / (na * nb))


def maximize_phi(ch: ChannelSet, cfg: SystemConfig, n_grid: int = GRID_POINTS,
                 iters: int = GOLDEN_ITERS) -> tuple[float, float]:
    """``(P*, Phi(P*))``: uniform grid over ``[0, P_C_FD]``, then golden section
    on the two cells around the best grid point."""
    top = cfg.pc_fd
    grid = np.linspace(0.0, top, n_grid)
    vals = fd_af_phi(ch, cfg, grid)
    k = int(np.argmax(vals))
    best_p, best_v = float(grid[k]), float(vals[k])
    a = float(grid[max(k - 1, 0)])
    b = float(grid[min(k + 1, n_grid - 1)])
    x1 = b - _INV_PHI * (b - a)
    x2 = a + _INV_PHI * (b - a)
    f1, f2 = fd_af_phi(ch, cfg, x1), fd_af_phi(ch, cfg, x2)
    for _ in range(iters):
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INV_PHI * (b - a)
            f1 = fd_af_phi(ch, cfg, x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INV_PHI * (b - a)
            f2 = fd_af_phi(ch, cfg, x2)
        if b - a <= 1e-12 * max(top, 1.0):
            break
    for p, v in ((x1, f1), (x2, f2)):
        if v > best_v:
            best_p, best_v = p, v
    return best_p, best_v


def solve_fd_scalable(ch: ChannelSet, cfg: SystemConfig, protocol: str) -> LinkSolution:
    """FD solve with transmit noise ``eps2`` times the CBS transmit power.

    DF runs at the largest power that still lets the CBS decode.  AF maximizes
    the CU SINR over the transmit power by a 1-D search.
    """
    check_protocol(protocol)
    if protocol == "DF":
        cap = df_power_cap(ch, cfg)
        pt = cfg.eps2 * cap
        if cap <= 0.0:
            return _infeasible(ch, cfg, "FD", protocol, ch.n_tx, pt, cfg.pc_fd,
                               "CBS cannot decode at any transmit power")
        mapping = map_fd_df_to_canonical(ch, cfg, pt, cap)
        return _finish(ch, cfg, protocol, mapping, pt, cfg.pc_fd, {"p_search": cap})
    p_star, v_star = maximize_phi(ch, cfg)
    pt = cfg.eps2 * p_star
    if not v_star > 0.0:
        return _infeasible(ch, cfg, "FD", protocol, ch.n_tx, pt, cfg.pc_fd,
                           "no transmit power meets the PU target")
    mapping = map_fd_af_to_canonical(ch, cfg, pt, p_star)
    return _finish(ch, cfg, protocol, mapping, pt, cfg.pc_fd, {"p_search": p_star})


def solve_fd(ch: ChannelSet, cfg: SystemConfig, protocol: str) -> LinkSolution:
    if cfg.pt_mode == "scalable":
        return solve_fd_scalable(ch, cfg, protocol)
    return solve_fd_fixed(ch, cfg, protocol)


def max_pu_rate_fd(ch: ChannelSet, cfg: SystemConfig, protocol: str) -> float:
    """FD PU rate with ``w_c = 0`` and full-power MRT relaying towards the PU."""
    check_protocol(protocol)
    hc0 = ch.h_c0_fd
    nh = math.sqrt(norm_sq(hc0))
    w_c = np.zeros_like(hc0)
    if nh == 0.0:
        return 0.0
    direction = hc0 / nh
    if cfg.pt_mode == "fixed":
        powers = [cfg.pc_fd]
    else:
        # power-proportional noise: the best PU power need not be the maximum
        powers = np.linspace(0.0, cfg.pc_fd, 257)[1:]
    best = 0.0
    for p in powers:
        pt = cfg.pt_fixed if cfg.pt_mode == "fixed" else cfg.eps2 * p
        if protocol == "DF":
            relay = math.sqrt(p) * direction
        else:
            kappa = fd_derived(ch, cfg, pt).kappa_fd
            if kappa <= 0.0:
                continue
            relay = math.sqrt(p / kappa) * direction
        best = max(best, fd_rates(ch, cfg, protocol, w_c, relay, pt)[0])
    return best
