"""Zero-forcing DF rates, HD/FD mode selection and transmit-noise thresholds.

Under zero forcing the CU beam is projected away from the PU channel and the
relay beam away from the CU channel, which turns the DF problem into a
two-variable power split with a closed-form answer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .channel import ChannelSet, SystemConfig
from .fd import df_power_cap, gamma0_fd
from .hd import gamma_df_hd, pt_effective_hd
from .numerics import norm_sq, project_orthogonal


@dataclass(frozen=True)
class ModeDecision:
    chosen: str
    r_zf_hd: float
    r_zf_fd: float
    eps2_max_hd: float
    eps2_max_fd: float


@dataclass(frozen=True)
class NoiseThresholds:
    """Largest transmit-noise factor at which each mode still has a positive
    ZF CU rate.  The asymptotic pair is ``None`` unless ``r0 > 1``."""

    eps2_hd: float
    eps2_fd: float
    eps2_hd_asymptotic: float | None
    eps2_fd_asymptotic: float | None

    def relative_difference(self) -> float:
        return (self.eps2_fd - self.eps2_hd) / self.eps2_hd


def _rho2(a, b) -> float:
    na, nb = norm_sq(a), norm_sq(b)
    if na == 0.0 or nb == 0.0:
        return 1.0
    return min(1.0, abs(complex((a.conj() @ b))) ** 2 / (na * nb))


def _zf_sinr(budget, rho2, gamma, pt, pu_noise, cu_noise, hc0_sq, hc_sq) -> float:
    """CU SINR of the ZF power split.

    ``pu_noise`` and ``cu_noise`` are the noise-plus-direct-link terms at the
    PU and CU excluding transmit noise.
    """
    if hc0_sq == 0.0 or hc_sq == 0.0:
        return 0.0
    num = budget * (1.0 - rho2) - gamma * (pt + pu_noise / hc0_sq)
    return max(0.0, num) / (pt + cu_noise / hc_sq)


def zf_rate_hd_df(ch: ChannelSet, cfg: SystemConfig, policy: str | None = None) -> float:
    """HD-DF CU rate under zero forcing at the CBS."""
    g, hc0, hc = ch.hd_view(policy or cfg.hd_antenna_policy)
    gamma = gamma_df_hd(ch, cfg)
    if gamma > 0.0 and cfg.p0 * norm_sq(g) < gamma:
        return 0.0
    sinr = _zf_sinr(cfg.pc, _rho2(hc, hc0), max(gamma, 0.0), pt_effective_hd(cfg),
                    1.0, 1.0, norm_sq(hc0), norm_sq(hc))
    return 0.5 * math.log2(1.0 + sinr)


def zf_rate_fd_df(ch: ChannelSet, cfg: SystemConfig) -> float:
    """FD-DF CU rate under zero forcing, spending the decodable power cap."""
    if cfg.pt_mode == "scalable":
        budget = df_power_cap(ch, cfg)
        pt = cfg.eps2 * budget
    else:
        pt = cfg.pt_fixed
        decode = cfg.p0_fd * norm_sq(ch.g_fd) / (pt * ch.loop_gain() + 1.0)
        budget = cfg.pc_fd if decode >= gamma0_fd(cfg) else 0.0
    if budget <= 0.0:
        return 0.0
    hc0, hc = ch.h_c0_fd, ch.h_c_fd
    sinr = _zf_sinr(budget, _rho2(hc, hc0), gamma0_fd(cfg), pt,
                    1.0 + cfg.p0_fd * abs(ch.h0) ** 2, 1.0 + cfg.p0_fd * abs(ch.h0c) ** 2,
                    norm_sq(hc0), norm_sq(hc))
    return math.log2(1.0 + sinr)


def tolerable_noise_thresholds(ch: ChannelSet, cfg: SystemConfig) -> NoiseThresholds:
    """Zero crossings in ``eps2`` of the ZF rate approximations.

    The first pair assumes both modes use the same RF chains and ignores the
    PBS direct links; the asymptotic pair is the large-``P_C`` limit with each
    mode on its own antennas.
    """
    hc0, hc = ch.h_c0_fd, ch.h_c_fd
    rho2 = _rho2(hc, hc0)
    snr = cfg.pc * norm_sq(hc0)
    a1 = 2.0 ** cfg.r0 - 1.0
    a2 = 2.0 ** (2.0 * cfg.r0) - 1.0
    inv = 1.0 / snr if snr > 0.0 else math.inf
    eps_fd = (1.0 - rho2) / a1 - 2.0 * inv if a1 > 0.0 else math.inf
    eps_hd = (1.0 - rho2) / a2 - inv if a2 > 0.0 else math.inf
    if cfg.r0 > 1.0:
        _, hc0_hd, hc_hd = ch.hd_view(cfg.hd_antenna_policy)
        asym_fd = (1.0 - rho2) / (2.0 ** cfg.r0 - 2.0)
        asym_hd = (1.0 - _rho2(hc_hd, hc0_hd)) / (2.0 ** (2.0 * cfg.r0) - 2.0)
    else:
        asym_fd = asym_hd = None
    return NoiseThresholds(eps_hd, eps_fd, asym_hd, asym_fd)


def select_mode(ch: ChannelSet, cfg: SystemConfig) -> ModeDecision:
    """Pick FD when its ZF DF rate is strictly higher; ties stay in HD."""
    r_hd = zf_rate_hd_df(ch, cfg)
    r_fd = zf_rate_fd_df(ch, cfg)
    th = tolerable_noise_thresholds(ch, cfg)
    return ModeDecision(chosen="FD" if r_fd > r_hd else "HD", r_zf_hd=r_hd, r_zf_fd=r_fd,
                        eps2_max_hd=th.eps2_hd, eps2_max_fd=th.eps2_fd)


def orthogonal_rate(ch: ChannelSet, cfg: SystemConfig, policy: str | None = None) -> float:
    """CU rate when the CBS does not relay and beams orthogonally to the PU."""
    _, hc0, hc = ch.hd_view(policy or cfg.hd_antenna_policy)
    pt = pt_effective_hd(cfg)
    if norm_sq(hc0) == 0.0:
        proj = hc
    else:
        proj = project_orthogonal(hc, hc0)
    return math.log2(1.0 + cfg.pc * norm_sq(proj) / (pt * norm_sq(hc) + 1.0))
