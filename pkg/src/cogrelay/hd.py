"""Half-duplex relaying: reduction to the two-user problem and rate evaluation.

The AF relay matrix is always the rank-one form ``A = w_a g^H``: the CBS
combines the received primary signal with ``g^H`` and forwards it along
``w_a``.  For this form ``||A g||^2 = ||w_a||^2 ||g||^4``,
``||A||_F^2 = ||w_a||^2 ||g||^2`` and ``h^H A g = (h^H w_a) ||g||^2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelSet, SystemConfig
from .dualsolver import CanonicalProblem, DualSolution, solve_canonical
from .kernels import AF_MARGIN
from .numerics import norm_sq

PROTOCOLS = ("AF", "DF")


@dataclass
class LinkSolution:
    """Outcome of one CU-rate maximization.

    ``w_relay`` is ``w_0`` for DF and ``w_a`` for AF.  An infeasible instance
    has ``r_cu == 0`` and counts as a PU outage.
    """

    mode: str
    protocol: str
    feasible: bool
    r_pu: float
    r_cu: float
    w_c: np.ndarray
    w_relay: np.ndarray
    pt_effective: float
    power_used: float
    sinr_cu: float = 0.0
    budget: float = 0.0
    reason: str = ""
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        def vec(v):
            return [[float(z.real), float(z.imag)] for z in v]

        return {
            "mode": self.mode,
            "protocol": self.protocol,
            "feasible": self.feasible,
            "r_pu": self.r_pu,
            "r_cu": self.r_cu,
            "sinr_cu": self.sinr_cu,
            "pt_effective": self.pt_effective,
            "power_used": self.power_used,
            "budget": self.budget,
            "w_c": vec(self.w_c),
            "w_relay": vec(self.w_relay),
            "reason": self.reason,
            **self.extra,
        }


@dataclass(frozen=True)
class CanonicalMapping:
    """A relay problem rewritten as a two-user problem.

    The canonical ``w1`` is ``w_relay / relay_scale`` and ``w2`` is ``w_c``.
    ``problem`` is None when the instance failed its feasibility precheck.
    """

    problem: CanonicalProblem | None
    relay_scale: float
    reason: str = ""

    @property
    def feasible(self) -> bool:
        return self.problem is not None

    def unscale(self, sol: DualSolution) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(w_c, w_relay)``."""
        return sol.w2, self.relay_scale * sol.w1


def check_protocol(protocol: str) -> str:
    if protocol not in PROTOCOLS:
        raise ValueError(f"protocol must be one of {PROTOCOLS}, got {protocol!r}")
    return protocol


def pt_effective_hd(cfg: SystemConfig) -> float:
    """Transmit-noise power; with scalable noise the CBS always runs at ``P_C``."""
    return cfg.eps2 * cfg.pc if cfg.pt_mode == "scalable" else cfg.pt_fixed


def gamma_af_hd(ch: ChannelSet, cfg: SystemConfig) -> float:
    return (2.0 ** (2.0 * cfg.r0) - 1.0) / cfg.p0 - abs(ch.h0) ** 2


def gamma_df_hd(ch: ChannelSet, cfg: SystemConfig) -> float:
    return 2.0 ** (2.0 * cfg.r0) - 1.0 - cfg.p0 * abs(ch.h0) ** 2


def map_hd_to_canonical(ch: ChannelSet, cfg: SystemConfig, protocol: str,
                        policy: str | None = None, pt: float | None = None) -> CanonicalMapping:
    check_protocol(protocol)
    policy = policy or cfg.hd_antenna_policy
    pt = pt_effective_hd(cfg) if pt is None else pt
    g, hc0, hc = ch.hd_view(policy)
    h1 = hc0 / math.sqrt(1.0 + pt * norm_sq(hc0))
    h2 = hc / math.sqrt(1.0 + pt * norm_sq(hc))
    gsq = norm_sq(g)

    if protocol == "DF":
        gp = gamma_df_hd(ch, cfg)
        if gp > 0.0 and cfg.p0 * gsq < gp:
            return CanonicalMapping(None, 1.0, "PBS-CBS link cannot support r0")
        return CanonicalMapping(CanonicalProblem(h1, h2, 1.0, max(gp, 0.0), cfg.pc), 1.0)

    gp = gamma_af_hd(ch, cfg)
    kappa = cfg.p0 * gsq * gsq + gsq
    scale = 1.0 / math.sqrt(kappa) if kappa > 0.0 else 0.0
    if gp <= 0.0:
        return CanonicalMapping(CanonicalProblem(h1, h2, 1.0, 0.0, cfg.pc), scale)
    denom = gsq * gsq - gp * gsq
    if not denom > AF_MARGIN * gsq * gsq:
        return CanonicalMapping(None, scale, "||g||^2 does not exceed the AF SINR threshold")
    return CanonicalMapping(CanonicalProblem(h1, h2, 1.0, kappa * gp / denom, cfg.pc), scale)


def af_matrix(w_a, g) -> np.ndarray:
    """Rank-one AF relay matrix ``w_a g^H``."""
    return np.outer(np.asarray(w_a, dtype=np.complex128), np.conj(g))


def _log2p(x: float, prelog: float) -> float:
    return prelog * math.log2(1.0 + max(x, 0.0))


def hd_rates_af_matrix(ch: ChannelSet, cfg: SystemConfig, A, w_c,
                       policy: str | None = None, pt: float | None = None):
    """``(r_pu, r_cu, power)`` for an arbitrary AF matrix ``A``."""
    policy = policy or cfg.hd_antenna_policy
    pt = pt_effective_hd(cfg) if pt is None else pt
    g, hc0, hc = ch.hd_view(policy)
    A = np.asarray(A, dtype=np.complex128)
    w_c = np.asarray(w_c, dtype=np.complex128)
    Ag = A @ g
    hc0A = hc0.conj() @ A
    hcA = hc.conj() @ A
    relayed = cfg.p0 * abs(np.vdot(hc0, Ag)) ** 2 / (
        abs(np.vdot(hc0, w_c)) ** 2 + norm_sq(hc0A) + pt * norm_sq(hc0) + 1.0)
    r_pu = _log2p(cfg.p0 * abs(ch.h0) ** 2 + relayed, 0.5)
    sinr_cu = abs(np.vdot(hc, w_c)) ** 2 / (
        cfg.p0 * abs(np.vdot(hc, Ag)) ** 2 + norm_sq(hcA) + pt * norm_sq(hc) + 1.0)
    power = norm_sq(w_c) + cfg.p0 * norm_sq(Ag) + float(np.sum(np.abs(A) ** 2))
    return r_pu, _log2p(sinr_cu, 0.5), power


def hd_rates(ch: ChannelSet, cfg: SystemConfig, protocol: str, w_c, w_relay,
             policy: str | None = None, pt: float | None = None) -> tuple[float, float]:
    """PU and CU rates of a beamformer pair, evaluated from the signal model."""
    return _hd_eval(ch, cfg, protocol, w_c, w_relay, policy, pt)[:2]


def _hd_eval(ch, cfg, protocol, w_c, w_relay, policy=None, pt=None):
    check_protocol(protocol)
    policy = policy or cfg.hd_antenna_policy
    pt = pt_effective_hd(cfg) if pt is None else pt
    g, hc0, hc = ch.hd_view(policy)
    if protocol == "AF":
        return hd_rates_af_matrix(ch, cfg, af_matrix(w_relay, g), w_c, policy, pt)
    w_c = np.asarray(w_c, dtype=np.complex128)
    w0 = np.asarray(w_relay, dtype=np.complex128)
    fwd = abs(np.vdot(hc0, w0)) ** 2 / (abs(np.vdot(hc0, w_c)) ** 2 + pt * norm_sq(hc0) + 1.0)
    r_pu = _log2p(cfg.p0 * abs(ch.h0) ** 2 + min(cfg.p0 * norm_sq(g), fwd), 0.5)
    sinr_cu = abs(np.vdot(hc, w_c)) ** 2 / (abs(np.vdot(hc, w0)) ** 2 + pt * norm_sq(hc) + 1.0)
    return r_pu, _log2p(sinr_cu, 0.5), norm_sq(w_c) + norm_sq(w0)


def _infeasible(ch, cfg, mode, protocol, n, pt, budget, reason) -> LinkSolution:
    zeros = np.zeros(n, dtype=np.complex128)
    if mode == "HD":
        r_pu = _log2p(cfg.p0 * abs(ch.h0) ** 2, 0.5)
    else:
        r_pu = 0.0
    return LinkSolution(mode=mode, protocol=protocol, feasible=False, r_pu=r_pu, r_cu=0.0,
                        w_c=zeros, w_relay=zeros.copy(), pt_effective=pt, power_used=0.0,
                        budget=budget, reason=reason)


def solve_hd(ch: ChannelSet, cfg: SystemConfig, protocol: str,
             policy: str | None = None) -> LinkSolution:
    """Maximize the HD CU rate subject to the PU rate target and ``P_C``."""
    policy = policy or cfg.hd_antenna_policy
    pt = pt_effective_hd(cfg)
    n = ch.hd_view(policy)[1].shape[0]
    mapping = map_hd_to_canonical(ch, cfg, protocol, policy, pt)
    if not mapping.feasible:
        return _infeasible(ch, cfg, "HD", protocol, n, pt, cfg.pc, mapping.reason)
    sol = solve_canonical(mapping.problem)
    if not sol.feasible:
        return _infeasible(ch, cfg, "HD", protocol, n, pt, cfg.pc,
                           f"PU SINR target needs power {sol.min_power:.6g} > {cfg.pc:.6g}")
    w_c, w_relay = mapping.unscale(sol)
    r_pu, _, power = _hd_eval(ch, cfg, protocol, w_c, w_relay, policy, pt)
    return LinkSolution(mode="HD", protocol=protocol, feasible=True, r_pu=r_pu,
                        r_cu=_log2p(sol.gamma2, 0.5), w_c=w_c, w_relay=w_relay,
                        pt_effective=pt, power_used=power, sinr_cu=sol.gamma2, budget=cfg.pc)


def max_pu_rate_hd(ch: ChannelSet, cfg: SystemConfig, protocol: str,
                   policy: str | None = None) -> float:
    """PU rate with all CBS power spent on relaying (MRT towards the PU, ``w_c = 0``)."""
    check_protocol(protocol)
    policy = policy or cfg.hd_antenna_policy
    g, hc0, _ = ch.hd_view(policy)
    nh = math.sqrt(norm_sq(hc0))
    w_c = np.zeros_like(hc0)
    if nh == 0.0:
        return hd_rates(ch, cfg, protocol, w_c, w_c, policy)[0]
    direction = hc0 / nh
    if protocol == "DF":
        relay = math.sqrt(cfg.pc) * direction
    else:
        gsq = norm_sq(g)
        kappa = cfg.p0 * gsq * gsq + gsq
        relay = math.sqrt(cfg.pc / kappa) * direction if kappa > 0 else 0.0 * direction
    return hd_rates(ch, cfg, protocol, w_c, relay, policy)[0]
