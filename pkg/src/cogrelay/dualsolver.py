"""Closed-form solution of the two-user SINR problem every relay solve reduces to.

The problem is::

    maximize    |h2^H w2|^2 / (1 + |h2^H w1|^2)
    subject to  |h1^H w1|^2 / (1 + c |h1^H w2|^2) >= gamma1
                ||w1||^2 + c ||w2||^2 <= P

With ``u2 = sqrt(c) w2`` it becomes a standard unit-noise MISO downlink with
SINR targets ``(gamma1, c * gamma2)`` and total power ``P``.  The dual
variables of the matching power-minimization problem satisfy
``lambda1 + lambda2 = P`` and ``lambda1`` is the smaller root of a quadratic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .channel import correlation
from .numerics import QuadraticCoeffs, as_cvec, herm_inner, norm_sq, rank1_inverse_apply


class RecoveryError(ArithmeticError):
    """The 2x2 power system for beamformer recovery is singular or infeasible."""


@dataclass(frozen=True)
class CanonicalProblem:
    h1: np.ndarray
    h2: np.ndarray
    c: float = 1.0
    gamma1: float = 0.0
    p_total: float = 1.0

    def __post_init__(self):
        h1 = as_cvec(self.h1)
        h2 = as_cvec(self.h2)
        if h1.shape != h2.shape:
            raise ValueError(f"h1 and h2 differ in dimension: {h1.shape} vs {h2.shape}")
        if not self.c > 0:
            raise ValueError(f"c must be > 0, got {self.c}")
        if self.gamma1 < 0:
            raise ValueError(f"gamma1 must be >= 0, got {self.gamma1}")
        if not self.p_total > 0:
            raise ValueError(f"p_total must be > 0, got {self.p_total}")
        object.__setattr__(self, "h1", h1)
        object.__setattr__(self, "h2", h2)

    @property
    def dim(self) -> int:
        return self.h1.shape[0]

    def rho2(self) -> float:
        if norm_sq(self.h1) == 0.0 or norm_sq(self.h2) == 0.0:
            return 0.0
        return correlation(self.h1, self.h2)

    def quadratic(self) -> QuadraticCoeffs:
        """Quadratic whose smaller root is ``lambda1``."""
        n1, n2 = norm_sq(self.h1), norm_sq(self.h2)
        A = n1 * n2 * (1.0 - self.rho2())
        B = -(n2 * self.gamma1 + self.p_total * A + n1)
        C = (self.p_total * n2 + 1.0) * self.gamma1
        return QuadraticCoeffs(A, B, C)

    def sinrs(self, w1, w2) -> tuple[float, float]:
        """Achieved ``(SINR1, SINR2)`` of a beamformer pair."""
        h1, h2 = self.h1, self.h2
        s1 = abs(herm_inner(h1, w1)) ** 2 / (1.0 + self.c * abs(herm_inner(h1, w2)) ** 2)
        s2 = abs(herm_inner(h2, w2)) ** 2 / (1.0 + abs(herm_inner(h2, w1)) ** 2)
        return s1, s2

    def power(self, w1, w2) -> float:
        return norm_sq(w1) + self.c * norm_sq(w2)

    def to_dict(self) -> dict:
        return {
            "h1": [[z.real, z.imag] for z in self.h1],
            "h2": [[z.real, z.imag] for z in self.h2],
            "c": self.c,
            "gamma1": self.gamma1,
            "p_total": self.p_total,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CanonicalProblem":
        def vec(items):
            return np.array([complex(re, im) for re, im in items], dtype=np.complex128)

        return cls(h1=vec(d["h1"]), h2=vec(d["h2"]), c=float(d.get("c", 1.0)),
                   gamma1=float(d.get("gamma1", 0.0)), p_total=float(d["p_total"]))


@dataclass(frozen=True)
class DualSolution:
    lambda1: float
    lambda2: float
    gamma2: float
    w1: np.ndarray
    w2: np.ndarray
    p_used: float
    feasible: bool = True

    def to_dict(self) -> dict:
        return {
            "feasible": True,
            "lambda1": self.lambda1,
            "lambda2": self.lambda2,
            "gamma2": self.gamma2,
            "w1": [[z.real, z.imag] for z in self.w1],
            "w2": [[z.real, z.imag] for z in self.w2],
            "p_used": self.p_used,
        }


@dataclass(frozen=True)
class CanonicalInfeasible:
    """``gamma1`` cannot be met within the budget.

    ``min_power`` is the power user 1 needs on its own, ``gamma1 / ||h1||^2``.
    """

    min_power: float
    p_total: float
    reason: str = "gamma1 not achievable within the power budget"
    feasible: bool = False

    def to_dict(self) -> dict:
        return {"feasible": False, "min_power": self.min_power,
                "p_total": self.p_total, "reason": self.reason}


def solve_canonical(p: CanonicalProblem) -> DualSolution | CanonicalInfeasible:
    """Optimal beamformers and user-2 SINR, or an infeasibility diagnostic."""
    n1, n2 = norm_sq(p.h1), norm_sq(p.h2)
    lam1, gamma2 = kernels.canonical_gamma2(n1, n2, p.rho2(), p.gamma1, p.c, p.p_total)
    if gamma2 < 0.0:
        need = p.gamma1 / n1 if n1 > 0 else math.inf
        return CanonicalInfeasible(min_power=need, p_total=p.p_total)
    lam2 = max(p.p_total - lam1, 0.0)
    try:
        w1, w2 = recover_beamformers(p, lam1, lam2)
    except RecoveryError:
        gamma2, w1, w2 = _oracle_search(p, 48)
    else:
        gamma2 = p.sinrs(w1, w2)[1]
    return DualSolution(lambda1=lam1, lambda2=lam2, gamma2=gamma2, w1=w1, w2=w2,
                        p_used=p.power(w1, w2))


def _mrt(h: np.ndarray, power: float) -> np.ndarray:
    nh = math.sqrt(norm_sq(h))
    if nh == 0.0 or power <= 0.0:
        return np.zeros_like(h)
    return math.sqrt(power) * h / nh


def recover_beamformers(p: CanonicalProblem, lambda1: float,
                        lambda2: float) -> tuple[np.ndarray, np.ndarray]:
    """Beamformers from the dual variables.

    Directions are the MMSE-type vectors ``(I + lambda2 h2 h2^H)^{-1} h1`` and
    ``(I + lambda1 h1 h1^H)^{-1} h2``; powers solve the 2x2 linear system that
    makes both SINR constraints tight.

    Raises
    ------
    RecoveryError
        If the power system is singular or yields a negative power.
    """
    h1, h2, c = p.h1, p.h2, p.c
    n1, n2 = norm_sq(h1), norm_sq(h2)
    if p.gamma1 <= 0.0:
        return np.zeros_like(h1), _mrt(h2, p.p_total / c)
    one_m = max(1.0 - p.rho2(), 0.0)
    t2 = lambda2 * n2 * (1.0 + lambda1 * n1 * one_m) / (1.0 + lambda1 * n1)
    if t2 <= 0.0 or n2 == 0.0:
        return _mrt(h1, p.gamma1 / n1), np.zeros_like(h2)

    d1 = rank1_inverse_apply(h2, lambda2, h1)
    d2 = rank1_inverse_apply(h1, lambda1, h2)
    d1 /= math.sqrt(norm_sq(d1))
    d2 /= math.sqrt(norm_sq(d2))
    a11 = abs(herm_inner(h1, d1)) ** 2
    a12 = abs(herm_inner(h1, d2)) ** 2
    a21 = abs(herm_inner(h2, d1)) ** 2
    a22 = abs(herm_inner(h2, d2)) ** 2
    g1 = p.gamma1
    det = a11 * a22 - g1 * t2 * a12 * a21
    if not abs(det) > 1e-13 * a11 * a22:
        raise RecoveryError(f"singular power system (det={det:.3g})")
    q1 = g1 * (a22 + t2 * a12) / det
    s2 = t2 * (a11 + g1 * a21) / det
    if q1 < 0.0 or s2 < 0.0:
        raise RecoveryError(f"negative power in recovery (q1={q1:.3g}, q2={s2:.3g})")
    return math.sqrt(q1) * d1, math.sqrt(s2 / c) * d2


def _span_basis(h1: np.ndarray, h2: np.ndarray):
    """Orthonormal ``(e1, e2)`` with ``h1 = a1 e1`` (up to phase) and
    ``h2 = alpha e1 + beta e2``, ``alpha, beta >= 0``."""
    n = h1.shape[0]
    a1 = math.sqrt(norm_sq(h1))
    if a1 > 0.0:
        e1 = h1 / a1
    elif norm_sq(h2) > 0.0:
        e1 = h2 / math.sqrt(norm_sq(h2))
    else:
        e1 = np.zeros(n, dtype=np.complex128)
        e1[0] = 1.0
    proj = np.vdot(e1, h2)
    if abs(proj) > 0.0:
        e1 = e1 * (proj / abs(proj))
    alpha = abs(proj)
    resid = h2 - np.vdot(e1, h2) * e1
    beta = math.sqrt(norm_sq(resid))
    if beta > 1e-14 * max(1.0, alpha):
        e2 = resid / beta
    else:
        beta = 0.0
        # any unit vector orthogonal to e1
        k = int(np.argmin(np.abs(e1)))
        basis = np.zeros(n, dtype=np.complex128)
        basis[k] = 1.0
        e2 = basis - np.vdot(e1, basis) * e1
        e2 /= math.sqrt(norm_sq(e2))
    return a1, alpha, beta, e1, e2


def _oracle_search(p: CanonicalProblem, resolution: int):
    if p.dim < 2:
        raise ValueError("the brute-force oracle needs dimension >= 2")
    a1, alpha, beta, e1, e2 = _span_basis(p.h1, p.h2)
    if p.gamma1 > p.p_total * a1 * a1:
        return 0.0, np.zeros_like(p.h1), np.zeros_like(p.h2)
    half_pi, two_pi = 0.5 * math.pi, 2.0 * math.pi
    lo = [0.0, 0.0, 0.0, 0.0]
    hi = [half_pi, two_pi, half_pi, two_pi]
    best = kernels.oracle_grid(a1, alpha, beta, p.c, p.gamma1, p.p_total, lo, hi, resolution)
    if math.isnan(best[1]):
        return 0.0, np.zeros_like(p.h1), np.zeros_like(p.h2)
    steps = [half_pi / (resolution - 1), two_pi / (resolution - 1)] * 2
    x = best[1:]
    lo = [x[k] - steps[k] for k in range(4)]
    hi = [x[k] + steps[k] for k in range(4)]
    for k in (0, 2):
        lo[k] = max(lo[k], 0.0)
        hi[k] = min(hi[k], half_pi)
    refined = kernels.oracle_grid(a1, alpha, beta, p.c, p.gamma1, p.p_total, lo, hi, resolution)
    if refined[0] > best[0]:
        best = refined
    value, t1, f1, t2, f2 = best
    d1 = math.cos(t1) * e1 + math.sin(t1) * np.exp(1j * f1) * e2
    d2 = math.cos(t2) * e1 + math.sin(t2) * np.exp(1j * f2) * e2
    a11 = abs(np.vdot(p.h1, d1)) ** 2
    a12 = abs(np.vdot(p.h1, d2)) ** 2
    if p.gamma1 > 0.0:
        q2 = (p.p_total - p.gamma1 / a11) / (p.c * (1.0 + p.gamma1 * a12 / a11))
        q1 = p.gamma1 * (1.0 + p.c * q2 * a12) / a11
    else:
        q1, q2 = 0.0, p.p_total / p.c
    return value, math.sqrt(q1) * d1, math.sqrt(max(q2, 0.0)) * d2


def oracle_canonical(p: CanonicalProblem, resolution: int = 24) -> float:
    """Brute-force optimum of user-2 SINR over beamformers in ``span{h1, h2}``.

    Components outside the span change no SINR term and only cost power, so
    the restriction loses nothing.  Each beamformer direction is gridded on
    two angles (``resolution`` points per axis) and refined once on a local
    grid around the best cell; for fixed directions the power split is exact.
    Returns 0 when ``gamma1`` is unreachable even with full-power MRT.
    """
    return _oracle_search(p, resolution)[0]
