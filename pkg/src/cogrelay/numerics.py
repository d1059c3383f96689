"""Small complex-vector helpers and the scalar root finder shared by the solvers.

Vectors are 1-D ``numpy`` complex arrays.  Every inverse that shows up in the
solvers is a rank-one update of the identity, so it is applied implicitly with
the Sherman-Morrison formula instead of being formed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EPS_ORTHO = 1e-12
EPS_RESIDUAL = 1e-9


def as_cvec(x) -> np.ndarray:
    """Return ``x`` as a 1-D complex128 array (copying only when needed)."""
    v = np.asarray(x, dtype=np.complex128)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {v.shape}")
    return v


def _check_dims(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")


def herm_inner(a, b) -> complex:
    """Hermitian inner product ``a^H b`` (conjugate-linear in ``a``)."""
    a = as_cvec(a)
    b = as_cvec(b)
    _check_dims(a, b)
    return complex(np.vdot(a, b))


def norm_sq(a) -> float:
    a = as_cvec(a)
    return float(np.vdot(a, a).real)


def project_orthogonal(x, v) -> np.ndarray:
    """Project ``x`` onto the orthogonal complement of ``v``.

    Computes ``(I - v v^H / ||v||^2) x``.
    """
    x = as_cvec(x)
    v = as_cvec(v)
    _check_dims(x, v)
    vv = norm_sq(v)
    if vv == 0.0:
        raise ValueError("cannot project against a zero vector")
    return x - (np.vdot(v, x) / vv) * v


def rank1_inverse_apply(h, lam: float, x) -> np.ndarray:
    """Apply ``(I + lam h h^H)^{-1}`` to ``x`` without forming a matrix."""
    h = as_cvec(h)
    x = as_cvec(x)
    _check_dims(h, x)
    if lam < 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    if lam == 0.0:
        return x.copy()
    return x - (lam * np.vdot(h, x) / (1.0 + lam * norm_sq(h))) * h


@dataclass(frozen=True)
class QuadraticCoeffs:
    """Coefficients of ``A x^2 + B x + C``."""

    A: float
    B: float
    C: float

    def __call__(self, x: float) -> float:
        return (self.A * x + self.B) * x + self.C

    @property
    def discriminant(self) -> float:
        return self.B * self.B - 4.0 * self.A * self.C


def min_positive_root(q: QuadraticCoeffs) -> float:
    """Smaller positive root of ``A x^2 + B x + C`` with ``A >= 0, B < 0, C >= 0``.

    The larger-magnitude root is formed first and the small one is recovered
    from the product of roots, which avoids cancellation when ``|B|`` dominates.
    ``A == 0`` (collinear channels in the dual problem) degenerates to the
    linear root ``-C / B``.

    Raises
    ------
    ValueError
        If the sign pattern is violated or the discriminant is negative.
    """
    A, B, C = float(q.A), float(q.B), float(q.C)
    if not (A >= 0.0 and C >= 0.0 and B < 0.0):
        raise ValueError(f"coefficients outside the supported sign pattern: {q}")
    disc = B * B - 4.0 * A * C
    if disc < 0.0:
        # double roots can land a few ulps below zero
        if disc > -4.0 * EPS_ORTHO * B * B:
            disc = 0.0
        else:
            raise ValueError(f"negative discriminant {disc:.6g}: no real root")
    big = 0.5 * (-B + math.sqrt(disc))
    return C / big
