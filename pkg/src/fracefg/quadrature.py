"""Gauss-Legendre and Gauss-Jacobi rules on [-1, 1].

The Jacobi rules carry the weakly singular weight of a one-sided Caputo
kernel: ``(1 - z)**(-alpha)`` for the left horizon (singular at z = +1) and
``(1 + z)**(-alpha)`` for the right horizon (singular at z = -1).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gamma, log, exp, lgamma

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import ConfigurationError

__all__ = ["QuadRule", "gauss_legendre", "gauss_jacobi", "jacobi_pair",
           "jacobi_moment"]


@dataclass(frozen=True)
class QuadRule:
    """Immutable quadrature rule on [-1, 1]."""

    points: np.ndarray
    weights: np.ndarray
    kind: str
    alpha: float | None = None

    def __post_init__(self):
        self.points.setflags(write=False)
        self.weights.setflags(write=False)

    def __len__(self):
        return len(self.points)

    def integrate(self, f):
        """Apply the rule to a callable ``f`` evaluated at the abscissae."""
        return np.tensordot(self.weights, f(self.points), axes=(0, 0))


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> QuadRule:
    """n-point Gauss-Legendre rule, exact up to degree 2n - 1."""
    if int(n) != n or n < 1:
        raise ConfigurationError(f"Gauss-Legendre order must be >= 1, got {n}")
    x, w = np.polynomial.legendre.leggauss(int(n))
    return QuadRule(x, w, "legendre")


def _golub_welsch(n, a, b):
    # Jacobi weight (1 - z)**a (1 + z)**b; monic three-term recurrence.
    k = np.arange(n, dtype=float)
    s = 2.0 * k + a + b
    diag = np.empty(n)
    diag[0] = (b - a) / (a + b + 2.0)
    diag[1:] = (b * b - a * a) / (s[1:] * (s[1:] + 2.0))
    kk = k[1:]
    ss = s[1:]
    off2 = (4.0 * kk * (kk + a) * (kk + b) * (kk + a + b)
            / (ss * ss * (ss + 1.0) * (ss - 1.0)))
    nodes, vecs = eigh_tridiagonal(diag, np.sqrt(off2))
    mu0 = exp((a + b + 1.0) * log(2.0) + lgamma(a + 1.0) + lgamma(b + 1.0)
              - lgamma(a + b + 2.0))
    weights = mu0 * vecs[0, :] ** 2
    return nodes, weights


@lru_cache(maxsize=None)
def gauss_jacobi(n: int, alpha: float, side: str = "left") -> QuadRule:
    """Gauss-Jacobi rule for the one-sided fractional kernel.

    Parameters
    ----------
    n : int
        Number of points; the rule is exact for ``f * weight`` with ``f`` a
        polynomial of degree ``<= 2n - 1``.
    alpha : float
        Fractional order in (0, 1).
    side : {"left", "right"}
        ``"left"`` integrates against ``(1 - z)**(-alpha)``, ``"right"``
        against ``(1 + z)**(-alpha)``.
    """
    if int(n) != n or n < 1:
        raise ConfigurationError(f"Gauss-Jacobi order must be >= 1, got {n}")
    if not 0.0 < alpha < 1.0:
        raise ConfigurationError(
            f"Gauss-Jacobi rule needs alpha in (0, 1), got {alpha}")
    if side == "left":
        x, w = _golub_welsch(int(n), -float(alpha), 0.0)
    elif side == "right":
        x, w = _golub_welsch(int(n), -float(alpha), 0.0)
        x, w = -x[::-1], w[::-1]
    else:
        raise ConfigurationError(f"unknown Jacobi side {side!r}")
    return QuadRule(np.ascontiguousarray(x), np.ascontiguousarray(w),
                    f"jacobi-{side}", float(alpha))


def jacobi_pair(n: int, alpha: float) -> tuple[QuadRule, QuadRule]:
    """Left and right rules sharing ``n`` and ``alpha``."""
    return gauss_jacobi(n, alpha, "left"), gauss_jacobi(n, alpha, "right")


def jacobi_moment(k: int, alpha: float, side: str = "left") -> float:
    """Closed form of the integral of ``z**k`` against the one-sided weight.

    Uses the substitution ``u = 1 - z`` (left) and the binomial expansion of
    ``(1 - u)**k``; the right-side value follows from ``z -> -z``.
    """
    total = 0.0
    for j in range(k + 1):
        binom = gamma(k + 1) / (gamma(j + 1) * gamma(k - j + 1))
        total += binom * (-1.0) ** j * 2.0 ** (j + 1 - alpha) / (j + 1 - alpha)
    return total if side == "left" else (-1.0) ** k * total
