"""Univariate Gauss and anti-Gauss rules for Jacobi weights.

The n-point Gauss rule comes from the spectral factorization of the
order-n recurrence matrix.  The (n+1)-point companion rule is built from
the same matrix bordered with a doubled last off-diagonal coefficient;
its error on polynomials up to degree 2n + 1 is the exact negative of
the Gauss error, which is what makes averaging and bracketing work.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .orthopoly import JacobiWeight, recurrence_coeffs
from .tridiag import eig_tridiag

__all__ = ["QuadRule1D", "gauss_rule", "antigauss_rule", "nodes_contained"]


@dataclass(frozen=True)
class QuadRule1D:
    """One-dimensional interpolatory rule with positive weights."""

    kind: str
    weightspec: JacobiWeight
    nodes: np.ndarray
    weights: np.ndarray
    # for the companion rule: whether all nodes are guaranteed inside [-1, 1]
    contained: bool = True

    @property
    def npoints(self) -> int:
        return self.nodes.size

    def apply(self, g) -> float:
        """Apply the rule to a callable accepting an ndarray of nodes."""
        vals = np.asarray(g(self.nodes), dtype=float)
        return float(np.dot(self.weights, np.broadcast_to(vals, self.nodes.shape)))


def nodes_contained(w: JacobiWeight) -> bool:
    """Whether the companion rule of weight w keeps its nodes in [-1, 1].

    Four polynomial inequalities in (alpha, beta); all must hold.  The
    borderline Chebyshev cases hold with equality and are accepted.
    """
    al, be = w.alpha, w.beta
    s = al + be
    if al < -0.5 or be < -0.5:
        return False
    c3 = (2.0 * al + 1.0) * (s + 2.0) + 0.5 * (al + 1.0) * s * (s + 1.0)
    c4 = (2.0 * be + 1.0) * (s + 2.0) + 0.5 * (be + 1.0) * s * (s + 1.0)
    return c3 >= 0.0 and c4 >= 0.0


@lru_cache(maxsize=None)
def _gauss_cached(alpha: float, beta: float, n: int) -> QuadRule1D:
    w = JacobiWeight(alpha, beta)
    c = recurrence_coeffs(w, n)
    values, first = eig_tridiag(c.a[:n], np.sqrt(c.b[1:n]))
    lam = c.b[0] * first**2
    values.flags.writeable = False
    lam.flags.writeable = False
    return QuadRule1D("gauss", w, values, lam)


@lru_cache(maxsize=None)
def _antigauss_cached(alpha: float, beta: float, n: int) -> QuadRule1D:
    w = JacobiWeight(alpha, beta)
    c = recurrence_coeffs(w, n)
    diag = c.a[: n + 1]
    off = np.empty(n)
    off[: n - 1] = np.sqrt(c.b[1:n])
    off[n - 1] = np.sqrt(2.0 * c.b[n])
    values, first = eig_tridiag(diag, off)
    mu = c.b[0] * first**2
    values.flags.writeable = False
    mu.flags.writeable = False
    return QuadRule1D("antigauss", w, values, mu, contained=nodes_contained(w))


def gauss_rule(w: JacobiWeight, n: int) -> QuadRule1D:
    """The n-point Gauss rule for weight w.  Exact to degree 2n - 1."""
    if n < 1:
        raise ValueError(f"rule size must be positive, got {n}")
    return _gauss_cached(float(w.alpha), float(w.beta), int(n))


def antigauss_rule(w: JacobiWeight, n: int) -> QuadRule1D:
    """The (n+1)-point companion rule paired with the n-point Gauss rule.

    Its nodes strictly interlace the Gauss nodes.  The outermost pair may
    leave [-1, 1] when ``nodes_contained(w)`` is False; the rule is still
    returned, flagged through the ``contained`` field, and the square
    constructors decide whether to accept it.
    """
    if n < 1:
        raise ValueError(f"rule size must be positive, got {n}")
    return _antigauss_cached(float(w.alpha), float(w.beta), int(n))
