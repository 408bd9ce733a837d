"""Independent reference computations used by the tests.

Everything here is deliberately written against different algorithms than
the library (bisection instead of QL, mpmath instead of float recurrences)
so agreement is evidence, not circularity.
"""

import mpmath as mp
import numpy as np


def sturm_count(d, e, x) -> int:
    """Number of eigenvalues of the symmetric tridiagonal (d, e) below x.

    Plain Sturm sequence with the standard underflow guard.
    """
    count = 0
    q = 1.0
    tiny = 1e-300
    for i in range(len(d)):
        off = e[i - 1] ** 2 if i > 0 else 0.0
        q = (d[i] - x) - (off / q if q != 0.0 else off / tiny)
        if q < 0.0:
            count += 1
    return count


def tridiag_eigvals_bisect(d, e, tol=1e-14) -> np.ndarray:
    """All eigenvalues of the symmetric tridiagonal (d, e) by bisection."""
    d = np.asarray(d, dtype=float)
    e = np.asarray(e, dtype=float)
    n = len(d)
    radius = np.max(np.abs(d)) + 2.0 * (np.max(np.abs(e)) if n > 1 else 0.0) + 1.0
    out = np.empty(n)
    for k in range(n):
        lo, hi = -radius, radius
        # invariant: count(lo) <= k < count(hi)
        while hi - lo > tol * max(1.0, abs(lo), abs(hi)):
            mid = 0.5 * (lo + hi)
            if sturm_count(d, e, mid) <= k:
                lo = mid
            else:
                hi = mid
        out[k] = 0.5 * (lo + hi)
    return out


def jacobi_b0(alpha: float, beta: float) -> float:
    """Total mass of the Jacobi weight, via the beta function."""
    val = mp.power(2, alpha + beta + 1) * mp.beta(alpha + 1, beta + 1)
    return float(val)


def integral_1d(f, alpha, beta, digits=30) -> float:
    """High-precision weighted integral of a smooth f on (-1, 1)."""
    with mp.workdps(digits):
        val = mp.quad(
            lambda t: f(float(t)) * mp.power(1 - t, alpha) * mp.power(1 + t, beta),
            [-1, 0, 1],
        )
    return float(val)


def random_poly_pair(rng, deg1, deg2):
    """Random bivariate polynomial sum c_{ij} x1^i x2^j and its evaluator."""
    c = rng.standard_normal((deg1 + 1, deg2 + 1))

    def p(x1, x2):
        return np.polynomial.polynomial.polyval2d(x1, x2, c)

    return c, p


def integral_poly(c, alpha1, beta1, alpha2, beta2) -> float:
    """Exact weighted integral of the polynomial with coefficients c.

    Uses the monomial moments m_k = int (1-t)^a (1+t)^b t^k dt computed
    by expanding t^k = ((1+t) - 1)^k into beta-function terms.
    """
    def moments(a, b, kmax):
        out = np.empty(kmax + 1)
        with mp.workdps(40):
            for k in range(kmax + 1):
                s = mp.mpf(0)
                for j in range(k + 1):
                    s += mp.binomial(k, j) * (-1) ** (k - j) * mp.power(2, a + b + 1 + j) \
                        * mp.beta(a + 1, b + 1 + j)
                out[k] = float(s)
        return out

    m1 = moments(alpha1, beta1, c.shape[0] - 1)
    m2 = moments(alpha2, beta2, c.shape[1] - 1)
    return float(m1 @ c @ m2)
