"""Linear-algebra core for the discretized integral equation.

The discrete operator is I - Phi acting on vectors indexed by the tensor
grid, with axis 1 running fastest.  Three realizations trade memory for
structure: a dense matrix, a factored form that re-evaluates kernel rows
on the fly, and a separable form holding one small matrix per axis.  A
matvec-only GMRES and a squared-iteration Stein solver consume them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, ConvergenceError

__all__ = [
    "unfold",
    "fold",
    "SystemOperator",
    "KrylovStats",
    "lu_solve",
    "gmres",
    "stein_solve",
    "condition_number_inf",
]

# factored realization keeps the kernel matrix in memory up to this many
# unknowns and streams row blocks beyond it
_MATERIALIZE_LIMIT = 5000
_STREAM_BLOCK = 512


def unfold(a: np.ndarray) -> np.ndarray:
    """Flatten a grid array (n1, n2) to a vector with axis 1 fastest."""
    a = np.asarray(a)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d array, got ndim={a.ndim}")
    return a.ravel(order="F")


def fold(v: np.ndarray, n1: int, n2: int) -> np.ndarray:
    """Inverse of unfold: vector of length n1*n2 back to an (n1, n2) grid."""
    v = np.asarray(v)
    if v.size != n1 * n2:
        raise ValueError(f"length {v.size} does not match grid ({n1}, {n2})")
    return v.reshape((n1, n2), order="F")


@dataclass
class KrylovStats:
    iterations: int
    residuals: np.ndarray


class SystemOperator:
    """Matrix-free view of I - Phi with an operation counter.

    Exactly one realization is active:

    - ``dense``: full matrix F, matvec costs 2 N^2 flops;
    - ``factored``: diag(u) K diag(d) with K evaluated from a kernel
      callable, 2 N^2 + 3 N flops, K streamed when N is large;
    - ``separable``: Phi = kron(Phi2, Phi1), 2 N (n1 + n2) + N flops.

    ``flops`` accumulates the cost of every matvec issued.
    """

    def __init__(
        self,
        realization: str,
        n1: int,
        n2: int,
        *,
        dense=None,
        u=None,
        d=None,
        kernel_row_block=None,
        phi1=None,
        phi2=None,
    ):
        if realization not in ("dense", "factored", "separable"):
            raise ValueError(f"unknown realization {realization!r}")
        self.realization = realization
        self.n1 = int(n1)
        self.n2 = int(n2)
        self.N = self.n1 * self.n2
        self.flops = 0
        self.nmatvec = 0
        self._dense = dense
        self._u = u
        self._d = d
        self._row_block = kernel_row_block
        self._K = None
        self.phi1 = phi1
        self.phi2 = phi2
        if realization == "dense" and dense is None:
            raise ValueError("dense realization needs the matrix")
        if realization == "factored":
            if u is None or d is None or kernel_row_block is None:
                raise ValueError("factored realization needs u, d and a row block callback")
            if self.N <= _MATERIALIZE_LIMIT:
                self._K = kernel_row_block(0, self.N)
        if realization == "separable" and (phi1 is None or phi2 is None):
            raise ValueError("separable realization needs both axis matrices")

    def matvec(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape != (self.N,):
            raise ValueError(f"expected shape ({self.N},), got {v.shape}")
        self.nmatvec += 1
        if self.realization == "dense":
            self.flops += 2 * self.N * self.N
            return self._dense @ v
        if self.realization == "factored":
            self.flops += 2 * self.N * self.N + 3 * self.N
            dq = self._d * v
            if self._K is not None:
                acc = self._K @ dq
            else:
                acc = np.empty(self.N)
                for lo in range(0, self.N, _STREAM_BLOCK):
                    hi = min(lo + _STREAM_BLOCK, self.N)
                    acc[lo:hi] = self._row_block(lo, hi) @ dq
            return v - self._u * acc
        q = fold(v, self.n1, self.n2)
        self.flops += 2 * self.N * (self.n1 + self.n2) + self.N
        return v - unfold(self.phi1 @ q @ self.phi2.T)

    def to_dense(self) -> np.ndarray:
        """Materialize I - Phi as a full matrix."""
        if self.realization == "dense":
            return self._dense
        if self.realization == "separable":
            return np.eye(self.N) - np.kron(self.phi2, self.phi1)
        K = self._K if self._K is not None else self._row_block(0, self.N)
        return np.eye(self.N) - (self._u[:, None] * K) * self._d[None, :]


def lu_solve(op, b: np.ndarray) -> np.ndarray:
    """Direct dense solve; accepts an operator or a plain matrix."""
    F = op.to_dense() if isinstance(op, SystemOperator) else np.asarray(op, dtype=float)
    return np.linalg.solve(F, np.asarray(b, dtype=float))


def _as_matvec(op):
    if isinstance(op, SystemOperator):
        return op.matvec
    if callable(op):
        return op
    mat = np.asarray(op, dtype=float)
    return lambda v: mat @ v


def gmres(op, b, tol: float = 1e-14, maxiter: int | None = None):
    """Unrestarted GMRES with modified Gram-Schmidt.

    Starts from the zero vector.  One extra orthogonalization pass fires
    whenever the basis loses more than 1e-8 of orthogonality.  The
    returned residual history is the rotation-recurrence estimate, which
    never increases.

    Returns (x, KrylovStats).  Raises ConvergenceError, with the stats
    attached, if the target is not reached within maxiter steps.
    """
    matvec = _as_matvec(op)
    b = np.asarray(b, dtype=float)
    N = b.size
    if maxiter is None:
        maxiter = N
    beta = float(np.linalg.norm(b))
    if beta == 0.0:
        return np.zeros(N), KrylovStats(0, np.zeros(1))

    V = [b / beta]
    R = []  # triangularized columns
    cs: list[float] = []
    sn: list[float] = []
    g = [beta]
    residuals = [beta]
    target = tol * beta
    tiny = np.finfo(float).eps * beta

    converged = False
    for k in range(maxiter):
        w = matvec(V[k]).astype(float, copy=True)
        h = np.empty(k + 2)
        for i in range(k + 1):
            h[i] = np.dot(V[i], w)
            w -= h[i] * V[i]
        nw = float(np.linalg.norm(w))
        proj = np.array([np.dot(V[i], w) for i in range(k + 1)])
        if nw > 0.0 and np.max(np.abs(proj)) > 1e-8 * nw:
            for i in range(k + 1):
                w -= proj[i] * V[i]
            h[: k + 1] += proj
            nw = float(np.linalg.norm(w))
        h[k + 1] = nw

        # apply the accumulated rotations, then a new one to kill h[k+1]
        for i in range(k):
            t = cs[i] * h[i] + sn[i] * h[i + 1]
            h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1]
            h[i] = t
        denom = float(np.hypot(h[k], h[k + 1]))
        if denom == 0.0:
            c_new, s_new = 1.0, 0.0
        else:
            c_new, s_new = h[k] / denom, h[k + 1] / denom
        cs.append(c_new)
        sn.append(s_new)
        h[k] = denom
        g.append(-s_new * g[k])
        g[k] = c_new * g[k]
        R.append(h[: k + 1].copy())
        res = abs(g[k + 1])
        residuals.append(res)
        breakdown = nw <= tiny
        if res <= target or breakdown:
            converged = True
            break
        V.append(w / nw)

    m = len(R)
    y = np.zeros(m)
    for i in range(m - 1, -1, -1):
        y[i] = (g[i] - sum(R[j][i] * y[j] for j in range(i + 1, m))) / R[i][i]
    x = np.zeros(N)
    for i in range(m):
        x += y[i] * V[i]
    stats = KrylovStats(m, np.asarray(residuals))
    if not converged and residuals[-1] > target:
        raise ConvergenceError(
            f"gmres stopped at iteration {m} with residual {residuals[-1]:.3e} "
            f"(target {target:.3e})",
            stats=stats,
        )
    return x, stats


def _spectral_radius(mat: np.ndarray, iters: int = 50) -> float:
    """Power-iteration estimate; deterministic start, geometric-mean ratio."""
    n = mat.shape[0]
    rng = np.random.default_rng(1905)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    logs = []
    for _ in range(iters):
        v = mat @ v
        nv = np.linalg.norm(v)
        if nv == 0.0:
            return 0.0
        logs.append(np.log(nv))
        v /= nv
    return float(np.exp(np.mean(logs[-10:])))


def stein_solve(phi1, phi2, h, tol: float = 1e-13, maxiter: int = 200):
    """Solve A - Phi1 A Phi2^T = H by the squared iteration.

    Each pass doubles the number of series terms captured:
    A <- A + M A P^T, M <- M^2, P <- P^2.  Stops when the Frobenius
    residual drops below tol * ||H||_F.  Divergence is screened first
    through power-iteration estimates of the two spectral radii.
    """
    phi1 = np.asarray(phi1, dtype=float)
    phi2 = np.asarray(phi2, dtype=float)
    h = np.asarray(h, dtype=float)
    if h.shape != (phi1.shape[0], phi2.shape[0]):
        raise ValueError(
            f"right-hand side {h.shape} does not match ({phi1.shape[0]}, {phi2.shape[0]})"
        )
    r1 = _spectral_radius(phi1)
    r2 = _spectral_radius(phi2)
    if r1 * r2 >= 1.0:
        raise ConvergenceError(
            f"contraction test failed: spectral radius product {r1 * r2:.3e} >= 1"
        )
    hnorm = float(np.linalg.norm(h))
    if hnorm == 0.0:
        return np.zeros_like(h)
    a = h.copy()
    m = phi1.copy()
    p = phi2.copy()
    for _ in range(maxiter):
        resid = float(np.linalg.norm(phi1 @ a @ phi2.T - a + h))
        if resid <= tol * hnorm:
            return a
        a = a + m @ a @ p.T
        m = m @ m
        p = p @ p
    resid = float(np.linalg.norm(phi1 @ a @ phi2.T - a + h))
    if resid <= tol * hnorm:
        return a
    raise ConvergenceError(
        f"stein iteration stalled at relative residual {resid / hnorm:.3e} "
        f"after {maxiter} doublings"
    )


def condition_number_inf(op, cap: int = 4096) -> float:
    """Max-norm condition number through an explicit inverse.

    Refuses systems larger than ``cap`` unknowns; raise the cap
    explicitly when the cost is intended.
    """
    if isinstance(op, SystemOperator):
        if op.N > cap:
            raise CapacityError(
                f"condition number of a {op.N} x {op.N} system exceeds cap {cap}"
            )
        F = op.to_dense()
    else:
        F = np.asarray(op, dtype=float)
        if F.shape[0] > cap:
            raise CapacityError(
                f"condition number of a {F.shape[0]} x {F.shape[0]} system exceeds cap {cap}"
            )
    Finv = np.linalg.inv(F)
    norm = np.linalg.norm
    return float(norm(F, np.inf) * norm(Finv, np.inf))
