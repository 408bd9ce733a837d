"""Nystrom discretization of second-kind integral equations on the square.

The unknown lives in a weighted sup-norm space: all function values are
carried around multiplied by a boundary weight u, which keeps endpoint
singularities of the data out of the linear algebra.  Discretizing with
the tensor Gauss rule and with its companion rule gives two interpolants
that straddle the solution wherever the underlying rules straddle the
integral, and their average then halves the attainable error bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linsolve
from .cubature import CubatureRule2D, antigauss_cubature, gauss_cubature
from .errors import AssemblyError, EvaluationError
from .linsolve import SystemOperator, fold, gmres, lu_solve, stein_solve, unfold
from .orthopoly import JacobiWeight

__all__ = [
    "SpaceWeight",
    "FredholmProblem",
    "NystromSolution",
    "AveragedInterpolant",
    "GridBracketing",
    "assemble_system",
    "solve_nystrom",
    "interpolant_eval",
    "averaged_interpolant",
    "relative_error",
    "condition_number_inf",
    "bracketing_check",
]

_EVAL_BLOCK = 1024


def _powfac(base, expo):
    # exponent 0 short-circuits so nodes slightly beyond the interval stay finite
    if expo == 0.0:
        return np.ones_like(np.asarray(base, dtype=float))
    return np.asarray(base, dtype=float) ** expo


@dataclass(frozen=True)
class SpaceWeight:
    """Boundary weight u(x) = prod_l (1 - x_l)^gamma_l (1 + x_l)^delta_l."""

    gamma1: float
    delta1: float
    gamma2: float
    delta2: float

    def __post_init__(self):
        for name in ("gamma1", "delta1", "gamma2", "delta2"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be nonnegative, got {getattr(self, name)}")

    def eval_axis(self, axis: int, x) -> np.ndarray:
        if axis == 1:
            g, d = self.gamma1, self.delta1
        elif axis == 2:
            g, d = self.gamma2, self.delta2
        else:
            raise ValueError(f"axis must be 1 or 2, got {axis}")
        x = np.asarray(x, dtype=float)
        return _powfac(1.0 - x, g) * _powfac(1.0 + x, d)

    def eval(self, x1, x2) -> np.ndarray:
        return self.eval_axis(1, x1) * self.eval_axis(2, x2)


@dataclass(frozen=True)
class FredholmProblem:
    """Data of (I - K) f = g with a product Jacobi weight in the integral.

    The kernel enters either as a single callable k(x1, x2, y1, y2) with
    the integration point first, or as a separable pair (k1, k2) of axis
    factors k_l(x, y); exactly one of the two.  ``mult`` scales the
    integral operator.  The boundary weight must be admissible for the
    quadrature weight: gamma_l < alpha_l + 1 and delta_l < beta_l + 1.
    """

    w1: JacobiWeight
    w2: JacobiWeight
    u: SpaceWeight
    rhs: object
    kernel: object = None
    kernel_pair: tuple = ()
    mult: float = 1.0

    def __post_init__(self):
        if (self.kernel is None) == (not self.kernel_pair):
            raise ValueError("provide exactly one of kernel or kernel_pair")
        if self.kernel_pair and len(self.kernel_pair) != 2:
            raise ValueError("kernel_pair must hold the two axis factors")
        pairs = [
            ("gamma1", self.u.gamma1, "alpha1", self.w1.alpha),
            ("delta1", self.u.delta1, "beta1", self.w1.beta),
            ("gamma2", self.u.gamma2, "alpha2", self.w2.alpha),
            ("delta2", self.u.delta2, "beta2", self.w2.beta),
        ]
        for uname, uval, wname, wval in pairs:
            if not (uval < wval + 1.0):
                raise ValueError(
                    f"space weight not admissible: need {uname} < {wname} + 1, "
                    f"got {uname}={uval} against {wname}={wval}"
                )

    @property
    def separable(self) -> bool:
        return bool(self.kernel_pair)

    def kernel_values(self, x1, x2, y1, y2) -> np.ndarray:
        """Kernel including the multiplier; integration point first."""
        if self.kernel_pair:
            k1, k2 = self.kernel_pair
            vals = np.asarray(k1(x1, y1), dtype=float) * np.asarray(k2(x2, y2), dtype=float)
        else:
            vals = np.asarray(self.kernel(x1, x2, y1, y2), dtype=float)
        return self.mult * vals


def _axis_weight_values(problem, rule):
    """Space weight at the axis nodes, validated positive and finite."""
    out = []
    for axis, r in ((1, rule.rule1), (2, rule.rule2)):
        vals = problem.u.eval_axis(axis, r.nodes)
        bad = ~(np.isfinite(vals) & (vals > 0.0))
        if np.any(bad):
            i = int(np.argmax(bad))
            raise AssemblyError(
                f"space weight is {vals[i]!r} at axis-{axis} node {r.nodes[i]:.17g}; "
                "every node must carry a positive weight",
                node=(axis, r.nodes[i]),
            )
        out.append(vals)
    return out


def assemble_system(problem: FredholmProblem, rule: CubatureRule2D, realization: str = "auto"):
    """Collocation system (I - Phi) a = (g u)(nodes) on the rule's grid.

    Returns (operator, rhs).  ``realization`` picks the operator storage:
    ``separable`` (needs a kernel pair), ``factored``, ``dense``, or
    ``auto`` to choose the cheapest form the kernel supports.
    """
    if rule.kind not in ("gauss", "antigauss"):
        raise ValueError(f"assembly needs a tensor rule, got kind {rule.kind!r}")
    if realization == "auto":
        realization = "separable" if problem.separable else "factored"
    if realization == "separable" and not problem.separable:
        raise ValueError("separable realization needs a kernel pair")

    u1, u2 = _axis_weight_values(problem, rule)
    uflat = np.tile(u1, u2.size) * np.repeat(u2, u1.size)
    dflat = rule.weights / uflat

    gvals = np.asarray(problem.rhs(rule.nodes1, rule.nodes2), dtype=float)
    gvals = np.broadcast_to(gvals, rule.nodes1.shape)
    bad = ~np.isfinite(gvals)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise EvaluationError(
            f"right-hand side not finite at ({rule.nodes1[i]:.17g}, {rule.nodes2[i]:.17g})",
            node=(rule.nodes1[i], rule.nodes2[i]),
        )
    h = gvals * uflat

    n1 = rule.rule1.npoints
    n2 = rule.rule2.npoints

    if realization == "separable":
        k1, k2 = problem.kernel_pair
        x1, x2 = rule.rule1.nodes, rule.rule2.nodes
        K1 = np.asarray(k1(x1[None, :], x1[:, None]), dtype=float)
        K2 = np.asarray(k2(x2[None, :], x2[:, None]), dtype=float)
        if not (np.all(np.isfinite(K1)) and np.all(np.isfinite(K2))):
            raise AssemblyError("axis kernel factor not finite on the node grid")
        phi1 = problem.mult * rule.rule1.weights[None, :] * (u1[:, None] / u1[None, :]) * K1
        phi2 = rule.rule2.weights[None, :] * (u2[:, None] / u2[None, :]) * K2
        op = SystemOperator("separable", n1, n2, phi1=phi1, phi2=phi2)
        return op, h

    x1f, x2f = rule.nodes1, rule.nodes2

    def row_block(lo, hi):
        vals = problem.kernel_values(
            x1f[None, :], x2f[None, :], x1f[lo:hi, None], x2f[lo:hi, None]
        )
        if not np.all(np.isfinite(vals)):
            r, c = np.unravel_index(int(np.argmax(~np.isfinite(vals))), vals.shape)
            raise AssemblyError(
                f"kernel not finite at integration node ({x1f[c]:.17g}, {x2f[c]:.17g}), "
                f"collocation node ({x1f[lo + r]:.17g}, {x2f[lo + r]:.17g})",
                node=(x1f[c], x2f[c]),
            )
        return vals

    op = SystemOperator(
        "factored", n1, n2, u=uflat, d=dflat, kernel_row_block=row_block
    )
    if realization == "dense":
        op = SystemOperator("dense", n1, n2, dense=op.to_dense())
    return op, h


class NystromSolution:
    """Solved collocation system plus everything interpolation needs."""

    def __init__(self, problem, rule, rulekind, solver, coeffs, stats, op):
        self.problem = problem
        self.rule = rule
        self.rulekind = rulekind
        self.solver = solver
        self.coeffs = coeffs
        self.stats = stats
        self.op = op

    @property
    def iterations(self):
        return None if self.stats is None else self.stats.iterations

    def eval(self, y1, y2, unweighted: bool = True):
        return interpolant_eval(self, y1, y2, unweighted=unweighted)


def solve_nystrom(
    problem: FredholmProblem,
    n1: int,
    n2: int,
    rulekind: str = "gauss",
    solver: str = "auto",
    tol: float = 1e-14,
    allow_uncontained: bool = False,
) -> NystromSolution:
    """Discretize with the requested rule kind and solve.

    ``rulekind`` is ``gauss`` (n1 x n2 points) or ``antigauss`` (one more
    per axis).  Solvers: ``lu``, ``gmres`` (dense matvec), ``gmres-fm``
    (factored matvec), ``gmres-sk`` and ``stein`` (separable kernels
    only), or ``auto``.  ``stein`` falls back to ``gmres-sk`` when its
    contraction precheck fails.
    """
    if rulekind == "gauss":
        rule = gauss_cubature(problem.w1, problem.w2, n1, n2)
    elif rulekind == "antigauss":
        rule = antigauss_cubature(
            problem.w1, problem.w2, n1, n2, allow_uncontained=allow_uncontained
        )
    else:
        raise ValueError(f"rulekind must be gauss or antigauss, got {rulekind!r}")

    if solver == "auto":
        if problem.separable:
            solver = "gmres-sk"
        elif rule.npoints <= 1024:
            solver = "lu"
        else:
            solver = "gmres-fm"
    if solver in ("gmres-sk", "stein") and not problem.separable:
        raise ValueError(f"solver {solver!r} needs a separable kernel")

    realization = {
        "lu": "dense",
        "gmres": "dense",
        "gmres-fm": "factored",
        "gmres-sk": "separable",
        "stein": "separable",
    }.get(solver)
    if realization is None:
        raise ValueError(f"unknown solver {solver!r}")

    op, h = assemble_system(problem, rule, realization=realization)

    stats = None
    used = solver
    if solver == "lu":
        coeffs = lu_solve(op, h)
    elif solver == "stein":
        r1 = linsolve._spectral_radius(op.phi1)
        r2 = linsolve._spectral_radius(op.phi2)
        if r1 * r2 >= 1.0:
            used = "gmres-sk"
            coeffs, stats = gmres(op, h, tol=tol)
        else:
            coeffs = unfold(stein_solve(op.phi1, op.phi2, fold(h, op.n1, op.n2)))
    else:
        coeffs, stats = gmres(op, h, tol=tol)
    return NystromSolution(problem, rule, rulekind, used, coeffs, stats, op)


def interpolant_eval(sol: NystromSolution, y1, y2, unweighted: bool = True):
    """Weighted and plain interpolant values at the points (y1, y2).

    Returns (fu, f); ``f`` is None when ``unweighted`` is False.  Asking
    for the plain value where u vanishes is a domain error, while the
    weighted value extends continuously to the whole closed square.
    """
    y1 = np.asarray(y1, dtype=float)
    y2 = np.asarray(y2, dtype=float)
    y1b, y2b = np.broadcast_arrays(y1, y2)
    shape = y1b.shape
    y1f = y1b.ravel()
    y2f = y2b.ravel()
    prob = sol.problem
    rule = sol.rule

    uy = prob.u.eval(y1f, y2f)
    gy = np.asarray(prob.rhs(y1f, y2f), dtype=float)
    gy = np.broadcast_to(gy, y1f.shape)
    bad = ~np.isfinite(gy)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise EvaluationError(
            f"right-hand side not finite at ({y1f[i]:.17g}, {y2f[i]:.17g})",
            node=(y1f[i], y2f[i]),
        )

    da = (rule.weights / prob.u.eval(rule.nodes1, rule.nodes2)) * sol.coeffs
    acc = np.empty(y1f.size)
    if prob.separable:
        # axis-factored sum keeps memory linear in the rule size
        k1, k2 = prob.kernel_pair
        z1, z2 = rule.rule1.nodes, rule.rule2.nodes
        D = fold(da, z1.size, z2.size)
        for lo in range(0, y1f.size, _EVAL_BLOCK):
            hi = min(lo + _EVAL_BLOCK, y1f.size)
            A1 = np.asarray(k1(z1[None, :], y1f[lo:hi, None]), dtype=float)
            A2 = np.asarray(k2(z2[None, :], y2f[lo:hi, None]), dtype=float)
            acc[lo:hi] = prob.mult * np.einsum("pi,ij,pj->p", A1, D, A2)
    else:
        for lo in range(0, y1f.size, _EVAL_BLOCK):
            hi = min(lo + _EVAL_BLOCK, y1f.size)
            kb = prob.kernel_values(
                rule.nodes1[None, :], rule.nodes2[None, :], y1f[lo:hi, None], y2f[lo:hi, None]
            )
            acc[lo:hi] = kb @ da
    fu = (gy * uy + uy * acc).reshape(shape)

    if not unweighted:
        return fu, None
    if np.any(uy == 0.0):
        i = int(np.argmax(uy == 0.0))
        raise ValueError(
            f"plain value requested at ({y1f[i]:.17g}, {y2f[i]:.17g}) where the "
            "space weight vanishes; request the weighted value instead"
        )
    f = (fu.ravel() / uy).reshape(shape)
    return fu, f


class AveragedInterpolant:
    """Pointwise mean of a Gauss and a companion-rule interpolant."""

    def __init__(self, gauss_sol: NystromSolution, anti_sol: NystromSolution):
        if gauss_sol.rulekind != "gauss" or anti_sol.rulekind != "antigauss":
            raise ValueError("need one gauss solution and one antigauss solution")
        if gauss_sol.problem is not anti_sol.problem and gauss_sol.problem != anti_sol.problem:
            raise ValueError("the two solutions discretize different problems")
        if (gauss_sol.rule.n1, gauss_sol.rule.n2) != (anti_sol.rule.n1, anti_sol.rule.n2):
            raise ValueError(
                "rule sizes differ: "
                f"({gauss_sol.rule.n1}, {gauss_sol.rule.n2}) vs "
                f"({anti_sol.rule.n1}, {anti_sol.rule.n2})"
            )
        self.gauss_sol = gauss_sol
        self.anti_sol = anti_sol
        self.problem = gauss_sol.problem

    def eval(self, y1, y2, unweighted: bool = True):
        fug, fg = self.gauss_sol.eval(y1, y2, unweighted=unweighted)
        fua, fa = self.anti_sol.eval(y1, y2, unweighted=unweighted)
        fu = 0.5 * (fug + fua)
        if not unweighted:
            return fu, None
        return fu, 0.5 * (fg + fa)


def averaged_interpolant(gauss_sol, anti_sol) -> AveragedInterpolant:
    """Pair the two solutions into the averaged interpolant."""
    return AveragedInterpolant(gauss_sol, anti_sol)


def _midpoint_grid(npts: int):
    pts = -1.0 + 2.0 * (np.arange(1, npts + 1) - 0.5) / npts
    return np.meshgrid(pts, pts, indexing="ij")


def _weighted_values(obj, y1, y2, u):
    if hasattr(obj, "eval"):
        return np.asarray(obj.eval(y1, y2, unweighted=False)[0], dtype=float)
    if u is None:
        raise ValueError("a plain callable reference needs the space weight u")
    return np.asarray(obj(y1, y2), dtype=float) * u.eval(y1, y2)


def relative_error(approx, ref, u: SpaceWeight | None = None, npts: int = 50) -> float:
    """Weighted sup-norm distance on an interior grid, relative to ref.

    Both arguments may be interpolants (anything with ``eval``) or plain
    callables for a known solution; plain callables are weighted with u.
    The grid is the npts x npts midpoint lattice, which keeps clear of
    the boundary where u may vanish.
    """
    if u is None:
        for obj in (approx, ref):
            if hasattr(obj, "problem"):
                u = obj.problem.u
                break
    yy1, yy2 = _midpoint_grid(npts)
    fa = _weighted_values(approx, yy1, yy2, u)
    fr = _weighted_values(ref, yy1, yy2, u)
    denom = float(np.max(np.abs(fr)))
    if denom == 0.0:
        raise ValueError("reference is identically zero on the comparison grid")
    return float(np.max(np.abs(fa - fr)) / denom)


@dataclass(frozen=True)
class GridBracketing:
    """Pointwise comparison of the two interpolants on the midpoint grid."""

    sign: np.ndarray
    between: np.ndarray | None
    fraction_between: float | None

    @property
    def all_between(self) -> bool:
        return self.between is not None and bool(np.all(self.between))


def bracketing_check(gauss_sol, anti_sol, ref=None, npts: int = 50) -> GridBracketing:
    """Record where the reference sits between the two interpolants.

    Without a reference only the sign pattern of (gauss - companion) is
    recorded.  All comparisons use weighted values, so the check is
    meaningful up to the boundary.
    """
    yy1, yy2 = _midpoint_grid(npts)
    fug = _weighted_values(gauss_sol, yy1, yy2, None)
    fua = _weighted_values(anti_sol, yy1, yy2, None)
    sign = np.sign(fug - fua).astype(np.int8)
    if ref is None:
        return GridBracketing(sign, None, None)
    u = gauss_sol.problem.u if hasattr(gauss_sol, "problem") else None
    fur = _weighted_values(ref, yy1, yy2, u)
    lower = np.minimum(fug, fua)
    upper = np.maximum(fug, fua)
    between = (fur >= lower) & (fur <= upper)
    return GridBracketing(sign, between, float(np.mean(between)))


def condition_number_inf(obj, cap: int = 4096) -> float:
    """Max-norm condition number of the assembled system."""
    if isinstance(obj, NystromSolution):
        obj = obj.op
    return linsolve.condition_number_inf(obj, cap=cap)
