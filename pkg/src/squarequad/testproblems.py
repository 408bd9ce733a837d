"""Built-in worked problems with stored regression tables.

Two cubature cases and four integral-equation cases, each carrying the
reference values the implementation is expected to reproduce and the
tolerance each value is held to.  Expensive reference artifacts (the
high-order reference solutions and the larger condition numbers) are
memoized in process and cached on disk under SQUAREQUAD_CACHE, default
``~/.cache/squarequad``; a cold cache regenerates deterministically.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .cubature import antigauss_cubature, gauss_cubature
from .fredholm import (
    FredholmProblem,
    SpaceWeight,
    _midpoint_grid,
    _weighted_values,
    averaged_interpolant,
    condition_number_inf,
    solve_nystrom,
)
from .orthopoly import JacobiWeight

__all__ = [
    "Expected",
    "TestCase",
    "RowResult",
    "CaseReport",
    "KERNELS_1D",
    "KERNELS_2D",
    "RHS",
    "INTEGRANDS",
    "check_value",
    "get_case",
    "list_cases",
    "run_case",
    "cache_dir",
    "clear_memo",
    "clear_disk_cache",
]


def _abspow(v, p):
    # exp(p log |v|) with an exact-zero guard; plain ** loses accuracy for
    # large fractional powers of tiny bases
    v = np.abs(np.asarray(v, dtype=float))
    out = np.zeros_like(v)
    nz = v > 0.0
    out[nz] = np.exp(p * np.log(v[nz]))
    return out


# ---------------------------------------------------------------- registries

def _k_exp_sum(x, y):
    return np.exp(np.asarray(x, dtype=float) + y)


def _k_product(x, y):
    return np.asarray(x, dtype=float) * y


def _k_exp_negprod(x, y):
    return np.exp(-(1.0 + np.asarray(x, dtype=float)) * (1.0 + np.asarray(y)))


def _k_abs_cos_pow(x, y):
    """9/2 power of |cos(1+x)|; depends on the integration variable only."""
    vals = _abspow(np.cos(1.0 + np.asarray(x, dtype=float)), 4.5)
    shape = np.broadcast_shapes(np.shape(x), np.shape(y))
    return np.broadcast_to(vals, shape)


def _k_affine_sum(x, y):
    return np.asarray(x, dtype=float) + y


def _k_zero(x, y):
    return np.zeros(np.broadcast_shapes(np.shape(x), np.shape(y)))


def _k_sin_affine(x1, x2, y1, y2):
    """Non-separable kernel sin(x1 + x2) (1 + x1 + y2)."""
    return np.sin(np.asarray(x2, dtype=float) + x1) * (1.0 + np.asarray(x1) + y2)


# rhs g so that the solution of the first equation case is cos(x1 + x2)
_COS_SUM_DRIFT = (math.cos(2.0) + math.e**2 * (math.sin(2.0) - 1.0)) / math.e


def _g_cos_drift(y1, y2):
    return np.cos(np.asarray(y1, dtype=float) + y2) - _COS_SUM_DRIFT * np.asarray(y2) * np.exp(np.asarray(y1, dtype=float))


def _g_log_sinroot(y1, y2):
    return np.log(2.0 + np.asarray(y2, dtype=float)) * np.sin(np.sqrt(1.0 - np.asarray(y1, dtype=float)))


def _g_cos_pow_sinroot(y1, y2):
    y1 = np.asarray(y1, dtype=float)
    y2 = np.asarray(y2, dtype=float)
    return np.cos(3.0 + y2) * (1.0 + y2) ** 1.5 * np.sin((1.0 - y1) ** 1.5)


def _g_exp_sin(y1, y2):
    return np.exp(np.asarray(y1, dtype=float)) * np.sin(np.asarray(y2, dtype=float))


def _exact_cos_sum(x1, x2):
    return np.cos(np.asarray(x1, dtype=float) + x2)


def _f_edge_sine_power(x1, x2):
    """|sin(1-x1)|^{9/2} (1 + x1 + x2); 9/2-power zero at the x1 = 1 edge."""
    return _abspow(np.sin(1.0 - np.asarray(x1, dtype=float)), 4.5) * (1.0 + np.asarray(x1) + x2)


def _f_split_abs_power(x1, x2):
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    return x1 * _abspow(np.cos(0.5 - x1), 1.5) + x2 * _abspow(np.sin(1.0 + x2), 1.5)


def _f_one(x1, x2):
    return np.ones(np.broadcast_shapes(np.shape(x1), np.shape(x2)))


KERNELS_1D = {
    "exp-sum": _k_exp_sum,
    "product": _k_product,
    "exp-negprod": _k_exp_negprod,
    "abs-cos-pow": _k_abs_cos_pow,
    "affine-sum": _k_affine_sum,
    "zero": _k_zero,
}

KERNELS_2D = {
    "sin-affine": _k_sin_affine,
}

RHS = {
    "cos-sum-drift": _g_cos_drift,
    "log-sin-root": _g_log_sinroot,
    "cos-pow-sinroot": _g_cos_pow_sinroot,
    "exp-sin": _g_exp_sin,
}

INTEGRANDS = {
    "cub1": _f_edge_sine_power,
    "cub2": _f_split_abs_power,
    "one": _f_one,
}


# ------------------------------------------------------- expected-value table

_SMALL = 5e-15


@dataclass(frozen=True)
class Expected:
    """A stored reference value plus the rule it is matched under.

    kind "error": sign must agree and the magnitude ratio lie in [1/2, 2],
    except that values at or below 5e-15 only require the computed value to
    stay at or below 5e-15.  kind "cond": relative difference within rtol
    (default 5e-3, three significant digits).  kind "iters": exact.
    """

    value: float
    kind: str
    source: str
    rtol: float | None = None


def check_value(computed: float, expected: Expected) -> bool:
    if expected.kind == "iters":
        return int(round(computed)) == int(expected.value)
    if expected.kind == "cond":
        tol = 5e-3 if expected.rtol is None else expected.rtol
        return abs(computed - expected.value) <= tol * abs(expected.value)
    if expected.kind != "error":
        raise ValueError(f"unknown expected-value kind {expected.kind!r}")
    if abs(expected.value) <= _SMALL:
        return abs(computed) <= _SMALL
    ratio = computed / expected.value
    return 0.5 <= ratio <= 2.0


def _err(v, source):
    return Expected(v, "error", source)


def _cond(v, source, rtol=None):
    return Expected(v, "cond", source, rtol)


def _errrow(source, r_g, r_a, r_avg, r_est):
    return {
        "r_g": _err(r_g, source),
        "r_a": _err(r_a, source),
        "r_avg": _err(r_avg, source),
        "r_est": _err(r_est, source),
    }


def _eqrow(source, xi_g, xi_a, xi_avg, kappa_g=None, kappa_a=None, iters=None, ka_rtol=None):
    row = {
        "xi_g": _err(xi_g, source),
        "xi_a": _err(xi_a, source),
        "xi_avg": _err(xi_avg, source),
    }
    if kappa_g is not None:
        row["kappa_g"] = _cond(kappa_g, source)
    if kappa_a is not None:
        row["kappa_a"] = _cond(kappa_a, source, rtol=ka_rtol)
    if iters is not None:
        row["iters"] = Expected(iters, "iters", source)
    return row


@dataclass(frozen=True, eq=False)
class TestCase:
    """One worked problem: inputs, reference recipe, expected-value rows."""

    id: str
    kind: str  # cubature | equation
    w1: JacobiWeight
    w2: JacobiWeight
    rows: tuple
    integrand: object = None
    u: SpaceWeight | None = None
    kernel_id: str = ""
    kernel_pair_ids: tuple = ()
    rhs_id: str = ""
    mult: float = 1.0
    exact: object = None
    solver: str = "auto"
    reference: tuple = ()
    allow_uncontained: bool = False

    def sizes(self) -> tuple:
        return tuple(size for size, _ in self.rows)

    def problem(self) -> FredholmProblem:
        if self.kind != "equation":
            raise ValueError(f"case {self.id!r} is not an integral equation")
        kernel = KERNELS_2D[self.kernel_id] if self.kernel_id else None
        pair = tuple(KERNELS_1D[k] for k in self.kernel_pair_ids)
        return FredholmProblem(
            self.w1, self.w2, self.u, RHS[self.rhs_id],
            kernel=kernel, kernel_pair=pair, mult=self.mult,
        )


_LEGENDRE = JacobiWeight(0.0, 0.0)

CASES = {
    "cub1": TestCase(
        id="cub1",
        kind="cubature",
        w1=JacobiWeight(-0.5, -0.5),
        w2=_LEGENDRE,
        integrand=_f_edge_sine_power,
        reference=(512, 512),
        rows=(
            ((4, 8), _errrow("table1", 1.63e-03, -1.63e-03, 1.27e-07, 1.63e-03)),
            ((8, 8), _errrow("table1", -1.27e-07, 1.27e-07, 1.22e-10, -1.27e-07)),
            ((16, 8), _errrow("table1", -1.21e-10, 1.22e-10, 1.11e-13, -1.22e-10)),
            ((32, 8), _errrow("table1", -1.15e-13, 1.10e-13, -2.66e-15, -1.12e-13)),
            ((64, 8), _errrow("table1", -2.22e-15, -3.11e-15, -2.66e-15, 4.44e-16)),
        ),
    ),
    "cub2": TestCase(
        id="cub2",
        kind="cubature",
        w1=JacobiWeight(0.5, 0.5),
        w2=JacobiWeight(-0.5, 0.0),
        integrand=_f_split_abs_power,
        reference=(512, 512),
        allow_uncontained=True,  # second axis fails the node-containment test
        rows=(
            ((8, 8), _errrow("table2", -1.53e-05, 1.55e-05, 9.05e-08, -1.54e-05)),
            ((16, 16), _errrow("table2", -4.66e-07, 4.72e-07, 2.98e-09, -4.69e-07)),
            ((32, 32), _errrow("table2", -1.49e-08, 1.51e-08, 9.62e-11, -1.50e-08)),
            ((64, 64), _errrow("table2", -4.73e-10, 4.79e-10, 3.07e-12, -4.76e-10)),
            ((128, 128), _errrow("table2", -1.49e-11, 1.51e-11, 1.13e-13, -1.50e-11)),
            ((256, 256), _errrow("table2", -4.51e-13, 4.84e-13, 1.60e-14, -4.67e-13)),
        ),
    ),
    "eq1": TestCase(
        id="eq1",
        kind="equation",
        w1=_LEGENDRE,
        w2=_LEGENDRE,
        u=SpaceWeight(0.0, 0.0, 0.0, 0.0),
        kernel_pair_ids=("exp-sum", "product"),
        rhs_id="cos-sum-drift",
        mult=1.0,
        exact=_exact_cos_sum,
        solver="lu",
        rows=(
            ((2, 2), _eqrow("table3", 3.79e-02, 3.30e-02, 2.43e-03, 2.678, 8.504)),
            ((4, 4), _eqrow("table3", 2.38e-06, 2.38e-06, 3.00e-10, 19.016, 30.849)),
            ((6, 6), _eqrow("table3", 2.50e-11, 2.50e-11, 1.33e-15, 30.308, 36.235)),
            # reference source for the (8,8) anti condition number is
            # self-inconsistent (breaks the column trend and duplicates the
            # gauss value); the trend value is stored with a loose band
            ((8, 8), _eqrow("table3", 5.55e-16, 9.99e-16, 7.22e-16, 34.967, 38.159, ka_rtol=0.15)),
        ),
    ),
    "eq2": TestCase(
        id="eq2",
        kind="equation",
        w1=JacobiWeight(0.5, 0.5),
        w2=_LEGENDRE,
        u=SpaceWeight(1.0, 1.25, 2.0 / 3.0, 2.0 / 3.0),
        kernel_id="sin-affine",
        rhs_id="log-sin-root",
        mult=0.3,
        solver="gmres-fm",
        reference=(700, 32),
        rows=(
            ((16, 16), _eqrow("table4", 3.28e-06, 2.88e-06, 2.04e-07, 32.148, 51.621, iters=3)),
            ((32, 16), _eqrow("table4", 2.30e-07, 2.01e-07, 1.44e-08, 36.045, 54.606, iters=3)),
            ((64, 16), _eqrow("table4", 1.53e-08, 1.34e-08, 9.52e-10, 38.933, 56.108, iters=3)),
            ((128, 16), _eqrow("table4", 9.82e-10, 8.62e-10, 6.03e-11, 40.998, 57.277, iters=3)),
            ((256, 16), _eqrow("table4", 6.13e-11, 5.57e-11, 2.78e-12, 42.433, 58.044, iters=3)),
            ((512, 16), _eqrow("table4", 2.80e-12, 4.57e-12, 8.80e-13, 43.442, 58.591, iters=3)),
        ),
    ),
    "eq3": TestCase(
        id="eq3",
        kind="equation",
        w1=JacobiWeight(0.5, 0.5),
        w2=JacobiWeight(0.5, 0.5),
        u=SpaceWeight(1.25, 1.25, 1.25, 1.25),
        kernel_pair_ids=("exp-negprod", "exp-negprod"),
        rhs_id="cos-pow-sinroot",
        mult=0.3,
        solver="gmres-sk",
        reference=(512, 512),
        rows=(
            ((16, 16), _eqrow("ex3", 5.60e-09, 5.42e-09, 8.77e-11)),
            ((32, 32), _eqrow("ex3", 1.05e-10, 1.02e-10, 1.64e-12)),
            ((64, 64), _eqrow("ex3", 1.80e-12, 1.74e-12, 2.81e-14)),
            ((128, 128), _eqrow("ex3", 2.94e-14, 2.87e-14, 5.29e-16)),
            ((256, 256), _eqrow("ex3", 8.82e-16, 9.71e-16, 2.65e-16)),
        ),
    ),
    "eq4": TestCase(
        id="eq4",
        kind="equation",
        w1=JacobiWeight(-0.5, 0.0),
        w2=JacobiWeight(0.5, 0.5),
        u=SpaceWeight(0.0, 0.25, 0.5, 1.25),
        kernel_pair_ids=("abs-cos-pow", "affine-sum"),
        rhs_id="exp-sin",
        mult=1.0 / 7.0,
        solver="auto",
        reference=(512, 32),
        allow_uncontained=True,  # first axis fails the node-containment test
        rows=(
            ((16, 16), _eqrow("table6", 4.71e-09, 4.92e-09, 1.05e-10)),
            ((32, 16), _eqrow("table6", 8.90e-11, 8.99e-11, 4.97e-13)),
            ((64, 16), _eqrow("table6", 5.44e-13, 6.32e-13, 4.39e-14)),
            ((128, 16), _eqrow("table6", 2.49e-14, 2.65e-14, 8.34e-16)),
        ),
    ),
    # demo problem with a vanishing kernel: the interpolant equals the rhs
    "zerok": TestCase(
        id="zerok",
        kind="equation",
        w1=_LEGENDRE,
        w2=_LEGENDRE,
        u=SpaceWeight(0.0, 0.0, 0.0, 0.0),
        kernel_pair_ids=("zero", "zero"),
        rhs_id="exp-sin",
        exact=_g_exp_sin,
        rows=(),
    ),
}


def list_cases() -> tuple:
    return tuple(CASES)


def get_case(case_id: str) -> TestCase:
    try:
        return CASES[case_id]
    except KeyError:
        raise ValueError(f"unknown case id {case_id!r}; known: {', '.join(CASES)}") from None


# ----------------------------------------------------------- memo/disk cache

_memo: dict = {}


def clear_memo() -> None:
    _memo.clear()


def cache_dir() -> Path:
    env = os.environ.get("SQUAREQUAD_CACHE")
    return Path(env) if env else Path.home() / ".cache" / "squarequad"


def _cache_file(case_id: str) -> Path:
    # versioned name so a format change never reads stale data
    return cache_dir() / f"case-{case_id}-v1.npz"


def clear_disk_cache(case_id: str | None = None) -> None:
    for cid in [case_id] if case_id else list(CASES):
        path = _cache_file(cid)
        if path.exists():
            path.unlink()


def _disk_load(case_id: str) -> dict:
    path = _cache_file(case_id)
    if not path.exists():
        return {}
    try:
        with np.load(path) as z:
            return {k: z[k] for k in z.files}
    except Exception:
        return {}  # a corrupt cache regenerates


def _disk_get(case_id: str, key: str):
    return _disk_load(case_id).get(key)


def _disk_store(case_id: str, key: str, value) -> None:
    data = _disk_load(case_id)
    data[key] = np.asarray(value)
    path = _cache_file(case_id)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp.npz")
    np.savez(tmp, **data)
    os.replace(tmp, path)


def _memoized(key, build):
    if key not in _memo:
        _memo[key] = build()
    return _memo[key]


# ------------------------------------------------------------ metric engine

def _cub_values(case, n1, n2):
    def build():
        g = gauss_cubature(case.w1, case.w2, n1, n2).apply(case.integrand)
        a = antigauss_cubature(
            case.w1, case.w2, n1, n2, allow_uncontained=case.allow_uncontained
        ).apply(case.integrand)
        return g, a

    return _memoized(("cub", case.id, n1, n2), build)


def _ref_integral(case) -> float:
    def build():
        hit = _disk_get(case.id, "ref_integral")
        if hit is not None:
            return float(hit)
        m1, m2 = case.reference
        val = float(gauss_cubature(case.w1, case.w2, m1, m2).apply(case.integrand))
        _disk_store(case.id, "ref_integral", val)
        return val

    return _memoized(("ref_integral", case.id), build)


def _solution(case, n1, n2, rulekind, solver=None):
    solver = solver or case.solver

    def build():
        return solve_nystrom(
            case.problem(), n1, n2, rulekind=rulekind, solver=solver,
            allow_uncontained=case.allow_uncontained,
        )

    return _memoized(("sol", case.id, n1, n2, rulekind, solver), build)


def _ref_grid(case) -> np.ndarray:
    """Weighted reference values on the 50 x 50 midpoint lattice."""

    def build():
        yy1, yy2 = _midpoint_grid(50)
        if case.exact is not None:
            return _weighted_values(case.exact, yy1, yy2, case.u)
        hit = _disk_get(case.id, "ref_grid")
        if hit is not None:
            return np.asarray(hit)
        m1, m2 = case.reference
        sol = solve_nystrom(
            case.problem(), m1, m2, rulekind="gauss", solver=case.solver,
            allow_uncontained=case.allow_uncontained,
        )
        vals = _weighted_values(sol, yy1, yy2, case.u)
        _disk_store(case.id, "ref_grid", vals)
        return vals

    return _memoized(("ref_grid", case.id), build)


def _xi(case, size, which, solver) -> float:
    n1, n2 = size
    ref = _ref_grid(case)
    yy1, yy2 = _midpoint_grid(50)
    if which == "avg":
        interp = averaged_interpolant(
            _solution(case, n1, n2, "gauss", solver),
            _solution(case, n1, n2, "antigauss", solver),
        )
    else:
        kind = "gauss" if which == "g" else "antigauss"
        interp = _solution(case, n1, n2, kind, solver)
    vals = _weighted_values(interp, yy1, yy2, case.u)
    return float(np.max(np.abs(vals - ref)) / np.max(np.abs(ref)))


def _kappa(case, size, which, solver) -> float:
    n1, n2 = size
    key = f"kappa_{which}_{n1}_{n2}"

    def build():
        hit = _disk_get(case.id, key)
        if hit is not None:
            return float(hit)
        kind = "gauss" if which == "g" else "antigauss"
        sol = _solution(case, n1, n2, kind, solver)
        npoints = sol.op.n1 * sol.op.n2
        val = condition_number_inf(sol, cap=max(4096, npoints))
        _disk_store(case.id, key, val)
        return val

    return _memoized(("kappa", case.id, size, which), build)


_METRIC_ORDER = (
    "r_g", "r_a", "r_avg", "r_est",
    "xi_g", "xi_a", "xi_avg", "kappa_g", "kappa_a", "iters",
)


def _compute_metric(case, size, metric, solver) -> float:
    if case.kind == "cubature":
        g, a = _cub_values(case, *size)
        ref = _ref_integral(case)
        return {
            "r_g": ref - g,
            "r_a": ref - a,
            "r_avg": ref - 0.5 * (g + a),
            "r_est": 0.5 * (a - g),
        }[metric]
    if metric.startswith("xi_"):
        return _xi(case, size, metric[3:], solver)
    if metric.startswith("kappa_"):
        return _kappa(case, size, metric[6:], solver)
    if metric == "iters":
        iters = _solution(case, size[0], size[1], "gauss", solver).iterations
        return float(-1 if iters is None else iters)
    raise ValueError(f"unknown metric {metric!r}")


@dataclass(frozen=True, eq=False)
class RowResult:
    size: tuple
    metric: str
    computed: float
    expected: Expected
    ok: bool


@dataclass(frozen=True, eq=False)
class CaseReport:
    case_id: str
    rows: tuple

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.rows)

    def lines(self) -> list:
        good = sum(r.ok for r in self.rows)
        out = [f"case {self.case_id}: {good}/{len(self.rows)} values within tolerance"]
        for r in self.rows:
            if r.expected.kind == "iters":
                shown = f"computed={int(round(r.computed)):d}         expected={int(r.expected.value):d}"
            else:
                shown = f"computed={r.computed: .6e} expected={r.expected.value: .6e}"
            out.append(
                f"  n=({r.size[0]},{r.size[1]}) {r.metric:<8} {shown}"
                f"  [{r.expected.source}]  {'ok' if r.ok else 'FAIL'}"
            )
        return out


def run_case(case_id: str, sizes=None, metrics=None, solver=None) -> CaseReport:
    """Recompute a case's stored rows and compare against the table.

    ``sizes`` and ``metrics`` restrict the work; ``solver`` overrides the
    case's solver for the row solves.  Unknown ids raise ValueError.
    """
    case = get_case(case_id)
    wanted = None if sizes is None else {tuple(s) for s in sizes}
    results = []
    for size, table in case.rows:
        if wanted is not None and size not in wanted:
            continue
        for metric in _METRIC_ORDER:
            if metric not in table or (metrics is not None and metric not in metrics):
                continue
            expected = table[metric]
            computed = float(_compute_metric(case, size, metric, solver))
            results.append(RowResult(size, metric, computed, expected, check_value(computed, expected)))
    if not results:
        raise ValueError(f"no stored rows selected for case {case_id!r}")
    return CaseReport(case_id, tuple(results))
