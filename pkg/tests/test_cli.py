"""Command line behavior: outputs, determinism, exit codes."""

import json

import numpy as np
import pytest

from squarequad.cli import main


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_rule_legendre_2x2(capsys):
    code, out, _ = _run(capsys, "rule", "--n1", "2", "--n2", "2")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("# kind=gauss")
    assert lines[1] == "x1,x2,weight"
    rows = [ln.split(",") for ln in lines[2:]]
    assert len(rows) == 4
    assert all(float(r[2]) == pytest.approx(1.0, rel=1e-13) for r in rows)


def test_rule_antigauss_chebyshev1_endpoints(capsys):
    code, out, _ = _run(
        capsys, "rule", "--alpha1", "-0.5", "--beta1", "-0.5", "--n1", "3",
        "--n2", "3", "--kind", "antigauss",
    )
    assert code == 0
    rows = [ln.split(",") for ln in out.strip().splitlines()[2:]]
    assert len(rows) == 16
    x1 = sorted(float(r[0]) for r in rows)
    assert x1[0] == pytest.approx(-1.0, abs=1e-13)
    assert x1[-1] == pytest.approx(1.0, abs=1e-13)


def test_rule_invalid_exponent_exits_2(capsys):
    code, _, err = _run(capsys, "rule", "--alpha1", "-1.5", "--n1", "2", "--n2", "2")
    assert code == 2
    assert "alpha" in err


def test_rule_json_deterministic(tmp_path, capsys):
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    for p in (p1, p2):
        code, _, _ = _run(
            capsys, "rule", "--n1", "3", "--n2", "2", "--format", "json",
            "--out", str(p),
        )
        assert code == 0
    assert p1.read_bytes() == p2.read_bytes()
    doc = json.loads(p1.read_text())
    assert doc["kind"] == "gauss"
    assert len(doc["nodes"]) == 6


def test_integrate_case_row(capsys):
    code, out, _ = _run(capsys, "integrate", "--case", "cub1", "--n1", "8", "--n2", "8")
    assert code == 0
    header, row = out.strip().splitlines()
    assert header == "value_g,value_a,value_avg,r_est"
    est = float(row.split(",")[3])
    assert est == pytest.approx(-1.27e-07, rel=0.05)


def test_integrate_constant(capsys):
    code, out, _ = _run(
        capsys, "integrate", "--integrand", "one", "--n1", "4", "--n2", "4",
    )
    assert code == 0
    row = out.strip().splitlines()[1].split(",")
    assert float(row[0]) == pytest.approx(4.0, rel=1e-13)
    assert abs(float(row[3])) < 1e-14


def test_integrate_case_validation(capsys):
    code, _, err = _run(capsys, "integrate", "--case", "eq1", "--n1", "4", "--n2", "4")
    assert code == 2
    assert "cubature" in err or "invalid choice" in err


def test_solve_zero_kernel(capsys, tmp_path):
    out_file = tmp_path / "sol.csv"
    code, out, _ = _run(
        capsys, "solve", "--case", "zerok", "--n1", "4", "--n2", "4",
        "--out", str(out_file),
    )
    assert code == 0
    report = dict(ln.split("=", 1) for ln in out.strip().splitlines())
    assert float(report["xi_g"]) == 0.0
    assert float(report["kappa_g"]) == pytest.approx(1.0, rel=1e-12)
    header, *rows = out_file.read_text().strip().splitlines()
    assert header == "y1,y2,fG,fA,fAvg"
    assert len(rows) == 2500
    # interpolant equals the rhs everywhere for a zero kernel
    a = np.array([[float(v) for v in r.split(",")] for r in rows[:100]])
    want = np.exp(a[:, 0]) * np.sin(a[:, 1])
    assert np.max(np.abs(a[:, 2] - want)) < 1e-13


def test_solve_eq1_report(capsys):
    code, out, _ = _run(capsys, "solve", "--case", "eq1", "--n1", "2", "--n2", "2")
    assert code == 0
    report = dict(ln.split("=", 1) for ln in out.strip().splitlines())
    assert float(report["xi_avg"]) == pytest.approx(2.43e-3, rel=0.2)
    assert float(report["fraction_between"]) > 0.99


def test_solve_problem_file(capsys, tmp_path):
    prob = {
        "alpha1": 0.5, "beta1": 0.5, "alpha2": 0.5, "beta2": 0.5,
        "gamma1": 1.25, "delta1": 1.25, "gamma2": 1.25, "delta2": 1.25,
        "kernel_pair": ["exp-negprod", "exp-negprod"],
        "rhs": "cos-pow-sinroot", "mult": 0.3, "n1": 8, "n2": 8,
    }
    path = tmp_path / "prob.json"
    path.write_text(json.dumps(prob))
    code, out, _ = _run(capsys, "solve", "--problem", str(path))
    assert code == 0
    report = dict(ln.split("=", 1) for ln in out.strip().splitlines())
    assert float(report["gap_half_rel"]) < 1e-5
    assert int(report["n1"]) == 8


def test_solve_problem_file_validation(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"rhs": "exp-sin"}))
    code, _, err = _run(capsys, "solve", "--problem", str(path))
    assert code == 2
    assert "kernel" in err


def test_solve_requires_one_source(capsys):
    code, _, _ = _run(capsys, "solve", "--case", "eq1", "--problem", "x.json")
    assert code == 2


def test_reproduce_table3(capsys):
    code, out, _ = _run(capsys, "reproduce", "3")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[1] == "n1,n2,xi_g,xi_a,xi_avg,kappa_g,kappa_a,ok"
    body = [ln.split(",") for ln in lines[2:]]
    assert len(body) == 4
    assert all(row[-1] == "ok" for row in body)


def test_reproduce_unknown_id(capsys):
    code, _, err = _run(capsys, "reproduce", "5")
    assert code == 2
    assert "unknown" in err


def test_reproduce_deterministic(capsys, tmp_path):
    f1, f2 = tmp_path / "t1.csv", tmp_path / "t2.csv"
    for f in (f1, f2):
        code, _, _ = _run(capsys, "reproduce", "1", "--out", str(f))
        assert code == 0
    assert f1.read_bytes() == f2.read_bytes()


def test_reproduce_json_format(capsys):
    code, out, _ = _run(capsys, "reproduce", "3", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["case"] == "eq1"
    assert len(doc["rows"]) == 4
    assert all(row["ok"] for row in doc["rows"])


def test_reproduce_refresh_cache(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("SQUAREQUAD_CACHE", str(tmp_path))
    from squarequad import testproblems as tp

    tp.clear_memo()
    code, out, _ = _run(capsys, "reproduce", "3", "--refresh-cache")
    assert code == 0
    assert list(tmp_path.glob("*.npz"))
    tp.clear_memo()
