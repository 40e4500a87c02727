import json
import subprocess
import sys

import pytest

from pgaspin.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, "--json", *argv)
    return code, [json.loads(line) for line in out.splitlines()]


# ---- eval


def test_eval_product(capsys):
    code, out, _ = run(capsys, "--sig", "2,0,0", "eval", "e1*e2")
    assert code == 0 and out.strip() == "e12"


def test_eval_sandwich(capsys):
    code, out, _ = run(capsys, "--sig", "2,0,0", "eval", "e12[e1]")
    assert code == 0 and out.strip() == "-e1"


def test_eval_json(capsys):
    code, rows = run_json(capsys, "--sig", "2,0,0", "eval", "2*e1 + e12")
    assert code == 0
    terms = rows[0]["result"]["terms"]
    assert {tuple(t["blade"]): t["re"] for t in terms} == {(1,): 2.0, (1, 2): 1.0}


@pytest.mark.parametrize("expr", ["e99", "e1 +", "e1 * (e2"])
def test_eval_parse_errors(capsys, expr):
    code, _, err = run(capsys, "--sig", "2,0,0", "eval", expr)
    assert code == 2 and "error" in err


def test_bad_signature(capsys):
    code, _, _ = run(capsys, "--sig", "x", "eval", "e1")
    assert code == 2


def test_algebra_error_exit(capsys):
    # a null vector has no inverse
    code, _, err = run(capsys, "--sig", "1,0,1", "eval", "e0[e1]")
    assert code == 3 and "error" in err


# ---- decompose / point / spinor


def test_decompose_reflection_example(capsys):
    code, out, _ = run(capsys, "--sig", "3,0,0", "decompose", "e123")
    assert code == 0
    assert "factor 1 (rotation): e12" in out
    assert "residual reflection: e3" in out


def test_decompose_json_residuals(capsys):
    code, rows = run_json(capsys, "--sig", "4,0,0", "decompose", "(e1+e2)*(e1+e3)*(e3+e4)*(2e1+e4)")
    assert code == 0
    factors = [r for r in rows if r.get("part") == "factor"]
    assert len(factors) == 2
    res = next(r for r in rows if r.get("part") == "residuals")["residuals"]
    assert max(res.values()) <= 1e-9


def test_point_frame_listing(capsys):
    code, out, _ = run(capsys, "--sig", "4,0,0", "point", "e1234")
    assert code == 0
    lines = out.splitlines()
    assert lines[:6] == ["v1 = e1", "v2 = e2", "v3 = e3", "v4 = e4", "b1 = e12", "b2 = e34"]


def test_point_rejects_non_blade(capsys):
    code, _, _ = run(capsys, "--sig", "2,0,0", "point", "e1 + e2")
    assert code == 3


def test_spinor_listing(capsys):
    code, out, _ = run(capsys, "--sig", "2,0,0", "spinor")
    assert code == 0
    assert "master idempotent = 0.5 - 0.5ie12" in out
    assert "chiral operator = -ie12" in out
    assert "eta(-) [R] = 0.5e1 - 0.5ie2" in out


def test_spinor_json_states(capsys):
    code, rows = run_json(capsys, "--sig", "4,0,0", "spinor")
    assert code == 0
    assert sum(1 for r in rows if r.get("part") == "state") == 4


# ---- pointor-check


def test_pointor_check_pass(capsys):
    code, out, _ = run(capsys, "--sig", "2,0,0", "pointor-check", "2+e1", "--point", "e12")
    assert code == 0 and out.strip() == "ρ = 3"


def test_pointor_check_fail(capsys):
    code, rows = run_json(capsys, "--sig", "4,0,0", "pointor-check", "1+e13+0.5e2", "--point", "e1234")
    assert code == 3
    assert rows[0]["ok"] is False and rows[0]["residual"] == pytest.approx(1 / 2.25)


# ---- double-cover


def test_double_cover_trace(capsys):
    code, rows = run_json(capsys, "--sig", "2,0,0", "double-cover", "--steps", "8")
    assert code == 0
    trace = [r for r in rows if "theta" in r]
    assert len(trace) == 9
    back = [r["theta"] for r in trace if r["probe_back"]]
    assert back == pytest.approx([0.0, 3.141592653589793, 6.283185307179586])
    assert trace[4]["scalar"] == pytest.approx(-1)
    assert trace[8]["scalar"] == pytest.approx(1)


def test_double_cover_text(capsys):
    code, out, _ = run(capsys, "--sig", "3,0,0", "double-cover", "e23", "--steps", "4")
    assert code == 0
    rows = [line for line in out.splitlines() if line.startswith("θ")]
    assert "R = -1" in rows[2] and "(back)" in rows[2]
    assert "R = 1" in rows[4]


def test_double_cover_rejects_bad_bivector(capsys):
    code, _, _ = run(capsys, "--sig", "1,1,0", "double-cover", "e12")
    assert code == 3


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "pgaspin", "--sig", "2,0,0", "eval", "e2*e1"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0 and proc.stdout.strip() == "-e12"
