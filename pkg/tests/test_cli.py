import json
import math

import pytest

from nfpesym.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_classify_case_a(capsys):
    code, out, _ = run(capsys, "classify", "--r", "-2/3", "--k", "-2/3")
    assert code == 0
    assert "A(i)" in out and "5 generators" in out
    assert out.count("[VERIFIED]") == 5


def test_classify_generic(capsys):
    code, out, _ = run(capsys, "classify", "--r", "3/10", "--k", "7/10")
    assert code == 0 and "Generic" in out and "2 generators" in out


def test_classify_degenerate_exits_two(capsys):
    code, _, err = run(capsys, "classify", "--r", "-1/2", "--k", "1/2")
    assert code == 2 and "first-order linear" in err


def test_bad_rational_exits_two(capsys):
    code, _, _ = run(capsys, "classify", "--r", "one", "--k", "1")
    assert code == 2


def test_tables_case_a(capsys, tmp_path):
    code, out, _ = run(capsys, "tables", "--case", "A", "--out", str(tmp_path))
    assert code == 0 and "diff status: OK" in out
    assert (tmp_path / "brackets_A.json").exists() and (tmp_path / "adjoint_A.json").exists()


def test_tables_case_c_adjoint_scaling(capsys, tmp_path):
    code, _, _ = run(capsys, "tables", "--case", "C", "--delta", "1", "--eps", "0.5", "--out", str(tmp_path))
    assert code == 0
    adj = json.loads((tmp_path / "adjoint_C.json").read_text())
    col = adj["0.5"]["Ad(exp(eps*X1))X3"]
    assert col[2] == pytest.approx(math.e**2) and col[0] == col[1] == col[3] == 0


def test_tables_degenerate_delta(capsys):
    code, _, err = run(capsys, "tables", "--case", "C", "--delta", "-1")
    assert code == 2 and "degenerate" in err


def test_reduce_constraint_violation(capsys):
    code, _, err = run(capsys, "reduce", "--case", "A", "--rep", "b", "--alpha", "1", "--beta", "1")
    assert code == 2 and "alpha^2 - 4*beta >= 0" in err


def test_reduce_case_b_exponential(capsys):
    code, out, _ = run(capsys, "reduce", "--case", "B", "--part", "i", "--rep", "b", "--alpha", "0", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["recipe"]["ansatz"].endswith("zeta = e^(t/(1-alpha)) x")
    assert doc["recipe"]["params"] == {"alpha": 0.0}
    assert doc["verification"]["certified"]


def _solve(capsys, tmp_path):
    code, out, _ = run(capsys, "reduce", "--case", "C", "--part", "i", "--k", "1", "--rep", "X1", "--solve", "--out", str(tmp_path))
    assert code == 0
    return json.loads((tmp_path / "residual.json").read_text())


def test_reduce_and_solve_writes_every_artifact(capsys, tmp_path):
    rep = _solve(capsys, tmp_path)
    for name in ("ode.txt", "y_samples.csv", "grid.csv", "residual.json", "recipe.json", "manifest.json"):
        assert (tmp_path / name).exists(), name
    assert rep["sup"] < 1e-3


@pytest.mark.xfail(strict=True, reason="the discrete residual of the integrated profile is about 2e-4 on the 401 x 11 grid")
def test_reduce_and_solve_residual_below_one_millionth(capsys, tmp_path):
    assert _solve(capsys, tmp_path)["sup"] < 1e-6


def test_solve_ode_command(capsys):
    code, out, _ = run(capsys, "solve-ode", "--case", "C", "--k", "1", "--rep", "c", "--y0", "0.5773502691896258", "--zeta-end", "1.5")
    assert code == 0 and "y <= 0 event" in out


def test_evolve_and_residual_commands(capsys, tmp_path):
    code, out, _ = run(capsys, "evolve", "--r", "1", "--k", "1", "--initial", "1 + x^2/2", "--t-end", "0.02", "--cells", "41", "--out", str(tmp_path))
    assert code == 0
    doc = json.loads((tmp_path / "evolution.json").read_text())
    assert doc["mass_drift"] < 1e-6
    code, out, _ = run(capsys, "residual", "--csv", str(tmp_path / "evolution.csv"), "--r", "1", "--k", "1")
    assert code == 0 and "residual sup" in out


def test_evolve_backward_diffusion_exits_two(capsys):
    code, _, err = run(capsys, "evolve", "--r", "-1", "--k", "-1", "--initial", "1")
    assert code == 2 and "ill-posed" in err


def test_config_file_with_flag_override(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# stationary benchmark\ncase = C\nk = 1\nrep = c\nomega = 2.0\n")
    code, _, _ = run(capsys, "reduce", "--config", str(cfg), "--out", str(tmp_path / "a"))
    assert code == 0
    m = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert m["inputs"]["omega"] == 2.0 and m["inputs"]["case"] == "C"
    run(capsys, "reduce", "--config", str(cfg), "--omega", "3", "--out", str(tmp_path / "b"))
    m = json.loads((tmp_path / "b" / "manifest.json").read_text())
    assert m["inputs"]["omega"] == 3.0


def test_unknown_config_key(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    code, _, err = run(capsys, "classify", "--config", str(cfg))
    assert code == 2 and "colour" in err


def test_verify_all_filtered_to_case_b(capsys, tmp_path):
    code, out, _ = run(capsys, "verify-all", "--only", "case=B", "--out", str(tmp_path))
    assert code == 3
    assert "Case B: 4 generators, 3 reductions" in out
    findings = json.loads((tmp_path / "findings.json").read_text())
    assert findings and all(f["anchor"] for f in findings)


def test_verify_all_manifests_are_byte_identical(capsys, tmp_path):
    for d in ("one", "two"):
        assert run(capsys, "verify-all", "--seed", "4", "--out", str(tmp_path / d))[0] == 3
    for name in ("manifest.json", "findings.json", "report.json"):
        assert (tmp_path / "one" / name).read_bytes() == (tmp_path / "two" / name).read_bytes()
