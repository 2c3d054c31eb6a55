import json
import math
import subprocess
import sys

import numpy as np
import pytest

from ermrer.cli import main
from ermrer.experiment.idx import write_images, write_labels


def run(capsys, *argv):
    try:
        code = main(list(argv))
    except SystemExit as exc:  # argparse rejects the command line
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def two_atom(tmp_path):
    p = tmp_path / "two.json"
    p.write_text(json.dumps({"weights": [0.5, 0.5], "risks": [0.0, 1.0]}))
    return str(p)


@pytest.fixture
def constant(tmp_path):
    p = tmp_path / "const.json"
    p.write_text(json.dumps({"weights": [0.2, 0.3, 0.5], "risks": [0.4, 0.4, 0.4]}))
    return str(p)


def test_solve_two_atom_type2(capsys, two_atom):
    code, out, err = run(capsys, "solve", two_atom, "--lambda", "1", "--type", "II")
    assert code == 0 and err == ""
    doc = json.loads(out)
    assert doc["beta"] == pytest.approx(math.sqrt(0.5), abs=1e-12)
    assert set(doc) == {"lambda", "beta", "rn_derivative", "expected_risk", "kl_p_q", "kl_q_p"}
    assert doc["expected_risk"] == pytest.approx(1 - doc["beta"], abs=1e-12)


@pytest.mark.parametrize("kind", ["I", "II"])
def test_solve_constant_risk(capsys, constant, kind):
    code, out, _ = run(capsys, "solve", constant, "--lambda", "0.3", "--type", kind)
    assert code == 0
    doc = json.loads(out)
    assert doc["rn_derivative"] == [1.0, 1.0, 1.0]
    assert abs(doc["kl_p_q"]) <= 1e-15 and abs(doc["kl_q_p"]) <= 1e-15


def test_solve_type1_keys(capsys, two_atom):
    code, out, _ = run(capsys, "solve", two_atom, "--lambda", "2", "--type", "I")
    doc = json.loads(out)
    assert code == 0 and "log_partition" in doc and "beta" not in doc


def test_solve_zero_lambda_is_solver_error(capsys, two_atom):
    code, out, err = run(capsys, "solve", two_atom, "--lambda", "0")
    assert code == 3 and out == ""
    assert err.startswith("NonPositiveLambda")


def test_solve_bad_fixture(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert run(capsys, "solve", str(bad), "--lambda", "1")[0] == 2
    bad.write_text(json.dumps({"weights": [0.5, -0.5], "risks": [0, 1]}))
    assert run(capsys, "solve", str(bad), "--lambda", "1")[0] == 2
    bad.write_text(json.dumps({"weights": [0.5, 0.5], "risks": [0]}))
    assert run(capsys, "solve", str(bad), "--lambda", "1")[0] == 2
    assert run(capsys, "solve", str(tmp_path / "none.json"), "--lambda", "1")[0] == 2


def test_parse_errors_exit_2(capsys, two_atom):
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "solve", two_atom, "--lambda", "1", "--bogus")[0] == 2
    assert run(capsys, "solve", two_atom, "--lambda", "x")[0] == 2
    assert run(capsys, "verify", "--seed", "-1")[0] == 2
    assert run(capsys, "verify", "--lambdas", "1,-2")[0] == 2


def test_transform_outputs_json(capsys, two_atom):
    code, out, _ = run(capsys, "transform", two_atom, "--lambda", "1", "--kind", "V")
    doc = json.loads(out)
    assert code == 0 and doc["kind"] == "V"
    b = math.sqrt(0.5)
    np.testing.assert_allclose(doc["values"], [math.log(b), math.log(b + 1)], atol=1e-12)
    code, out, _ = run(capsys, "transform", two_atom, "--lambda", "1", "--kind", "W")
    assert code == 0 and len(json.loads(out)["values"]) == 2


def test_oracle_all(capsys):
    code, out, _ = run(capsys, "oracle")
    doc = json.loads(out)
    assert code == 0 and set(doc) == {"Ex1", "Ex2", "Ex3"}
    assert all(v["passed"] for v in doc.values())


def test_verify_default_run_all_pass(capsys):
    # the default run includes the stated relative-entropy difference identity
    # and its two cross-sensitivity consequences, which do not hold
    code, out, _ = run(capsys, "verify")
    failing = [ln for ln in out.splitlines() if " PASS " not in ln]
    assert code == 0, failing


def test_verify_default_run_only_stated_cross_forms_fail(capsys):
    code, out, _ = run(capsys, "verify")
    failing = {ln.split()[0] for ln in out.splitlines() if ln.split()[1] == "FAIL"}
    assert code == 1
    assert failing == {"KL_DIFFERENCE_TYPE1_TYPE2", "CROSS_LOG_SENSITIVITY", "CROSS_RISK_SENSITIVITY"}


def test_verify_perturbed_beta_fails(capsys):
    code, out, _ = run(capsys, "verify", "--perturb-beta", "1e-3", "--instances", "6")
    assert code == 1
    status = {ln.split()[0]: ln.split()[1] for ln in out.splitlines()}
    assert status["RISK_EQUALS_LAMBDA_MINUS_KBAR"] == "FAIL"


def test_verify_report_format_and_determinism(capsys):
    args = ("verify", "--sizes", "2", "--instances", "1", "--seed", "0")
    code, out, err = run(capsys, *args)
    assert out == run(capsys, *args)[1]
    for ln in out.splitlines():
        name, status, err_s, tol_s = ln.split()
        assert status in {"PASS", "FAIL", "SKIP"}
        float(err_s), float(tol_s)


def test_experiment_to_file_and_stdout(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"grid_points_per_axis": 11, "grid_half_width": 5.0,
                               "train_size": 40, "test_size": 20, "repetitions": 2,
                               "lambda_grid": [0.01, 0.1, 1.0]}))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    code, out, err = run(capsys, "experiment", "--config", str(cfg), "--out", str(a))
    assert code == 0 and out == ""
    assert "smaller mean generalization gap" in err
    run(capsys, "experiment", "--config", str(cfg), "--out", str(b))
    assert a.read_bytes() == b.read_bytes()
    lines = a.read_text().splitlines()
    assert lines[0] == "repetition,lambda,type,train_risk,test_risk,gap"
    assert len(lines) == 1 + 2 * 3 * 2
    code, out, _ = run(capsys, "experiment", "--config", str(cfg))
    assert code == 0 and out == a.read_text()
    code, out, _ = run(capsys, "experiment", "--config", str(cfg), "--seed", "5")
    assert out != a.read_text()


def test_experiment_default_config_row_count(capsys):
    code, out, _ = run(capsys, "experiment")
    assert code == 0
    assert len(out.splitlines()) == 1 + 5 * 40 * 2


def test_experiment_errors(capsys, tmp_path):
    assert run(capsys, "experiment", "--images", str(tmp_path / "missing.idx"),
               "--labels", str(tmp_path / "missing2.idx"))[0] == 4
    assert run(capsys, "experiment", "--images", str(tmp_path / "x.idx"))[0] == 2
    bad = tmp_path / "cfg.json"
    bad.write_text(json.dumps({"grid_points": 3}))
    code, out, err = run(capsys, "experiment", "--config", str(bad))
    assert code == 2 and out == "" and err.startswith("ConfigError")
    assert run(capsys, "experiment", "--config", str(tmp_path / "none.json"))[0] == 2


def test_experiment_with_images(capsys, tmp_path):
    rng = np.random.default_rng(1)
    imgs = rng.integers(0, 256, (20, 28, 28), dtype=np.uint8)
    write_images(tmp_path / "i.idx", imgs)
    write_labels(tmp_path / "l.idx", [3, 5] * 10)
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"grid_points_per_axis": 11, "train_size": 10, "test_size": 4,
                               "repetitions": 1, "lambda_grid": [0.1]}))
    base = ["experiment", "--config", str(cfg), "--images", str(tmp_path / "i.idx"),
            "--labels", str(tmp_path / "l.idx")]
    code, out, _ = run(capsys, *base, "--keep", "3,5")
    assert code == 0 and len(out.splitlines()) == 3
    # the default pair 6,7 is absent from these files
    assert run(capsys, *base)[0] == 4


def test_console_entry_point(two_atom):
    proc = subprocess.run(
        [sys.executable, "-m", "ermrer.cli", "solve", two_atom, "--lambda", "1"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["beta"] == pytest.approx(math.sqrt(0.5))
