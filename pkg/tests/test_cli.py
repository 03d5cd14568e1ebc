import json
import subprocess
import sys
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np
import pytest

from vbma import cli

DATA = Path(__file__).parent / "data"
REPORT_SCHEMA = json.loads(
    resources.files("vbma").joinpath("schemas", "report.schema.json").read_text())


def run(tmp_path, *argv):
    out = tmp_path / f"report{len(list(tmp_path.iterdir()))}.json"
    code = cli.main([*argv, "--report", str(out)])
    text = out.read_text()
    report = json.loads(text)
    jsonschema.validate(report, REPORT_SCHEMA)
    return code, report, text


@pytest.mark.parametrize("n,m", [(2, 0), (3, 0), (2, 1)])
def test_verify_counterexample_passes(tmp_path, n, m):
    code, report, _ = run(tmp_path, "verify-counterexample", "--n", str(n), "--m", str(m))
    assert code == 0 and report["status"] == "pass"
    names = {c["name"] for c in report["checks"]}
    assert {"vbma_residual", "b_form_claims", "schur_values", "case1"} <= names
    assert ("lift_top" in names) == (m > 0)


def test_verify_counterexample_input_errors(tmp_path):
    code, report, _ = run(tmp_path, "verify-counterexample", "--n", "1")
    assert code == 2 and report["status"] == "error"
    code, report, _ = run(tmp_path, "verify-counterexample", "--n", "2", "--m", "3")
    assert code == 2 and "dimension" in report["message"]


@pytest.mark.parametrize("name", ["counterexample_n2", "threefold", "rank2", "generic"])
def test_check_valid_files(tmp_path, name):
    code, report, _ = run(tmp_path, "check", "--input", str(DATA / f"{name}.json"))
    assert code == 0, report
    assert all(c["passed"] for c in report["checks"])


def test_check_perturbed_counterexample(tmp_path):
    code, report, _ = run(tmp_path, "check", "--input", str(DATA / "counterexample_n2_perturbed.json"))
    assert code == 1 and report["status"] == "fail"
    failed = [c for c in report["checks"] if not c["passed"]]
    assert failed and all(c["witness"] is not None for c in failed)
    assert any(abs(c.get("residuals", {}).get("block", 0) - 4e-3) < 1e-12 for c in failed)


def test_check_truncated_file(tmp_path):
    code, report, _ = run(tmp_path, "check", "--input", str(DATA / "truncated.json"))
    assert code == 2 and "not valid JSON" in report["message"]


def test_check_schema_violation(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"schema_version": 1, "kind": "threefold",
                               "payload": {"a": 1.0, "b": 1.0, "lambda1": 1.0}}))
    code, report, _ = run(tmp_path, "check", "--input", str(bad))
    assert code == 2 and "schema violation" in report["message"]


def test_check_missing_file(tmp_path):
    code, report, _ = run(tmp_path, "check", "--input", str(tmp_path / "nope.json"))
    assert code == 2


def test_threefold_outside_region(tmp_path):
    data = json.loads((DATA / "threefold.json").read_text())
    data["payload"]["ell"] = [[5.0, 0.0], [5.0, 0.0]]
    path = tmp_path / "outside.json"
    path.write_text(json.dumps(data))
    code, report, _ = run(tmp_path, "check", "--input", str(path))
    assert code in (1, 2) and report["status"] != "pass"


def test_reports_are_byte_stable(tmp_path):
    args = ("sweep", "--kind", "rank2", "--trials", "2000", "--seed", "3")
    _, _, first = run(tmp_path, *args)
    _, _, second = run(tmp_path, *args)
    assert first == second
    assert "wall_time" not in first


def test_timing_flag_adds_wall_time(tmp_path):
    _, report, _ = run(tmp_path, "verify-counterexample", "--n", "2", "--timing")
    assert report["wall_time"] >= 0


@pytest.mark.parametrize("args", [
    ("--kind", "rank2", "--trials", "1000"),
    ("--kind", "threefold_det", "--trials", "50"),
    ("--kind", "region_p", "--trials", "3", "--samples", "100"),
    ("--kind", "region_p", "--trials", "200", "--a", "1", "--b", "2", "--lambda1", "1",
     "--lambda2", "4"),
])
def test_sweeps_pass(tmp_path, args):
    code, report, _ = run(tmp_path, "sweep", *args)
    assert code == 0 and report["checks"][0]["passed"]


def test_sweep_seed_changes_draws(tmp_path):
    _, a, _ = run(tmp_path, "sweep", "--kind", "rank2", "--trials", "500", "--seed", "1")
    _, b, _ = run(tmp_path, "sweep", "--kind", "rank2", "--trials", "500", "--seed", "2")
    assert a["checks"][0]["details"] != b["checks"][0]["details"]


def test_sweep_bad_arguments(tmp_path):
    code, report, _ = run(tmp_path, "sweep", "--kind", "rank2", "--trials", "0")
    assert code == 2
    code, report, _ = run(tmp_path, "sweep", "--kind", "region_p", "--trials", "5", "--a", "1")
    assert code == 2 and "missing" in report["message"]


def test_argparse_errors_exit_2(capsys):
    assert cli.main(["sweep", "--kind", "nope", "--trials", "1"]) == 2
    assert cli.main([]) == 2


def test_jsonable_handles_numpy():
    out = cli.jsonable({"x": np.float64(1.5), "z": 1 + 2j, "b": np.bool_(True),
                        "n": np.int64(3), "inf": float("inf"), "arr": np.eye(2)})
    assert out == {"x": 1.5, "z": [1.0, 2.0], "b": True, "n": 3, "inf": None,
                   "arr": [[1.0, 0.0], [0.0, 1.0]]}


def test_module_entry_point(tmp_path):
    out = tmp_path / "r.json"
    proc = subprocess.run([sys.executable, "-m", "vbma", "verify-counterexample", "--n", "2",
                           "--report", str(out)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert json.loads(out.read_text())["status"] == "pass"
