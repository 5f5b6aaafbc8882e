"""Command-line surface: subcommands, files, manifests, exit codes."""

import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from liulogit.cli import main
from liulogit.dataio import load_csv, sha256_file
from liulogit.fixtures import fixture_path
from liulogit.model import fit_mle
from liulogit.shrinkage import ESTIMATOR_NAMES

FIXTURE = str(fixture_path())

SMALL_RESTRICTIONS = """p 3
q 1
H
1 -1 0
h
0
Psi
1
"""


def _read_csv(path):
    with open(path, newline="") as handle:
        return list(csv.reader(handle))


def _manifest(out_dir):
    return json.loads((out_dir / "manifest.json").read_text())


# ---------------------------------------------------------------------------
# fit
# ---------------------------------------------------------------------------


def test_fit_writes_report_files(tmp_path, capsys):
    out = tmp_path / "out"
    rc = main(["fit", "--data", FIXTURE, "--response", "y", "--out-dir", str(out)])
    assert rc == 0
    stdout = capsys.readouterr().out
    assert "converged" in stdout

    fit = fit_mle(load_csv(FIXTURE, "y"))
    rows = _read_csv(out / "coefficients.csv")
    assert rows[0] == ["feature", "estimate", "standard_error"]
    estimates = np.array([float(r[1]) for r in rows[1:]])
    assert np.array_equal(estimates, fit.beta_hat)

    cov_rows = _read_csv(out / "covariance.csv")
    assert cov_rows[0] == ["feature", "x1", "x2", "x3", "x4"]
    assert len(cov_rows) == 5

    manifest = _manifest(out)
    assert manifest["command"] == "fit"
    assert manifest["inputs"][FIXTURE] == sha256_file(FIXTURE)
    for name, digest in manifest["outputs"].items():
        assert sha256_file(out / name) == digest
    assert manifest["iterations"] == fit.iterations


def test_fit_missing_file_is_input_error(tmp_path, capsys):
    rc = main(
        ["fit", "--data", str(tmp_path / "no.csv"), "--response", "y",
         "--out-dir", str(tmp_path / "o")]
    )
    assert rc == 2
    assert "error" in capsys.readouterr().err


def test_fit_bad_response_is_input_error(tmp_path, capsys):
    rc = main(
        ["fit", "--data", FIXTURE, "--response", "zzz",
         "--out-dir", str(tmp_path / "o")]
    )
    assert rc == 2


def test_fit_nonconvergence_is_numerical_failure(tmp_path, capsys):
    rc = main(
        ["fit", "--data", FIXTURE, "--response", "y", "--max-iter", "1",
         "--out-dir", str(tmp_path / "o")]
    )
    assert rc == 3
    assert "numerical failure" in capsys.readouterr().err


def test_fit_separation_is_numerical_failure(tmp_path, capsys):
    data = tmp_path / "sep.csv"
    data.write_text(
        "x1,y\n0.001,1\n0.002,1\n-0.001,0\n-0.002,0\n"
    )
    rc = main(
        ["fit", "--data", str(data), "--response", "y",
         "--out-dir", str(tmp_path / "o")]
    )
    assert rc == 3


# ---------------------------------------------------------------------------
# diagnose
# ---------------------------------------------------------------------------


def test_diagnose_reports_condition_number(tmp_path, capsys):
    out = tmp_path / "diag"
    rc = main(
        ["diagnose", "--data", FIXTURE, "--response", "y", "--out-dir", str(out)]
    )
    assert rc == 0
    stdout = capsys.readouterr().out
    assert "condition number of unit-length-scaled X'X" in stdout
    assert "flagged pairs" in stdout
    rows = _read_csv(out / "diagnostics.csv")
    assert rows[0] == ["feature", "x1", "x2", "x3", "x4"]
    assert any(row and row[0] == "condition_number" for row in rows)
    assert sum(1 for row in rows if row and row[0] == "flag") == 6
    assert _manifest(out)["condition_number"] > 10.0


def test_diagnose_raw_condition_flag(tmp_path, capsys):
    out_scaled = tmp_path / "s"
    out_raw = tmp_path / "r"
    main(["diagnose", "--data", FIXTURE, "--response", "y", "--out-dir", str(out_scaled)])
    rc = main(
        ["diagnose", "--data", FIXTURE, "--response", "y", "--raw-condition",
         "--out-dir", str(out_raw)]
    )
    assert rc == 0
    assert "raw X'X" in capsys.readouterr().out
    assert (
        _manifest(out_raw)["condition_number"]
        != _manifest(out_scaled)["condition_number"]
    )


# ---------------------------------------------------------------------------
# compare
# ---------------------------------------------------------------------------


def test_compare_emits_tables_verdicts_estimates(tmp_path, capsys):
    out = tmp_path / "cmp"
    rc = main(
        ["compare", "--data", FIXTURE, "--response", "y", "--out-dir", str(out)]
    )
    assert rc == 0

    table = _read_csv(out / "smse_table.csv")
    assert len(table) == 6  # header + five estimators
    assert table[0][0] == "estimator"
    assert len(table[0]) == 12  # estimator + 11 d columns
    assert [row[0] for row in table[1:]] == list(ESTIMATOR_NAMES)

    verdicts = _read_csv(out / "verdicts.csv")
    assert len(verdicts) == 1 + 4 * 11  # four pairs per d value
    assert all(row[2] == "SRAULLE" for row in verdicts[1:])

    estimates = _read_csv(out / "estimates.csv")
    assert len(estimates) == 1 + 5 * 11
    assert estimates[0] == ["estimator", "d", "x1", "x2", "x3", "x4"]

    manifest = _manifest(out)
    assert set(manifest["best_d"]) == set(ESTIMATOR_NAMES)
    full = _read_csv(out / "smse_full.csv")
    assert len(full) == 1 + 5 * 11
    assert (out / "smse_table.txt").read_text().count("SRAULLE") == 1


def test_compare_h_from_mle_makes_srmle_equal_mle(tmp_path, capsys):
    out = tmp_path / "cmp"
    rc = main(
        ["compare", "--data", FIXTURE, "--response", "y", "--h-from-mle",
         "--d-grid", "0.2,0.8", "--out-dir", str(out)]
    )
    assert rc == 0
    rows = _read_csv(out / "estimates.csv")[1:]
    by_name = {}
    for row in rows:
        by_name.setdefault(row[0], []).append([float(v) for v in row[2:]])
    for mle_row, srmle_row in zip(by_name["MLE"], by_name["SRMLE"]):
        assert np.allclose(mle_row, srmle_row, atol=1e-10)


def test_compare_rejects_mismatched_restriction_file(tmp_path, capsys):
    spec = tmp_path / "r3.txt"
    spec.write_text(SMALL_RESTRICTIONS)
    rc = main(
        ["compare", "--data", FIXTURE, "--response", "y",
         "--restrictions", str(spec), "--out-dir", str(tmp_path / "o")]
    )
    assert rc == 2
    assert "p=3" in capsys.readouterr().err


def test_compare_rejects_out_of_range_d(tmp_path, capsys):
    rc = main(
        ["compare", "--data", FIXTURE, "--response", "y",
         "--d-grid", "0.5,1.5", "--out-dir", str(tmp_path / "o")]
    )
    assert rc == 2


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

SIM_ARGS = [
    "simulate", "--n-values", "20", "--rho-values", "0.7", "--reps", "6",
    "--d-grid", "0.2,0.8", "--seed", "99",
]


def test_simulate_writes_tables_results_manifest(tmp_path, capsys):
    out = tmp_path / "sim"
    rc = main(SIM_ARGS + ["--out-dir", str(out)])
    assert rc == 0
    assert (out / "smse_table_n20.txt").is_file()
    assert (out / "smse_table_n20.csv").is_file()
    rows = _read_csv(out / "results.csv")
    assert rows[0][:4] == ["n", "rho", "estimator", "d"]
    assert len(rows) == 1 + 5 * 2  # five estimators, two d values
    manifest = _manifest(out)
    assert manifest["command"] == "simulate"
    assert manifest["config"]["replications"] == 6
    assert manifest["config"]["master_seed"] == 99
    assert "failure_counts" in manifest


def test_simulate_rerun_from_manifest_is_byte_identical(tmp_path, capsys):
    first = tmp_path / "a"
    second = tmp_path / "b"
    assert main(SIM_ARGS + ["--out-dir", str(first)]) == 0
    rc = main(
        ["simulate", "--config", str(first / "manifest.json"),
         "--out-dir", str(second)]
    )
    assert rc == 0
    assert (first / "results.csv").read_bytes() == (second / "results.csv").read_bytes()
    assert (
        (first / "smse_table_n20.csv").read_bytes()
        == (second / "smse_table_n20.csv").read_bytes()
    )


def test_simulate_worker_count_does_not_change_output(tmp_path, capsys):
    serial = tmp_path / "serial"
    threaded = tmp_path / "threaded"
    assert main(SIM_ARGS + ["--out-dir", str(serial), "--jobs", "1"]) == 0
    assert main(SIM_ARGS + ["--out-dir", str(threaded), "--jobs", "3"]) == 0
    assert (
        (serial / "results.csv").read_bytes()
        == (threaded / "results.csv").read_bytes()
    )


def test_simulate_flag_overrides_config_file(tmp_path, capsys):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"n_values": [20], "rho_values": [0.7],
                                  "replications": 5, "d_grid": [0.5]}))
    out = tmp_path / "sim"
    rc = main(
        ["simulate", "--config", str(config), "--reps", "3",
         "--out-dir", str(out)]
    )
    assert rc == 0
    assert _manifest(out)["config"]["replications"] == 3


def test_simulate_rejects_unknown_config_key(tmp_path, capsys):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"replicas": 5}))
    rc = main(
        ["simulate", "--config", str(config), "--out-dir", str(tmp_path / "o")]
    )
    assert rc == 2
    assert "replicas" in capsys.readouterr().err


def test_simulate_custom_restriction_file(tmp_path, capsys):
    spec = tmp_path / "r3.txt"
    spec.write_text(SMALL_RESTRICTIONS)
    out = tmp_path / "sim"
    rc = main(
        ["simulate", "--n-values", "25", "--rho-values", "0.8", "--reps", "4",
         "--d-grid", "0.5", "--seed", "7", "--p", "3",
         "--restrictions", str(spec), "--out-dir", str(out)]
    )
    assert rc == 0
    manifest = _manifest(out)
    assert manifest["config"]["p"] == 3
    assert manifest["config"]["restriction"]["H"] == [[1.0, -1.0, 0.0]]


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def test_installed_entry_point_help():
    out = subprocess.run(
        [sys.executable, "-m", "liulogit.cli", "--help"],
        capture_output=True, text=True,
    )
    assert out.returncode == 0
    for name in ("fit", "diagnose", "compare", "simulate"):
        assert name in out.stdout


def test_unknown_subcommand_exits_with_usage_error():
    out = subprocess.run(
        [sys.executable, "-m", "liulogit.cli", "frobnicate"],
        capture_output=True, text=True,
    )
    assert out.returncode == 2
