"""End-to-end tests for purify/cli.py through ``main(argv)``."""

from __future__ import annotations

import json

import numpy as np
import pandas as pd
import pytest

from purify import cli
from purify.config import settings
from purify.constants import (
    EXIT_CONFIG_ERROR,
    EXIT_DEGENERACY,
    EXIT_NUMERICAL_FAILURE,
    EXIT_OK,
)
from purify.errors import DegeneracyError, NumericalFailureError

FAST = ["--samples", "64", "--grid", "11", "--threads", "1"]


def _json(path):
    return json.loads(path.read_text(encoding="utf-8"))


# ── families-list ───────────────────────────────────────────────


class TestFamiliesList:
    def test_lists_every_family(self, capsys):
        assert cli.main(["families-list"]) == EXIT_OK
        families = json.loads(capsys.readouterr().out)
        ids = {f["id"] for f in families}
        assert {"werner", "rotated-werner", "one-step", "phi-mix", "maz", "qr"} <= ids
        qr = next(f for f in families if f["id"] == "qr")
        assert qr["oracle_iterations"] == 2
        assert qr["arity"] == 2


# ── evaluate ────────────────────────────────────────────────────


class TestEvaluate:
    def test_one_step_cnot(self, out_dir):
        code = cli.main(
            ["evaluate", "--family", "one-step", "--gate", "cnot", "--out", str(out_dir)]
            + FAST
        )
        assert code == EXIT_OK
        curves = pd.read_csv(out_dir / "evaluate_curves.csv")
        assert list(curves.columns) == ["x", "C_0", "C_1", "P_1", "overall_success"]
        entangled = curves[curves["x"] > 0]
        assert np.allclose(entangled["C_1"], 1.0, atol=1e-10)
        interior = entangled[entangled["x"] < 1]
        assert np.allclose(interior["P_1"], interior["x"] ** 2 / 2, atol=1e-12)
        assert np.allclose(entangled[entangled["x"] == 1]["P_1"], 1.0)
        summary = _json(out_dir / "evaluate_summary.json")
        assert summary["iterations"][0]["average_cost"] == pytest.approx(0.0, abs=1e-10)
        assert summary["fixed_point"]["min_concurrence"] == pytest.approx(1.0)
        assert summary["config"]["pdf"] == "uniform(0,1]"

    def test_phi_mix(self, out_dir):
        code = cli.main(
            ["evaluate", "--family", "phi-mix", "--out", str(out_dir)] + FAST
        )
        assert code == EXIT_OK
        curves = pd.read_csv(out_dir / "evaluate_curves.csv")
        assert np.allclose(curves["C_1"], (1 - 2 * curves["x"]) ** 2, atol=1e-10)
        assert np.allclose(curves["P_1"], 1.0, atol=1e-10)

    def test_qr_two_rounds(self, out_dir):
        code = cli.main(
            ["evaluate", "--family", "qr", "--iterations", "2", "--out", str(out_dir)]
            + FAST
        )
        assert code == EXIT_OK
        curves = pd.read_csv(out_dir / "evaluate_curves.csv")
        x = curves["x"]
        expected = 4 * x.abs() * (1 + x**2) / (1 + 6 * x**2 + x**4)
        assert np.allclose(curves["C_2"], expected, atol=1e-10)
        summary = _json(out_dir / "evaluate_summary.json")
        overall = [s["mean_overall_success"] for s in summary["iterations"]]
        assert overall[1] <= overall[0]

    def test_config_file_and_flag_precedence(self, out_dir, tmp_path):
        config = tmp_path / "run.yaml"
        config.write_text(
            "family: maz\nsamples: 16\ngrid: 5\nthreads: 1\noptimizer:\n  restarts: 1\n"
        )
        code = cli.main(
            ["evaluate", "--config", str(config), "--grid", "7", "--out", str(out_dir)]
        )
        assert code == EXIT_OK
        summary = _json(out_dir / "evaluate_summary.json")
        assert summary["family"] == "maz"
        assert summary["grid_points"] == 7
        assert summary["samples"] == 16
        assert summary["config"]["optimizer"]["restarts"] == 1

    def test_deterministic_output(self, tmp_path):
        first, second = tmp_path / "a", tmp_path / "b"
        for target in (first, second):
            args = ["evaluate", "--family", "qr", "--out", str(target)] + FAST
            assert cli.main(args) == EXIT_OK
        assert (first / "evaluate_curves.csv").read_bytes() == (
            second / "evaluate_curves.csv"
        ).read_bytes()
        summaries = [_json(d / "evaluate_summary.json") for d in (first, second)]
        for summary in summaries:
            summary["config"].pop("out")
        assert summaries[0] == summaries[1]


# ── oracle ──────────────────────────────────────────────────────


class TestOracle:
    def test_maz(self, out_dir):
        assert cli.main(["oracle", "--family", "maz", "--out", str(out_dir)] + FAST) == 0
        report = _json(out_dir / "oracle_report.json")
        assert report["max_concurrence_deviation"] <= 1e-10
        assert report["max_probability_deviation"] <= 1e-10
        assert report["y_spread"] is None

    def test_qr_second_round(self, out_dir):
        code = cli.main(
            ["oracle", "--family", "qr", "--iterations", "2", "--out", str(out_dir)]
            + FAST
        )
        assert code == EXIT_OK
        report = _json(out_dir / "oracle_report.json")
        assert report["max_concurrence_deviation"] <= 1e-10
        assert report["max_probability_deviation"] <= 1e-10
        assert report["y_spread"] <= 1e-10
        curves = pd.read_csv(out_dir / "oracle_curves.csv")
        assert {"C_sim", "C_oracle", "P_2_sim", "P_2_oracle"} <= set(curves.columns)

    def test_rotated_werner_baselines(self, out_dir):
        code = cli.main(
            ["oracle", "--family", "example1", "--out", str(out_dir)] + FAST
        )
        assert code == EXIT_OK
        report = _json(out_dir / "oracle_report.json")
        assert report["input_cost"] == pytest.approx(0.5, abs=1e-10)
        assert report["cnot_cost"] == pytest.approx(0.450103, abs=1e-4)

    def test_werner_has_no_oracle(self, out_dir):
        code = cli.main(["oracle", "--family", "werner", "--out", str(out_dir)] + FAST)
        assert code == EXIT_CONFIG_ERROR


# ── optimize ────────────────────────────────────────────────────


class TestOptimize:
    def test_writes_result_files(self, out_dir):
        code = cli.main(
            [
                "optimize",
                "--family",
                "one-step",
                "--pdf",
                "2x",
                "--samples",
                "32",
                "--restarts",
                "1",
                "--out",
                str(out_dir),
            ]
        )
        assert code == EXIT_OK
        result = _json(out_dir / "optimize_result.json")
        assert result["iterations"][0]["average_cost"] <= 1e-9
        assert result["config"]["optimizer"]["restarts"] == 1
        curves = pd.read_csv(out_dir / "optimize_curves.csv")
        assert {"x", "C_0", "C_1", "P_1", "cnot_C_1", "cnot_overall_success"} <= set(
            curves.columns
        )
        table = pd.read_csv(out_dir / "optimize_cnot_table.csv")
        assert table["iteration"].tolist() == [1]
        gate = _json(out_dir / "gate_1.json")
        assert len(gate["angles"]) == 15

        # the written gate file is a valid --gate source
        again = cli.main(
            [
                "evaluate",
                "--family",
                "one-step",
                "--gate",
                f"file:{out_dir / 'gate_1.json'}",
                "--out",
                str(out_dir / "replay"),
            ]
            + FAST
        )
        assert again == EXIT_OK


# ── Exit codes ──────────────────────────────────────────────────


class TestExitCodes:
    @pytest.mark.parametrize(
        "argv",
        [
            ["evaluate", "--family", "ghz"],
            ["evaluate", "--family", "qr", "--pdf", "2x"],
            ["evaluate", "--gate", "angles:1,2"],
            ["evaluate", "--fd-step", "0.5"],
            ["optimize", "--iterations", "9"],
            ["evaluate", "--policy", "ensemble-branch:7"],
        ],
    )
    def test_configuration_errors(self, argv, out_dir, capsys):
        assert cli.main(argv + ["--out", str(out_dir)]) == EXIT_CONFIG_ERROR
        assert "error:" in capsys.readouterr().err

    def test_missing_config_file(self, out_dir):
        code = cli.main(["evaluate", "--config", "/nonexistent/run.yaml"])
        assert code == EXIT_CONFIG_ERROR

    def test_numerical_failure(self, out_dir, monkeypatch):
        def fail(_run):
            raise NumericalFailureError("eigenvalue iteration failed")

        monkeypatch.setattr(cli, "evaluate_gate", fail)
        assert cli.main(["evaluate", "--out", str(out_dir)]) == EXIT_NUMERICAL_FAILURE

    def test_degeneracy(self, out_dir, monkeypatch):
        def degenerate(*_args, **_kwargs):
            raise DegeneracyError(1, 40, 64)

        monkeypatch.setattr(cli, "recurrence_optimize", degenerate)
        assert cli.main(["optimize", "--out", str(out_dir)]) == EXIT_DEGENERACY

    def test_metrics_file(self, out_dir, monkeypatch):
        monkeypatch.setattr(settings, "write_metrics", True)
        args = ["evaluate", "--family", "maz", "--out", str(out_dir)] + FAST
        assert cli.main(args) == EXIT_OK
        text = (out_dir / "metrics.prom").read_text()
        assert "purify_cost_evaluations_total" in text
