"""Tests for purify/services/propagation.py and purify/services/recurrence.py."""

from __future__ import annotations

import numpy as np
import pytest

from purify.config import settings
from purify.errors import ConfigError, DegeneracyError
from purify.optim.lbfgs import LbfgsResult, RunStatus
from purify.optim.multistart import MultistartResult
from purify.quantum.families import get_family, parse_pdf
from purify.quantum.gellmann import cnot_angles, identity_angles
from purify.quantum.protocol import EnsembleBranch
from purify.schemas.run import OptimizerConfig
from purify.services import recurrence
from purify.services.propagation import ChainState, overall_success, run_fixed_gates
from purify.services.recurrence import recurrence_optimize


def _chain(family: str, points) -> ChainState:
    points = np.asarray(points, dtype=np.float64).reshape(len(points), -1)
    return ChainState.start(points, get_family(family).states(points))


# ── Propagation ─────────────────────────────────────────────────


class TestOverallSuccess:
    def test_weights_double_per_round(self):
        table = np.array([[0.5, 0.9], [0.8, 0.6], [0.7, 1.0]])
        expected = table[0] ** 4 * table[1] ** 2 * table[2]
        assert np.allclose(overall_success(table), expected)

    def test_single_round_is_the_probability(self):
        assert np.allclose(overall_success(np.array([[0.3, 0.7]])), [0.3, 0.7])

    def test_missing_entries_are_zero(self):
        table = np.array([[0.5, 0.5], [np.nan, 0.5]])
        assert overall_success(table).tolist() == [0.0, 0.125]


class TestChain:
    def test_cnot_chain_on_one_step(self):
        chain = _chain("one-step", [0.2, 0.6, 0.9])
        evaluations = run_fixed_gates(chain, [cnot_angles(), cnot_angles()])
        assert len(evaluations) == 2
        table = chain.concurrence_table()
        assert np.allclose(table, 1.0, atol=1e-10)
        assert np.allclose(chain.probability_table()[0], [0.02, 0.18, 0.405])
        # Bell-state inputs pass a second CNOT round with certainty
        assert np.allclose(chain.probability_table()[1], 1.0, atol=1e-10)
        assert np.allclose(chain.overall_success(), [0.02**2, 0.18**2, 0.405**2])

    def test_drops_samples_without_post_state(self):
        """Outcome 01 never occurs for one-step inputs under the identity gate."""
        chain = _chain("one-step", [0.3, 0.7])
        run_fixed_gates(chain, [identity_angles()], EnsembleBranch(1))
        assert chain.dropped == [2]
        assert not chain.alive.any()
        assert np.all(np.isnan(chain.current_concurrence()))
        assert chain.overall_success().tolist() == [0.0, 0.0]

    def test_stops_when_everything_is_dropped(self):
        chain = _chain("one-step", [0.3, 0.7])
        evaluations = run_fixed_gates(
            chain, [identity_angles(), cnot_angles()], EnsembleBranch(1)
        )
        assert len(evaluations) == 1

    def test_identity_keeps_states(self):
        chain = _chain("rotated-werner", [0.6, 0.8])
        before = chain.current_cost()
        run_fixed_gates(chain, [identity_angles()])
        assert chain.current_cost() == pytest.approx(before, abs=1e-10)
        assert np.allclose(chain.overall_success_by_round()[0], 1.0)


# ── Recurrence ──────────────────────────────────────────────────


class TestRecurrence:
    def test_one_step_single_iteration(self, fast_config):
        result = recurrence_optimize(
            "one-step", parse_pdf("uniform"), 64, 1, config=fast_config
        )
        (record,) = result.iterations
        assert record.average_cost <= 1e-9
        assert record.starts == 1 + 1 + fast_config.restarts
        assert result.monotone
        assert result.input_cost == pytest.approx(0.5, abs=0.01)
        assert len(result.overall_success) == 64
        assert np.allclose(result.overall_success, result.probabilities[0])

    def test_qr_beats_cnot(self, fast_config):
        result = recurrence_optimize("qr", parse_pdf("disk"), 64, 1, config=fast_config)
        (record,) = result.iterations
        assert record.average_cost <= record.cnot_same_ensemble_cost + 1e-9
        assert record.cnot_chain_cost == pytest.approx(record.cnot_same_ensemble_cost)
        assert len(result.points[0]) == 2

    def test_two_iterations_are_monotone(self, fast_config):
        result = recurrence_optimize(
            "rotated-werner", parse_pdf("uniform(0.5,1]"), 48, 2, config=fast_config
        )
        assert len(result.trajectory) == 2
        assert result.monotone
        assert len(result.concurrences) == 2
        assert len(result.cnot_probabilities) == 2

    def test_accuracy_warning(self, fast_config, monkeypatch):
        monkeypatch.setattr(settings, "accuracy_warning_after", 1)
        result = recurrence_optimize(
            "one-step", parse_pdf("2x"), 32, 2, config=fast_config
        )
        assert result.warnings

    @pytest.mark.parametrize("iterations", [0, 5])
    def test_iteration_limits(self, iterations):
        with pytest.raises(ConfigError):
            recurrence_optimize("werner", parse_pdf("uniform(0.5,1]"), 8, iterations)

    def test_explicit_cap(self):
        with pytest.raises(ConfigError):
            recurrence_optimize(
                "werner", parse_pdf("uniform(0.5,1]"), 8, 3, max_recurrence=2
            )

    def test_pdf_must_match_family(self):
        with pytest.raises(ConfigError):
            recurrence_optimize("qr", parse_pdf("2x"), 8, 1)

    def test_degenerate_branch_raises(self, fast_config, monkeypatch):
        """A kept branch with no post-state for most samples stops the run."""

        def identity_search(*_args, **_kwargs):
            best = LbfgsResult(
                angles=identity_angles(),
                value=0.0,
                status=RunStatus.CONVERGED,
                message="",
                iterations=0,
                evaluations=0,
                projected_gradient_norm=0.0,
            )
            return MultistartResult(best=best, runs=[best])

        monkeypatch.setattr(recurrence, "multistart", identity_search)
        monkeypatch.setattr(recurrence, "EnsembleBranch", lambda: EnsembleBranch(1))
        with pytest.raises(DegeneracyError) as info:
            recurrence_optimize("one-step", parse_pdf("uniform"), 16, 1, fast_config)
        assert info.value.dropped == 16


# ── Published trends (minutes) ──────────────────────────────────


SLOW_CONFIG = OptimizerConfig(restarts=6, max_iterations=500)


@pytest.mark.slow
class TestPublishedTrends:
    @pytest.mark.parametrize("pdf", ["uniform", "2x", "2(1-x)", "6x(1-x)"])
    def test_one_step_is_purified(self, pdf):
        result = recurrence_optimize("one-step", parse_pdf(pdf), 256, 1, SLOW_CONFIG)
        assert result.trajectory[0] <= 1e-3

    def test_maz_is_rescued(self):
        result = recurrence_optimize("maz", parse_pdf("uniform"), 256, 1, SLOW_CONFIG)
        assert result.trajectory[0] <= 1e-3

    def test_qr_margin(self):
        result = recurrence_optimize("qr", parse_pdf("disk"), 256, 1, SLOW_CONFIG)
        (record,) = result.iterations
        assert record.average_cost < record.cnot_same_ensemble_cost - 1e-3

    @pytest.mark.parametrize(
        ("family", "decrease"), [("rotated-werner", 0.08), ("werner", 0.035)]
    )
    def test_three_rounds(self, family, decrease):
        result = recurrence_optimize(
            family, parse_pdf("uniform(0.5,1]"), 256, 3, SLOW_CONFIG
        )
        assert result.monotone
        assert result.input_cost - result.trajectory[-1] >= decrease
