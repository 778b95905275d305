"""Tests for purify/optim/cost.py."""

from __future__ import annotations

import numpy as np
import pytest
from prometheus_client import REGISTRY

from purify.errors import ConfigError
from purify.optim.cost import (
    PreparedEnsemble,
    average_cost,
    choose_branch,
    cost_and_gradient,
    gradient,
    gradient_diagnostics,
)
from purify.quantum.gellmann import (
    angle_bounds,
    cnot_angles,
    identity_angles,
    random_angles,
)
from purify.quantum.families import phi_mix
from purify.quantum.protocol import EnsembleBranch, PerStateMax
from purify.schemas.run import OptimizerConfig
from state_helpers import ensemble_for

# ── Average cost ────────────────────────────────────────────────


class TestAverageCost:
    def test_cnot_on_rotated_werner(self):
        """4096 quasi-random samples reproduce the quadrature baseline."""
        ensemble = ensemble_for("rotated-werner", "uniform(0.5,1]", 4096)
        evaluation = average_cost(cnot_angles(), ensemble)
        assert evaluation.value == pytest.approx(0.450103, abs=2e-3)
        assert evaluation.branch is None

    def test_cnot_purifies_one_step(self):
        ensemble = ensemble_for("one-step", "uniform", 512)
        assert average_cost(cnot_angles(), ensemble).value == pytest.approx(0.0, abs=1e-10)

    def test_phi_mix_cnot_aggregates_tie(self):
        """Outcomes 00 and 11 give the same C', so the kept probability is 1."""
        points = np.array([[0.1], [0.3], [0.6], [0.9]])
        ensemble = PreparedEnsemble.from_states(points, phi_mix(points[:, 0]))
        evaluation = average_cost(cnot_angles(), ensemble)
        assert np.allclose(evaluation.probabilities, 1.0, atol=1e-12)
        assert np.allclose(
            evaluation.concurrences, (1 - 2 * points[:, 0]) ** 2, atol=1e-12
        )

    def test_identity_keeps_input(self):
        ensemble = ensemble_for("one-step", "uniform", 4096)
        evaluation = average_cost(identity_angles(), ensemble)
        assert evaluation.value == pytest.approx(0.5, abs=1e-3)
        assert np.allclose(evaluation.concurrences, ensemble.points[:, 0], atol=1e-10)

    def test_per_state_max_dominates_ensemble_branch(self, rng, werner_ensemble):
        for values in random_angles(rng, 50):
            best = average_cost(values, werner_ensemble, PerStateMax()).value
            fixed = average_cost(values, werner_ensemble, EnsembleBranch()).value
            assert best <= fixed + 1e-12

    def test_ensemble_branch_choice(self, rng, werner_ensemble):
        evaluation = average_cost(
            random_angles(rng), werner_ensemble, EnsembleBranch()
        )
        assert evaluation.branch == int(np.argmax(evaluation.branch_means))
        assert evaluation.value == pytest.approx(
            1.0 - evaluation.branch_means[evaluation.branch]
        )
        assert np.all(evaluation.kept == evaluation.branch)

    def test_fixed_branch(self, werner_ensemble):
        evaluation = average_cost(cnot_angles(), werner_ensemble, EnsembleBranch(2))
        assert evaluation.branch == 2
        assert evaluation.value == pytest.approx(1.0 - evaluation.branch_means[2])

    def test_threads_match_serial(self, rng):
        ensemble = ensemble_for("qr", "disk", 200)
        values = random_angles(rng)
        serial = average_cost(values, ensemble, config=OptimizerConfig(chunk_size=32))
        threaded = average_cost(
            values, ensemble, config=OptimizerConfig(threads=4, chunk_size=32)
        )
        assert threaded.value == serial.value
        assert np.array_equal(threaded.probabilities, serial.probabilities)

    def test_counts_evaluations(self, werner_ensemble):
        labels = {"policy": "per-state-max"}
        before = (
            REGISTRY.get_sample_value("purify_cost_evaluations_total", labels) or 0.0
        )
        average_cost(cnot_angles(), werner_ensemble)
        after = REGISTRY.get_sample_value("purify_cost_evaluations_total", labels)
        assert after == before + 1

    def test_rejects_wrong_angle_count(self, werner_ensemble):
        with pytest.raises(ConfigError):
            average_cost(np.zeros(14), werner_ensemble)


class TestEnsemble:
    def test_empty(self):
        with pytest.raises(ConfigError):
            PreparedEnsemble.from_states(np.zeros((0, 1)), np.zeros((0, 4, 4)))

    def test_subset(self, werner_ensemble):
        part = werner_ensemble.subset(np.array([0, 5, 7]))
        assert part.size == 3
        assert np.allclose(part.states[1], werner_ensemble.states[5])
        assert part.pairs.shape == (3, 16, 16)

    def test_choose_branch_ties_go_low(self):
        assert choose_branch(np.array([0.3, 0.5, 0.5 - 1e-12, 0.1])) == 1
        assert choose_branch(np.full(4, 0.2)) == 0


# ── Gradient ────────────────────────────────────────────────────


class TestGradient:
    def test_dual_matches_central(self, rng, werner_ensemble):
        """20 seeded points: rel 1e-5 on coordinates with |g| > 1e-6."""
        for values in random_angles(rng, 20):
            evaluation = average_cost(values, werner_ensemble)
            dual = gradient(values, werner_ensemble, evaluation=evaluation, mode="dual")
            central = gradient(
                values, werner_ensemble, evaluation=evaluation, mode="central"
            )
            large = np.abs(central) > 1e-6
            assert np.allclose(dual[large], central[large], rtol=1e-5, atol=1e-9)
            assert np.allclose(dual[~large], central[~large], atol=1e-8)

    def test_descent_direction(self, rng, werner_ensemble):
        bounds = angle_bounds()
        values = 0.5 * (bounds[:, 0] + bounds[:, 1])
        values += 0.1 * rng.uniform(-1, 1, size=15)
        grad = gradient(values, werner_ensemble)
        step = 1e-4 * grad / np.linalg.norm(grad)
        before = average_cost(values, werner_ensemble).value
        after = average_cost(values - step, werner_ensemble).value
        assert after < before

    def test_finite_at_box_faces(self, werner_ensemble):
        for mode in ("dual", "central"):
            grad = gradient(identity_angles(), werner_ensemble, mode=mode)
            assert grad.shape == (15,)
            assert np.all(np.isfinite(grad))

    def test_objective(self, werner_ensemble):
        objective = cost_and_gradient(werner_ensemble, config=OptimizerConfig())
        value, grad = objective(cnot_angles().as_array())
        assert value == pytest.approx(average_cost(cnot_angles(), werner_ensemble).value)
        assert grad.shape == (15,)

    def test_diagnostics_quiet_when_modes_agree(self, rng, werner_ensemble):
        diagnose = gradient_diagnostics(werner_ensemble)
        assert diagnose(random_angles(rng)) == []

    def test_diagnostics_skipped_in_central_mode(self, rng, werner_ensemble):
        config = OptimizerConfig(gradient_mode="central")
        assert gradient_diagnostics(werner_ensemble, config=config)(
            random_angles(rng)
        ) == []
