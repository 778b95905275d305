"""Tests for purify/quantum/entanglement.py."""

from __future__ import annotations

import numpy as np
import pytest

from purify.errors import NumericalFailureError, PositivityError
from purify.quantum.entanglement import (
    SPIN_FLIP,
    concurrence,
    concurrence_batch,
    concurrence_with_tangent,
    rho_tilde,
    square_root_factor,
    tilde_roots,
    tilde_spectrum,
)
from purify.quantum.families import (
    P_PHI_MINUS,
    P_PHI_PLUS,
    P_PSI_MINUS,
    P_PSI_PLUS,
    get_family,
    maz,
    one_step,
    qr,
    werner,
)
from purify.quantum.gellmann import su2_from_angles
from purify.quantum.qmat import I4, eig_general
from state_helpers import random_density


def _su2_angles(rng):
    return (
        rng.uniform(0, np.pi),
        rng.uniform(0, np.pi / 2),
        rng.uniform(0, 2 * np.pi),
    )


class TestConcurrence:
    def test_singlet(self):
        assert concurrence(P_PSI_MINUS) == pytest.approx(1.0, abs=1e-12)

    def test_werner(self):
        """werner(0.7) has concurrence 2x - 1 = 0.4."""
        assert concurrence(werner(0.7)) == pytest.approx(0.4, abs=1e-10)

    @pytest.mark.parametrize("x", [0.1, 0.25, 0.5, 0.75, 0.9])
    def test_one_step(self, x):
        assert concurrence(one_step(x)) == pytest.approx(x, abs=1e-10)

    def test_maximally_mixed(self):
        assert concurrence(I4 / 4) == 0.0

    def test_rejects_invalid_state(self):
        with pytest.raises(PositivityError):
            concurrence(np.diag([1.5, -0.5, 0.0, 0.0]))

    def test_rho_tilde_matches_spectrum(self, rng):
        """The Hermitian route gives the eigenvalues of rho-tilde itself."""
        rho = random_density(rng)
        direct = np.sort(eig_general(rho_tilde(rho)).real)
        assert np.allclose(tilde_spectrum(rho[None])[0], direct, atol=1e-10)

    def test_spin_flip(self):
        assert np.allclose(np.fliplr(SPIN_FLIP).diagonal(), [-1, 1, 1, -1])


# ── Rank-deficient states ───────────────────────────────────────


class TestRankDeficientPrecision:
    """Every family state has rank < 4; values must not pick up root noise."""

    @pytest.mark.parametrize("x", [0.05, 0.3, 0.55, 0.8, 0.95])
    def test_maz(self, x):
        assert abs(concurrence(maz(x)) - x) <= 1e-12

    def test_qr_point(self):
        assert abs(concurrence(qr(0.6, 0.8)) - 1.0) <= 1e-12

    @pytest.mark.parametrize("name", ["maz", "one-step", "phi-mix", "qr"])
    def test_family_grids(self, name):
        family = get_family(name)
        points = family.grid(21)
        values = concurrence_batch(family.states(points))
        assert np.max(np.abs(values - family.known_concurrence(points))) <= 1e-12

    def test_factor_reproduces_state(self, rng):
        rho = random_density(rng, rank=2)
        factor = square_root_factor(rho[None])[0]
        assert np.allclose(factor @ factor.conj().T, rho, atol=1e-12)
        assert np.count_nonzero(np.linalg.norm(factor, axis=0) > 1e-7) == 2

    def test_roots_are_descending(self, rng):
        roots = tilde_roots(np.array([random_density(rng) for _ in range(20)]))
        assert np.all(np.diff(roots, axis=-1) <= 0)
        assert np.all(roots >= 0)


class TestConcurrenceProperties:
    def test_local_unitary_invariance(self, rng):
        """1000 seeded (rho, U_A, U_B) of ranks 1 to 4: C unchanged within 1e-9."""
        for _ in range(1000):
            rho = random_density(rng, rank=int(rng.integers(1, 5)))
            local = np.kron(
                su2_from_angles(_su2_angles(rng)), su2_from_angles(_su2_angles(rng))
            )
            rotated = local @ rho @ local.conj().T
            assert abs(concurrence(rotated) - concurrence(rho)) <= 1e-9

    def test_bell_diagonal(self, rng):
        """Bell-diagonal states: C = max(0, 2 lambda_max - 1) on 500 simplex points."""
        projectors = (P_PSI_MINUS, P_PSI_PLUS, P_PHI_PLUS, P_PHI_MINUS)
        for weights in rng.dirichlet(np.ones(4), size=500):
            rho = sum(w * p for w, p in zip(weights, projectors, strict=True))
            expected = max(0.0, 2 * weights.max() - 1)
            assert abs(concurrence(rho) - expected) <= 1e-10

    def test_never_nan(self, rng):
        """10^4 random mixed states: finite values in [0, 1]."""
        states = np.array([random_density(rng) for _ in range(10_000)])
        values = concurrence_batch(states)
        assert np.all(np.isfinite(values))
        assert np.all((values >= 0) & (values <= 1))

    def test_strict_mode_overshoot(self):
        """A 'state' with concurrence far above 1 is rejected in strict mode."""
        with pytest.raises(NumericalFailureError):
            concurrence_batch(2 * P_PSI_MINUS[None], strict=True)


class TestConcurrenceTangent:
    def test_matches_finite_differences(self, rng):
        """Directional derivatives agree with central differences on entangled states."""
        base = np.array(
            [0.85 * one_step(0.7) + 0.15 * random_density(rng) for _ in range(8)]
        )
        direction = np.array([random_density(rng) - I4 / 4 for _ in range(8)])
        values, gradient, reliable = concurrence_with_tangent(base, direction[None])
        h = 1e-6
        numeric = (
            concurrence_batch(base + h * direction)
            - concurrence_batch(base - h * direction)
        ) / (2 * h)
        assert np.allclose(values, concurrence_batch(base))
        assert np.all(values > 0.1)
        assert reliable.any()
        for n in np.flatnonzero(reliable):
            assert gradient[0, n] == pytest.approx(numeric[n], abs=1e-6)

    def test_separable_states_have_zero_gradient(self):
        """Deep inside the separable region the subgradient is 0 and reliable."""
        rho = werner(0.3)[None]
        tangent = (P_PSI_MINUS - I4 / 4)[None, None]
        _, gradient, reliable = concurrence_with_tangent(rho, tangent)
        assert gradient[0, 0] == 0.0
        assert reliable[0]

    def test_output_shapes(self, rng):
        states = np.array([random_density(rng) for _ in range(5)])
        tangents = rng.normal(size=(3, 5, 4, 4)) + 0j
        values, gradient, reliable = concurrence_with_tangent(states, tangents)
        assert values.shape == (5,)
        assert gradient.shape == (3, 5)
        assert reliable.shape == (5,)
        assert np.all(np.isfinite(gradient))

