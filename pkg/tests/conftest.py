"""Shared fixtures: seeded generators, random states and gates, small ensembles."""

from __future__ import annotations

import os
from pathlib import Path

# Keep test runs from writing metrics or JSON logs unless a test asks for it.
os.environ.setdefault("PURIFY_WRITE_METRICS", "false")
os.environ.setdefault("PURIFY_LOG_JSON", "false")

import numpy as np  # noqa: E402
import pytest  # noqa: E402

from purify.optim.cost import PreparedEnsemble  # noqa: E402
from purify.quantum.gellmann import random_angles, su4_matrix  # noqa: E402
from purify.schemas.run import OptimizerConfig  # noqa: E402
from state_helpers import ensemble_for, random_density  # noqa: E402

TESTS_ROOT = Path(__file__).parent


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def random_state(rng):
    return random_density(rng)


@pytest.fixture
def random_gate(rng):
    return su4_matrix(random_angles(rng))


@pytest.fixture
def fast_config() -> OptimizerConfig:
    """Serial, few restarts: enough for unit tests."""
    return OptimizerConfig(restarts=2, max_iterations=200, threads=1, chunk_size=64)


@pytest.fixture
def werner_ensemble() -> PreparedEnsemble:
    return ensemble_for("rotated-werner", "uniform(0.5,1]", 64)


@pytest.fixture
def out_dir(tmp_path) -> Path:
    path = tmp_path / "results"
    path.mkdir()
    return path
