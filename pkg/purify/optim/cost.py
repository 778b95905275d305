"""Ensemble-average cost ``1 - E[C']`` of a bilateral gate and its gradient.

Both evaluations split the ensemble into fixed chunks, optionally spread over
a thread pool, and reduce the per-sample arrays in chunk order, so serial and
threaded runs produce identical numbers.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import TypeVar

import numpy as np
from numpy.typing import ArrayLike, NDArray

from purify.constants import (
    BRANCH_PROBABILITY_EPS,
    GRADIENT_DISAGREEMENT_WARN,
    SU4_ANGLE_COUNT,
    TIE_TOL,
)
from purify.errors import ConfigError
from purify.observability.metrics import (
    COST_EVALUATIONS,
    FALLBACK_SAMPLES,
    GRADIENT_EVALUATIONS,
)
from purify.optim.dual import su4_dual
from purify.quantum.entanglement import concurrence_batch, concurrence_with_tangent
from purify.quantum.gellmann import GateAngles, angle_bounds, su4_matrix
from purify.quantum.protocol import (
    BranchPolicy,
    BranchTable,
    EnsembleBranch,
    PerStateMax,
    bilateral_product,
    branch_blocks,
    evaluate_branches,
    pair_states,
    select_per_state,
)
from purify.quantum.qmat import dagger
from purify.schemas.run import OptimizerConfig

logger = logging.getLogger(__name__)

T = TypeVar("T")


@dataclass(frozen=True)
class PreparedEnsemble:
    """Sample points with their states and two-copy states precomputed."""

    points: NDArray[np.float64] = field(repr=False)
    states: NDArray[np.complex128] = field(repr=False)
    pairs: NDArray[np.complex128] = field(repr=False)

    @classmethod
    def from_states(cls, points: ArrayLike, states: ArrayLike) -> PreparedEnsemble:
        rhos = np.asarray(states, dtype=np.complex128).reshape(-1, 4, 4)
        if rhos.shape[0] == 0:
            raise ConfigError("the state ensemble is empty")
        pts = np.asarray(points, dtype=np.float64).reshape(rhos.shape[0], -1)
        return cls(points=pts, states=rhos, pairs=pair_states(rhos))

    @property
    def size(self) -> int:
        return int(self.states.shape[0])

    def subset(self, indices: NDArray[np.intp]) -> PreparedEnsemble:
        return PreparedEnsemble(
            points=self.points[indices],
            states=self.states[indices],
            pairs=self.pairs[indices],
        )


@dataclass(frozen=True)
class CostEvaluation:
    """Average cost plus the per-sample data that produced it.

    ``kept`` is the branch each sample's concurrence was read from (the
    ensemble branch, or the lowest-index per-state maximum); ``kept_states``
    are the matching normalized post-states (zero where undefined).
    """

    value: float
    branch: int | None
    branch_means: NDArray[np.float64]
    concurrences: NDArray[np.float64] = field(repr=False)
    probabilities: NDArray[np.float64] = field(repr=False)
    kept: NDArray[np.intp] = field(repr=False)
    kept_states: NDArray[np.complex128] = field(repr=False)

    @property
    def mean_concurrence(self) -> float:
        return 1.0 - self.value


# ── Chunked execution ───────────────────────────────────────────


def _chunks(size: int, chunk_size: int) -> list[slice]:
    return [
        slice(start, min(start + chunk_size, size))
        for start in range(0, size, chunk_size)
    ]


def _run_chunked(
    work: Callable[[slice], T], size: int, threads: int, chunk_size: int
) -> list[T]:
    """Results of ``work`` per chunk, always in chunk order."""
    slices = _chunks(size, chunk_size)
    if threads <= 1 or len(slices) == 1:
        return [work(s) for s in slices]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(work, slices))


def _as_values(angles: GateAngles | ArrayLike) -> NDArray[np.float64]:
    if isinstance(angles, GateAngles):
        return angles.as_array()
    values = np.asarray(angles, dtype=np.float64)
    if values.shape != (SU4_ANGLE_COUNT,):
        raise ConfigError(
            f"expected {SU4_ANGLE_COUNT} angles, got shape {values.shape}"
        )
    return values


def choose_branch(branch_means: NDArray[np.float64]) -> int:
    """Highest average concurrence; ties go to the lowest branch index."""
    best = float(branch_means.max())
    return int(np.argmax(branch_means >= best - TIE_TOL))


# ── Cost ────────────────────────────────────────────────────────


def average_cost(
    angles: GateAngles | ArrayLike,
    ensemble: PreparedEnsemble,
    policy: BranchPolicy | None = None,
    config: OptimizerConfig | None = None,
) -> CostEvaluation:
    """``f = 1 - mean C'`` of the gate over the ensemble.

    Under :class:`EnsembleBranch` without a fixed branch, the four
    branch-averaged concurrences are formed first and the best one chosen.
    Samples whose branch has no post-state contribute ``C' = 0``.
    """
    policy = policy or PerStateMax()
    config = config or OptimizerConfig()
    gate = su4_matrix(_as_values(angles))
    bilateral = bilateral_product(gate, gate)

    def work(chunk: slice) -> tuple[NDArray, NDArray, NDArray]:
        table = evaluate_branches(ensemble.pairs[chunk], bilateral)
        return table.probabilities, table.concurrences, table.posts

    parts = _run_chunked(work, ensemble.size, config.threads, config.chunk_size)
    probabilities = np.concatenate([p[0] for p in parts])
    concurrences = np.concatenate([p[1] for p in parts])
    posts = np.concatenate([p[2] for p in parts])
    branch_means = concurrences.mean(axis=0)
    rows = np.arange(ensemble.size)

    COST_EVALUATIONS.labels(policy=policy.name).inc()
    if isinstance(policy, EnsembleBranch):
        branch = (
            policy.branch if policy.branch is not None else choose_branch(branch_means)
        )
        kept = np.full(ensemble.size, branch, dtype=np.intp)
        selected = concurrences[:, branch]
        probability = probabilities[:, branch]
        value = 1.0 - float(branch_means[branch])
    else:
        branch = None
        selected, probability, kept = select_per_state(
            BranchTable(probabilities, posts, concurrences)
        )
        probability = np.minimum(probability, 1.0)
        value = 1.0 - float(selected.mean())

    return CostEvaluation(
        value=value,
        branch=branch,
        branch_means=branch_means,
        concurrences=selected,
        probabilities=probability,
        kept=kept,
        kept_states=posts[rows, kept],
    )


# ── Gradient ────────────────────────────────────────────────────


def _frozen_concurrence(
    values: NDArray[np.float64], pairs: NDArray, branches: NDArray[np.intp]
) -> NDArray[np.float64]:
    """Concurrence of a fixed branch per sample (0 where it is undefined)."""
    gate = su4_matrix(values)
    table = evaluate_branches(pairs, bilateral_product(gate, gate))
    return table.concurrences[np.arange(pairs.shape[0]), branches]


def central_sample_gradient(
    values: NDArray[np.float64],
    pairs: NDArray,
    branches: NDArray[np.intp],
    step: float,
) -> NDArray[np.float64]:
    """``(15, m)`` central differences of each sample's frozen-branch C.

    At a box face the difference is one-sided into the box.
    """
    bounds = angle_bounds()
    centre: NDArray[np.float64] | None = None
    rows = []
    for k in range(SU4_ANGLE_COUNT):
        up = values.copy()
        down = values.copy()
        up_room = values[k] + step <= bounds[k, 1]
        down_room = values[k] - step >= bounds[k, 0]
        up[k] += step if up_room else 0.0
        down[k] -= step if down_room else 0.0
        if not (up_room or down_room):  # pragma: no cover - boxes are wider than h
            rows.append(np.zeros(pairs.shape[0]))
            continue
        if not (up_room and down_room) and centre is None:
            centre = _frozen_concurrence(values, pairs, branches)
        high = _frozen_concurrence(up, pairs, branches) if up_room else centre
        low = _frozen_concurrence(down, pairs, branches) if down_room else centre
        width = step * (int(up_room) + int(down_room))
        rows.append((high - low) / width)
    return np.stack(rows)


def _dual_sample_gradient(
    values: NDArray[np.float64],
    pairs: NDArray,
    branches: NDArray[np.intp],
    step: float,
) -> tuple[NDArray[np.float64], int]:
    """Forward-mode derivatives of each sample's frozen-branch C.

    Returns the ``(15, m)`` derivatives and the number of samples that fell
    back to central differences.
    """
    gate = su4_dual(values)
    u, du = gate.value, gate.tangent
    w = bilateral_product(u, u)
    dw = bilateral_product(du, u) + bilateral_product(u, du)

    transformed = w @ pairs @ dagger(w)
    half = dw[:, None] @ pairs[None] @ dagger(w)
    d_transformed = half + dagger(half)

    rows = np.arange(pairs.shape[0])
    blocks = branch_blocks(transformed)[rows, branches]
    d_blocks = branch_blocks(d_transformed)[:, rows, branches]
    blocks = 0.5 * (blocks + dagger(blocks))
    d_blocks = 0.5 * (d_blocks + dagger(d_blocks))

    probability = np.trace(blocks, axis1=-2, axis2=-1).real
    d_probability = np.trace(d_blocks, axis1=-2, axis2=-1).real
    defined = probability > BRANCH_PROBABILITY_EPS
    safe = np.where(defined, probability, 1.0)
    post = np.where(defined[:, None, None], blocks / safe[:, None, None], np.eye(4) / 4)
    d_post = (d_blocks - post[None] * d_probability[..., None, None]) / safe[
        None, :, None, None
    ]
    d_post = np.where(defined[None, :, None, None], d_post, 0.0)

    _, gradient, reliable = concurrence_with_tangent(post, d_post)
    reliable = reliable | ~defined
    gradient = np.where(defined[None], gradient, 0.0)

    fallback = np.flatnonzero(~reliable)
    if fallback.size:
        gradient[:, fallback] = central_sample_gradient(
            values, pairs[fallback], branches[fallback], step
        )
    return gradient, int(fallback.size)


def sample_gradient(
    angles: GateAngles | ArrayLike,
    ensemble: PreparedEnsemble,
    evaluation: CostEvaluation,
    config: OptimizerConfig | None = None,
    mode: str | None = None,
) -> NDArray[np.float64]:
    """``(15, m)`` derivatives of every sample's C' with the branches of
    ``evaluation`` frozen."""
    config = config or OptimizerConfig()
    mode = mode or config.gradient_mode
    values = _as_values(angles)
    branches = evaluation.kept

    def work(chunk: slice) -> tuple[NDArray, int]:
        if mode == "central":
            return (
                central_sample_gradient(
                    values, ensemble.pairs[chunk], branches[chunk], config.fd_step
                ),
                0,
            )
        return _dual_sample_gradient(
            values, ensemble.pairs[chunk], branches[chunk], config.fd_step
        )

    parts = _run_chunked(work, ensemble.size, config.threads, config.chunk_size)
    fallbacks = sum(p[1] for p in parts)
    GRADIENT_EVALUATIONS.labels(mode=mode).inc()
    if fallbacks:
        FALLBACK_SAMPLES.inc(fallbacks)
        logger.debug("%d samples differentiated by central differences", fallbacks)
    return np.concatenate([p[0] for p in parts], axis=1)


def gradient(
    angles: GateAngles | ArrayLike,
    ensemble: PreparedEnsemble,
    policy: BranchPolicy | None = None,
    config: OptimizerConfig | None = None,
    evaluation: CostEvaluation | None = None,
    mode: str | None = None,
) -> NDArray[np.float64]:
    """Gradient of the average cost with respect to the fifteen angles."""
    if evaluation is None:
        evaluation = average_cost(angles, ensemble, policy, config)
    return -sample_gradient(angles, ensemble, evaluation, config, mode).mean(axis=1)


def cost_and_gradient(
    ensemble: PreparedEnsemble,
    policy: BranchPolicy | None = None,
    config: OptimizerConfig | None = None,
    mode: str | None = None,
) -> Callable[[NDArray[np.float64]], tuple[float, NDArray[np.float64]]]:
    """Objective for the minimizer: angles -> (cost, gradient)."""

    def objective(values: NDArray[np.float64]) -> tuple[float, NDArray[np.float64]]:
        evaluation = average_cost(values, ensemble, policy, config)
        grad = gradient(values, ensemble, policy, config, evaluation, mode)
        return evaluation.value, grad

    return objective


def gradient_diagnostics(
    ensemble: PreparedEnsemble,
    policy: BranchPolicy | None = None,
    config: OptimizerConfig | None = None,
) -> Callable[[NDArray[np.float64]], list[str]]:
    """Check for the minimizer: dual against central gradient at a point.

    Yields a warning entry when the modes differ by more than
    ``GRADIENT_DISAGREEMENT_WARN`` in any coordinate; central mode is not
    checked against itself.
    """
    config = config or OptimizerConfig()

    def diagnose(values: NDArray[np.float64]) -> list[str]:
        if config.gradient_mode != "dual":
            return []
        evaluation = average_cost(values, ensemble, policy, config)
        dual = gradient(values, ensemble, policy, config, evaluation, "dual")
        central = gradient(values, ensemble, policy, config, evaluation, "central")
        gap = float(np.max(np.abs(dual - central)))
        if gap <= GRADIENT_DISAGREEMENT_WARN:
            return []
        logger.warning("dual and central gradients differ by %.3e", gap)
        return [f"dual and central gradients differ by {gap:.3e} at the optimum"]

    return diagnose
