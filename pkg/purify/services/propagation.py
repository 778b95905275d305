"""Pushing an ensemble through repeated purification rounds with fixed gates."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from purify.constants import BRANCH_PROBABILITY_EPS
from purify.observability.metrics import DROPPED_SAMPLES
from purify.optim.cost import CostEvaluation, PreparedEnsemble, average_cost
from purify.quantum.entanglement import concurrence_batch
from purify.quantum.gellmann import GateAngles
from purify.quantum.protocol import BranchPolicy, PerStateMax
from purify.schemas.run import OptimizerConfig

logger = logging.getLogger(__name__)


def overall_success(probabilities: NDArray[np.float64]) -> NDArray[np.float64]:
    """``prod_k P_k ** 2**(N-k)`` over an ``(N, m)`` table.

    Round ``k`` of ``N`` runs ``2**(N-k)`` times in parallel to feed the final
    pair. Samples with a missing (``NaN``) entry have no output pair: 0.
    """
    table = np.asarray(probabilities, dtype=np.float64)
    rounds = table.shape[0]
    exponents = 2.0 ** (rounds - np.arange(1, rounds + 1))
    missing = np.isnan(table).any(axis=0)
    product = np.prod(np.nan_to_num(table, nan=0.0) ** exponents[:, None], axis=0)
    return np.where(missing, 0.0, np.clip(product, 0.0, 1.0))


@dataclass
class ChainState:
    """Current states of an ensemble plus the per-round tables so far.

    Dropped samples keep their last state but are excluded from later rounds;
    their table entries from then on are ``NaN``.
    """

    points: NDArray[np.float64]
    states: NDArray[np.complex128]
    alive: NDArray[np.bool_]
    concurrences: list[NDArray[np.float64]] = field(default_factory=list)
    probabilities: list[NDArray[np.float64]] = field(default_factory=list)
    dropped: list[int] = field(default_factory=list)

    @classmethod
    def start(cls, points: NDArray, states: NDArray) -> ChainState:
        count = states.shape[0]
        return cls(
            points=np.asarray(points, dtype=np.float64).reshape(count, -1),
            states=np.array(states, dtype=np.complex128),
            alive=np.ones(count, dtype=bool),
        )

    @property
    def size(self) -> int:
        return int(self.states.shape[0])

    def live_ensemble(self) -> PreparedEnsemble:
        index = np.flatnonzero(self.alive)
        return PreparedEnsemble.from_states(self.points[index], self.states[index])

    def current_concurrence(self) -> NDArray[np.float64]:
        values = np.full(self.size, np.nan)
        index = np.flatnonzero(self.alive)
        values[index] = concurrence_batch(self.states[index])
        return values

    def current_cost(self) -> float:
        return 1.0 - float(np.nanmean(self.current_concurrence()))

    def advance(self, evaluation: CostEvaluation) -> int:
        """Record a round evaluated on :meth:`live_ensemble`; return the drop count."""
        index = np.flatnonzero(self.alive)
        concurrences = np.full(self.size, np.nan)
        probabilities = np.full(self.size, np.nan)
        concurrences[index] = evaluation.concurrences
        probabilities[index] = evaluation.probabilities

        defined = evaluation.probabilities > BRANCH_PROBABILITY_EPS
        survivors = index[defined]
        lost = index[~defined]
        self.states[survivors] = evaluation.kept_states[defined]
        self.alive[lost] = False
        self.concurrences.append(concurrences)
        self.probabilities.append(probabilities)
        self.dropped.append(int(lost.size))
        if lost.size:
            DROPPED_SAMPLES.inc(int(lost.size))
            logger.warning(
                "round %d dropped %d of %d samples (kept branch has no post-state)",
                len(self.dropped),
                lost.size,
                index.size,
            )
        return int(lost.size)

    def concurrence_table(self) -> NDArray[np.float64]:
        return np.array(self.concurrences).reshape(len(self.concurrences), self.size)

    def probability_table(self) -> NDArray[np.float64]:
        return np.array(self.probabilities).reshape(len(self.probabilities), self.size)

    def overall_success_by_round(self) -> list[NDArray[np.float64]]:
        """Overall success had the run stopped after round 1, 2, ..."""
        table = self.probability_table()
        return [overall_success(table[:k]) for k in range(1, table.shape[0] + 1)]

    def overall_success(self) -> NDArray[np.float64]:
        if not self.probabilities:
            return np.ones(self.size)
        return np.where(self.alive, overall_success(self.probability_table()), 0.0)


def run_fixed_gates(
    chain: ChainState,
    gates: Sequence[GateAngles],
    policy: BranchPolicy | None = None,
    config: OptimizerConfig | None = None,
) -> list[CostEvaluation]:
    """One round per gate; returns the evaluation of every round."""
    policy = policy or PerStateMax()
    evaluations = []
    for gate in gates:
        if not chain.alive.any():
            logger.warning("every sample has been dropped; stopping early")
            break
        evaluation = average_cost(gate, chain.live_ensemble(), policy, config)
        chain.advance(evaluation)
        evaluations.append(evaluation)
    return evaluations
