"""Iterated gate optimization over a fixed sampled ensemble.

The ensemble is sampled once. Every iteration optimizes a fresh gate under
the ensemble-branch policy, keeps the chosen branch's post-states as the
next input and records the same initial samples pushed through the plain
CNOT protocol for comparison.
"""

from __future__ import annotations

import logging

import numpy as np

from purify.config import settings
from purify.constants import MAX_DROP_FRACTION
from purify.errors import ConfigError, DegeneracyError
from purify.optim.cost import average_cost, cost_and_gradient, gradient_diagnostics
from purify.optim.multistart import multistart
from purify.optim.sampling import SequenceKind, sample
from purify.quantum.families import PdfSpec, get_family
from purify.quantum.gellmann import cnot_angles, identity_angles
from purify.quantum.protocol import BRANCH_LABELS, EnsembleBranch, PerStateMax
from purify.schemas.results import IterationRecord, RecurrenceResult
from purify.schemas.run import OptimizerConfig
from purify.services.propagation import ChainState, run_fixed_gates

logger = logging.getLogger(__name__)


def _rows(table: np.ndarray) -> list[list[float]]:
    return [[float(v) for v in row] for row in table]


def recurrence_optimize(
    family: str,
    pdf: PdfSpec,
    samples: int,
    iterations: int,
    config: OptimizerConfig | None = None,
    seed: int = 0,
    kind: SequenceKind = "low-discrepancy",
    max_recurrence: int | None = None,
) -> RecurrenceResult:
    """Optimize ``iterations`` successive gates; see the module docstring.

    Raises :class:`DegeneracyError` when an iteration drops more than
    ``MAX_DROP_FRACTION`` of its live samples.
    """
    config = config or OptimizerConfig()
    limit = max_recurrence or settings.max_recurrence
    state_family = get_family(family)
    state_family.check_pdf(pdf)
    if iterations < 1:
        raise ConfigError("the recurrence needs at least one iteration")
    if iterations > limit:
        raise ConfigError(f"{iterations} iterations exceed the configured cap {limit}")

    warnings: list[str] = []
    if iterations > settings.accuracy_warning_after:
        message = (
            f"results beyond iteration {settings.accuracy_warning_after} "
            "lose numerical accuracy"
        )
        logger.warning(message)
        warnings.append(message)

    sample_set = sample(pdf, samples, seed, kind)
    states = state_family.states(sample_set.points)
    chain = ChainState.start(sample_set.points, states)
    cnot_chain = ChainState.start(sample_set.points, states)
    input_concurrence = chain.current_concurrence()
    policy = EnsembleBranch()
    records: list[IterationRecord] = []

    logger.info(
        "recurrence on %s (%s): %d samples, %d iterations",
        state_family.name,
        pdf.label,
        samples,
        iterations,
    )
    for iteration in range(1, iterations + 1):
        ensemble = chain.live_ensemble()
        input_cost = chain.current_cost()
        search = multistart(
            cost_and_gradient(ensemble, policy, config),
            config,
            extra_starts=(identity_angles(),),
            diagnose=gradient_diagnostics(ensemble, policy, config),
        )
        evaluation = average_cost(search.angles, ensemble, policy, config)
        cnot_here = average_cost(cnot_angles(), ensemble, PerStateMax(), config)

        live = ensemble.size
        dropped = chain.advance(evaluation)
        if dropped > MAX_DROP_FRACTION * live:
            raise DegeneracyError(iteration, dropped, live)

        (cnot_evaluation,) = run_fixed_gates(cnot_chain, [cnot_angles()], config=config)
        branch = evaluation.branch if evaluation.branch is not None else 0
        record = IterationRecord(
            iteration=iteration,
            angles=search.angles.to_list(),
            branch=branch,
            branch_label=BRANCH_LABELS[branch],
            input_cost=input_cost,
            average_cost=evaluation.value,
            branch_means=[float(v) for v in evaluation.branch_means],
            status=search.best.status.value,
            starts=len(search.runs),
            diagnostics=list(search.best.diagnostics),
            dropped=dropped,
            cnot_same_ensemble_cost=cnot_here.value,
            cnot_chain_cost=cnot_evaluation.value,
            mean_success_probability=float(np.mean(evaluation.probabilities)),
            cnot_mean_success_probability=float(
                np.mean(cnot_evaluation.probabilities)
            ),
        )
        records.append(record)
        logger.info(
            "iteration %d: f=%.6f (CNOT chain %.6f) branch %s",
            iteration,
            record.average_cost,
            record.cnot_chain_cost,
            record.branch_label,
        )

    return RecurrenceResult(
        family=state_family.name,
        pdf=pdf.label,
        samples=samples,
        seed=seed,
        sequence_kind=kind,
        restart_seed=config.restart_seed,
        input_cost=1.0 - float(np.mean(input_concurrence)),
        iterations=records,
        points=_rows(sample_set.points),
        input_concurrence=[float(v) for v in input_concurrence],
        concurrences=_rows(chain.concurrence_table()),
        probabilities=_rows(chain.probability_table()),
        overall_success=[float(v) for v in chain.overall_success()],
        cnot_concurrences=_rows(cnot_chain.concurrence_table()),
        cnot_probabilities=_rows(cnot_chain.probability_table()),
        cnot_overall_success=[float(v) for v in cnot_chain.overall_success()],
        warnings=warnings,
    )
