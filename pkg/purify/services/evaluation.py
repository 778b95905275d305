"""Fixed-gate evaluation over a deterministic grid and a sampled ensemble."""

from __future__ import annotations

import logging

import numpy as np
import pandas as pd

from purify.optim.sampling import sample
from purify.quantum.gellmann import GateAngles
from purify.quantum.protocol import BranchPolicy, PerStateMax
from purify.schemas.results import EvaluationSummary, FixedPointCheck, IterationSummary
from purify.schemas.run import RunConfig
from purify.services.propagation import ChainState, run_fixed_gates

logger = logging.getLogger(__name__)

FIXED_POINT_TOL = 1e-9
PARAMETER_COLUMNS = ("x", "y")


def curve_frame(chain: ChainState, input_concurrence: np.ndarray) -> pd.DataFrame:
    """``x[, y], C_0, C_1, P_1, ..., overall_success`` in that column order."""
    columns: dict[str, np.ndarray] = {}
    for axis in range(chain.points.shape[1]):
        columns[PARAMETER_COLUMNS[axis]] = chain.points[:, axis]
    columns["C_0"] = input_concurrence
    pairs = zip(chain.concurrences, chain.probabilities, strict=True)
    for k, (c, p) in enumerate(pairs, start=1):
        columns[f"C_{k}"] = c
        columns[f"P_{k}"] = p
    columns["overall_success"] = chain.overall_success()
    return pd.DataFrame(columns)


def _fixed_point(frame: pd.DataFrame, rounds: int) -> FixedPointCheck | None:
    start = frame[frame["C_0"] >= 1.0 - FIXED_POINT_TOL]
    if start.empty or rounds == 0:
        return None
    return FixedPointCheck(
        points=len(start),
        min_concurrence=float(start[f"C_{rounds}"].min()),
        min_overall_success=float(start["overall_success"].min()),
    )


def evaluate_gate(
    run: RunConfig,
    gate: GateAngles | None = None,
    policy: BranchPolicy | None = None,
) -> tuple[EvaluationSummary, pd.DataFrame]:
    """Apply one fixed gate for ``run.iterations`` rounds.

    The grid run produces the plot-ready curves; the sampled run (``M``
    points from the configured pdf) produces the average costs.
    """
    family = run.state_family
    pdf = run.pdf_spec
    gate = gate or run.gate_angles
    policy = policy or run.branch_policy or PerStateMax()
    gates = [gate] * run.iterations

    grid_points = family.grid(run.grid)
    grid_chain = ChainState.start(grid_points, family.states(grid_points))
    grid_input = grid_chain.current_concurrence()
    run_fixed_gates(grid_chain, gates, policy, run.optimizer)
    frame = curve_frame(grid_chain, grid_input)

    sample_set = sample(pdf, run.samples, run.seed, run.sequence_kind)
    sampled = ChainState.start(sample_set.points, family.states(sample_set.points))
    input_cost = sampled.current_cost()
    evaluations = run_fixed_gates(sampled, gates, policy, run.optimizer)
    overall = sampled.overall_success()

    rounds = len(grid_chain.concurrences)
    sampled_overall = sampled.overall_success_by_round()
    summaries = [
        IterationSummary(
            iteration=k + 1,
            grid_mean_concurrence=(
                float(np.nanmean(grid_chain.concurrences[k])) if k < rounds else np.nan
            ),
            average_cost=evaluation.value,
            mean_success_probability=float(np.mean(evaluation.probabilities)),
            mean_overall_success=float(np.mean(sampled_overall[k])),
            dropped=sampled.dropped[k],
        )
        for k, evaluation in enumerate(evaluations)
    ]
    logger.info(
        "evaluated %s on %s for %d rounds: f=%s (mean overall success %.4f)",
        run.gate,
        family.name,
        run.iterations,
        [round(s.average_cost, 6) for s in summaries],
        float(np.mean(overall)),
    )
    summary = EvaluationSummary(
        family=family.name,
        pdf=pdf.label,
        gate=run.gate,
        angles=gate.to_list(),
        grid_points=int(grid_points.shape[0]),
        samples=run.samples,
        seed=run.seed,
        input_cost=input_cost,
        config=run.echo(),
        iterations=summaries,
        fixed_point=_fixed_point(frame, rounds),
    )
    return summary, frame
