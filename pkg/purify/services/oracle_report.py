"""Simulator against the closed-form CNOT results."""

from __future__ import annotations

import logging

import numpy as np
import pandas as pd

from purify.optim.sampling import sample
from purify.quantum.gellmann import cnot_angles
from purify.quantum.oracles import cnot_baseline, cnot_oracle, input_baseline
from purify.quantum.protocol import PerStateMax
from purify.schemas.results import OracleReport
from purify.schemas.run import RunConfig
from purify.services.evaluation import PARAMETER_COLUMNS
from purify.services.propagation import ChainState, run_fixed_gates

logger = logging.getLogger(__name__)

ACTIVE_CONCURRENCE = 1e-6
"""Probabilities are only compared where the kept branch is entangled; below
that every branch ties and the summed probability is 1."""


def oracle_comparison(run: RunConfig) -> tuple[OracleReport, pd.DataFrame]:
    """CNOT rounds on the grid next to the published formulas."""
    family = run.state_family
    rounds = run.iterations
    points = family.grid(run.grid)
    expected_c, expected_p = cnot_oracle(family.name, points, rounds)

    chain = ChainState.start(points, family.states(points))
    gates = [cnot_angles()] * rounds
    run_fixed_gates(chain, gates, PerStateMax(), run.optimizer)
    simulated_c = chain.concurrence_table()[-1]
    simulated_p = chain.probability_table()

    columns: dict[str, np.ndarray] = {
        PARAMETER_COLUMNS[axis]: points[:, axis] for axis in range(points.shape[1])
    }
    columns["C_sim"] = simulated_c
    columns["C_oracle"] = expected_c
    probability_gap = 0.0
    for k in range(rounds):
        columns[f"P_{k + 1}_sim"] = simulated_p[k]
        columns[f"P_{k + 1}_oracle"] = expected_p[k]
        active = chain.concurrence_table()[k] > ACTIVE_CONCURRENCE
        if active.any():
            gap = np.max(np.abs(simulated_p[k][active] - expected_p[k][active]))
            probability_gap = max(probability_gap, float(gap))
    frame = pd.DataFrame(columns)

    y_spread = None
    if points.shape[1] == 2:
        spread = frame.groupby("x")["C_sim"].agg(lambda c: c.max() - c.min())
        y_spread = float(spread.max())

    pdf = run.pdf_spec
    sampled = sample(pdf, run.samples, run.seed, run.sequence_kind)
    sampled_chain = ChainState.start(sampled.points, family.states(sampled.points))
    sampled_rounds = run_fixed_gates(sampled_chain, gates, PerStateMax(), run.optimizer)

    report = OracleReport(
        family=family.name,
        iterations=rounds,
        grid_points=int(points.shape[0]),
        max_concurrence_deviation=float(np.max(np.abs(simulated_c - expected_c))),
        max_probability_deviation=probability_gap,
        input_cost=input_baseline(family.name, pdf),
        cnot_cost=cnot_baseline(family.name, pdf, rounds),
        sampled_cnot_cost=sampled_rounds[-1].value,
        y_spread=y_spread,
        config=run.echo(),
    )
    logger.info(
        "oracle %s N=%d: max |dC|=%.3e max |dP|=%.3e CNOT cost %.6f",
        family.name,
        rounds,
        report.max_concurrence_deviation,
        report.max_probability_deviation,
        report.cnot_cost,
    )
    return report, frame
