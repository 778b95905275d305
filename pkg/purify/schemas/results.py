"""Result documents written by the CLI.

Per-sample tables are plain lists; samples dropped by the recurrence carry
``NaN`` in memory and ``null`` in JSON.
"""

from __future__ import annotations

import math
from typing import Any

from pydantic import BaseModel, ConfigDict, Field


class _Document(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="null")


class IterationRecord(_Document):
    """One recurrence iteration: optimized gate against the CNOT chain."""

    iteration: int
    angles: list[float] = Field(min_length=15, max_length=15)
    branch: int
    branch_label: str
    input_cost: float
    average_cost: float
    branch_means: list[float]
    status: str
    starts: int
    diagnostics: list[str] = Field(default_factory=list)
    dropped: int = 0
    cnot_same_ensemble_cost: float
    cnot_chain_cost: float
    mean_success_probability: float
    cnot_mean_success_probability: float


class RecurrenceResult(_Document):
    family: str
    pdf: str
    samples: int
    seed: int
    sequence_kind: str
    restart_seed: int
    config: dict[str, Any] = Field(default_factory=dict)
    input_cost: float
    iterations: list[IterationRecord] = Field(default_factory=list)
    points: list[list[float]] = Field(default_factory=list)
    input_concurrence: list[float] = Field(default_factory=list)
    concurrences: list[list[float]] = Field(default_factory=list)
    probabilities: list[list[float]] = Field(default_factory=list)
    overall_success: list[float] = Field(default_factory=list)
    cnot_concurrences: list[list[float]] = Field(default_factory=list)
    cnot_probabilities: list[list[float]] = Field(default_factory=list)
    cnot_overall_success: list[float] = Field(default_factory=list)
    warnings: list[str] = Field(default_factory=list)

    @property
    def trajectory(self) -> list[float]:
        return [record.average_cost for record in self.iterations]

    @property
    def monotone(self) -> bool:
        costs = [self.input_cost, *self.trajectory]
        return all(b <= a + 1e-12 for a, b in zip(costs, costs[1:], strict=False))


class IterationSummary(_Document):
    iteration: int
    grid_mean_concurrence: float
    average_cost: float
    mean_success_probability: float
    mean_overall_success: float
    dropped: int = 0


class FixedPointCheck(_Document):
    """Grid points that start at ``C = 1``: do they stay there?"""

    points: int
    min_concurrence: float
    min_overall_success: float

    @property
    def holds(self) -> bool:
        return self.points > 0 and math.isclose(self.min_concurrence, 1.0, abs_tol=1e-9)


class EvaluationSummary(_Document):
    family: str
    pdf: str
    gate: str
    angles: list[float]
    grid_points: int
    samples: int
    seed: int
    input_cost: float
    config: dict[str, Any] = Field(default_factory=dict)
    iterations: list[IterationSummary] = Field(default_factory=list)
    fixed_point: FixedPointCheck | None = None


class OracleReport(_Document):
    family: str
    iterations: int
    grid_points: int
    max_concurrence_deviation: float
    max_probability_deviation: float
    input_cost: float
    cnot_cost: float
    sampled_cnot_cost: float
    y_spread: float | None = None
    config: dict[str, Any] = Field(default_factory=dict)


class FamilyInfo(_Document):
    id: str
    title: str
    arity: int
    domain: str
    default_pdf: str
    aliases: list[str] = Field(default_factory=list)
    oracle_iterations: int | None = None
