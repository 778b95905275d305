"""Box-constrained L-BFGS-B minimization of the average cost."""

from __future__ import annotations

import logging
import time
from collections.abc import Callable
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.optimize import minimize

from purify.errors import ConfigError
from purify.observability.metrics import OPTIMIZER_DURATION, OPTIMIZER_RUNS
from purify.quantum.gellmann import GateAngles, angle_bounds
from purify.schemas.run import OptimizerConfig

logger = logging.getLogger(__name__)

Objective = Callable[[NDArray[np.float64]], tuple[float, NDArray[np.float64]]]


class RunStatus(str, Enum):
    CONVERGED = "converged"
    ITERATION_LIMIT = "iteration-limit"
    LINE_SEARCH_FAILURE = "line-search-failure"


_STATUS_BY_CODE = {
    0: RunStatus.CONVERGED,
    1: RunStatus.ITERATION_LIMIT,
    2: RunStatus.LINE_SEARCH_FAILURE,
}


@dataclass
class LbfgsResult:
    """Best point seen by one minimizer run."""

    angles: GateAngles
    value: float
    status: RunStatus
    message: str
    iterations: int
    evaluations: int
    projected_gradient_norm: float
    trace: list[float] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)
    start: list[float] = field(default_factory=list)
    duration: float = 0.0

    @property
    def ok(self) -> bool:
        return self.status is not RunStatus.LINE_SEARCH_FAILURE


def projected_gradient(
    x: NDArray[np.float64], grad: NDArray[np.float64], bounds: NDArray[np.float64]
) -> NDArray[np.float64]:
    """``P(x - g) - x``: components pushing through an active face vanish."""
    return np.clip(x - grad, bounds[:, 0], bounds[:, 1]) - x


def _check_bounds(bounds: ArrayLike | None) -> NDArray[np.float64]:
    full = angle_bounds()
    if bounds is None:
        return full
    box = np.asarray(bounds, dtype=np.float64)
    if box.shape != full.shape:
        raise ConfigError(f"bounds must have shape {full.shape}, got {box.shape}")
    if np.any(box[:, 0] > box[:, 1]):
        raise ConfigError("every lower bound must not exceed its upper bound")
    if np.any(box[:, 0] < full[:, 0]) or np.any(box[:, 1] > full[:, 1]):
        raise ConfigError("bounds must lie inside the angle box")
    return box


class _BestSeen:
    """Wraps the objective; remembers the lowest evaluation and the trace."""

    def __init__(self, objective: Objective) -> None:
        self.objective = objective
        self.best_x: NDArray[np.float64] | None = None
        self.best_value = np.inf
        self.best_grad: NDArray[np.float64] | None = None
        self.last_value = np.inf
        self.evaluations = 0
        self.trace: list[float] = []

    def __call__(self, x: NDArray[np.float64]) -> tuple[float, NDArray[np.float64]]:
        value, grad = self.objective(x)
        value = float(value)
        self.evaluations += 1
        self.last_value = value
        if value < self.best_value:
            self.best_value = value
            self.best_x = np.array(x, dtype=np.float64)
            self.best_grad = np.array(grad, dtype=np.float64)
        return value, grad

    def record(self, _xk: NDArray[np.float64]) -> None:
        self.trace.append(self.best_value)


def lbfgs_minimize(
    objective: Objective,
    start: GateAngles | ArrayLike,
    config: OptimizerConfig | None = None,
    diagnose: Callable[[NDArray[np.float64]], list[str]] | None = None,
    *,
    bounds: ArrayLike | None = None,
) -> LbfgsResult:
    """Minimize ``objective`` (returning value and gradient) over ``bounds``.

    ``bounds`` is a ``(15, 2)`` array of lower and upper limits inside the
    angle box; it defaults to the whole box.

    Runs scipy's L-BFGS-B: gradient projection for the active set, a
    ``memory_pairs`` limited-memory update and a line search with sufficient
    decrease. A failed line search is reported in ``status``; the best point
    evaluated so far is returned either way.
    """
    config = config or OptimizerConfig()
    box = _check_bounds(bounds)
    x0 = start.as_array() if isinstance(start, GateAngles) else np.asarray(start, float)
    x0 = np.clip(x0, box[:, 0], box[:, 1])
    tracked = _BestSeen(objective)

    began = time.perf_counter()
    result = minimize(
        tracked,
        x0,
        jac=True,
        method="L-BFGS-B",
        bounds=[tuple(row) for row in box],
        callback=tracked.record,
        options={
            "maxcor": config.memory_pairs,
            "maxiter": config.max_iterations,
            "gtol": config.projected_gradient_tolerance,
            "ftol": config.function_tolerance,
        },
    )
    duration = time.perf_counter() - began

    status = _STATUS_BY_CODE.get(int(result.status), RunStatus.LINE_SEARCH_FAILURE)
    if tracked.best_x is None:  # pragma: no cover - minimize always evaluates x0
        tracked(x0)
    best_x = np.clip(tracked.best_x, box[:, 0], box[:, 1])
    best_grad = (
        tracked.best_grad if tracked.best_grad is not None else np.zeros_like(x0)
    )
    pg_norm = float(np.max(np.abs(projected_gradient(best_x, best_grad, box))))
    diagnostics = diagnose(best_x) if diagnose is not None else []

    OPTIMIZER_RUNS.labels(status=status.value).inc()
    OPTIMIZER_DURATION.observe(duration)
    if status is RunStatus.LINE_SEARCH_FAILURE:
        logger.warning(
            "L-BFGS-B stopped abnormally: %s (best %.6g)",
            result.message,
            tracked.best_value,
        )
    else:
        logger.debug(
            "L-BFGS-B %s after %d iterations, f=%.6g",
            status.value,
            result.nit,
            tracked.best_value,
        )

    return LbfgsResult(
        angles=GateAngles.from_iterable(best_x),
        value=tracked.best_value,
        status=status,
        message=str(result.message),
        iterations=int(result.nit),
        evaluations=tracked.evaluations,
        projected_gradient_norm=pg_norm,
        trace=tracked.trace,
        diagnostics=diagnostics,
        start=x0.tolist(),
        duration=duration,
    )
