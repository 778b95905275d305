"""Exception hierarchy for the purification toolkit."""

from __future__ import annotations


class PurifyError(Exception):
    """Base class for every error raised by ``purify``."""


# ── Validation ──────────────────────────────────────────────────


class DimensionError(PurifyError, ValueError):
    """A matrix has a dimension outside the supported set."""


class ValidationFailure(PurifyError, ValueError):
    """A matrix failed a density-matrix condition.

    ``condition`` names the violated property and ``magnitude`` is the size of
    the violation that was measured.
    """

    condition = "density"

    def __init__(self, magnitude: float, tolerance: float) -> None:
        self.magnitude = float(magnitude)
        self.tolerance = float(tolerance)
        super().__init__(
            f"{self.condition} violated: magnitude {self.magnitude:.3e} "
            f"exceeds tolerance {self.tolerance:.1e}"
        )


class HermiticityError(ValidationFailure):
    condition = "hermiticity"


class TraceError(ValidationFailure):
    condition = "unit trace"


class PositivityError(ValidationFailure):
    condition = "positivity"


class NotUnitaryError(PurifyError, ValueError):
    """A gate deviates from unitarity beyond tolerance."""


class DomainError(PurifyError, ValueError):
    """A state-family parameter lies outside the family domain."""


class AngleBoundsError(PurifyError, ValueError):
    """An Euler angle lies outside its hyperrectangle bound."""

    def __init__(self, component: int, value: float, low: float, high: float):
        self.component = component
        self.value = value
        super().__init__(
            f"angle component {component} = {value!r} outside [{low}, {high}]"
        )


class GeneratorIndexError(PurifyError, ValueError):
    """Unknown or unsupported Gell-Mann generator index."""


class ConfigError(PurifyError, ValueError):
    """Invalid run configuration."""


class UnsupportedOracleError(PurifyError, ValueError):
    """No closed form is known for the requested (family, iterations)."""


# ── Numerical ───────────────────────────────────────────────────


class NumericalFailureError(PurifyError, ArithmeticError):
    """An eigen-solver failed or produced values outside tolerance."""


class EmptyOutcomeError(PurifyError, ArithmeticError):
    """Every measurement branch has vanishing probability."""


class DegeneracyError(PurifyError, RuntimeError):
    """Too many ensemble members were dropped during a recurrence."""

    def __init__(self, iteration: int, dropped: int, total: int) -> None:
        self.iteration = iteration
        self.dropped = dropped
        self.total = total
        super().__init__(
            f"iteration {iteration}: {dropped}/{total} samples have a vanishing "
            "kept-branch probability"
        )
