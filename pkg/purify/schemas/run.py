"""Validated run and optimizer configuration."""

from __future__ import annotations

from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from purify.config import settings
from purify.errors import ConfigError
from purify.quantum.families import PdfSpec, StateFamily, get_family, parse_pdf
from purify.quantum.gellmann import GateAngles, cnot_angles, identity_angles
from purify.quantum.protocol import BranchPolicy, parse_policy
from purify.utils.config_loader import load_document

Command = Literal["evaluate", "optimize", "oracle", "families-list"]


class OptimizerConfig(BaseModel):
    """L-BFGS-B, gradient and multistart settings; defaults come from ``settings``."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    memory_pairs: int = Field(default_factory=lambda: settings.memory_pairs, ge=1)
    max_iterations: int = Field(default_factory=lambda: settings.max_iterations, ge=1)
    projected_gradient_tolerance: float = Field(
        default_factory=lambda: settings.projected_gradient_tolerance, gt=0
    )
    function_tolerance: float = Field(
        default_factory=lambda: settings.function_tolerance, gt=0
    )
    gradient_mode: Literal["dual", "central"] = Field(
        default_factory=lambda: settings.gradient_mode
    )
    fd_step: float = Field(default_factory=lambda: settings.fd_step)
    restarts: int = Field(default_factory=lambda: settings.restarts, ge=1)
    restart_seed: int = Field(default_factory=lambda: settings.restart_seed)
    threads: int = Field(default_factory=lambda: settings.threads, ge=1)
    chunk_size: int = Field(default_factory=lambda: settings.chunk_size, ge=1)

    @field_validator("fd_step")
    @classmethod
    def check_fd_step(cls, value: float) -> float:
        if not 1e-8 <= value <= 1e-4:
            raise ValueError("fd_step must lie in [1e-8, 1e-4]")
        return value


# ── Gate sources ────────────────────────────────────────────────


def _angles_from_document(document: Any, origin: str) -> GateAngles:
    if isinstance(document, dict):
        document = document.get("angles")
    if not isinstance(document, list):
        raise ConfigError(f"{origin} must hold a 15-element angle array")
    try:
        return GateAngles.from_iterable(float(v) for v in document)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{origin}: {exc}") from exc


def resolve_gate(source: str) -> GateAngles:
    """``cnot``, ``identity``, ``angles:<15 comma-separated>`` or ``file:<path>``.

    A gate file holds a JSON/YAML array of 15 numbers, or a mapping with an
    ``angles`` key (the layout of every result file).
    """
    text = source.strip()
    key = text.lower()
    if key == "cnot":
        return cnot_angles()
    if key == "identity":
        return identity_angles()
    if key.startswith("angles:"):
        parts = [p for p in text.split(":", 1)[1].replace(" ", "").split(",") if p]
        return _angles_from_document(parts, "angles:")
    if key.startswith("file:"):
        path = Path(text.split(":", 1)[1])
        if not path.is_file():
            raise ConfigError(f"gate file {path} does not exist")
        return _angles_from_document(load_document(path), str(path))
    raise ConfigError(f"unrecognized gate source {source!r}")


# ── Run configuration ───────────────────────────────────────────


class RunConfig(BaseModel):
    """Everything one CLI invocation needs. Every field mirrors a flag."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    command: Command = "evaluate"
    family: str = "rotated-werner"
    pdf: str | None = None
    gate: str = "cnot"
    iterations: int = Field(default=1, ge=1)
    samples: int = Field(default_factory=lambda: settings.samples, ge=1)
    grid: int = Field(default_factory=lambda: settings.grid, ge=2)
    seed: int = Field(default_factory=lambda: settings.seed)
    sequence_kind: Literal["low-discrepancy", "pseudo-random"] = Field(
        default_factory=lambda: settings.sequence_kind
    )
    policy: str | None = None
    out: str = Field(default_factory=lambda: settings.output_dir)
    optimizer: OptimizerConfig = Field(default_factory=OptimizerConfig)

    @field_validator("family")
    @classmethod
    def check_family(cls, value: str) -> str:
        try:
            return get_family(value).name
        except ConfigError as exc:
            raise ValueError(str(exc)) from exc

    @field_validator("gate")
    @classmethod
    def check_gate(cls, value: str) -> str:
        try:
            resolve_gate(value)
        except ConfigError as exc:
            raise ValueError(str(exc)) from exc
        return value

    @model_validator(mode="after")
    def check_pdf(self) -> RunConfig:
        try:
            self.state_family.check_pdf(self.pdf_spec)
            if self.policy is not None:
                parse_policy(self.policy)
        except ConfigError as exc:
            raise ValueError(str(exc)) from exc
        return self

    @property
    def state_family(self) -> StateFamily:
        return get_family(self.family)

    @property
    def pdf_spec(self) -> PdfSpec:
        return parse_pdf(self.pdf or self.state_family.default_pdf)

    @property
    def gate_angles(self) -> GateAngles:
        return resolve_gate(self.gate)

    @property
    def branch_policy(self) -> BranchPolicy | None:
        return parse_policy(self.policy) if self.policy else None

    @property
    def output_dir(self) -> Path:
        return Path(self.out)

    def echo(self) -> dict[str, Any]:
        """Config with every default resolved, as written to result files."""
        data = self.model_dump()
        data["pdf"] = self.pdf_spec.label
        return data
