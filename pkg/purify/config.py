"""Process-wide settings read from the environment and ``.env``."""

from __future__ import annotations

from typing import Literal

from pydantic import AliasChoices, Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Defaults for every run; a run config document or CLI flag overrides them."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="PURIFY_",
        case_sensitive=False,
        extra="ignore",
    )

    # Observability
    log_level: str = "INFO"
    log_json: bool = True
    write_metrics: bool = True

    # Output
    output_dir: str = Field(
        default="results",
        validation_alias=AliasChoices("PURIFY_OUTPUT_DIR", "PURIFY_OUT"),
    )

    # Sampling
    samples: int = Field(default=512, ge=1)
    seed: int = 0
    sequence_kind: Literal["low-discrepancy", "pseudo-random"] = "low-discrepancy"
    grid: int = Field(default=101, ge=2)

    # Parallelism
    threads: int = Field(
        default=1,
        ge=1,
        validation_alias=AliasChoices("PURIFY_THREADS", "THREADS"),
    )
    chunk_size: int = Field(default=256, ge=1)

    # Optimizer
    max_iterations: int = Field(default=500, ge=1)
    memory_pairs: int = Field(default=10, ge=1)
    projected_gradient_tolerance: float = Field(default=1e-8, gt=0)
    function_tolerance: float = Field(default=1e-12, gt=0)
    gradient_mode: Literal["dual", "central"] = "dual"
    fd_step: float = 1e-6
    restarts: int = Field(default=20, ge=1)
    restart_seed: int = 1234

    # Recurrence
    max_recurrence: int = Field(default=4, ge=1)
    accuracy_warning_after: int = Field(default=3, ge=1)

    @field_validator("fd_step")
    @classmethod
    def check_fd_step(cls, value: float) -> float:
        """Central-difference steps are restricted to [1e-8, 1e-4]."""
        if not 1e-8 <= value <= 1e-4:
            raise ValueError("fd_step must lie in [1e-8, 1e-4]")
        return value

    @field_validator("log_level", mode="before")
    @classmethod
    def normalize_level(cls, value: str) -> str:
        return str(value).upper()


settings = Settings()
