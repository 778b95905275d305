"""Deterministic parameter samples drawn through exact inverse CDFs."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from numpy.typing import NDArray
from scipy.stats import qmc

from purify.errors import ConfigError
from purify.quantum.families import PdfSpec

SequenceKind = Literal["low-discrepancy", "pseudo-random"]


@dataclass(frozen=True)
class SampleSet:
    """``count`` parameter points of shape ``(count, dimension)``."""

    pdf: PdfSpec
    count: int
    seed: int
    kind: SequenceKind
    points: NDArray[np.float64] = field(repr=False)

    @property
    def dimension(self) -> int:
        return self.pdf.dimension


def base_points(dimension: int, count: int, seed: int, kind: SequenceKind) -> NDArray:
    """Points in ``[0, 1)^dimension``; scrambled Halton or PCG64 uniforms."""
    if kind == "low-discrepancy":
        sampler = qmc.Halton(d=dimension, scramble=True, seed=seed)
        return sampler.random(count)
    if kind == "pseudo-random":
        return np.random.default_rng(seed).random((count, dimension))
    raise ConfigError(f"unknown sequence kind {kind!r}")


def sample(
    pdf: PdfSpec, count: int, seed: int = 0, kind: SequenceKind = "low-discrepancy"
) -> SampleSet:
    """Draw ``count`` points from ``pdf``; identical inputs give identical points."""
    if count < 1:
        raise ConfigError("sample count must be at least 1")
    points = pdf.inverse_cdf(base_points(pdf.dimension, count, seed, kind))
    return SampleSet(pdf=pdf, count=count, seed=seed, kind=kind, points=points)
