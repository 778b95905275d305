"""One recurrence purification step on two copies of a two-qubit state.

Qubit ordering of the four-qubit space is (A1, B1, A2, B2): basis index
``8*a1 + 4*b1 + 2*a2 + b2``. With it the two-copy state is the literal
Kronecker product ``rho (x) rho`` and the bilateral gate carries the only
permutation, inside :func:`bilateral_product`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from purify.constants import BRANCH_PROBABILITY_EPS, TIE_TOL
from purify.errors import ConfigError, EmptyOutcomeError
from purify.quantum.entanglement import concurrence_batch
from purify.quantum.gellmann import CNOT, Su2Angles, su2_from_angles
from purify.quantum.qmat import (
    CMatrix,
    DensityMatrix,
    as_matrix,
    check_unitary,
    dagger,
    kron,
    validate_density,
)

BRANCH_LABELS = ("00", "01", "10", "11")
"""Measurement outcomes (a2, b2) of the sacrificed pair, in branch order."""


# ── Branch policies ─────────────────────────────────────────────


@dataclass(frozen=True, slots=True)
class PerStateMax:
    """Keep the branch of largest concurrence per state; sum tied probabilities."""

    name: Literal["per-state-max"] = "per-state-max"


@dataclass(frozen=True, slots=True)
class EnsembleBranch:
    """Keep one fixed branch for every state.

    ``branch`` is ``None`` while the ensemble-level choice has not been made;
    the cost evaluator then picks the branch of highest average concurrence.
    """

    branch: int | None = None
    name: Literal["ensemble-branch"] = "ensemble-branch"

    def __post_init__(self) -> None:
        if self.branch is not None and self.branch not in range(4):
            raise ConfigError(f"branch index must be 0..3, got {self.branch}")


BranchPolicy = PerStateMax | EnsembleBranch


def parse_policy(text: str) -> BranchPolicy:
    """``per-state-max``, ``ensemble-branch`` or ``ensemble-branch:<0..3>``."""
    key = text.strip().lower()
    if key in ("per-state-max", "max"):
        return PerStateMax()
    if key.startswith("ensemble-branch"):
        _, _, index = key.partition(":")
        return EnsembleBranch(int(index) if index else None)
    raise ConfigError(f"unknown branch policy {text!r}")


# ── Embedding and branch extraction ─────────────────────────────


def bilateral_product(gate_a: NDArray, gate_b: NDArray) -> NDArray:
    """``gate_a`` on (A1, A2) and ``gate_b`` on (B1, B2) as a 16x16 operator.

    Leading axes broadcast, so stacks of gates (e.g. tangents) are accepted.
    """
    a = np.asarray(gate_a).reshape(*np.shape(gate_a)[:-2], 2, 2, 2, 2)
    b = np.asarray(gate_b).reshape(*np.shape(gate_b)[:-2], 2, 2, 2, 2)
    # gate indices: (out1, out2, in1, in2); result: (a1', b1', a2', b2', a1, b1, a2, b2)
    product = np.einsum("...pqrs,...tuvw->...ptqurvsw", a, b)
    return product.reshape(*product.shape[:-8], 16, 16)


def embed_bilateral(gate: ArrayLike) -> CMatrix:
    """The 16x16 unitary applying ``gate`` at A and at B."""
    u = check_unitary(gate)
    if u.shape != (4, 4):
        raise ConfigError("bilateral gates act on two qubits (4x4)")
    return bilateral_product(u, u)


def pair_states(rhos: NDArray) -> NDArray:
    """``rho (x) rho`` for a ``(m, 4, 4)`` stack."""
    m = rhos.shape[0]
    return np.einsum("mij,mkl->mikjl", rhos, rhos).reshape(m, 16, 16)


def branch_blocks(transformed: NDArray) -> NDArray:
    """Unnormalized (A1, B1) blocks ``<i|rho'|i>`` for each outcome ``i``.

    ``(..., 16, 16) -> (..., 4, 4, 4)`` with the branch axis before the block.
    """
    blocks = transformed.reshape(*transformed.shape[:-2], 4, 4, 4, 4)
    return np.einsum("...kljl->...lkj", blocks)


@dataclass(frozen=True, slots=True)
class BranchTable:
    """Per-sample branch data for a stack of two-copy states.

    ``probabilities`` and ``concurrences`` have shape ``(m, 4)``; ``posts`` is
    ``(m, 4, 4, 4)`` with zeros where the branch is undefined.
    """

    probabilities: NDArray[np.float64]
    posts: NDArray[np.complex128]
    concurrences: NDArray[np.float64]

    @property
    def defined(self) -> NDArray[np.bool_]:
        return self.probabilities > BRANCH_PROBABILITY_EPS


def evaluate_branches(pairs: NDArray, bilateral: NDArray) -> BranchTable:
    """Apply a 16x16 bilateral gate to two-copy states and split by outcome."""
    transformed = bilateral @ pairs @ dagger(bilateral)
    blocks = branch_blocks(transformed)
    blocks = 0.5 * (blocks + dagger(blocks))
    probabilities = np.clip(np.trace(blocks, axis1=-2, axis2=-1).real, 0.0, None)
    defined = probabilities > BRANCH_PROBABILITY_EPS
    safe = np.where(defined, probabilities, 1.0)
    posts = np.where(defined[..., None, None], blocks / safe[..., None, None], 0.0)
    # undefined branches are scored on the maximally mixed state, i.e. C = 0
    filled = np.where(defined[..., None, None], posts, np.eye(4) / 4)
    concurrences = np.where(defined, concurrence_batch(filled), 0.0)
    return BranchTable(probabilities, posts, concurrences)


def select_per_state(
    table: BranchTable,
) -> tuple[NDArray[np.float64], NDArray[np.float64], NDArray[np.intp]]:
    """Per-state maximum with tie aggregation.

    Returns the selected concurrence, the summed probability of all branches
    within ``TIE_TOL`` of the maximum, and the lowest tied branch index.
    """
    masked = np.where(table.defined, table.concurrences, -np.inf)
    best = masked.max(axis=-1)
    tied = table.defined & (masked >= best[..., None] - TIE_TOL)
    probability = np.where(tied, table.probabilities, 0.0).sum(axis=-1)
    kept = np.argmax(tied, axis=-1)
    return np.where(np.isfinite(best), best, 0.0), probability, kept


# ── Single step ─────────────────────────────────────────────────


@dataclass(frozen=True, slots=True)
class Branch:
    probability: float
    post_state: DensityMatrix | None
    concurrence: float | None


@dataclass(frozen=True, slots=True)
class StepOutcome:
    """All four branches plus the selected ``(C', P)`` pair."""

    branches: tuple[Branch, ...]
    selected_concurrence: float
    success_probability: float
    selected_branches: tuple[int, ...]

    @property
    def kept_branch(self) -> int:
        return self.selected_branches[0]

    @property
    def kept_state(self) -> DensityMatrix:
        state = self.branches[self.kept_branch].post_state
        if state is None:  # pragma: no cover - selected branches are defined
            raise EmptyOutcomeError("kept branch has no post-state")
        return state


def purification_step(
    rho: ArrayLike | DensityMatrix,
    gate: ArrayLike,
    policy: BranchPolicy | None = None,
) -> StepOutcome:
    """Tensor two copies, apply the bilateral gate, measure (A2, B2), post-select."""
    policy = policy or PerStateMax()
    state = validate_density(rho)
    if state.dim != 4:
        raise ConfigError("purification acts on two-qubit states")
    bilateral = embed_bilateral(as_matrix(gate))
    table = evaluate_branches(kron(state, state)[None], bilateral)

    probabilities = table.probabilities[0]
    defined = table.defined[0]
    if not defined.any():
        raise EmptyOutcomeError("every branch probability is below threshold")

    branches = tuple(
        Branch(
            probability=float(probabilities[i]),
            post_state=validate_density(table.posts[0, i]) if defined[i] else None,
            concurrence=float(table.concurrences[0, i]) if defined[i] else None,
        )
        for i in range(4)
    )

    if isinstance(policy, EnsembleBranch):
        if policy.branch is None:
            raise ConfigError("single-state evaluation needs an explicit branch")
        index = policy.branch
        if not defined[index]:
            raise EmptyOutcomeError(f"branch {BRANCH_LABELS[index]} has no post-state")
        return StepOutcome(
            branches=branches,
            selected_concurrence=float(table.concurrences[0, index]),
            success_probability=float(probabilities[index]),
            selected_branches=(index,),
        )

    best = max(b.concurrence for b in branches if b.concurrence is not None)
    tied = tuple(
        i
        for i, b in enumerate(branches)
        if b.concurrence is not None and b.concurrence >= best - TIE_TOL
    )
    return StepOutcome(
        branches=branches,
        selected_concurrence=best,
        success_probability=min(float(sum(probabilities[i] for i in tied)), 1.0),
        selected_branches=tied,
    )


# ── Locally dressed CNOT ────────────────────────────────────────


def dressed_purification_step(
    rho: ArrayLike | DensityMatrix,
    local_a: ArrayLike,
    local_b: ArrayLike,
    gate: ArrayLike,
    policy: BranchPolicy | None = None,
) -> StepOutcome:
    """Rotate each pair by ``local_a (x) local_b`` before a bilateral step."""
    state = validate_density(rho)
    local = np.kron(as_matrix(local_a), as_matrix(local_b))
    rotated = local @ state.matrix @ dagger(local)
    return purification_step(rotated, gate, policy)


MIRROR_DRESSING = (
    Su2Angles(0.0, math.pi / 8, 3 * math.pi / 4),
    Su2Angles(0.0, 3 * math.pi / 8, 3 * math.pi / 4),
)
"""A- and B-side angles that swap the roles of x and y on the disk family."""


def dressed_cnot(
    rho: ArrayLike | DensityMatrix,
    a_side: Su2Angles = MIRROR_DRESSING[0],
    b_side: Su2Angles = MIRROR_DRESSING[1],
    policy: BranchPolicy | None = None,
) -> StepOutcome:
    """CNOT step after the SU(2) dressing ``U_A (x) U_B`` of each pair."""
    return dressed_purification_step(
        rho, su2_from_angles(a_side), su2_from_angles(b_side), CNOT, policy
    )
