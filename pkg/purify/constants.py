"""Numerical tolerances, angle bounds and identifier registries."""

from __future__ import annotations

import math
from typing import Any

# ==========================================
# Tolerances
# ==========================================

MATRIX_TOL = 1e-10
"""Absolute tolerance for Hermiticity, trace, positivity and spectra."""

UNITARY_TOL = 1e-10
BRANCH_PROBABILITY_EPS = 1e-12
"""Branches below this probability have no defined post-state."""

TIE_TOL = 1e-9
"""Branch concurrences within this distance of the maximum count as tied."""

DOMAIN_TOL = 1e-12
ANGLE_TOL = 1e-12
MAX_DROP_FRACTION = 0.10
GRADIENT_DISAGREEMENT_WARN = 1e-3

# ==========================================
# Euler angle hyperrectangle
# ==========================================
#
# Odd components (1-based) rotate about sigma_3 and span [0, pi]; even ones
# span [0, pi/2]; the two Cartan phases close the chart.

SU4_ANGLE_COUNT = 15

SU4_ANGLE_BOUNDS: tuple[tuple[float, float], ...] = tuple(
    (0.0, math.pi) if index % 2 == 1 else (0.0, math.pi / 2)
    for index in range(1, 14)
) + ((0.0, math.pi / math.sqrt(3)), (0.0, math.pi / math.sqrt(6)))

SU2_ANGLE_BOUNDS: tuple[tuple[float, float], ...] = (
    (0.0, math.pi),
    (0.0, math.pi / 2),
    (0.0, 2 * math.pi),
)

# Generator index of each Euler factor, in product order.
EULER_GENERATORS: tuple[int, ...] = (3, 2, 3, 5, 3, 10, 3, 2, 3, 5, 3, 2, 3, 8, 15)

# ==========================================
# Exit codes
# ==========================================

EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_NUMERICAL_FAILURE = 3
EXIT_DEGENERACY = 4

# ==========================================
# Family registry
# ==========================================
#
# Structure:
# id -> {
#     "title": str,       # human readable name
#     "arity": int,       # number of parameters
#     "domain": str,      # "interval" ([0, 1]) or "disk" (x^2 + y^2 <= 1)
#     "default_pdf": str, # pdf id used when none is configured
#     "aliases": list,    # alternative ids accepted on the command line
# }

FamilyMetadata = dict[str, Any]

FAMILY_METADATA: dict[str, FamilyMetadata] = {
    "werner": {
        "title": "Werner state",
        "arity": 1,
        "domain": "interval",
        "default_pdf": "uniform(0.5,1]",
        "aliases": [],
    },
    "rotated-werner": {
        "title": "Rotated Werner state",
        "arity": 1,
        "domain": "interval",
        "default_pdf": "uniform(0.5,1]",
        "aliases": ["example1"],
    },
    "one-step": {
        "title": "One-step purifiable state",
        "arity": 1,
        "domain": "interval",
        "default_pdf": "uniform",
        "aliases": ["example2"],
    },
    "phi-mix": {
        "title": "Phi+/Phi- mixture",
        "arity": 1,
        "domain": "interval",
        "default_pdf": "uniform",
        "aliases": ["example3"],
    },
    "maz": {
        "title": "Psi-/Upsilon mixture",
        "arity": 1,
        "domain": "interval",
        "default_pdf": "uniform",
        "aliases": [],
    },
    "qr": {
        "title": "Two-parameter disk family",
        "arity": 2,
        "domain": "disk",
        "default_pdf": "disk",
        "aliases": [],
    },
}


def resolve_family_id(name: str) -> str:
    """Return the canonical family id for ``name`` or its alias."""
    key = name.strip().lower().replace("_", "-")
    if key in FAMILY_METADATA:
        return key
    for family_id, meta in FAMILY_METADATA.items():
        if key in meta["aliases"]:
            return family_id
    raise KeyError(name)


def get_family_metadata(name: str) -> FamilyMetadata:
    """Case-insensitive registry lookup; aliases resolve to their family."""
    return FAMILY_METADATA[resolve_family_id(name)]
