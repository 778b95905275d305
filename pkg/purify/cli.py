"""Command-line entry point: ``purify <command> [flags]``.

Commands: ``families-list``, ``evaluate``, ``optimize``, ``oracle``. A JSON or
YAML document given with ``--config`` supplies run settings; flags override
it.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from purify.config import settings
from purify.constants import (
    EXIT_CONFIG_ERROR,
    EXIT_DEGENERACY,
    EXIT_NUMERICAL_FAILURE,
    EXIT_OK,
    FAMILY_METADATA,
)
from purify.errors import (
    AngleBoundsError,
    ConfigError,
    DegeneracyError,
    DomainError,
    EmptyOutcomeError,
    NumericalFailureError,
    UnsupportedOracleError,
)
from purify.observability.logging import bind_run_id, configure_logging
from purify.observability.metrics import write_metrics
from purify.quantum.oracles import ORACLE_ITERATIONS
from purify.schemas.results import FamilyInfo
from purify.schemas.run import RunConfig
from purify.services.evaluation import evaluate_gate
from purify.services.export import (
    recurrence_curves,
    recurrence_table,
    write_csv,
    write_json,
)
from purify.services.oracle_report import oracle_comparison
from purify.services.recurrence import recurrence_optimize
from purify.utils.config_loader import load_mapping

logger = logging.getLogger(__name__)

RUN_FLAGS = (
    "family",
    "pdf",
    "gate",
    "iterations",
    "samples",
    "grid",
    "seed",
    "sequence_kind",
    "policy",
    "out",
)
OPTIMIZER_FLAGS = ("threads", "restarts", "restart_seed", "gradient_mode", "fd_step")

CONFIG_ERRORS = (
    ConfigError,
    DomainError,
    AngleBoundsError,
    UnsupportedOracleError,
    ValidationError,
)
NUMERICAL_ERRORS = (NumericalFailureError, EmptyOutcomeError)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON/YAML run configuration")
    common.add_argument("--family", help="state family id or alias")
    common.add_argument(
        "--pdf", help="uniform(a,b], uniform, 2x, 2(1-x), 6x(1-x), disk"
    )
    common.add_argument(
        "--gate", help="cnot, identity, angles:<15 comma-separated>, file:<path>"
    )
    common.add_argument("--iterations", type=int, help="recurrence rounds N")
    common.add_argument("--samples", type=int, help="ensemble size M")
    common.add_argument("--grid", type=int, help="grid resolution per axis")
    common.add_argument("--seed", type=int, help="sample sequence seed")
    common.add_argument(
        "--sequence-kind",
        dest="sequence_kind",
        choices=("low-discrepancy", "pseudo-random"),
    )
    common.add_argument(
        "--policy", help="per-state-max, ensemble-branch or ensemble-branch:<0-3>"
    )
    common.add_argument("--threads", type=int, help="worker threads (1 = serial)")
    common.add_argument("--restarts", type=int, help="random multistart points")
    common.add_argument("--restart-seed", dest="restart_seed", type=int)
    common.add_argument(
        "--gradient-mode", dest="gradient_mode", choices=("dual", "central")
    )
    common.add_argument("--fd-step", dest="fd_step", type=float)
    common.add_argument("--out", help="output directory")

    parser = argparse.ArgumentParser(
        prog="purify",
        description="Simulate and optimize recurrence entanglement purification",
    )
    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser("families-list", parents=[common], help="list state families")
    commands.add_parser("evaluate", parents=[common], help="apply a fixed gate")
    commands.add_parser("optimize", parents=[common], help="optimize gates per round")
    commands.add_parser("oracle", parents=[common], help="check closed-form CNOT")
    return parser


def load_run_config(args: argparse.Namespace) -> RunConfig:
    """Merge ``--config`` with the flags; flags win."""
    document: dict[str, Any] = load_mapping(args.config) if args.config else {}
    optimizer = dict(document.pop("optimizer", None) or {})
    for key in OPTIMIZER_FLAGS:
        if key in document:
            optimizer[key] = document.pop(key)
        value = getattr(args, key, None)
        if value is not None:
            optimizer[key] = value
    for key in RUN_FLAGS:
        value = getattr(args, key, None)
        if value is not None:
            document[key] = value
    document["command"] = args.command
    document["optimizer"] = optimizer
    return RunConfig.model_validate(document)


# ── Commands ────────────────────────────────────────────────────


def cmd_families_list(_run: RunConfig) -> None:
    families = [
        FamilyInfo(
            id=family_id,
            title=meta["title"],
            arity=meta["arity"],
            domain=meta["domain"],
            default_pdf=meta["default_pdf"],
            aliases=list(meta["aliases"]),
            oracle_iterations=ORACLE_ITERATIONS.get(family_id),
        ).model_dump()
        for family_id, meta in FAMILY_METADATA.items()
    ]
    print(json.dumps(families, indent=2))


def cmd_evaluate(run: RunConfig) -> None:
    summary, frame = evaluate_gate(run)
    write_json(summary, run.output_dir / "evaluate_summary.json")
    write_csv(frame, run.output_dir / "evaluate_curves.csv")


def cmd_optimize(run: RunConfig) -> None:
    result = recurrence_optimize(
        run.family,
        run.pdf_spec,
        run.samples,
        run.iterations,
        run.optimizer,
        seed=run.seed,
        kind=run.sequence_kind,
    )
    result = result.model_copy(update={"config": run.echo()})
    write_json(result, run.output_dir / "optimize_result.json")
    write_csv(recurrence_curves(result), run.output_dir / "optimize_curves.csv")
    write_csv(recurrence_table(result), run.output_dir / "optimize_cnot_table.csv")
    for record in result.iterations:
        write_json(
            {"iteration": record.iteration, "angles": record.angles},
            run.output_dir / f"gate_{record.iteration}.json",
        )


def cmd_oracle(run: RunConfig) -> None:
    report, frame = oracle_comparison(run)
    write_json(report, run.output_dir / "oracle_report.json")
    write_csv(frame, run.output_dir / "oracle_curves.csv")


COMMANDS = {
    "families-list": cmd_families_list,
    "evaluate": cmd_evaluate,
    "optimize": cmd_optimize,
    "oracle": cmd_oracle,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(settings.log_level, settings.log_json)
    bind_run_id()
    out: Path | None = None

    try:
        run = load_run_config(args)
        out = run.output_dir
        logger.info("running %s", run.command)
        COMMANDS[run.command](run)
        code = EXIT_OK
    except CONFIG_ERRORS as exc:
        code = EXIT_CONFIG_ERROR
        _report(exc)
    except NUMERICAL_ERRORS as exc:
        code = EXIT_NUMERICAL_FAILURE
        _report(exc)
    except DegeneracyError as exc:
        code = EXIT_DEGENERACY
        _report(exc)

    if settings.write_metrics and out is not None and args.command != "families-list":
        write_metrics(out / "metrics.prom")
    return code


def _report(exc: Exception) -> None:
    logger.error("%s: %s", type(exc).__name__, exc)
    print(f"error: {exc}", file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
