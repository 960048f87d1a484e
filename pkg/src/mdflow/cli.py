"""Command-line front end.

Thin client over the service layer: a subcommand reads a YAML scenario
file, validates it into the same request model the HTTP endpoints accept,
runs the matching handler in-process and emits a CSV or JSON report.

Exit codes: 0 success, 1 infeasible or unstable model (or failed output
write), 2 malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any

import yaml
from pydantic import ValidationError

from .errors import InfeasibleError, InstabilityError, NonConvergenceError, ScenarioError
from .service import handlers
from .service.schemas import (
    BlockingReport,
    ConvergenceReport,
    DistributionReport,
    PlanReport,
    Report,
    Scenario,
    SimReport,
    SweepReport,
)

_HANDLERS = {
    "solve-emlm": handlers.solve_emlm,
    "mdf-blocking": handlers.mdf_blocking,
    "timevar-blocking": handlers.timevar_blocking,
    "delay-blocking": handlers.delay_blocking,
    "simulate": handlers.simulate,
    "plan": handlers.plan,
    "sweep": handlers.sweep,
    "convergence": handlers.convergence,
}

SWEEP_CSV_HEADER = "C,blocking_emlm,blocking_mdf,blocking_sim_mean,blocking_sim_ci95_lo,blocking_sim_ci95_hi"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mdflow",
        description="Blocking probability and capacity planning for multi-type data flow traffic.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _HANDLERS:
        p = sub.add_parser(name, help=f"run the {name} analysis on a scenario file")
        p.add_argument("--scenario", required=True, help="path to the YAML scenario file")
        p.add_argument("--output", help="write the report here instead of stdout")
        p.add_argument("--format", choices=["csv", "json"], help="report format override")
        p.add_argument("--seed", type=int, help="override run.seed")
        p.add_argument("--grid", help="capacity grid as start:stop:step (inclusive)")
        p.add_argument(
            "--mode", choices=["consistent", "literal"], help="mdf stationary rate convention"
        )
        p.add_argument("--alpha", type=float, help="override policy.alpha")
        p.add_argument("--epsilon", type=float, help="override policy.epsilon")
    return parser


def _read_scenario(path: str) -> tuple[str, dict]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path!r}: {exc}") from exc
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" (line {mark.line + 1})" if mark is not None else ""
        raise ScenarioError(f"invalid YAML in {path!r}{where}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ScenarioError(f"scenario {path!r} must be a mapping of sections")
    return text, raw


def _apply_overrides(raw: dict, args: argparse.Namespace) -> dict:
    def section(name: str) -> dict:
        value = raw.setdefault(name, {})
        if not isinstance(value, dict):
            raise ScenarioError(f"scenario section {name!r} must be a mapping")
        return value

    if args.seed is not None:
        section("run")["seed"] = args.seed
    if args.grid is not None:
        section("run")["grid"] = args.grid
    if args.format is not None:
        section("run")["format"] = args.format
    if args.output is not None:
        section("run")["output"] = args.output
    if args.alpha is not None:
        section("policy")["alpha"] = args.alpha
    if args.epsilon is not None:
        section("policy")["epsilon"] = args.epsilon
    if args.mode is not None:
        section("model")["mode"] = args.mode
    return raw


def _yaml_line(text: str, loc: tuple) -> int | None:
    """Best-effort line of the scenario key a validation error points at."""
    try:
        node = yaml.compose(text)
    except yaml.YAMLError:
        return None
    line = None
    for part in loc:
        if isinstance(node, yaml.MappingNode) and isinstance(part, str):
            for key_node, value_node in node.value:
                if key_node.value == part:
                    line = key_node.start_mark.line + 1
                    node = value_node
                    break
            else:
                continue  # discriminator tags are not scenario keys; skip
        elif isinstance(node, yaml.SequenceNode) and isinstance(part, int):
            if 0 <= part < len(node.value):
                node = node.value[part]
                line = node.start_mark.line + 1
    return line


def _validate(raw: dict, text: str) -> Scenario:
    try:
        return Scenario.model_validate(raw)
    except ValidationError as exc:
        lines = []
        for err in exc.errors():
            loc = err.get("loc", ())
            where = ".".join(str(p) for p in loc)
            line = _yaml_line(text, loc)
            suffix = f" (line {line})" if line is not None else ""
            lines.append(f"  {where}{suffix}: {err['msg']}")
        raise ScenarioError("scenario rejected:\n" + "\n".join(lines)) from exc


def _fmt(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def _round_floats(payload: Any) -> Any:
    """Limit every float to 12 significant digits, recursively."""
    if isinstance(payload, float):
        return float(format(payload, ".12g"))
    if isinstance(payload, list):
        return [_round_floats(v) for v in payload]
    if isinstance(payload, dict):
        return {k: _round_floats(v) for k, v in payload.items()}
    return payload


def _csv_text(report: Report) -> str:
    if isinstance(report, SweepReport):
        lines = [SWEEP_CSV_HEADER]
        for row in report.rows:
            mdf = (
                row.blocking_mdf_literal
                if report.mode == "literal"
                else row.blocking_mdf_consistent
            )
            if row.blocking_sim_mean is None:
                lo = hi = None
            else:
                half = row.blocking_sim_ci95 or 0.0
                lo, hi = row.blocking_sim_mean - half, row.blocking_sim_mean + half
            cells = [row.capacity, row.blocking_emlm, mdf, row.blocking_sim_mean, lo, hi]
            lines.append(",".join(_fmt(c) for c in cells))
        return "\n".join(lines) + "\n"
    if isinstance(report, ConvergenceReport):
        fields = list(ConvergenceRowFields)
        lines = [",".join(fields)]
        for row in report.rows:
            lines.append(",".join(_fmt(getattr(row, f)) for f in fields))
        return "\n".join(lines) + "\n"
    if isinstance(report, DistributionReport):
        lines = ["j,q"]
        lines.extend(f"{j},{_fmt(q)}" for j, q in enumerate(report.masses))
        return "\n".join(lines) + "\n"
    if isinstance(report, (BlockingReport, PlanReport, SimReport)):
        data = report.model_dump()
        data.pop("empirical_pmf", None)
        data.pop("replication_estimates", None)
        header = ",".join(data)
        row = ",".join(_fmt(v) for v in data.values())
        return header + "\n" + row + "\n"
    raise ValueError(f"no CSV rendering for {type(report).__name__}")


ConvergenceRowFields = (
    "slot",
    "stay_prob",
    "blocking_emlm",
    "blocking_mdf_consistent",
    "blocking_mdf_literal",
    "delta_consistent",
    "delta_literal",
)


def emit_report(report: Report, format: str, path: str | None) -> None:
    """Serialize a report (12 significant digits) to a file or stdout."""
    if format == "csv":
        text = _csv_text(report)
    elif format == "json":
        text = json.dumps(_round_floats(report.model_dump()), indent=2) + "\n"
    else:
        raise ScenarioError(f"unknown format {format!r}")
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def run(argv: list[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2

    try:
        text, raw = _read_scenario(args.scenario)
        raw = _apply_overrides(raw, args)
        scenario = _validate(raw, text)
        report = _HANDLERS[args.command](scenario)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (InfeasibleError, InstabilityError, NonConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    try:
        emit_report(report, scenario.run.format, scenario.run.output)
    except OSError as exc:
        print(f"error: cannot write report: {exc}", file=sys.stderr)
        return 1
    if args.command == "plan" and scenario.run.output is not None:
        print(f"C = {report.capacity}")
    return 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
