"""Command-line front end: ``widgetmatch <verb> [flags]``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
from pathlib import Path
from typing import Mapping, Sequence

from ._xml import read_bytes
from .engine import build_pipeline, config_to_xml, default_config_path, execute, load_config
from .errors import FormatError, WidgetMatchError
from .evaluation import (
    MetricsReport,
    aggregate,
    consistency,
    evaluate,
    format_consistency,
    format_table,
    load_oracle,
)
from .evogen import MutationPlan, load_plan, mutate_detailed
from .heuristics import DEFAULT_MAX_OPS, generate_heuristic_set, load_priority_table
from .model import format_for_path, parse_model, prune, serialize_model
from .state import MatchResult

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3

LOG_LEVELS = {"trace": logging.DEBUG, "info": logging.INFO, "quiet": logging.ERROR}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="widgetmatch", description="Match GUI widgets across application versions.")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    p = sub.add_parser("match", help="match the widgets of two model versions")
    p.add_argument("--old", required=True, type=Path)
    p.add_argument("--new", required=True, type=Path)
    p.add_argument("--config", type=Path, help="pipeline file (default: shipped configuration)")
    p.add_argument("--out", type=Path)

    p = sub.add_parser("evaluate", help="score a match result against an oracle")
    p.add_argument("--result", type=Path)
    p.add_argument("--oracle", type=Path)
    p.add_argument("--old", type=Path)
    p.add_argument("--new", type=Path)
    p.add_argument("--out", type=Path)
    p.add_argument(
        "--report-consistency",
        type=Path,
        metavar="DIR",
        help="also bucket every report JSON in DIR by 100/95/90/80%% rates",
    )

    p = sub.add_parser("gen-heuristics", help="generate a pipeline from a priority table")
    p.add_argument("--table", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--max-ops", type=int, default=DEFAULT_MAX_OPS)

    p = sub.add_parser("mutate", help="derive a new version with a ground-truth oracle")
    p.add_argument("--model", required=True, type=Path)
    p.add_argument("--ops", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--plan", type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--oracle-out", required=True, type=Path)

    p = sub.add_parser("validate", help="check a model file")
    p.add_argument("--model", required=True, type=Path)
    return parser


def _check_usage(args: argparse.Namespace) -> None:
    if args.verb == "evaluate":
        pair = [args.result, args.oracle, args.old, args.new]
        if any(pair) and not all(pair):
            raise UsageError("evaluate: --result, --oracle, --old and --new go together")
        if not any(pair) and args.report_consistency is None:
            raise UsageError("evaluate: give --result/--oracle/--old/--new or --report-consistency")
    elif args.verb == "mutate":
        if args.plan is not None:
            if args.ops is not None or args.seed is not None:
                raise UsageError("mutate: --plan excludes --ops/--seed")
        elif args.ops is None or args.seed is None:
            raise UsageError("mutate: give --ops and --seed, or --plan")
        elif args.ops < 0:
            raise UsageError("mutate: --ops must be non-negative")
    elif args.verb == "gen-heuristics" and args.max_ops < 0:
        raise UsageError("gen-heuristics: --max-ops must be non-negative")


def write_outputs(outputs: Mapping[Path, bytes]) -> None:
    """Write every file or none: all content goes to temporaries first."""
    staged = []
    try:
        for path, data in outputs.items():
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
            staged.append((tmp, path))
            with os.fdopen(fd, "wb") as fh:
                fh.write(data)
        for tmp, path in staged:
            os.replace(tmp, path)
    finally:
        for tmp, _ in staged:
            if os.path.exists(tmp):
                os.unlink(tmp)


def _json_bytes(doc) -> bytes:
    return (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def _load_json(path: Path):
    try:
        return json.loads(read_bytes(path).decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(str(exc), path) from None


def _match_table(result: MatchResult) -> str:
    lines = [
        f"maintained {len(result.maintained)}  deleted {len(result.deleted)}  created {len(result.created)}",
        "",
    ]
    rows = [(a, b, result.provenance.get((a, b), "")) for a, b in result.maintained.items()]
    rows += [(a, "-", "deleted") for a in result.deleted]
    rows += [("-", b, "created") for b in result.created]
    if rows:
        w0 = max(len(r[0]) for r in rows + [("old", "", "")])
        w1 = max(len(r[1]) for r in rows + [("", "new", "")])
        lines.append(f"{'old'.ljust(w0)}  {'new'.ljust(w1)}  decision")
        lines += [f"{a.ljust(w0)}  {b.ljust(w1)}  {h}" for a, b, h in rows]
    return "\n".join(lines) + "\n"


def cmd_match(args) -> int:
    config = load_config(args.config or default_config_path())
    old = parse_model(args.old)
    new = parse_model(args.new)
    result = execute(old, new, config)
    if args.out:
        write_outputs({args.out: _json_bytes(result.to_dict())})
    else:
        sys.stdout.write(_match_table(result))
    return EXIT_OK


def _report_files(directory: Path) -> list[tuple[str, MetricsReport]]:
    if not directory.is_dir():
        raise FormatError("not a directory", directory)
    reports = []
    for path in sorted(directory.glob("*.json")):
        doc = _load_json(path)
        if isinstance(doc, dict) and "report" in doc:
            doc = doc["report"]
        if not isinstance(doc, dict) or "cdc" not in doc:
            continue
        try:
            reports.append((path.stem, MetricsReport.from_dict(doc)))
        except (TypeError, ValueError) as exc:
            raise FormatError(f"bad report: {exc}", path) from None
    return reports


def cmd_evaluate(args) -> int:
    outputs = {}
    text = []
    reports: list[tuple[str, MetricsReport]] = []
    if args.result is not None:
        old_raw = parse_model(args.old)
        new_raw = parse_model(args.new)
        doc = _load_json(args.result)
        try:
            result = MatchResult.from_dict(doc)
        except (KeyError, TypeError, AttributeError) as exc:
            raise FormatError(f"not a match result ({exc})", args.result) from None
        oracle = load_oracle(args.oracle, old_raw, new_raw)
        old = prune(old_raw, result.ignored_old)
        new = prune(new_raw, result.ignored_new)
        oracle = oracle.without(result.ignored_old, result.ignored_new)
        report = evaluate(result, oracle, old, new)
        reports.append(("current", report))
        if args.out:
            outputs[args.out] = _json_bytes(report.to_dict())
        text.append(format_table({"Value": report}))
    if args.report_consistency is not None:
        found = _report_files(args.report_consistency)
        if args.out is not None:
            found = [(n, r) for n, r in found if args.report_consistency / f"{n}.json" != args.out]
        reports = found + reports
        all_reports = [r for _, r in reports]
        table = consistency(all_reports)
        text.append(f"{len(all_reports)} version pair(s)\n" + format_consistency(table))
        if all_reports:
            text.append(format_table({"Total": aggregate(all_reports)}))
    if outputs:
        write_outputs(outputs)
    if not args.out or args.report_consistency is not None:
        sys.stdout.write("\n".join(text))
    return EXIT_OK


def cmd_gen_heuristics(args) -> int:
    table = load_priority_table(args.table)
    specs = generate_heuristic_set(table, args.max_ops)
    config = build_pipeline(specs, default_max_ops=args.max_ops)
    write_outputs({args.out: config_to_xml(config)})
    print(f"{len(specs)} heuristics written to {args.out}", file=sys.stderr)
    return EXIT_OK


def cmd_mutate(args) -> int:
    model = parse_model(args.model)
    plan = load_plan(args.plan) if args.plan else MutationPlan(args.seed, args.ops)
    outcome = mutate_detailed(model, plan)
    write_outputs(
        {
            args.out: serialize_model(outcome.new_model, format_for_path(args.out)),
            args.oracle_out: _json_bytes(outcome.oracle.to_dict()),
        }
    )
    for record in outcome.log:
        logging.getLogger("widgetmatch").info("%s %s %s", record.kind, record.target, record.detail)
    return EXIT_OK


def cmd_validate(args) -> int:
    model = parse_model(args.model)
    print(
        f"{args.model}: ok, {len(model.windows)} window(s), {model.widget_count} widget(s)"
    )
    return EXIT_OK


COMMANDS = {
    "match": cmd_match,
    "evaluate": cmd_evaluate,
    "gen-heuristics": cmd_gen_heuristics,
    "mutate": cmd_mutate,
    "validate": cmd_validate,
}


def _setup_logging() -> None:
    level = LOG_LEVELS.get(os.environ.get("WIDGETMATCH_LOG", "").lower(), logging.WARNING)
    logger = logging.getLogger("widgetmatch")
    logger.setLevel(level)
    if not logger.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("widgetmatch %(levelname)s: %(message)s"))
        logger.addHandler(handler)


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        _check_usage(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    _setup_logging()
    try:
        return COMMANDS[args.verb](args)
    except WidgetMatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
