"""Command-line interface.

Subcommands cover the full pipeline: generate an instance, preprocess it,
inspect contention statistics, export a MILP in LP or MPS form, solve
exactly, validate a schedule, and merge solve reports into a CSV with
rendered figures.  Commands read from paths or stdin ("-") and write to
paths or stdout, so they compose with shell pipes; writing to a path also
drops a run-manifest sidecar describing inputs and parameters, and every
JSON payload cites the manifest's configuration digest.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import os
import sys
import time
from pathlib import Path
from typing import Sequence

from . import __version__
from .instance import (
    InstanceError,
    SchedulingInstance,
    VisibleTimeWindow,
    instance_from_dict,
    instance_to_dict,
    normalize_and_clip,
    parse_instance,
    serialize_instance,
)
from .formulations import build_baseline, build_improved
from .generator import STYLES, GeneratorConfig, generate
from .linmodel import format_number, model_stats, write_lp, write_mps
from .solver import (
    Assignment,
    Schedule,
    SizeGuardError,
    brute_force,
    schedule_value,
    solve_exact,
)
from .validator import REFERENCE_ERROR, Finding, validate
from .windowing import (
    EffectiveSubinterval,
    PreAssignment,
    PreprocessResult,
    empty_preprocess,
    preprocess,
    resource_stats,
)
from .reporting import (
    render_conflict_figure,
    render_report_figures,
    report_rows_from_payloads,
    write_report_csv,
)

SCHEMA_VERSION = 1
SCHEDULE_COLUMNS = ("mission", "resource", "window_begin", "window_end", "start", "duration")

log = logging.getLogger("satsched")


# --- small IO helpers ---------------------------------------------------


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _input_label(path: str) -> str:
    return "stdin" if path == "-" else path


def _name_for(path: str, override: str | None) -> str:
    if override:
        return override
    if path == "-":
        return "instance"
    return Path(path).stem


def _sha256(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def _dump_json(payload: dict) -> str:
    return json.dumps(payload, indent=2) + "\n"


class _Run:
    """Manifest bookkeeping for one command invocation."""

    def __init__(self, command: str, parameters: dict, threads: int) -> None:
        self.command = command
        self.parameters = parameters
        self.threads = threads
        self.inputs: list[dict] = []
        self.started = time.monotonic()

    def add_input(self, label: str, text: str) -> None:
        self.inputs.append({"path": label, "sha256": _sha256(text)})

    @property
    def digest(self) -> str:
        body = {
            "command": self.command,
            "parameters": self.parameters,
            "inputs": [entry["sha256"] for entry in self.inputs],
        }
        return _sha256(json.dumps(body, sort_keys=True))

    def manifest(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "run_manifest",
            "tool": f"satsched {__version__}",
            "command": self.command,
            "parameters": self.parameters,
            "inputs": self.inputs,
            "threads": self.threads,
            "config_digest": self.digest,
            "wall_time_s": round(time.monotonic() - self.started, 6),
        }

    def write_sidecar(self, out_path: str | None) -> None:
        if out_path and out_path != "-":
            _write_text(out_path + ".manifest.json", _dump_json(self.manifest()))


# --- payload conversion -------------------------------------------------


def _load_document(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(
            f"syntax error at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from None
    if not isinstance(doc, dict):
        raise InstanceError("expected a JSON object")
    return doc


def _check_schema(doc: dict, kind: str) -> None:
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise InstanceError(
            f"{kind} document has schema_version {version!r}, expected {SCHEMA_VERSION}"
        )


def _prep_to_payload(
    shift: float,
    normalized: SchedulingInstance,
    prep: PreprocessResult,
    digest: str,
) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "preprocess",
        "manifest_digest": digest,
        "shift": shift,
        "n_prime": prep.n_prime,
        "instance": instance_to_dict(normalized),
        "reduced": instance_to_dict(prep.reduced_instance),
        "preassigned": [
            {
                "mission": pa.mission,
                "resource": pa.resource,
                "window_begin": pa.window.begin,
                "window_end": pa.window.end,
                "start": pa.start,
            }
            for pa in prep.preassigned
        ],
        "subintervals": [
            {
                "resource": sub.resource,
                "begin": sub.begin,
                "end": sub.end,
                "capacity": sub.capacity,
                "windows": [
                    {"mission": w.mission, "begin": w.begin, "end": w.end}
                    for w in sub.candidate_windows
                ],
            }
            for sub in prep.subintervals
        ],
    }


def _prep_from_payload(doc: dict) -> tuple[float, SchedulingInstance, PreprocessResult]:
    _check_schema(doc, "preprocess")
    normalized = instance_from_dict(doc["instance"])
    reduced = instance_from_dict(doc["reduced"])
    preassigned = tuple(
        PreAssignment(
            entry["mission"],
            entry["resource"],
            VisibleTimeWindow(
                entry["mission"],
                entry["resource"],
                float(entry["window_begin"]),
                float(entry["window_end"]),
            ),
            float(entry["start"]),
        )
        for entry in doc.get("preassigned", [])
    )
    subintervals = tuple(
        EffectiveSubinterval(
            sub["resource"],
            float(sub["begin"]),
            float(sub["end"]),
            int(sub["capacity"]),
            tuple(
                VisibleTimeWindow(
                    w["mission"], sub["resource"], float(w["begin"]), float(w["end"])
                )
                for w in sub.get("windows", [])
            ),
        )
        for sub in doc.get("subintervals", [])
    )
    prep = PreprocessResult(preassigned, reduced, subintervals)
    return float(doc.get("shift", 0.0)), normalized, prep


def _load_problem(
    text: str, skip_preprocess: bool
) -> tuple[float, SchedulingInstance, PreprocessResult]:
    """Accept a raw instance document or a preprocess payload.

    Returns (shift, normalized instance, preprocessing result); raw
    instances are normalized and preprocessed here.
    """
    doc = _load_document(text)
    if doc.get("kind") == "preprocess":
        return _prep_from_payload(doc)
    instance = instance_from_dict(doc)
    shift = instance.period.begin
    normalized = normalize_and_clip(instance)
    if skip_preprocess:
        return shift, normalized, empty_preprocess(normalized)
    return shift, normalized, preprocess(normalized)


def _shift_schedule(schedule: Schedule, shift: float) -> Schedule:
    if shift == 0.0:
        return schedule
    moved = tuple(
        Assignment(
            a.mission,
            a.resource,
            VisibleTimeWindow(
                a.window.mission,
                a.window.resource,
                a.window.begin + shift,
                a.window.end + shift,
            ),
            a.start + shift,
        )
        for a in schedule.assignments
    )
    return Schedule(moved, schedule.objective_count, schedule.objective_weight)


def _schedule_rows(instance: SchedulingInstance, schedule: Schedule) -> list[dict]:
    rows = []
    for a in schedule.assignments:
        rows.append(
            {
                "mission": a.mission,
                "resource": a.resource,
                "window_begin": a.window.begin,
                "window_end": a.window.end,
                "start": a.start,
                "duration": instance.mission(a.mission).duration,
            }
        )
    return rows


def _schedule_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SCHEDULE_COLUMNS)
    for row in rows:
        writer.writerow(
            [
                row["mission"],
                row["resource"],
                format_number(row["window_begin"]),
                format_number(row["window_end"]),
                format_number(row["start"]),
                format_number(row["duration"]),
            ]
        )
    return buf.getvalue()


def _load_schedule_csv(
    instance: SchedulingInstance, text: str
) -> tuple[Schedule, list[Finding]]:
    findings: list[Finding] = []
    assignments: list[Assignment] = []
    reader = csv.DictReader(io.StringIO(text))
    expected = set(SCHEDULE_COLUMNS)
    got = set(reader.fieldnames or ())
    if got != expected:
        raise InstanceError(
            f"schedule CSV columns {sorted(got)} do not match {sorted(expected)}"
        )
    weight = 0
    for i, row in enumerate(reader):
        where = f"row {i + 1}"
        try:
            start = float(row["start"])
            duration = float(row["duration"])
            wb = float(row["window_begin"])
            we = float(row["window_end"])
        except (TypeError, ValueError):
            findings.append(
                Finding(REFERENCE_ERROR, row.get("mission"), row.get("resource"),
                        f"{where}: non-numeric time field")
            )
            continue
        mission_id = row["mission"]
        resource_id = row["resource"]
        try:
            mission = instance.mission(mission_id)
        except InstanceError:
            mission = None
        if mission is not None and abs(duration - mission.duration) > 1e-6:
            findings.append(
                Finding(
                    REFERENCE_ERROR,
                    mission_id,
                    resource_id,
                    f"{where}: duration {duration} differs from the mission's "
                    f"{mission.duration}",
                )
            )
        if mission is not None:
            weight += mission.weight
        if we > wb:
            window = VisibleTimeWindow(mission_id, resource_id, wb, we)
        else:
            findings.append(
                Finding(REFERENCE_ERROR, mission_id, resource_id,
                        f"{where}: empty window bounds")
            )
            window = VisibleTimeWindow(mission_id, resource_id, start, start + max(duration, 1.0))
        assignments.append(Assignment(mission_id, resource_id, window, start))
    schedule = Schedule(tuple(assignments), len(assignments), weight)
    return schedule, findings


# --- subcommands --------------------------------------------------------


def _cmd_generate(args: argparse.Namespace) -> int:
    horizon = _parse_horizon(args.horizon)
    config = GeneratorConfig(
        style=args.style,
        missions=args.missions,
        resources=args.resources,
        horizon=horizon,
        seed=args.seed,
    )
    run = _Run(
        "generate",
        {
            "style": config.style,
            "missions": config.missions,
            "resources": config.resources,
            "horizon": config.horizon,
            "seed": config.seed,
        },
        args.threads,
    )
    instance = generate(config)
    _write_text(args.output, serialize_instance(instance))
    run.write_sidecar(args.output)
    return 0


def _cmd_preprocess(args: argparse.Namespace) -> int:
    text = _read_text(args.input)
    run = _Run("preprocess", {}, args.threads)
    run.add_input(_input_label(args.input), text)
    instance = parse_instance(text)
    shift = instance.period.begin
    normalized = normalize_and_clip(instance)
    prep = preprocess(normalized)
    payload = _prep_to_payload(shift, normalized, prep, run.digest)
    _write_text(args.output, _dump_json(payload))
    run.write_sidecar(args.output)
    return 0


def _cmd_stats(args: argparse.Namespace) -> int:
    text = _read_text(args.input)
    run = _Run("stats", {"name": args.name or ""}, args.threads)
    run.add_input(_input_label(args.input), text)
    doc = _load_document(text)
    n_prime: int | None = None
    if doc.get("kind") == "preprocess":
        _, normalized, prep = _prep_from_payload(doc)
        n_prime = prep.n_prime
    else:
        normalized = normalize_and_clip(instance_from_dict(doc))
    name = _name_for(args.input, args.name)
    stats = resource_stats(normalized)

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["instance", "resource", "delta", "N", "T", "F", "rn", "conf"])
    for s in stats.per_resource:
        writer.writerow(
            [
                name,
                s.resource,
                format_number(s.delta),
                s.window_count,
                format_number(s.total_visible),
                format_number(s.feasible_time),
                s.capacity,
                "" if s.contention is None else format_number(s.contention),
            ]
        )
    _write_text(args.output, buf.getvalue())
    run.write_sidecar(args.output)

    if args.summary:
        if n_prime is None:
            n_prime = preprocess(normalized).n_prime
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["instance", "paon", "paot", "n_prime"])
        writer.writerow(
            [name, format_number(stats.paon), format_number(stats.paot), n_prime]
        )
        _write_text(args.summary, buf.getvalue())
        run.write_sidecar(args.summary)

    if args.figure:
        render_conflict_figure(normalized, Path(args.figure))
    return 0


def _cmd_build(args: argparse.Namespace) -> int:
    text = _read_text(args.input)
    run = _Run(
        "build",
        {
            "formulation": args.formulation,
            "objective": args.objective,
            "format": args.format,
            "preprocess": not args.no_preprocess,
        },
        args.threads,
    )
    run.add_input(_input_label(args.input), text)
    _, normalized, prep = _load_problem(text, args.no_preprocess)
    builder = build_baseline if args.formulation == "baseline" else build_improved
    model = builder(normalized, prep, args.objective)
    model.metadata["manifest_digest"] = run.digest

    renames: dict[str, str] = {}
    if args.format == "lp":
        model_text = write_lp(model)
    else:
        document = write_mps(model)
        model_text = document.text
        renames = document.renames
    _write_text(args.output, model_text)

    stats = model_stats(model)
    info = {
        "schema_version": SCHEMA_VERSION,
        "kind": "model_info",
        "manifest_digest": run.digest,
        "formulation": args.formulation,
        "objective": args.objective,
        "mVC": stats.continuous,
        "mVB": stats.binary,
        "mC": stats.constraints,
        "n_prime": prep.n_prime,
    }
    if args.formulation == "baseline":
        info["U"] = model.metadata["big_m"]
    if args.output and args.output != "-":
        _write_text(args.output + ".meta.json", _dump_json(info))
        if renames:
            buf = io.StringIO()
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(["original", "emitted"])
            for original, emitted in renames.items():
                writer.writerow([original, emitted])
            _write_text(args.output + ".names.csv", buf.getvalue())
        run.write_sidecar(args.output)
    return 0


def _cmd_solve(args: argparse.Namespace) -> int:
    text = _read_text(args.input)
    run = _Run(
        "solve",
        {
            "objective": args.objective,
            "time_limit": args.time_limit,
            "node_limit": args.node_limit,
            "preprocess": not args.no_preprocess,
            "oracle": bool(args.oracle),
            "seed": args.seed,
        },
        args.threads,
    )
    run.add_input(_input_label(args.input), text)
    shift, normalized, prep = _load_problem(text, args.no_preprocess)
    name = _name_for(args.input, args.name)

    report = solve_exact(
        normalized,
        prep,
        args.objective,
        time_limit=args.time_limit,
        node_limit=args.node_limit,
    )
    shifted = _shift_schedule(report.schedule, shift)

    original = _shift_instance_back(normalized, shift)
    check = validate(original, shifted)
    if not check.ok:
        raise RuntimeError(
            "internal error: solver schedule failed validation: "
            + "; ".join(f.detail for f in check.findings)
        )

    payload = {
        "schema_version": SCHEMA_VERSION,
        "kind": "solve_report",
        "manifest_digest": run.digest,
        "instance": name,
        "objective": report.objective,
        "objective_value": report.best_value,
        "objective_count": report.schedule.objective_count,
        "objective_weight": report.schedule.objective_weight,
        "root_bound": report.root_bound,
        "upper_bound": report.upper_bound,
        "search_gap": report.gap,
        "proven_optimal": report.proven_optimal,
        "nodes": report.nodes,
        "elapsed_s": round(report.elapsed, 6),
        "limit_reached": report.limit_reached,
        "n_prime": prep.n_prime,
        "schedule": _schedule_rows(normalized, shifted),
    }
    if args.oracle:
        oracle = brute_force(normalized, args.objective)
        payload["oracle_value"] = schedule_value(oracle, args.objective)
        payload["oracle_match"] = payload["oracle_value"] == report.best_value
        if report.proven_optimal and not payload["oracle_match"]:
            raise RuntimeError(
                f"oracle value {payload['oracle_value']} disagrees with "
                f"proven optimum {report.best_value}"
            )
    _write_text(args.output, _dump_json(payload))
    run.write_sidecar(args.output)
    if args.schedule:
        _write_text(args.schedule, _schedule_csv(payload["schedule"]))
        run.write_sidecar(args.schedule)
    return 0


def _shift_instance_back(
    normalized: SchedulingInstance, shift: float
) -> SchedulingInstance:
    if shift == 0.0:
        return normalized
    from .instance import Mission, SchedulingPeriod
    from dataclasses import replace

    period = SchedulingPeriod(shift, normalized.period.end + shift)
    missions = tuple(
        replace(m, earliest=m.earliest + shift, latest=m.latest + shift)
        for m in normalized.missions
    )
    windows = tuple(
        VisibleTimeWindow(w.mission, w.resource, w.begin + shift, w.end + shift)
        for w in normalized.windows
    )
    return SchedulingInstance(period, missions, normalized.resources, windows)


def _cmd_validate(args: argparse.Namespace) -> int:
    instance_text = _read_text(args.instance)
    schedule_text = _read_text(args.schedule)
    run = _Run("validate", {}, args.threads)
    run.add_input(_input_label(args.instance), instance_text)
    run.add_input(_input_label(args.schedule), schedule_text)
    instance = parse_instance(instance_text)
    schedule, load_findings = _load_schedule_csv(instance, schedule_text)
    report = validate(instance, schedule)
    findings = load_findings + list(report.findings)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "kind": "validation_report",
        "manifest_digest": run.digest,
        "ok": not findings,
        "findings": [
            {
                "code": f.code,
                "mission": f.mission,
                "resource": f.resource,
                "detail": f.detail,
            }
            for f in findings
        ],
    }
    _write_text(args.output, _dump_json(payload))
    run.write_sidecar(args.output)
    return 0 if not findings else 1


def _cmd_report(args: argparse.Namespace) -> int:
    run = _Run("report", {}, args.threads)
    payloads = []
    for path in args.inputs:
        text = _read_text(path)
        run.add_input(_input_label(path), text)
        doc = _load_document(text)
        _check_schema(doc, "solve report")
        if doc.get("kind") != "solve_report":
            raise InstanceError(f"{path}: not a solve report document")
        payloads.append(doc)
    rows = report_rows_from_payloads(payloads)
    _write_text(args.output, write_report_csv(rows))
    run.write_sidecar(args.output)

    if not args.no_figures:
        figure_dir: Path | None = None
        stem = "report"
        if args.figures:
            figure_dir = Path(args.figures)
        elif args.output and args.output != "-":
            figure_dir = Path(args.output).parent
            stem = Path(args.output).stem
        if figure_dir is not None:
            written = render_report_figures(rows, figure_dir, stem)
            for p in written:
                log.info("wrote %s", p)
    return 0


# --- argument parsing ---------------------------------------------------


def _parse_horizon(text: str) -> float:
    raw = text.strip().lower()
    try:
        if raw.endswith("h"):
            return float(raw[:-1]) * 3600.0
        return float(raw)
    except ValueError:
        raise InstanceError(f"cannot parse horizon {text!r}; use seconds or e.g. 24h") from None


def _default_threads() -> int:
    env = os.environ.get("SATSCHED_THREADS")
    if env is None:
        return 1
    try:
        value = int(env)
    except ValueError:
        raise InstanceError(f"SATSCHED_THREADS must be an integer, got {env!r}") from None
    if value < 1:
        raise InstanceError("SATSCHED_THREADS must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="satsched",
        description="Observation scheduling: generation, preprocessing, MILP export, exact solving.",
    )
    parser.add_argument("--version", action="version", version=f"satsched {__version__}")
    parser.add_argument(
        "--threads",
        type=int,
        default=None,
        help="worker threads (default: SATSCHED_THREADS or 1); results never depend on it",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a random instance")
    p.add_argument("--style", choices=STYLES, required=True)
    p.add_argument("--missions", type=int, required=True)
    p.add_argument("--resources", type=int, required=True)
    p.add_argument("--horizon", default="24h", help="seconds or e.g. 24h (default 24h)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("preprocess", help="preassign and analyze an instance")
    p.add_argument("input", help="instance JSON path or -")
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=_cmd_preprocess)

    p = sub.add_parser("stats", help="per-resource contention statistics CSV")
    p.add_argument("input", help="instance or preprocess JSON path or -")
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--summary", help="write per-instance summary CSV here")
    p.add_argument("--figure", help="render the conflict profile figure here")
    p.add_argument("--name", help="instance label (default: input file stem)")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("build", help="export a MILP in LP or MPS form")
    p.add_argument("input", help="instance or preprocess JSON path or -")
    p.add_argument("--formulation", choices=("baseline", "improved"), default="improved")
    p.add_argument("--objective", choices=("count", "weight"), default="weight")
    p.add_argument("--format", choices=("lp", "mps"), default="lp")
    p.add_argument("--no-preprocess", action="store_true")
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=_cmd_build)

    p = sub.add_parser("solve", help="solve exactly by branch and bound")
    p.add_argument("input", help="instance or preprocess JSON path or -")
    p.add_argument("--objective", choices=("count", "weight"), default="weight")
    p.add_argument("--time-limit", type=float, default=None, help="seconds")
    p.add_argument("--node-limit", type=int, default=None)
    p.add_argument("--no-preprocess", action="store_true")
    p.add_argument("--oracle", action="store_true", help="cross-check with brute force")
    p.add_argument("--seed", type=int, default=0, help="recorded; search is deterministic")
    p.add_argument("--schedule", help="also write the schedule CSV here")
    p.add_argument("--name", help="instance label (default: input file stem)")
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("validate", help="check a schedule CSV against an instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--schedule", required=True)
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("report", help="merge solve reports into CSV and figures")
    p.add_argument("inputs", nargs="+", help="solve report JSON paths")
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--figures", help="directory for figures (default: beside the CSV)")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        if args.threads is None:
            args.threads = _default_threads()
        elif args.threads < 1:
            parser.error("--threads must be >= 1")
        return args.func(args)
    except BrokenPipeError:
        return 1
    except Exception as exc:
        log.debug("unhandled error", exc_info=True)
        print(f"satsched: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
