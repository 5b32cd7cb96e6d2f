"""Command-line entry point (``shuttlesat``).

Exit codes: 0 minimal schedule / success, 1 validation found violations,
2 usage, 3 unreadable or inconsistent input, 4 internal error, 10 only a
lower bound was established, 11 oracle found no schedule within its cap.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .bench import (DEFAULT_BUDGET, REFERENCE_BUDGET, PRESETS, BenchError, load_specs, resolve_presets,
                    rows_csv, rows_table, run_bench, runs_csv, with_overrides)
from .encoder import DecodeError, encode
from .layout import LayoutError, build_grid_layout
from .problem import (ProblemError, full_register_access_sequence, load_problem, make_problem,
                      qft_sequence, serialize_problem)
from .solver import (MINIMAL, BackendError, ExternalBackend, InternalError, PysatBackend, SolveBudget,
                     default_backend, export_dimacs, solve_minimal)
from .verify import (ENCODING, ORACLE_GUARD, PHYSICAL, OracleGuardError, ScheduleError, load_schedule,
                     oracle_minimal, validate_schedule)
from .viz import render_schedule

EXIT_OK, EXIT_VIOLATIONS, EXIT_USAGE, EXIT_PARSE, EXIT_INTERNAL = 0, 1, 2, 3, 4
EXIT_BOUND_ONLY, EXIT_UNREACHABLE = 10, 11

log = logging.getLogger("shuttlesat")


class UsageError(Exception):
    pass


def _write(text: str, dest: str | None):
    if dest is None or dest == "-":
        sys.stdout.write(text)
    else:
        Path(dest).write_text(text, encoding="utf-8")


def _backend(args):
    if getattr(args, "external", None):
        return ExternalBackend(args.external)
    if getattr(args, "backend", None):
        return PysatBackend(args.backend)
    return default_backend()


def _positive(kind):
    def conv(text):
        val = kind(text)
        if val <= 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return val
    return conv


# -- subcommands ------------------------------------------------------------

def cmd_solve(args) -> int:
    problem = load_problem(args.problem)
    if args.min_T is not None and args.max_T is not None and args.min_T > args.max_T:
        raise UsageError("--min-T exceeds --max-T")
    budget = SolveBudget(per_horizon=args.per_horizon_timeout, total=args.total_timeout, max_T=args.max_T or 200)
    out = solve_minimal(problem, budget, start_T=args.min_T, backend=_backend(args),
                        workers=args.workers, crossing=args.crossing)
    doc = out.to_dict()
    doc["problem"] = str(args.problem)
    if args.validate and out.schedule is not None:
        doc["validation"] = validate_schedule(problem, out.schedule, args.crossing).to_dict()
    if args.export_dimacs:
        dest = Path(args.export_dimacs)
        dest.mkdir(parents=True, exist_ok=True)
        for entry in out.log:
            export_dimacs(encode(problem, entry.T, crossing=args.crossing), dest / f"T{entry.T:03d}.cnf")
    _write(json.dumps(doc, indent=2) + "\n", args.output)
    if out.kind == MINIMAL:
        log.info("minimal horizon %d", out.t_hat)
        return EXIT_OK
    log.warning("%s: horizons up to %d proven infeasible", out.kind, out.lower_bound)
    return EXIT_BOUND_ONLY


def cmd_oracle(args) -> int:
    problem = load_problem(args.problem)
    try:
        res = oracle_minimal(problem, args.cap, guard=None if args.no_guard else ORACLE_GUARD,
                             eager=not args.lazy, mode=args.crossing)
    except OracleGuardError as exc:
        raise UsageError(f"{exc}; pass --no-guard to search anyway") from None
    _write(json.dumps(res.to_dict(), indent=2) + "\n", args.output)
    return EXIT_OK if res.reachable else EXIT_UNREACHABLE


def cmd_validate(args) -> int:
    problem = load_problem(args.problem)
    schedule = load_schedule(args.schedule)
    report = validate_schedule(problem, schedule, args.mode)
    _write(json.dumps(report.to_dict(), indent=2) + "\n" if args.json else report.to_text(), args.output)
    return EXIT_OK if report.ok else EXIT_VIOLATIONS


def cmd_viz(args) -> int:
    problem = load_problem(args.problem)
    schedule = load_schedule(args.schedule)
    _write(render_schedule(problem, schedule), args.output)
    return EXIT_OK


def cmd_export(args) -> int:
    problem = load_problem(args.problem)
    cnf = encode(problem, args.T, crossing=args.crossing)
    dest, side = export_dimacs(cnf, args.output, args.sidecar)
    log.info("wrote %s (%d vars, %d clauses) and %s", dest, cnf.num_vars, cnf.num_clauses, side)
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.list:
        for name, group in PRESETS.items():
            rows = ", ".join(f"{s.layout_id} {s.algorithm} |C|={s.chains}" for s in group)
            print(f"{name}: {rows}")
        return EXIT_OK
    if not args.preset and not args.spec:
        raise UsageError("give --preset and/or --spec (or --list)")
    specs = resolve_presets(args.preset or [])
    for path in args.spec or []:
        specs.extend(load_specs(path))
    budget = REFERENCE_BUDGET if args.reference_budget else args.budget
    specs = with_overrides(specs, runs=args.runs, seed_base=args.seed_base, budget=budget)

    def progress(spec, rec):
        log.info("%s %s |C|=%d seed=%d: %s T=%s (%.1fs)", spec.layout_id, spec.algorithm, spec.chains,
                 rec.seed, rec.status, rec.t_hat, rec.seconds)

    rows = run_bench(specs, workers=args.workers, backend=_backend(args), progress=progress)
    if args.csv:
        Path(args.csv).write_text(rows_csv(rows), encoding="utf-8")
    if args.runs_csv:
        Path(args.runs_csv).write_text(runs_csv(rows), encoding="utf-8")
    _write(rows_table(rows), args.output)
    return EXIT_OK


def cmd_generate(args) -> int:
    layout = build_grid_layout(*args.grid, exit=args.exit, entry=args.entry)
    if args.qft is not None:
        seq = qft_sequence(args.qft)
        chains = args.qft
    else:
        chains = args.chains
        seq = full_register_access_sequence(chains)
    problem = make_problem(layout, chains, args.seed, sequence=seq, label=args.label)
    _write(serialize_problem(problem), args.output)
    return EXIT_OK


# -- parser -----------------------------------------------------------------

def _add_backend(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--backend", metavar="NAME", help="PySAT solver name (default cadical153)")
    g.add_argument("--external", metavar="CMD",
                   help="external DIMACS solver command; also read from $SHUTTLESAT_SOLVER")


def _add_crossing(p):
    p.add_argument("--crossing", choices=(ENCODING, PHYSICAL), default=ENCODING,
                   help="node-crossing rule: charge every node of the edge arrived on (default) "
                        "or only the nodes passed")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="shuttlesat", description="Minimal shuttling schedules for QCCD memory zones.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="find the minimal horizon by iterative deepening")
    p.add_argument("problem")
    p.add_argument("--min-T", type=_positive(int), help="first horizon to probe (default |S|)")
    p.add_argument("--max-T", type=_positive(int), help="give up after this horizon (default 200)")
    p.add_argument("--per-horizon-timeout", type=_positive(float), metavar="SEC")
    p.add_argument("--total-timeout", type=_positive(float), metavar="SEC")
    p.add_argument("--workers", type=_positive(int), default=1, help="probe this many horizons at once")
    p.add_argument("--export-dimacs", metavar="DIR", help="also write every probed instance as DIMACS")
    p.add_argument("--validate", action="store_true", help="append a validation report")
    p.add_argument("-o", "--output", help="result document (default stdout)")
    _add_backend(p)
    _add_crossing(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("oracle", help="exhaustive breadth-first search (small instances only)")
    p.add_argument("problem")
    p.add_argument("--cap", type=_positive(int), default=30, help="deepest horizon searched")
    p.add_argument("--no-guard", action="store_true", help="skip the instance size guard")
    p.add_argument("--lazy", action="store_true", help="also branch on not advancing the sequence")
    p.add_argument("-o", "--output")
    _add_crossing(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("validate", help="check a schedule against the movement rules")
    p.add_argument("problem")
    p.add_argument("schedule", help="schedule or solve result document")
    p.add_argument("--mode", choices=(ENCODING, PHYSICAL), default=ENCODING)
    p.add_argument("--json", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("viz", help="render a schedule as ASCII frames")
    p.add_argument("problem")
    p.add_argument("schedule")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_viz)

    p = sub.add_parser("export-dimacs", help="write the CNF for one horizon plus a variable map")
    p.add_argument("problem")
    p.add_argument("-T", "--T", dest="T", type=_positive(int), required=True)
    p.add_argument("-o", "--output", required=True, help="DIMACS file")
    p.add_argument("--sidecar", help="variable map (default OUTPUT.map)")
    _add_crossing(p)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("bench", help="run table configurations over seeded placements")
    p.add_argument("--preset", action="append", help=f"preset name, repeatable ({len(PRESETS)} available)")
    p.add_argument("--spec", action="append", help="JSON bench spec file, repeatable")
    p.add_argument("--list", action="store_true", help="list presets and exit")
    p.add_argument("--runs", type=_positive(int))
    p.add_argument("--seed-base", type=int)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--budget", type=_positive(float), help=f"seconds per run (default {DEFAULT_BUDGET:g})")
    g.add_argument("--reference-budget", action="store_true", help=f"use {REFERENCE_BUDGET:g} s per run")
    p.add_argument("--workers", type=_positive(int), default=1)
    p.add_argument("--csv", help="row summary CSV")
    p.add_argument("--runs-csv", help="per-run CSV")
    p.add_argument("-o", "--output", help="text table (default stdout)")
    _add_backend(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("generate", help="write a problem document for a grid layout")
    p.add_argument("--grid", nargs=4, type=int, metavar=("M", "N", "V", "H"), required=True)
    p.add_argument("--exit", nargs=2, type=int, metavar=("ROW", "COL"))
    p.add_argument("--entry", nargs=2, type=int, metavar=("ROW", "COL"))
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--chains", type=_positive(int), help="full register access over this many chains")
    g.add_argument("--qft", type=_positive(int), metavar="Q", help="QFT sequence on Q single-qubit chains")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--label")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_generate)
    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors, 0 on --help
        return int(exc.code or 0)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"shuttlesat {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ProblemError, ScheduleError, LayoutError, BenchError, OSError) as exc:
        print(f"shuttlesat {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (InternalError, DecodeError, BackendError) as exc:
        print(f"shuttlesat {args.command}: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def main_entry():
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
