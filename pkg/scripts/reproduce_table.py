#!/usr/bin/env python3
"""Run bench presets and write the row and per-run CSVs plus a text table.

    python scripts/reproduce_table.py --preset racetrack-small --preset lattice-small --runs 10
    python scripts/reproduce_table.py --preset table --budget 300 --out results/
"""

import argparse
import logging
from pathlib import Path

from shuttlesat.bench import DEFAULT_BUDGET, resolve_presets, rows_csv, rows_table, run_bench, runs_csv, with_overrides


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--preset", action="append", default=[])
    ap.add_argument("--runs", type=int, default=10)
    ap.add_argument("--seed-base", type=int, default=0)
    ap.add_argument("--budget", type=float, default=DEFAULT_BUDGET, help="seconds per run")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")

    specs = with_overrides(resolve_presets(args.preset or ["racetrack-small", "lattice-small"]),
                           runs=args.runs, seed_base=args.seed_base, budget=args.budget)

    def progress(spec, rec):
        logging.info("%s %s |C|=%d seed=%d -> %s T=%s lb=%d %.1fs", spec.layout_id, spec.algorithm,
                     spec.chains, rec.seed, rec.status, rec.t_hat, rec.lower_bound, rec.seconds)

    rows = run_bench(specs, workers=args.workers, progress=progress)
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "rows.csv").write_text(rows_csv(rows))
    (args.out / "runs.csv").write_text(runs_csv(rows))
    table = rows_table(rows)
    (args.out / "table.txt").write_text(table)
    print(table, end="")


if __name__ == "__main__":
    main()
