#!/usr/bin/env python3
"""Mean minimal horizon under different node-crossing rules and interface attachments.

Each configuration solves the same seeded placements, so the columns are
directly comparable. Attachments:

  adjacent     exit (0, n-1), entry (1, n-1)  (library default)
  same-corner  exit and entry both at (0, n-1)
  bottom       exit (m-1, n-1), entry (m-1, 0)
"""

import argparse
import itertools
from statistics import mean

from shuttlesat.layout import build_grid_layout
from shuttlesat.problem import full_register_access_sequence, make_problem, qft_sequence
from shuttlesat.solver import MINIMAL, SolveBudget, solve_minimal
from shuttlesat.verify import ENCODING, PHYSICAL

ATTACH = {
    "adjacent": lambda m, n: ((0, n - 1), (1, n - 1)),
    "same-corner": lambda m, n: ((0, n - 1), (0, n - 1)),
    "bottom": lambda m, n: ((m - 1, n - 1), (m - 1, 0)),
}

ROWS = {
    "racetrack-6": ((2, 2, 1, 5), 6, None),
    "lattice3-6": ((3, 3, 1, 1), 6, None),
    "lattice4-6": ((4, 4, 1, 1), 6, None),
    "lattice3-12": ((3, 3, 1, 1), 12, None),
    "racetrack-qft5": ((2, 2, 1, 5), 5, 5),
}


def run(grid, chains, qft, attach, mode, seeds, budget):
    exit_, entry = ATTACH[attach](grid[0], grid[1])
    layout = build_grid_layout(*grid, exit=exit_, entry=entry)
    seq = qft_sequence(qft) if qft else full_register_access_sequence(chains)
    vals, bounds = [], []
    for seed in seeds:
        out = solve_minimal(make_problem(layout, chains, seed, sequence=seq), SolveBudget(total=budget),
                            crossing=mode)
        if out.kind == MINIMAL:
            vals.append(out.t_hat)
        else:
            bounds.append(out.lower_bound)
    return vals, bounds


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--rows", nargs="+", default=["racetrack-6", "lattice3-6", "lattice4-6"], choices=ROWS)
    ap.add_argument("--attach", nargs="+", default=list(ATTACH), choices=ATTACH)
    ap.add_argument("--modes", nargs="+", default=[ENCODING, PHYSICAL], choices=[ENCODING, PHYSICAL])
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--budget", type=float, default=300.0, help="seconds per run")
    args = ap.parse_args()
    seeds = range(args.seeds)
    print(f"{'row':<16} {'attachment':<12} {'crossing':<9} {'mean T^':>8}  runs  timeouts")
    for row, attach, mode in itertools.product(args.rows, args.attach, args.modes):
        grid, chains, qft = ROWS[row]
        vals, bounds = run(grid, chains, qft, attach, mode, seeds, args.budget)
        shown = f"{mean(vals):.2f}" if vals else f">{max(bounds)}"
        print(f"{row:<16} {attach:<12} {mode:<9} {shown:>8}  {len(vals):>4}  {len(bounds):>8}", flush=True)


if __name__ == "__main__":
    main()
