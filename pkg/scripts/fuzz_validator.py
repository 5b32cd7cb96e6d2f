#!/usr/bin/env python3
"""Mutation fuzzing of the schedule validator against the CNF encoding.

For each instance, solve it, then apply seeded random mutations to the
schedule. A mutation is rule-breaking when the encoding with the whole
schedule pinned as unit assumptions is unsatisfiable. The validator must
flag exactly those mutations.
"""

import argparse
from collections import Counter

from pysat.solvers import Minisat22

from shuttlesat.encoder import encode
from shuttlesat.layout import build_grid_layout
from shuttlesat.problem import make_problem
from shuttlesat.solver import solve_minimal
from shuttlesat.verify import ENCODING, PHYSICAL, mutate_schedule, validate_schedule


def encodable(problem, schedule, mode):
    T = schedule.horizon
    if any(not 1 <= t <= T for t in schedule.satisfaction_times):
        return False
    cnf = encode(problem, T, crossing=mode)
    vm, ne = cnf.varmap, problem.layout.num_edges
    units = [vm.x(t, g, i) if g == e else -vm.x(t, g, i)
             for t, row in enumerate(schedule.positions) for i, e in enumerate(row) for g in range(ne)]
    units += [vm.s(t, j) if t == tj else -vm.s(t, j)
              for j, tj in enumerate(schedule.satisfaction_times) for t in range(1, T + 1)]
    with Minisat22(bootstrap_with=cnf.clauses) as s:
        return s.solve(assumptions=units)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grid", nargs=4, type=int, default=[3, 3, 1, 1], metavar=("M", "N", "V", "H"))
    ap.add_argument("--chains", type=int, default=4)
    ap.add_argument("--instances", type=int, default=5)
    ap.add_argument("--mutations", type=int, default=100)
    ap.add_argument("--mode", choices=[ENCODING, PHYSICAL], default=ENCODING)
    args = ap.parse_args()
    layout = build_grid_layout(*args.grid)
    totals = Counter()
    for seed in range(args.instances):
        p = make_problem(layout, args.chains, seed)
        sched = solve_minimal(p, crossing=args.mode).schedule
        c = Counter()
        for k in range(args.mutations):
            m = mutate_schedule(sched, k, layout.num_edges)
            flagged = not validate_schedule(p, m, args.mode).ok
            breaks = not encodable(p, m, args.mode)
            c["breaking"] += breaks
            c["false-accept"] += breaks and not flagged
            c["false-reject"] += flagged and not breaks
        print(f"seed {seed}: T={sched.horizon} " + " ".join(f"{k}={c[k]}" for k in
                                                          ("breaking", "false-accept", "false-reject")))
        totals.update(c)
    print("total: " + " ".join(f"{k}={v}" for k, v in sorted(totals.items())))


if __name__ == "__main__":
    main()
