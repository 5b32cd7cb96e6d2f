#!/usr/bin/env python3
"""Stand-alone DIMACS solver with SAT-competition output, backed by MiniSat 2.2.

Usage: minisat_shim.py FILE.cnf

Serves as the external solver for differential tests (``--external`` or
$SHUTTLESAT_SOLVER); it shares no code with the package. Exit status
follows the competition convention: 10 SAT, 20 UNSAT.
"""

import sys

from pysat.formula import CNF
from pysat.solvers import Minisat22


def main(path: str) -> int:
    cnf = CNF(from_file=path)
    with Minisat22(bootstrap_with=cnf.clauses) as solver:
        if not solver.solve():
            print("s UNSATISFIABLE")
            return 20
        model = solver.get_model() or []
    # variables that appear in no clause are absent from the model
    seen = {abs(lit) for lit in model}
    model += [-v for v in range(1, cnf.nv + 1) if v not in seen]
    model.sort(key=abs)
    print("s SATISFIABLE")
    for k in range(0, len(model), 20):
        print("v " + " ".join(map(str, model[k:k + 20])))
    print("v 0")
    return 10


if __name__ == "__main__":
    if len(sys.argv) != 2:
        sys.exit(__doc__)
    sys.exit(main(sys.argv[1]))
