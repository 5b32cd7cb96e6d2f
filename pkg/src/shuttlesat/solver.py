"""Iterative deepening over the horizon, SAT backends and DIMACS export."""

from __future__ import annotations

import logging
import multiprocessing
import os
import shlex
import subprocess
import tempfile
import threading
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable

from pysat.solvers import Solver

from .encoder import CnfInstance, VarMap, decode_schedule, encode
from .problem import ProblemInstance
from .verify import ENCODING, Schedule, validate_schedule

log = logging.getLogger(__name__)

SAT, UNSAT, TIMEOUT = "sat", "unsat", "timeout"
MINIMAL, PROVEN_UNSAT_UP_TO, EXHAUSTED = "minimal", "proven_unsat_up_to", "exhausted"

SOLVER_ENV = "SHUTTLESAT_SOLVER"


class BackendError(RuntimeError):
    pass


class InternalError(RuntimeError):
    pass


# -- backends -----------------------------------------------------------------------

# solvers whose search honours Solver.interrupt(); others get a killable child process
INTERRUPTIBLE = frozenset({"glucose3", "glucose4", "glucose42", "gluecard3", "gluecard4", "maplechrono",
                           "maplecm", "maplesat", "mergesat3", "minicard", "minisat22", "minisat-gh"})


def _pysat_solve(name: str, clauses: list[list[int]]) -> tuple[str, list[int] | None]:
    with Solver(name=name, bootstrap_with=clauses) as solver:
        if solver.solve():
            return SAT, solver.get_model()
        return UNSAT, None


def _child(conn, name, clauses):
    try:
        conn.send(_pysat_solve(name, clauses))
    except Exception as exc:  # reported to the parent as a backend failure
        conn.send(("error", repr(exc)))
    finally:
        conn.close()


class PysatBackend:
    """In-process solver from PySAT (CaDiCaL 1.5.3 unless told otherwise)."""

    def __init__(self, name: str = "cadical153"):
        self.name = name

    def solve(self, num_vars: int, clauses: list[list[int]],
              time_limit: float | None = None) -> tuple[str, list[int] | None]:
        try:
            if time_limit is None:
                return _pysat_solve(self.name, clauses)
            if self.name in INTERRUPTIBLE:
                return self._interruptible(clauses, time_limit)
            return self._forked(clauses, time_limit)
        except BackendError:
            raise
        except Exception as exc:  # pysat raises bare exceptions for unknown names etc.
            raise BackendError(f"{self.name}: {exc}") from exc

    def _interruptible(self, clauses, time_limit):
        with Solver(name=self.name, bootstrap_with=clauses) as solver:
            timer = threading.Timer(time_limit, solver.interrupt)
            timer.start()
            try:
                res = solver.solve_limited(expect_interrupt=True)
            finally:
                timer.cancel()
            if res is None:
                return TIMEOUT, None
            return (SAT, solver.get_model()) if res else (UNSAT, None)

    def _forked(self, clauses, time_limit):
        ctx = multiprocessing.get_context("fork")
        recv, send = ctx.Pipe(duplex=False)
        proc = ctx.Process(target=_child, args=(send, self.name, clauses), daemon=True)
        proc.start()
        send.close()
        try:
            if not recv.poll(time_limit):
                return TIMEOUT, None
            status, payload = recv.recv()
        except EOFError:
            raise BackendError(f"{self.name} worker died (exit code {proc.exitcode})") from None
        finally:
            if proc.is_alive():
                proc.kill()
            proc.join()
            recv.close()
        if status == "error":
            raise BackendError(f"{self.name}: {payload}")
        return status, payload


class ExternalBackend:
    """Any DIMACS solver binary printing SAT-competition output (``s`` / ``v`` lines)."""

    def __init__(self, command: str | list[str]):
        self.command = shlex.split(command) if isinstance(command, str) else list(command)
        self.name = Path(self.command[0]).name

    def solve(self, num_vars: int, clauses: list[list[int]],
              time_limit: float | None = None) -> tuple[str, list[int] | None]:
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "instance.cnf"
            path.write_text(dimacs_text(num_vars, clauses))
            try:
                proc = subprocess.run(self.command + [str(path)], capture_output=True, text=True,
                                      timeout=time_limit)
            except subprocess.TimeoutExpired:
                return TIMEOUT, None
            except OSError as exc:
                raise BackendError(f"cannot run {self.command}: {exc}") from exc
        return parse_solver_output(proc.stdout, proc.returncode, proc.stderr)


def parse_solver_output(stdout: str, returncode: int = 0, stderr: str = "") -> tuple[str, list[int] | None]:
    status, model = None, []
    for line in stdout.splitlines():
        if line.startswith("s "):
            status = line[2:].strip()
        elif line.startswith("v "):
            model.extend(int(tok) for tok in line[2:].split() if tok != "0")
    if status == "SATISFIABLE":
        return SAT, model
    if status == "UNSATISFIABLE":
        return UNSAT, None
    if status == "UNKNOWN":
        return TIMEOUT, None
    raise BackendError(f"unrecognised solver output (exit {returncode}): {stdout[-400:]!r} {stderr[-400:]!r}")


def default_backend():
    cmd = os.environ.get(SOLVER_ENV)
    return ExternalBackend(cmd) if cmd else PysatBackend()


# -- DIMACS -------------------------------------------------------------------------

def dimacs_text(num_vars: int, clauses: Iterable[list[int]]) -> str:
    clauses = list(clauses)
    lines = [f"p cnf {num_vars} {len(clauses)}"]
    lines += [" ".join(map(str, c + [0])) for c in clauses]
    return "\n".join(lines) + "\n"


def sidecar_text(varmap: VarMap) -> str:
    vm = varmap
    lines = ["c shuttlesat variable map",
             f"c horizon {vm.horizon} edges {vm.num_edges} chains {vm.num_chains} elements {vm.num_elements}"]
    for t in range(vm.horizon + 1):
        for e in range(vm.num_edges):
            for i in range(vm.num_chains):
                lines.append(f"x {vm.x(t, e, i)} {t} {e} {i}")
    for t in range(1, vm.horizon + 1):
        for j in range(vm.num_elements):
            lines.append(f"s {vm.s(t, j)} {t} {j}")
    return "\n".join(lines) + "\n"


def export_dimacs(cnf: CnfInstance, destination, sidecar=None) -> tuple[Path, Path]:
    """Write ``destination`` (DIMACS CNF) and a variable-map sidecar next to it (``.map``)."""
    dest = Path(destination)
    side = Path(sidecar) if sidecar is not None else dest.with_suffix(dest.suffix + ".map")
    dest.write_text(dimacs_text(cnf.num_vars, cnf.clauses))
    side.write_text(sidecar_text(cnf.varmap))
    return dest, side


def read_dimacs(path) -> tuple[int, list[list[int]]]:
    num_vars, clauses, cur = 0, [], []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            num_vars = int(line.split()[2])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(cur)
                cur = []
            else:
                cur.append(lit)
    return num_vars, clauses


def read_sidecar(path) -> VarMap:
    """Rebuild the variable map from a sidecar, checking every listed id."""
    lines = Path(path).read_text().splitlines()
    head = lines[1].split()
    if head[:2] != ["c", "horizon"]:
        raise ValueError("not a shuttlesat sidecar")
    vals = dict(zip(head[1::2], head[2::2]))
    vm = VarMap(int(vals["horizon"]), int(vals["edges"]), int(vals["chains"]), int(vals["elements"]))
    for line in lines[2:]:
        kind, var, *idx = line.split()
        want = vm.x(*map(int, idx)) if kind == "x" else vm.s(*map(int, idx))
        if int(var) != want:
            raise ValueError(f"sidecar entry {line!r} disagrees with the variable layout")
    return vm


# -- solving ------------------------------------------------------------------------

@dataclass
class SolveBudget:
    per_horizon: float | None = None   # seconds per decision problem
    total: float | None = None         # seconds for the whole sweep
    max_T: int = 200

    def __post_init__(self):
        for name in ("per_horizon", "total"):
            val = getattr(self, name)
            if val is not None and val <= 0:
                raise ValueError(f"{name} must be positive")
        if self.max_T < 1:
            raise ValueError("max_T must be positive")


@dataclass
class HorizonLog:
    T: int
    result: str
    encode_seconds: float
    solve_seconds: float
    num_vars: int = 0
    num_clauses: int = 0

    def to_dict(self) -> dict[str, Any]:
        return dict(self.__dict__)


@dataclass
class FixedResult:
    status: str
    schedule: Schedule | None
    log: HorizonLog


@dataclass
class SolveOutcome:
    kind: str
    t_hat: int | None = None
    lower_bound: int = 0      # largest horizon proven infeasible
    schedule: Schedule | None = None
    log: list[HorizonLog] = field(default_factory=list)

    @property
    def encode_seconds(self) -> float:
        return sum(h.encode_seconds for h in self.log)

    @property
    def solve_seconds(self) -> float:
        return sum(h.solve_seconds for h in self.log)

    def to_dict(self) -> dict[str, Any]:
        return {"status": self.kind, "t_hat": self.t_hat, "lower_bound": self.lower_bound,
                "encode_seconds": round(self.encode_seconds, 6), "solve_seconds": round(self.solve_seconds, 6),
                "log": [h.to_dict() for h in self.log],
                "schedule": self.schedule.to_dict() if self.schedule else None}


def solve_fixed(problem: ProblemInstance, T: int, time_limit: float | None = None,
                backend=None, validate: bool = True, crossing: str = ENCODING) -> FixedResult:
    """Decide whether ``problem`` has a schedule with exactly T steps."""
    if T < 1:
        raise ValueError("horizon must be at least 1")
    backend = backend or default_backend()
    t0 = time.perf_counter()
    cnf = encode(problem, T, crossing=crossing)
    t1 = time.perf_counter()
    status, model = backend.solve(cnf.num_vars, cnf.clauses, time_limit)
    t2 = time.perf_counter()
    entry = HorizonLog(T, status, t1 - t0, t2 - t1, cnf.num_vars, cnf.num_clauses)
    log.debug("T=%d %s (%d vars, %d clauses, %.2fs)", T, status, cnf.num_vars, cnf.num_clauses, t2 - t0)
    schedule = None
    if status == SAT:
        schedule = decode_schedule(model, cnf.varmap)
        if validate:
            report = validate_schedule(problem, schedule, crossing)
            if not report.ok:
                raise InternalError("solver schedule fails validation:\n" + report.to_text())
    return FixedResult(status, schedule, entry)


def _probe(args):
    problem, T, limit, backend, crossing = args
    return solve_fixed(problem, T, limit, backend, crossing=crossing)


def solve_minimal(problem: ProblemInstance, budget: SolveBudget | None = None, start_T: int | None = None,
                  backend=None, lower_bound_skip: bool = True, workers: int = 1,
                  crossing: str = ENCODING) -> SolveOutcome:
    """Probe T = start, start+1, ... until the first satisfiable horizon.

    Every schedule serves its sequence elements at distinct steps >= 1, so
    horizons below |S| are infeasible and skipped by default. With
    ``workers > 1`` consecutive horizons are probed in parallel; a horizon is
    only reported minimal once every smaller probed horizon came back UNSAT.
    A ``start_T`` above |S| asserts that the skipped horizons are infeasible.
    """
    budget = budget or SolveBudget()
    backend = backend or default_backend()
    if start_T is None:
        start_T = len(problem.sequence) if lower_bound_skip else 1
    if start_T < 1:
        raise ValueError("start_T must be at least 1")
    # horizons below |S| are infeasible whatever the search does
    out = SolveOutcome(PROVEN_UNSAT_UP_TO, lower_bound=len(problem.sequence) - 1)
    deadline = time.monotonic() + budget.total if budget.total is not None else None
    T = start_T
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        while T <= budget.max_T:
            limit = budget.per_horizon
            if deadline is not None:
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    return out
                limit = remaining if limit is None else min(limit, remaining)
            batch = list(range(T, min(T + max(workers, 1), budget.max_T + 1)))
            if pool is None:
                results = [solve_fixed(problem, T, limit, backend, crossing=crossing)]
            else:
                results = list(pool.map(_probe, [(problem, u, limit, backend, crossing) for u in batch]))
            for res in results:
                out.log.append(res.log)
                if res.status == SAT:
                    out.kind, out.t_hat, out.schedule = MINIMAL, res.log.T, res.schedule
                    return out
                if res.status == TIMEOUT:
                    return out
                if res.log.T == out.lower_bound + 1:
                    out.lower_bound = res.log.T
            T = batch[-1] + 1
        out.kind = EXHAUSTED
        return out
    finally:
        if pool is not None:
            pool.shutdown(cancel_futures=True)
