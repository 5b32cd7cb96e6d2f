"""Benchmark harness: seeded random placements, table rows, CSV output."""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from statistics import mean
from typing import Any, Iterable

from .layout import build_grid_layout, memory_edge_count
from .problem import full_register_access_sequence, make_problem, qft_sequence
from .solver import MINIMAL, SolveBudget, default_backend, solve_minimal

FRA, QFT = "fra", "qft"
DEFAULT_BUDGET = 300.0
REFERENCE_BUDGET = 5000.0


class BenchError(ValueError):
    pass


@dataclass(frozen=True)
class BenchSpec:
    suite: str                  # racetrack | lattice
    m: int
    n: int
    v: int
    h: int
    chains: int
    family: str = FRA           # fra | qft
    qubits: int | None = None   # qft only; one qubit per chain
    runs: int = 10
    seed_base: int = 0
    budget: float = DEFAULT_BUDGET   # seconds per run, whole horizon sweep
    max_T: int = 200

    def __post_init__(self):
        if self.suite not in ("racetrack", "lattice"):
            raise BenchError(f"unknown suite {self.suite!r}")
        if self.family not in (FRA, QFT):
            raise BenchError(f"unknown sequence family {self.family!r}")
        if self.family == QFT and self.qubits != self.chains:
            raise BenchError("qft rows need qubits == chains")
        if self.runs < 1:
            raise BenchError("runs must be at least 1")
        if self.budget <= 0:
            raise BenchError("budget must be positive")
        if not 1 <= self.chains <= self.memory_edges:
            raise BenchError(f"{self.chains} chains do not fit into {self.memory_edges} memory edges")

    @property
    def memory_edges(self) -> int:
        return memory_edge_count(self.m, self.n, self.v, self.h)

    @property
    def layout_id(self) -> str:
        return f"L({self.m},{self.n},{self.v},{self.h})"

    @property
    def algorithm(self) -> str:
        return "FRA" if self.family == FRA else f"QFT q={self.qubits}"

    def sequence(self):
        if self.family == FRA:
            return full_register_access_sequence(self.chains)
        return qft_sequence(self.qubits)

    def problem(self, run: int):
        layout = build_grid_layout(self.m, self.n, self.v, self.h)
        seed = self.seed_base + run
        return make_problem(layout, self.chains, seed, sequence=self.sequence(),
                            label=f"{self.suite} {self.layout_id} {self.algorithm}")

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> BenchSpec:
        known = {f.name for f in fields(cls)}
        extra = set(doc) - known
        if extra:
            raise BenchError(f"unknown bench spec keys {sorted(extra)}")
        try:
            return cls(**doc)
        except TypeError as exc:
            raise BenchError(str(exc)) from None


@dataclass
class RunRecord:
    seed: int
    status: str
    t_hat: int | None
    lower_bound: int
    encode_seconds: float
    solve_seconds: float
    horizons: int

    @property
    def seconds(self) -> float:
        return self.encode_seconds + self.solve_seconds


@dataclass
class BenchRow:
    spec: BenchSpec
    records: list[RunRecord] = field(default_factory=list)

    @property
    def completed(self) -> list[RunRecord]:
        return [r for r in self.records if r.status == MINIMAL]

    @property
    def timeouts(self) -> int:
        return len(self.records) - len(self.completed)

    @property
    def mean_t_hat(self) -> float | None:
        done = self.completed
        return mean(r.t_hat for r in done) if done else None

    @property
    def mean_seconds(self) -> float | None:
        done = self.completed
        return mean(r.seconds for r in done) if done else None

    @property
    def best_lower_bound(self) -> int:
        """Largest horizon proven infeasible by any run that did not finish."""
        failed = [r.lower_bound for r in self.records if r.status != MINIMAL]
        return max(failed, default=0)

    @property
    def occupancy(self) -> float:
        return 100.0 * self.spec.chains / self.spec.memory_edges

    def summary(self) -> dict[str, Any]:
        s = self.spec
        mt, ms = self.mean_t_hat, self.mean_seconds
        return {"suite": s.suite, "algorithm": s.algorithm, "m": s.m, "n": s.n, "v": s.v, "h": s.h,
                "chains": s.chains, "memory_edges": s.memory_edges, "occupancy_pct": round(self.occupancy),
                "sequence_length": len(s.sequence()), "runs": len(self.records),
                "completed": len(self.completed), "timeouts": self.timeouts,
                "mean_t_hat": None if mt is None else round(mt, 2),
                "mean_seconds": None if ms is None else round(ms, 2),
                "lower_bound": self.best_lower_bound, "seed_base": s.seed_base, "budget": s.budget}


CSV_COLUMNS = ("suite", "algorithm", "m", "n", "v", "h", "chains", "memory_edges", "occupancy_pct",
               "sequence_length", "runs", "completed", "timeouts", "mean_t_hat", "mean_seconds",
               "lower_bound", "seed_base", "budget")
RUN_COLUMNS = ("suite", "algorithm", "m", "n", "v", "h", "chains", "seed", "status", "t_hat",
               "lower_bound", "encode_seconds", "solve_seconds", "horizons")


# -- presets ----------------------------------------------------------------

RACETRACK_H = (5, 11, 19, 29)
LATTICE_N = (3, 4, 5, 6)


def _fra_chains(edges: int) -> tuple[int, ...]:
    return tuple(c for c in (6, 12, 18) if c <= edges)


def _build_presets() -> dict[str, tuple[BenchSpec, ...]]:
    out: dict[str, tuple[BenchSpec, ...]] = {}
    for h in RACETRACK_H:
        chains = _fra_chains(memory_edge_count(2, 2, 1, h))
        out[f"racetrack-h{h}"] = tuple(BenchSpec("racetrack", 2, 2, 1, h, c) for c in chains)
    for n in LATTICE_N:
        chains = _fra_chains(memory_edge_count(n, n, 1, 1))
        out[f"lattice-{n}x{n}"] = tuple(BenchSpec("lattice", n, n, 1, 1, c) for c in chains)
    for q in (5, 6, 7, 8):
        out[f"racetrack-qft{q}"] = (BenchSpec("racetrack", 2, 2, 1, 5, q, QFT, q),)
        out[f"lattice-qft{q}"] = (BenchSpec("lattice", 3, 3, 1, 1, q, QFT, q),)
    return out


PRESETS = _build_presets()
# single-row shortcuts
PRESETS["racetrack-small"] = (BenchSpec("racetrack", 2, 2, 1, 5, 6),)
PRESETS["lattice-small"] = (BenchSpec("lattice", 3, 3, 1, 1, 6),)
PRESETS["table"] = tuple(s for name, group in list(PRESETS.items())
                         if name not in ("racetrack-small", "lattice-small") for s in group)

# reference mean horizons for the table rows, shown next to the measured ones
REFERENCE_T_HAT = {
    ("racetrack", 2, 2, 1, 5, 6, FRA): "11.0", ("racetrack", 2, 2, 1, 5, 12, FRA): "22.6",
    ("racetrack", 2, 2, 1, 11, 6, FRA): "11.0", ("racetrack", 2, 2, 1, 11, 12, FRA): "21.4",
    ("racetrack", 2, 2, 1, 11, 18, FRA): ">28",
    ("racetrack", 2, 2, 1, 19, 6, FRA): "10.9", ("racetrack", 2, 2, 1, 19, 12, FRA): "23.0",
    ("racetrack", 2, 2, 1, 19, 18, FRA): ">28",
    ("racetrack", 2, 2, 1, 29, 6, FRA): "10.0", ("racetrack", 2, 2, 1, 29, 12, FRA): "20.3",
    ("racetrack", 2, 2, 1, 29, 18, FRA): ">25",
    ("lattice", 3, 3, 1, 1, 6, FRA): "10.9", ("lattice", 3, 3, 1, 1, 12, FRA): "17.0",
    ("lattice", 4, 4, 1, 1, 6, FRA): "12.5", ("lattice", 4, 4, 1, 1, 12, FRA): "18.5",
    ("lattice", 4, 4, 1, 1, 18, FRA): "24.5",
    ("lattice", 5, 5, 1, 1, 6, FRA): "12.9", ("lattice", 5, 5, 1, 1, 12, FRA): "18.9",
    ("lattice", 5, 5, 1, 1, 18, FRA): "24.9",
    ("lattice", 6, 6, 1, 1, 6, FRA): "14.3", ("lattice", 6, 6, 1, 1, 12, FRA): "20.3",
    ("lattice", 6, 6, 1, 1, 18, FRA): "26.3",
    ("racetrack", 2, 2, 1, 5, 5, QFT): "22.4", ("racetrack", 2, 2, 1, 5, 6, QFT): "30.0",
    ("racetrack", 2, 2, 1, 5, 7, QFT): "38.6", ("racetrack", 2, 2, 1, 5, 8, QFT): "48.2",
    ("lattice", 3, 3, 1, 1, 5, QFT): "26.9", ("lattice", 3, 3, 1, 1, 6, QFT): "33.9",
    ("lattice", 3, 3, 1, 1, 7, QFT): "41.9", ("lattice", 3, 3, 1, 1, 8, QFT): "50.9",
}


def reference_t_hat(spec: BenchSpec) -> str | None:
    return REFERENCE_T_HAT.get((spec.suite, spec.m, spec.n, spec.v, spec.h, spec.chains, spec.family))


def resolve_presets(names: Iterable[str]) -> list[BenchSpec]:
    out = []
    for name in names:
        if name not in PRESETS:
            raise BenchError(f"unknown preset {name!r}; choose from {', '.join(sorted(PRESETS))}")
        out.extend(PRESETS[name])
    return out


def load_specs(path) -> list[BenchSpec]:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise BenchError(f"{path}: invalid JSON: {exc}") from None
    if isinstance(doc, dict):
        doc = [doc]
    if not isinstance(doc, list) or not all(isinstance(d, dict) for d in doc):
        raise BenchError(f"{path}: expected a bench spec object or a list of them")
    return [BenchSpec.from_dict(d) for d in doc]


# -- running ----------------------------------------------------------------

def run_one(spec: BenchSpec, run: int, backend=None) -> RunRecord:
    problem = spec.problem(run)
    budget = SolveBudget(total=spec.budget, max_T=spec.max_T)
    out = solve_minimal(problem, budget, backend=backend or default_backend())
    return RunRecord(problem.seed, out.kind, out.t_hat, out.lower_bound,
                     round(out.encode_seconds, 4), round(out.solve_seconds, 4), len(out.log))


def _job(args):
    spec, run, backend = args
    return run_one(spec, run, backend)


def run_bench(specs: Iterable[BenchSpec], workers: int = 1, backend=None, progress=None) -> list[BenchRow]:
    """Run every (spec, run) pair; ``workers`` > 1 spreads them over processes."""
    specs = list(specs)
    jobs = [(s, r, backend) for s in specs for r in range(s.runs)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_job, jobs))
    else:
        results = []
        for job in jobs:
            results.append(_job(job))
            if progress:
                progress(job[0], results[-1])
    rows = [BenchRow(s) for s in specs]
    k = 0
    for row in rows:
        row.records = results[k:k + row.spec.runs]
        k += row.spec.runs
    return rows


def with_overrides(specs: Iterable[BenchSpec], **changes) -> list[BenchSpec]:
    changes = {k: v for k, v in changes.items() if v is not None}
    return [replace(s, **changes) for s in specs]


# -- output -----------------------------------------------------------------

def rows_csv(rows: Iterable[BenchRow]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow(row.summary())
    return buf.getvalue()


def runs_csv(rows: Iterable[BenchRow]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, RUN_COLUMNS, lineterminator="\n")
    w.writeheader()
    for row in rows:
        s = row.spec
        for r in row.records:
            rec = asdict(r)
            rec.update(suite=s.suite, algorithm=s.algorithm, m=s.m, n=s.n, v=s.v, h=s.h, chains=s.chains)
            w.writerow({k: rec[k] for k in RUN_COLUMNS})
    return buf.getvalue()


def rows_table(rows: Iterable[BenchRow]) -> str:
    """Aligned text table with a reference column."""
    head = ("suite", "algorithm", "m n v h", "|C|/|E_M|", "|S|", "T^", "t_CPU", "t.o.", "reference")
    lines = [head]
    for row in rows:
        s = row.spec
        if row.mean_t_hat is not None:
            t_hat = f"{row.mean_t_hat:.1f}"
            t_cpu = f"{row.mean_seconds:.1f} s"
        else:
            t_hat, t_cpu = f">{row.best_lower_bound}", "t.o."
        lines.append((s.suite, s.algorithm, f"{s.m} {s.n} {s.v} {s.h}",
                      f"{s.chains}/{s.memory_edges} ({row.occupancy:.0f}%)", str(len(s.sequence())),
                      t_hat, t_cpu, str(row.timeouts), reference_t_hat(s) or "-"))
    widths = [max(len(line[k]) for line in lines) for k in range(len(head))]
    out = []
    for k, line in enumerate(lines):
        out.append("  ".join(cell.rjust(w) if 2 < j else cell.ljust(w)
                             for j, (cell, w) in enumerate(zip(line, widths))).rstrip())
        if k == 0:
            out.append("-" * len(out[0]))
    return "\n".join(out) + "\n"
