"""Schedule checking and exhaustive ground truth for small instances.

Nothing here touches the SAT encoding: the validator replays the movement
rules directly on chain positions, and the oracle is a breadth-first search
over joint moves. Both exist to cross-check the encoder and solver.
"""

from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Iterator

from .layout import Layout
from .problem import ProblemInstance

ENCODING = "encoding"
PHYSICAL = "physical"


class ScheduleError(ValueError):
    """Schedule is malformed (wrong shape, unknown edges); distinct from rule violations."""


class OracleGuardError(ValueError):
    pass


@dataclass(frozen=True)
class Schedule:
    horizon: int
    # positions[t][i] is the edge of chain i at time step t, t = 0..horizon
    positions: tuple[tuple[int, ...], ...]
    # satisfaction_times[j] is the step at which sequence element j is served
    satisfaction_times: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "positions", tuple(tuple(int(e) for e in row) for row in self.positions))
        object.__setattr__(self, "satisfaction_times", tuple(int(t) for t in self.satisfaction_times))

    def to_dict(self) -> dict[str, Any]:
        return {"horizon": self.horizon,
                "positions": [list(row) for row in self.positions],
                "satisfaction_times": list(self.satisfaction_times)}

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> Schedule:
        try:
            return cls(int(doc["horizon"]), doc["positions"], doc["satisfaction_times"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ScheduleError(f"malformed schedule document: {exc}") from None

    def extended(self) -> Schedule:
        """Append one step in which every chain stays put."""
        return Schedule(self.horizon + 1, self.positions + (self.positions[-1],), self.satisfaction_times)


@dataclass(frozen=True)
class Violation:
    t: int
    rule: str
    detail: str


@dataclass
class ValidationReport:
    mode: str
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def rules(self) -> set[str]:
        return {v.rule for v in self.violations}

    def to_text(self) -> str:
        head = f"mode={self.mode} violations={len(self.violations)}"
        return "\n".join([head] + [f"t={v.t} {v.rule}: {v.detail}" for v in self.violations]) + "\n"

    def to_dict(self) -> dict[str, Any]:
        return {"mode": self.mode, "ok": self.ok,
                "violations": [{"t": v.t, "rule": v.rule, "detail": v.detail} for v in self.violations]}


def _check_structure(problem: ProblemInstance, schedule: Schedule) -> None:
    T = schedule.horizon
    if T < 0:
        raise ScheduleError("negative horizon")
    if len(schedule.positions) != T + 1:
        raise ScheduleError(f"expected {T + 1} states, got {len(schedule.positions)}")
    nc, ne = problem.num_chains, problem.layout.num_edges
    for t, row in enumerate(schedule.positions):
        if len(row) != nc:
            raise ScheduleError(f"state {t} lists {len(row)} chains, expected {nc}")
        for e in row:
            if not 0 <= e < ne:
                raise ScheduleError(f"state {t} uses unknown edge {e}")
    if len(schedule.satisfaction_times) != len(problem.sequence):
        raise ScheduleError(f"expected {len(problem.sequence)} satisfaction times, "
                            f"got {len(schedule.satisfaction_times)}")


def crossed_nodes(layout: Layout, src: int, dst: int, mode: str = ENCODING) -> tuple[int, ...]:
    """Nodes charged for a move from ``src`` to ``dst`` under the given crossing rule.

    ``encoding``: both nodes of the edge arrived on. ``physical``: the nodes
    actually passed. Staying put is never charged.
    """
    if src == dst:
        return ()
    if mode == ENCODING:
        return layout.edges[dst].endpoints
    if mode == PHYSICAL:
        return layout.traversed_nodes(src, dst)
    raise ValueError(f"unknown mode {mode!r}")


def _transition_violations(layout: Layout, before: tuple[int, ...], after: tuple[int, ...],
                           mode: str) -> Iterator[tuple[str, str]]:
    e_in, e_out = layout.inbound, layout.outbound
    counts: Counter[int] = Counter()
    for i, (src, dst) in enumerate(zip(before, after)):
        moves = layout.moves(src)
        if dst not in moves:
            rule = {e_out: "outbound-exit", e_in: "inbound-exit"}.get(src, "movement")
            yield rule, f"chain {i} cannot move from edge {src} to edge {dst} in one step"
            continue
        if dst == e_in and src not in (e_in, e_out):
            yield "inbound-entry", f"chain {i} enters the inbound edge from edge {src}"
        if src == e_out and dst != e_in:
            yield "outbound-exit", f"chain {i} must leave the outbound edge for the inbound edge"
        others = {e for k, e in enumerate(before) if k != i}
        blocked = others.intersection(moves[dst])
        if blocked:
            yield "path-blocked", f"chain {i} moves {src}->{dst} through occupied edge(s) {sorted(blocked)}"
        counts.update(set(crossed_nodes(layout, src, dst, mode)))
    for node, c in sorted(counts.items()):
        if c > 1:
            yield "node-crossing", f"{c} chains cross node {node}"


def _state_violations(layout: Layout, state: tuple[int, ...]) -> Iterator[tuple[str, str]]:
    occ = Counter(state)
    for e, c in sorted(occ.items()):
        cap = 2 if e == layout.inbound else 1
        if c > cap:
            yield "capacity", f"edge {e} holds {c} chains (capacity {cap})"


def validate_schedule(problem: ProblemInstance, schedule: Schedule, mode: str = ENCODING) -> ValidationReport:
    """Check every state and transition of ``schedule`` against the shuttling rules.

    In ``encoding`` mode a chain counts against every node of the edge it
    arrives on, exactly as the SAT encoding counts arrivals. In ``physical``
    mode it counts against the nodes it actually traverses (interior nodes of
    its path plus the nodes shared with the first and last edge).
    """
    if mode not in (ENCODING, PHYSICAL):
        raise ValueError(f"unknown mode {mode!r}")
    _check_structure(problem, schedule)
    layout = problem.layout
    report = ValidationReport(mode)
    add = report.violations.append
    pos = schedule.positions
    if pos[0] != problem.placement:
        add(Violation(0, "initial", f"state 0 is {list(pos[0])}, placement is {list(problem.placement)}"))
    for t, state in enumerate(pos):
        for rule, detail in _state_violations(layout, state):
            add(Violation(t, rule, detail))
    for t in range(schedule.horizon):
        for rule, detail in _transition_violations(layout, pos[t], pos[t + 1], mode):
            add(Violation(t + 1, rule, detail))
    prev = 0
    for j, (tj, el) in enumerate(zip(schedule.satisfaction_times, problem.sequence)):
        if not 1 <= tj <= schedule.horizon:
            add(Violation(tj, "sequence-range", f"element {j} served at {tj}, outside 1..{schedule.horizon}"))
            continue
        if tj <= prev:
            add(Violation(tj, "sequence-order", f"element {j} served at {tj}, not after {prev}"))
        prev = max(prev, tj)
        missing = [i for i in el if pos[tj][i] != layout.inbound]
        if missing:
            add(Violation(tj, "sequence-presence", f"element {j}: chain(s) {missing} not on the inbound edge"))
    return report


def mutate_schedule(schedule: Schedule, seed: int, num_edges: int) -> Schedule:
    """Apply one seeded random perturbation: move a chain, swap two chains, or shift a service time."""
    rng = random.Random(seed)
    pos = [list(row) for row in schedule.positions]
    times = list(schedule.satisfaction_times)
    nc = len(pos[0])
    kinds = ["reassign", "shift"] + (["swap"] if nc > 1 else [])
    kind = rng.choice(kinds)
    if kind == "reassign":
        t, i = rng.randrange(len(pos)), rng.randrange(nc)
        pos[t][i] = rng.choice([e for e in range(num_edges) if e != pos[t][i]])
    elif kind == "swap":
        t = rng.randrange(len(pos))
        a, b = rng.sample(range(nc), 2)
        pos[t][a], pos[t][b] = pos[t][b], pos[t][a]
    else:
        j = rng.randrange(len(times))
        delta = rng.choice([d for d in range(-2, 3) if d != 0])
        times[j] += delta
    return Schedule(schedule.horizon, pos, times)


# -- oracle ------------------------------------------------------------------------

@dataclass
class OracleResult:
    minimal_T: int | None          # None: unreachable within the cap
    explored_states: int
    witness: Schedule | None = None

    @property
    def reachable(self) -> bool:
        return self.minimal_T is not None

    def to_dict(self) -> dict[str, Any]:
        return {"minimal_T": self.minimal_T if self.minimal_T is not None else "unreachable within cap",
                "explored_states": self.explored_states,
                "witness": self.witness.to_dict() if self.witness else None}


ORACLE_GUARD = {"edges": 12, "chains": 3, "sequence": 4}


def _chain_options(layout: Layout, state: tuple[int, ...], i: int) -> list[int]:
    src = state[i]
    e_in, e_out = layout.inbound, layout.outbound
    others = {e for k, e in enumerate(state) if k != i}
    out = []
    for dst, path in layout.moves(src).items():
        if dst == e_in and src not in (e_in, e_out):
            continue
        if src == e_out and dst != e_in:
            continue
        if others.intersection(path):
            continue
        out.append(dst)
    return sorted(out)


def joint_moves(layout: Layout, state: tuple[int, ...], mode: str = ENCODING) -> Iterator[tuple[int, ...]]:
    """Every successor state reachable in one step under the movement rules."""
    options = [_chain_options(layout, state, i) for i in range(len(state))]
    e_in = layout.inbound

    def rec(i: int, acc: list[int], occ: Counter, crossed: set[int]):
        if i == len(state):
            yield tuple(acc)
            return
        for dst in options[i]:
            if occ[dst] >= (2 if dst == e_in else 1):
                continue
            arrive = crossed_nodes(layout, state[i], dst, mode)
            if crossed.intersection(arrive):
                continue
            acc.append(dst)
            occ[dst] += 1
            crossed.update(arrive)
            yield from rec(i + 1, acc, occ, crossed)
            crossed.difference_update(arrive)
            occ[dst] -= 1
            acc.pop()

    yield from rec(0, [], Counter(), set())


def oracle_minimal(problem: ProblemInstance, T_cap: int, guard: dict[str, int] | None = ORACLE_GUARD,
                   eager: bool = True, mode: str = ENCODING) -> OracleResult:
    """Breadth-first search for the shortest schedule serving the whole sequence.

    States are (positions, progress). With ``eager`` the progress index
    advances as soon as the next element's chains all sit on the inbound
    edge; otherwise both choices are explored.
    """
    layout = problem.layout
    if guard is not None:
        if (layout.num_edges > guard["edges"] or problem.num_chains > guard["chains"]
                or len(problem.sequence) > guard["sequence"]):
            raise OracleGuardError(
                f"instance too large for the oracle (|E|={layout.num_edges}, |C|={problem.num_chains}, "
                f"|S|={len(problem.sequence)}; guard {guard})")
    seq = problem.sequence
    goal = len(seq)
    e_in = layout.inbound
    start = (problem.placement, 0)
    parent: dict[tuple, tuple | None] = {start: None}
    frontier = [start]
    for depth in range(1, T_cap + 1):
        nxt = []
        for key in frontier:
            state, prog = key
            for succ in joint_moves(layout, state, mode):
                ready = prog < goal and all(succ[i] == e_in for i in seq[prog])
                progs = [prog + 1] if ready and eager else ([prog, prog + 1] if ready else [prog])
                for p in progs:
                    k = (succ, p)
                    if k in parent:
                        continue
                    parent[k] = key
                    if p == goal:
                        return OracleResult(depth, len(parent), _rebuild(parent, k))
                    nxt.append(k)
        frontier = nxt
        if not frontier:
            break
    return OracleResult(None, len(parent))


def _rebuild(parent: dict, key: tuple) -> Schedule:
    chain = []
    while key is not None:
        chain.append(key)
        key = parent[key]
    chain.reverse()
    positions = [state for state, _ in chain]
    times = [t for t in range(1, len(chain)) if chain[t][1] > chain[t - 1][1]]
    return Schedule(len(chain) - 1, positions, times)


def load_schedule(path) -> Schedule:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ScheduleError(f"invalid JSON: {exc}") from None
    # accept a bare schedule or a solver result document carrying one
    if isinstance(doc, dict) and "schedule" in doc and "positions" not in doc:
        doc = doc["schedule"]
    if not isinstance(doc, dict):
        raise ScheduleError("schedule document must be an object")
    return Schedule.from_dict(doc)
