"""CNF encoding of the shuttling decision problem for a fixed horizon T.

Variables ``x(t, e, i)`` say chain i sits on edge e at step t (t = 0..T);
``s(t, j)`` says sequence element j is served at step t (t = 1..T). They are
numbered first and contiguously; auxiliary gadget variables follow.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .cardinality import CnfBuilder, at_least_one, at_most_k, define_and, define_or, exactly_one
from .problem import ProblemInstance
from .verify import ENCODING, PHYSICAL, Schedule, crossed_nodes

FAMILIES = ("initial", "placement", "capacity", "movement", "node_crossing", "processing", "sequence")


class DecodeError(RuntimeError):
    """A model does not describe a schedule; the encoding is broken."""


@dataclass(frozen=True)
class VarMap:
    horizon: int
    num_edges: int
    num_chains: int
    num_elements: int

    @property
    def num_x(self) -> int:
        return (self.horizon + 1) * self.num_edges * self.num_chains

    @property
    def num_s(self) -> int:
        return self.horizon * self.num_elements

    def x(self, t: int, e: int, i: int) -> int:
        return 1 + (t * self.num_edges + e) * self.num_chains + i

    def s(self, t: int, j: int) -> int:
        if t < 1:
            raise IndexError("sequence variables start at t = 1")
        return 1 + self.num_x + (t - 1) * self.num_elements + j

    def describe(self, var: int) -> tuple | None:
        """('x', t, e, i), ('s', t, j) or None for auxiliary variables."""
        k = var - 1
        if 0 <= k < self.num_x:
            t, rest = divmod(k, self.num_edges * self.num_chains)
            e, i = divmod(rest, self.num_chains)
            return ("x", t, e, i)
        k -= self.num_x
        if 0 <= k < self.num_s:
            t, j = divmod(k, self.num_elements)
            return ("s", t + 1, j)
        return None


@dataclass
class CnfInstance:
    num_vars: int
    clauses: list[list[int]]
    varmap: VarMap
    stats: dict[str, int] = field(default_factory=dict)
    aux: dict[str, int] = field(default_factory=dict)

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)


class _Encoder:
    def __init__(self, problem: ProblemInstance, T: int, crossing: str = ENCODING):
        if crossing not in (ENCODING, PHYSICAL):
            raise ValueError(f"unknown crossing rule {crossing!r}")
        self.crossing = crossing
        self.p = problem
        self.layout = problem.layout
        self.T = T
        self.vm = VarMap(T, self.layout.num_edges, problem.num_chains, len(problem.sequence))
        self.b = CnfBuilder()
        self.b.new_vars(self.vm.num_x + self.vm.num_s)
        self._occ: dict[tuple[int, int], int] = {}
        self._free: dict[tuple[int, tuple[int, ...]], int] = {}

    def x(self, t, e, i):
        return self.vm.x(t, e, i)

    # constraint families -------------------------------------------------------

    def initial(self):
        ne, chains = self.layout.num_edges, self.p.chains
        for i in chains:
            for e in range(ne):
                lit = self.x(0, e, i)
                self.b.add([lit if self.p.placement[i] == e else -lit])

    def placement(self):
        ne = self.layout.num_edges
        for t in range(self.T + 1):
            for i in self.p.chains:
                exactly_one(self.b, [self.x(t, e, i) for e in range(ne)])

    def capacity(self):
        e_in = self.layout.inbound
        for t in range(self.T + 1):
            for e in range(self.layout.num_edges):
                at_most_k(self.b, [self.x(t, e, i) for i in self.p.chains], 2 if e == e_in else 1)

    def _occupied(self, t: int, e: int) -> int:
        # one-sided: any chain on e forces the flag; it only ever appears negated
        key = (t, e)
        if key not in self._occ:
            occ = self._occ[key] = self.b.new_var("occupied")
            for i in self.p.chains:
                self.b.add([-self.x(t, e, i), occ])
        return self._occ[key]

    def _path_free(self, t: int, path: tuple[int, ...]) -> int:
        # prefix-shared: free(p1..pk) -> free(p1..pk-1) and edge pk unoccupied
        key = (t, path)
        if key not in self._free:
            f = self.b.new_var("path_free")
            if len(path) > 1:
                self.b.add([-f, self._path_free(t, path[:-1])])
            self.b.add([-f, -self._occupied(t, path[-1])])
            self._free[key] = f
        return self._free[key]

    def movement(self):
        # x(t,e,i) -> OR_{g in N*(e)} (x(t+1,g,i) AND path(e,g) free at t).
        # With exactly one position per step this splits into a target clause
        # plus one implication per target with a non-empty path.
        layout = self.layout
        for t in range(self.T):
            for e in layout.memory_edges:
                moves = layout.moves(e)
                for i in self.p.chains:
                    here = self.x(t, e, i)
                    self.b.add([-here] + [self.x(t + 1, g, i) for g in sorted(moves)])
                    for g in sorted(moves):
                        path = moves[g]
                        if path:
                            self.b.add([-here, -self.x(t + 1, g, i), self._path_free(t, path)])

    def node_crossing(self):
        # AtMost-1 per node over "chain i moved and is charged to node v" indicators
        if self.crossing == PHYSICAL:
            return self._node_crossing_physical()
        layout = self.layout
        for t in range(1, self.T + 1):
            arrived: dict[tuple[int, int], int] = {}
            for e in range(layout.num_edges):
                former = sorted(layout.former_edges(e))
                if not former:
                    continue
                for i in self.p.chains:
                    came = define_or(self.b, [self.x(t - 1, f, i) for f in former], tag="came_from")
                    arrived[e, i] = define_and(self.b, [self.x(t, e, i), came], tag="arrived")
            for v in range(len(layout.nodes)):
                lits = [arrived[e, i] for e in sorted(layout.sharing_edges(v))
                        for i in self.p.chains if (e, i) in arrived]
                if len(lits) > 1:
                    at_most_k(self.b, lits, 1)

    def _node_crossing_physical(self):
        # same shape, but a move is charged only to the nodes it passes
        layout = self.layout
        via: dict[tuple[int, int], list[int]] = {}
        for e in range(layout.num_edges):
            for f in sorted(layout.former_edges(e)):
                for v in crossed_nodes(layout, f, e, PHYSICAL):
                    via.setdefault((v, e), []).append(f)
        for t in range(1, self.T + 1):
            per_node: dict[int, list[int]] = {}
            for (v, e), former in sorted(via.items()):
                for i in self.p.chains:
                    came = define_or(self.b, [self.x(t - 1, f, i) for f in former], tag="came_from")
                    per_node.setdefault(v, []).append(
                        define_and(self.b, [self.x(t, e, i), came], tag="arrived"))
            for v, lits in sorted(per_node.items()):
                if len(lits) > 1:
                    at_most_k(self.b, lits, 1)

    def processing(self):
        layout = self.layout
        e_in, e_out = layout.inbound, layout.outbound
        back = sorted(layout.neighbors(e_in) - {e_out, e_in})
        for i in self.p.chains:
            for t in range(self.T):
                self.b.add([-self.x(t, e_out, i), self.x(t + 1, e_in, i)])
            for t in range(1, self.T + 1):
                self.b.add([-self.x(t, e_in, i), self.x(t - 1, e_out, i), self.x(t - 1, e_in, i)])
            for t in range(self.T):
                self.b.add([-self.x(t, e_in, i), self.x(t + 1, e_in, i)]
                           + [self.x(t + 1, n, i) for n in back])

    def sequence(self):
        seq, T, vm = self.p.sequence, self.T, self.vm
        e_in = self.layout.inbound
        for t in range(1, T + 1):
            for j, el in enumerate(seq):
                for i in el:
                    self.b.add([-vm.s(t, j), self.x(t, e_in, i)])
        last = len(seq) - 1
        for j in range(last):
            picks = []
            for t in range(1, T):
                o = self.b.new_var("order")
                self.b.add([-o, vm.s(t, j)])
                self.b.add([-o] + [vm.s(u, j + 1) for u in range(t + 1, T + 1)])
                picks.append(o)
            # empty when T = 1: no room for two ordered elements
            self.b.add(picks)
        at_least_one(self.b, [vm.s(t, last) for t in range(1, T + 1)])
        for j in range(len(seq)):
            at_most_k(self.b, [vm.s(t, j) for t in range(1, T + 1)], 1)

    def run(self, families: Iterable[str]) -> CnfInstance:
        for name in families:
            with self.b.family(name):
                getattr(self, name)()
        return CnfInstance(self.b.num_vars, self.b.clauses, self.vm,
                           stats={k: self.b.stats.get(k, 0) for k in FAMILIES},
                           aux=dict(self.b.aux))


def encode(problem: ProblemInstance, T: int, include_sequence: bool = True,
           crossing: str = ENCODING) -> CnfInstance:
    """Clauses whose models are exactly the valid T-step schedules of ``problem``.

    ``include_sequence=False`` drops the sequence constraints, leaving only
    the movement model (useful to enumerate reachable configurations).
    ``crossing`` picks the node rule, matching the validator modes: charge
    every node of the edge arrived on, or only the nodes passed.
    """
    if T < 1:
        raise ValueError("horizon must be at least 1")
    families = FAMILIES if include_sequence else FAMILIES[:-1]
    return _Encoder(problem, T, crossing).run(families)


def decode_positions(model: Iterable[int], varmap: VarMap) -> list[tuple[int, ...]]:
    true = {lit for lit in model if lit > 0}
    vm = varmap
    positions = []
    for t in range(vm.horizon + 1):
        row = []
        for i in range(vm.num_chains):
            on = [e for e in range(vm.num_edges) if vm.x(t, e, i) in true]
            if len(on) != 1:
                raise DecodeError(f"chain {i} at step {t} is on {len(on)} edges")
            row.append(on[0])
        positions.append(tuple(row))
    return positions


def decode_schedule(model: Iterable[int], varmap: VarMap) -> Schedule:
    model = list(model)
    true = {lit for lit in model if lit > 0}
    vm = varmap
    positions = decode_positions(model, vm)
    times = []
    for j in range(vm.num_elements):
        at = [t for t in range(1, vm.horizon + 1) if vm.s(t, j) in true]
        if len(at) != 1:
            raise DecodeError(f"sequence element {j} is served {len(at)} times")
        times.append(at[0])
    return Schedule(vm.horizon, positions, times)
