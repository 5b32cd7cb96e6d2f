"""Shuttling problem instances: layout, initial chain placement, target sequence.

Problem documents are JSON::

    {
      "layout": {"grid": {"m": 2, "n": 2, "v": 1, "h": 5, "exit": [0, 1], "entry": [1, 1]}},
      "chains": [{"id": 0, "edge": 3}, {"id": 1, "edge": 7}],
      "sequence": [[0], [0, 1]],
      "metadata": {"seed": 12, "label": "racetrack"}
    }

``layout`` may instead be ``{"explicit": {"nodes": [...], "edges": [...]}}``
with nodes ``{"kind": "major"|"minor"|"processing", "pos": [r, c] | null}``
and edges ``{"u": int, "v": int, "kind": "memory"|"inbound"|"outbound"}``;
list position is the index. ``metadata`` is optional. Unknown keys are
rejected. Random placements use Python's ``random.Random`` (MT19937) seeded
with the given integer and ``sample`` over the ascending memory edge ids.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Any, Iterable, Mapping, Sequence as Seq

from .layout import Edge, EdgeKind, Layout, LayoutError, Node, NodeKind, build_grid_layout


class ProblemError(ValueError):
    pass


class ParseError(ProblemError):
    def __init__(self, message: str, location: str = "$"):
        super().__init__(f"{location}: {message}")
        self.location = location


class UnsupportedGateError(ProblemError):
    pass


class CapacityError(ProblemError):
    pass


Element = tuple[int, ...]


def _element(chains: Iterable[int]) -> Element:
    el = tuple(sorted(set(chains)))
    if not 1 <= len(el) <= 2:
        raise ProblemError(f"sequence element must name 1 or 2 chains, got {el}")
    return el


@dataclass(frozen=True)
class ProblemInstance:
    layout: Layout
    # placement[i] is the memory edge chain i occupies at t = 0
    placement: tuple[int, ...]
    sequence: tuple[Element, ...]
    seed: int | None = None
    label: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "placement", tuple(int(e) for e in self.placement))
        object.__setattr__(self, "sequence", tuple(_element(el) for el in self.sequence))
        if not self.placement:
            raise ProblemError("problem needs at least one chain")
        if len(set(self.placement)) != len(self.placement):
            raise ProblemError("two chains share an edge at t = 0")
        for i, e in enumerate(self.placement):
            if not 0 <= e < self.layout.num_edges:
                raise ProblemError(f"chain {i} placed on unknown edge {e}")
            if not self.layout.is_memory(e):
                raise ProblemError(f"chain {i} placed on an interface edge; these start empty")
        if not self.sequence:
            raise ProblemError("sequence must not be empty")
        for j, el in enumerate(self.sequence):
            for i in el:
                if not 0 <= i < len(self.placement):
                    raise ProblemError(f"sequence element {j} references unknown chain {i}")

    @property
    def num_chains(self) -> int:
        return len(self.placement)

    @property
    def chains(self) -> range:
        return range(len(self.placement))


def sequence_from_gate_list(gates: Seq[Iterable[int]],
                            qubit_to_chain: Mapping[int, int] | None = None) -> tuple[Element, ...]:
    """Map an ordered list of gate qubit sets onto chain sets.

    Several qubits may live in the same chain. A gate must touch one or two
    distinct chains, one qubit each; anything else is rejected.
    """
    if not gates:
        raise ProblemError("gate list is empty")
    out = []
    for k, gate in enumerate(gates):
        qubits = list(gate)
        if not qubits:
            raise ProblemError(f"gate {k} acts on no qubits")
        try:
            chains = {qubit_to_chain[q] if qubit_to_chain is not None else q for q in qubits}
        except KeyError as exc:
            raise ProblemError(f"gate {k}: qubit {exc.args[0]} has no chain") from None
        if len(chains) > 2:
            raise UnsupportedGateError(f"gate {k} touches {len(chains)} chains; at most 2 fit the processing zone")
        if len(set(qubits)) != len(qubits):
            raise UnsupportedGateError(f"gate {k} repeats a qubit")
        if len(chains) < len(qubits):
            raise UnsupportedGateError(f"gate {k} maps several of its qubits onto one chain")
        out.append(tuple(sorted(chains)))
    return tuple(out)


def full_register_access_sequence(num_chains: int) -> tuple[Element, ...]:
    if num_chains < 1:
        raise ProblemError("need at least one chain")
    return tuple((i,) for i in range(num_chains))


def qft_gate_list(num_qubits: int) -> list[tuple[int, ...]]:
    """Gate order of the textbook QFT: H on qubit k, then controlled phases (k, l) for l > k."""
    gates: list[tuple[int, ...]] = []
    for k in range(num_qubits):
        gates.append((k,))
        gates.extend((k, l) for l in range(k + 1, num_qubits))
    return gates


def qft_sequence(num_qubits: int) -> tuple[Element, ...]:
    return sequence_from_gate_list(qft_gate_list(num_qubits))


def random_placement(layout: Layout, num_chains: int, seed: int) -> tuple[int, ...]:
    mem = sorted(layout.memory_edges)
    if num_chains > len(mem):
        raise CapacityError(f"{num_chains} chains do not fit on {len(mem)} memory edges")
    if num_chains < 0:
        raise CapacityError("negative chain count")
    return tuple(random.Random(seed).sample(mem, num_chains))


# -- documents -----------------------------------------------------------------

def layout_to_dict(layout: Layout) -> dict[str, Any]:
    if layout.grid is not None:
        g = layout.grid
        return {"grid": {"m": g.m, "n": g.n, "v": g.v, "h": g.h,
                         "exit": list(g.exit), "entry": list(g.entry)}}
    return {"explicit": {
        "nodes": [{"kind": nd.kind.value, "pos": list(nd.pos) if nd.pos is not None else None}
                  for nd in layout.nodes],
        "edges": [{"u": e.u, "v": e.v, "kind": e.kind.value} for e in layout.edges],
    }}


def problem_to_dict(problem: ProblemInstance) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "layout": layout_to_dict(problem.layout),
        "chains": [{"id": i, "edge": e} for i, e in enumerate(problem.placement)],
        "sequence": [list(el) for el in problem.sequence],
    }
    meta = {}
    if problem.seed is not None:
        meta["seed"] = problem.seed
    if problem.label is not None:
        meta["label"] = problem.label
    if meta:
        doc["metadata"] = meta
    return doc


def serialize_problem(problem: ProblemInstance) -> str:
    return json.dumps(problem_to_dict(problem), indent=2) + "\n"


def _keys(obj: Any, loc: str, required: set[str], optional: set[str] = frozenset()) -> dict:
    if not isinstance(obj, dict):
        raise ParseError("expected an object", loc)
    unknown = set(obj) - required - optional
    if unknown:
        raise ParseError(f"unknown field(s) {sorted(unknown)}", loc)
    missing = required - set(obj)
    if missing:
        raise ParseError(f"missing field(s) {sorted(missing)}", loc)
    return obj


def _int(x: Any, loc: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise ParseError(f"expected an integer, got {x!r}", loc)
    return x


def _pair(x: Any, loc: str) -> tuple[int, int]:
    if not isinstance(x, list) or len(x) != 2:
        raise ParseError("expected [row, col]", loc)
    return (_int(x[0], f"{loc}[0]"), _int(x[1], f"{loc}[1]"))


def layout_from_dict(doc: Any, loc: str = "$.layout") -> Layout:
    if not isinstance(doc, dict) or len(doc) != 1 or next(iter(doc)) not in ("grid", "explicit"):
        raise ParseError('expected exactly one of "grid" or "explicit"', loc)
    try:
        if "grid" in doc:
            g = _keys(doc["grid"], f"{loc}.grid", {"m", "n", "v", "h"}, {"exit", "entry"})
            args = {k: _int(g[k], f"{loc}.grid.{k}") for k in ("m", "n", "v", "h")}
            exit = _pair(g["exit"], f"{loc}.grid.exit") if "exit" in g else None
            entry = _pair(g["entry"], f"{loc}.grid.entry") if "entry" in g else None
            return build_grid_layout(**args, exit=exit, entry=entry)
        ex = _keys(doc["explicit"], f"{loc}.explicit", {"nodes", "edges"})
        nodes, edges = [], []
        if not isinstance(ex["nodes"], list) or not isinstance(ex["edges"], list):
            raise ParseError("nodes and edges must be lists", f"{loc}.explicit")
        for k, nd in enumerate(ex["nodes"]):
            nloc = f"{loc}.explicit.nodes[{k}]"
            nd = _keys(nd, nloc, {"kind"}, {"pos"})
            try:
                kind = NodeKind(nd["kind"])
            except ValueError:
                raise ParseError(f"unknown node kind {nd['kind']!r}", nloc) from None
            pos = nd.get("pos")
            if pos is not None:
                if not (isinstance(pos, list) and len(pos) == 2
                        and all(isinstance(p, (int, float)) and not isinstance(p, bool) for p in pos)):
                    raise ParseError("pos must be [row, col] or null", nloc)
                pos = (float(pos[0]), float(pos[1]))
            nodes.append(Node(k, kind, pos))
        for k, e in enumerate(ex["edges"]):
            eloc = f"{loc}.explicit.edges[{k}]"
            e = _keys(e, eloc, {"u", "v", "kind"})
            try:
                kind = EdgeKind(e["kind"])
            except ValueError:
                raise ParseError(f"unknown edge kind {e['kind']!r}", eloc) from None
            edges.append(Edge(k, _int(e["u"], f"{eloc}.u"), _int(e["v"], f"{eloc}.v"), kind))
        return Layout(tuple(nodes), tuple(edges))
    except LayoutError as exc:
        raise ParseError(str(exc), loc) from None


def problem_from_dict(doc: Any) -> ProblemInstance:
    doc = _keys(doc, "$", {"layout", "chains", "sequence"}, {"metadata"})
    layout = layout_from_dict(doc["layout"])
    chains = doc["chains"]
    if not isinstance(chains, list) or not chains:
        raise ParseError("expected a non-empty list", "$.chains")
    placement: dict[int, int] = {}
    taken: dict[int, int] = {}
    for k, c in enumerate(chains):
        loc = f"$.chains[{k}]"
        c = _keys(c, loc, {"id", "edge"})
        cid, edge = _int(c["id"], f"{loc}.id"), _int(c["edge"], f"{loc}.edge")
        if cid in placement:
            raise ParseError(f"duplicate chain id {cid}", f"{loc}.id")
        if not 0 <= edge < layout.num_edges:
            raise ParseError(f"unknown edge {edge}", f"{loc}.edge")
        if not layout.is_memory(edge):
            raise ParseError("chains must start on memory edges; interface edges start empty", f"{loc}.edge")
        if edge in taken:
            raise ParseError(f"edge {edge} already holds chain {taken[edge]}", f"{loc}.edge")
        placement[cid] = edge
        taken[edge] = cid
    if sorted(placement) != list(range(len(placement))):
        raise ParseError("chain ids must be 0..|C|-1", "$.chains")
    seq = doc["sequence"]
    if not isinstance(seq, list) or not seq:
        raise ParseError("expected a non-empty list", "$.sequence")
    elements = []
    for j, el in enumerate(seq):
        loc = f"$.sequence[{j}]"
        if not isinstance(el, list) or not 1 <= len(el) <= 2:
            raise ParseError("element must list 1 or 2 chain ids", loc)
        ids = [_int(x, f"{loc}[{k}]") for k, x in enumerate(el)]
        if len(set(ids)) != len(ids):
            raise ParseError("element repeats a chain", loc)
        for x in ids:
            if x not in placement:
                raise ParseError(f"unknown chain {x}", loc)
        elements.append(tuple(ids))
    seed = label = None
    if "metadata" in doc:
        meta = _keys(doc["metadata"], "$.metadata", set(), {"seed", "label"})
        if "seed" in meta:
            seed = _int(meta["seed"], "$.metadata.seed")
        if "label" in meta:
            label = meta["label"]
            if not isinstance(label, str):
                raise ParseError("label must be a string", "$.metadata.label")
    return ProblemInstance(layout, tuple(placement[i] for i in range(len(placement))),
                           tuple(elements), seed=seed, label=label)


def parse_problem(text: str) -> ProblemInstance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})") from None
    return problem_from_dict(doc)


def load_problem(path) -> ProblemInstance:
    with open(path, encoding="utf-8") as fh:
        return parse_problem(fh.read())


def save_problem(problem: ProblemInstance, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_problem(problem))


def make_problem(layout: Layout, num_chains: int, seed: int,
                 sequence: Seq[Iterable[int]] | None = None, label: str | None = None) -> ProblemInstance:
    """Random placement plus a sequence (full register access unless given)."""
    seq = full_register_access_sequence(num_chains) if sequence is None else tuple(tuple(x) for x in sequence)
    return ProblemInstance(layout, random_placement(layout, num_chains, seed), seq, seed=seed, label=label)
