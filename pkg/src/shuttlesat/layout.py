"""Graph abstraction of a QCCD memory zone.

Edges are trap sites, nodes separate them. Major nodes are junctions, minor
nodes sit between two sites of the same segment, and a single processing node
joins the outbound and inbound edges that form the interface to the
processing zone.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterable


class LayoutError(ValueError):
    pass


class NodeKind(str, Enum):
    MAJOR = "major"
    MINOR = "minor"
    PROCESSING = "processing"


class EdgeKind(str, Enum):
    MEMORY = "memory"
    INBOUND = "inbound"
    OUTBOUND = "outbound"


@dataclass(frozen=True)
class Node:
    index: int
    kind: NodeKind
    # (row, col) in junction units; only used for drawing
    pos: tuple[float, float] | None = None


@dataclass(frozen=True)
class Edge:
    index: int
    u: int
    v: int
    kind: EdgeKind = EdgeKind.MEMORY

    @property
    def endpoints(self) -> tuple[int, int]:
        return (self.u, self.v)


@dataclass(frozen=True)
class GridParams:
    m: int
    n: int
    v: int
    h: int
    exit: tuple[int, int]
    entry: tuple[int, int]


@dataclass(frozen=True, eq=False)
class Layout:
    nodes: tuple[Node, ...]
    edges: tuple[Edge, ...]
    grid: GridParams | None = None

    def __post_init__(self):
        self._check()

    def __eq__(self, other):
        if not isinstance(other, Layout):
            return NotImplemented
        return (self.nodes, self.edges, self.grid) == (other.nodes, other.edges, other.grid)

    def __hash__(self):
        return hash((self.nodes, self.edges, self.grid))

    # -- structure -----------------------------------------------------------

    def _check(self):
        for k, node in enumerate(self.nodes):
            if node.index != k:
                raise LayoutError(f"node indices must be contiguous, got {node.index} at {k}")
        for k, edge in enumerate(self.edges):
            if edge.index != k:
                raise LayoutError(f"edge indices must be contiguous, got {edge.index} at {k}")
            for x in edge.endpoints:
                if not 0 <= x < len(self.nodes):
                    raise LayoutError(f"edge {k} references unknown node {x}")
            if edge.u == edge.v:
                raise LayoutError(f"edge {k} is a self-loop")
        procs = [nd.index for nd in self.nodes if nd.kind is NodeKind.PROCESSING]
        if len(procs) != 1:
            raise LayoutError(f"expected exactly one processing node, found {len(procs)}")
        for kind in (EdgeKind.INBOUND, EdgeKind.OUTBOUND):
            count = sum(1 for e in self.edges if e.kind is kind)
            if count != 1:
                raise LayoutError(f"expected exactly one {kind.value} edge, found {count}")
        p = procs[0]
        for e in (self.edges[self.outbound], self.edges[self.inbound]):
            if p not in e.endpoints:
                raise LayoutError(f"{e.kind.value} edge must touch the processing node")
            other = e.v if e.u == p else e.u
            if self.nodes[other].kind is not NodeKind.MAJOR:
                raise LayoutError(f"{e.kind.value} edge must attach to a major node")
        if len(self.incident(p)) != 2:
            raise LayoutError("processing node may only carry the inbound and outbound edges")
        for nd in self.nodes:
            if nd.kind is NodeKind.MINOR and len(self.incident(nd.index)) != 2:
                raise LayoutError(f"minor node {nd.index} must have degree 2")
        for e in self.edges:
            if e.kind is EdgeKind.MEMORY and p in e.endpoints:
                raise LayoutError(f"memory edge {e.index} touches the processing node")
        if not self.memory_edges:
            raise LayoutError("layout has no memory edges")
        if not self._memory_connected():
            raise LayoutError("memory subgraph is not connected")

    def _memory_connected(self) -> bool:
        mem = self.memory_edges
        seen = {mem[0]}
        todo = deque([mem[0]])
        while todo:
            e = todo.popleft()
            for x in self.edges[e].endpoints:
                for f in self.incident(x):
                    if f not in seen and self.edges[f].kind is EdgeKind.MEMORY:
                        seen.add(f)
                        todo.append(f)
        return len(seen) == len(mem)

    @cached_property
    def _incidence(self) -> tuple[tuple[int, ...], ...]:
        inc: list[list[int]] = [[] for _ in self.nodes]
        for e in self.edges:
            inc[e.u].append(e.index)
            inc[e.v].append(e.index)
        return tuple(tuple(x) for x in inc)

    def incident(self, node: int) -> tuple[int, ...]:
        return self._incidence[node]

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def memory_edges(self) -> tuple[int, ...]:
        return tuple(e.index for e in self.edges if e.kind is EdgeKind.MEMORY)

    @cached_property
    def processing_node(self) -> int:
        return next(nd.index for nd in self.nodes if nd.kind is NodeKind.PROCESSING)

    @cached_property
    def outbound(self) -> int:
        return next(e.index for e in self.edges if e.kind is EdgeKind.OUTBOUND)

    @cached_property
    def inbound(self) -> int:
        return next(e.index for e in self.edges if e.kind is EdgeKind.INBOUND)

    def _far_end(self, edge: int, node: int) -> int:
        e = self.edges[edge]
        return e.v if e.u == node else e.u

    @cached_property
    def exit_node(self) -> int:
        return self._far_end(self.outbound, self.processing_node)

    @cached_property
    def entry_node(self) -> int:
        return self._far_end(self.inbound, self.processing_node)

    def is_memory(self, e: int) -> bool:
        return self.edges[e].kind is EdgeKind.MEMORY

    # -- move relation ------------------------------------------------------

    def neighbors(self, e: int) -> frozenset[int]:
        """``e`` together with every edge that shares a node with it."""
        self._edge_ok(e)
        out = {e}
        for x in self.edges[e].endpoints:
            out.update(self.incident(x))
        return frozenset(out)

    def sharing_edges(self, node: int) -> frozenset[int]:
        if not 0 <= node < len(self.nodes):
            raise LayoutError(f"unknown node {node}")
        return frozenset(self.incident(node))

    def _edge_ok(self, e: int):
        if not 0 <= e < len(self.edges):
            raise LayoutError(f"unknown edge {e}")

    def _walk(self, e: int, start: int) -> tuple[list[int], int]:
        """Follow the segment of ``e`` through ``start`` until a non-minor node.

        Returns the memory edges passed on the way (excluding ``e``) and the
        junction that ends the walk.
        """
        walk: list[int] = []
        node, cur = start, e
        while self.nodes[node].kind is NodeKind.MINOR:
            nxt = next(f for f in self.incident(node) if f != cur)
            if nxt == e:
                raise LayoutError(f"segment of edge {e} has no junction")
            walk.append(nxt)
            cur = nxt
            node = self._far_end(nxt, node)
        return walk, node

    @cached_property
    def _moves(self) -> tuple[dict[int, tuple[int, ...]], ...]:
        """Per edge: reachable target -> interior path edges (ordered from the source)."""
        table = []
        for edge in self.edges:
            e = edge.index
            if edge.kind is EdgeKind.OUTBOUND:
                table.append({e: (), self.inbound: ()})
                continue
            if edge.kind is EdgeKind.INBOUND:
                table.append({f: () for f in self.neighbors(e) if f != self.outbound})
                continue
            moves: dict[int, tuple[int, ...]] = {e: ()}
            for start in edge.endpoints:
                walk, junction = self._walk(e, start)
                cands = [(w, tuple(walk[:k])) for k, w in enumerate(walk)]
                cands += [(f, tuple(walk)) for f in self.incident(junction)
                          if f != e and f not in walk]
                for target, path in cands:
                    old = moves.get(target)
                    if old is None or len(path) < len(old):
                        moves[target] = path
                    elif len(path) == len(old) and path != old:
                        raise LayoutError(f"ambiguous shortest path between edges {e} and {target}")
            table.append(moves)
        return tuple(table)

    def extended_neighbors(self, e: int) -> frozenset[int]:
        """Edges a chain on ``e`` may occupy one step later, passing at most one junction.

        For a memory edge this is its whole segment plus every edge incident
        to the junction at either end of the segment. The interface edges only
        offer the moves the processing zone allows: outbound goes to inbound,
        inbound stays or drops back into the memory zone.
        """
        self._edge_ok(e)
        return frozenset(self._moves[e])

    def path_edges(self, e: int, target: int) -> tuple[int, ...]:
        """Interior edges of the unique shortest path from ``e`` to ``target``."""
        self._edge_ok(e)
        self._edge_ok(target)
        try:
            return self._moves[e][target]
        except KeyError:
            raise LayoutError(f"edge {target} is not reachable from {e} in one step") from None

    def moves(self, e: int) -> dict[int, tuple[int, ...]]:
        self._edge_ok(e)
        return dict(self._moves[e])

    @cached_property
    def _former(self) -> tuple[frozenset[int], ...]:
        acc: list[set[int]] = [set() for _ in self.edges]
        for f, moves in enumerate(self._moves):
            for g in moves:
                if g != f:
                    acc[g].add(f)
        return tuple(frozenset(x) for x in acc)

    def former_edges(self, e: int) -> frozenset[int]:
        """Edges a chain now on ``e`` may have come from, staying put excluded."""
        self._edge_ok(e)
        return self._former[e]

    def traversed_nodes(self, src: int, dst: int) -> tuple[int, ...]:
        """Nodes a chain physically passes when moving from ``src`` to ``dst``."""
        if src == dst:
            return ()
        route = [src, *self.path_edges(src, dst), dst]
        out = []
        p = self.processing_node
        for a, b in zip(route, route[1:]):
            shared = set(self.edges[a].endpoints) & set(self.edges[b].endpoints)
            if len(shared) > 1:
                # inbound and outbound also meet at the junction when they share one
                shared = {p} if a == self.outbound else shared - {p}
            out.extend(sorted(shared))
        return tuple(out)

    def candidate_moves(self, e: int, occupied: Iterable[int]) -> frozenset[int]:
        """Targets from ``e`` that are neither occupied nor behind an occupied edge.

        ``occupied`` holds the edges taken by *other* chains. This is the
        single-chain view of the move relation; joint feasibility (node
        crossings, capacities at the next step) is not considered.
        """
        occ = set(occupied)
        occ.discard(e)
        inbound = self.inbound
        return frozenset(
            g for g, path in self._moves[e].items()
            if (g == e or g == inbound or g not in occ) and not occ.intersection(path)
        )

    # -- derived layouts ------------------------------------------------------

    def without_edges(self, drop: Iterable[int]) -> Layout:
        """Explicit layout with some memory edges removed and everything re-indexed."""
        drop = set(drop)
        for e in drop:
            self._edge_ok(e)
            if not self.is_memory(e):
                raise LayoutError("only memory edges can be removed")
        keep = [e for e in self.edges if e.index not in drop]
        used = {x for e in keep for x in e.endpoints}
        remap = {}
        nodes = []
        for nd in self.nodes:
            if nd.index in used:
                remap[nd.index] = len(nodes)
                nodes.append(Node(len(nodes), nd.kind, nd.pos))
        # minor nodes that lost a side become dead ends, i.e. junctions
        deg: dict[int, int] = {}
        for e in keep:
            for x in e.endpoints:
                deg[remap[x]] = deg.get(remap[x], 0) + 1
        nodes = [Node(nd.index, NodeKind.MAJOR, nd.pos)
                 if nd.kind is NodeKind.MINOR and deg[nd.index] != 2 else nd
                 for nd in nodes]
        mem = [e for e in keep if e.kind is EdgeKind.MEMORY]
        iface = [e for e in keep if e.kind is not EdgeKind.MEMORY]
        iface.sort(key=lambda e: e.kind is EdgeKind.INBOUND)
        edges = tuple(Edge(k, remap[e.u], remap[e.v], e.kind) for k, e in enumerate(mem + iface))
        return Layout(tuple(nodes), edges)

    def describe(self) -> str:
        if self.grid is not None:
            g = self.grid
            return f"L({g.m},{g.n},{g.v},{g.h})"
        return f"explicit({len(self.memory_edges)} memory edges)"


def default_exit(m: int, n: int) -> tuple[int, int]:
    return (0, n - 1)


def default_entry(m: int, n: int) -> tuple[int, int]:
    return (1, n - 1)


def build_grid_layout(m: int, n: int, v: int, h: int,
                      exit: tuple[int, int] | None = None,
                      entry: tuple[int, int] | None = None) -> Layout:
    """Build L(m, n, v, h): an m x n grid of junctions with v sites per
    vertical and h sites per horizontal segment, plus the processing interface.

    ``exit`` and ``entry`` are (row, col) junctions on the grid boundary where
    the outbound and inbound edges attach. By default the outbound edge leaves
    from the top-right corner and the inbound edge returns one junction below
    it, so the processing zone sits on the right-hand side.
    """
    if m < 2 or n < 2:
        raise LayoutError("grid needs at least 2 x 2 junctions")
    if v < 1 or h < 1:
        raise LayoutError("segments need at least one site")
    exit = tuple(exit) if exit is not None else default_exit(m, n)
    entry = tuple(entry) if entry is not None else default_entry(m, n)
    for name, (r, c) in (("exit", exit), ("entry", entry)):
        if not (0 <= r < m and 0 <= c < n):
            raise LayoutError(f"{name} junction {(r, c)} outside the {m}x{n} grid")
        if 0 < r < m - 1 and 0 < c < n - 1:
            raise LayoutError(f"{name} junction {(r, c)} is not on the grid boundary")

    nodes = [Node(r * n + c, NodeKind.MAJOR, (float(r), float(c))) for r in range(m) for c in range(n)]
    edges: list[Edge] = []

    def segment(a: int, b: int, sites: int):
        pa, pb = nodes[a].pos, nodes[b].pos
        prev = a
        for k in range(1, sites):
            frac = k / sites
            pos = (pa[0] + (pb[0] - pa[0]) * frac, pa[1] + (pb[1] - pa[1]) * frac)
            mid = Node(len(nodes), NodeKind.MINOR, pos)
            nodes.append(mid)
            edges.append(Edge(len(edges), prev, mid.index))
            prev = mid.index
        edges.append(Edge(len(edges), prev, b))

    for r in range(m):
        for c in range(n - 1):
            segment(r * n + c, r * n + c + 1, h)
    for r in range(m - 1):
        for c in range(n):
            segment(r * n + c, (r + 1) * n + c, v)

    proc = Node(len(nodes), NodeKind.PROCESSING, ((exit[0] + entry[0]) / 2, float(n)))
    nodes.append(proc)
    x = exit[0] * n + exit[1]
    y = entry[0] * n + entry[1]
    edges.append(Edge(len(edges), x, proc.index, EdgeKind.OUTBOUND))
    edges.append(Edge(len(edges), proc.index, y, EdgeKind.INBOUND))
    return Layout(tuple(nodes), tuple(edges), GridParams(m, n, v, h, exit, entry))


def memory_edge_count(m: int, n: int, v: int, h: int) -> int:
    return (m - 1) * n * v + m * (n - 1) * h
