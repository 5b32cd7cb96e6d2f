"""ASCII frames of a schedule, one per time step.

Grid layouts are drawn to scale: ``+`` junctions, ``:`` minor nodes, one
three-character cell per site holding the chain id (``.`` when empty). The
interface edges are listed to the right of the exit/entry junction rows.
Layouts without grid parameters fall back to an edge-by-edge listing.
"""

from __future__ import annotations

from .layout import Layout
from .problem import ProblemInstance
from .verify import Schedule, ScheduleError

CELL = 3


def _label(chains: list[int]) -> str:
    if not chains:
        return " . "
    text = ",".join(str(i) for i in chains)
    return text.center(CELL) if len(text) <= CELL else text


class _Canvas:
    def __init__(self, width: int, height: int):
        self.rows = [[" "] * width for _ in range(height)]

    def put(self, y: int, x: int, text: str):
        row = self.rows[y]
        if x + len(text) > len(row):
            row.extend(" " * (x + len(text) - len(row)))
        for k, ch in enumerate(text):
            row[x + k] = ch

    def lines(self) -> list[str]:
        return ["".join(r).rstrip() for r in self.rows]


def _grid_frame(layout: Layout, state: tuple[int, ...]) -> list[str]:
    g = layout.grid
    on: dict[int, list[int]] = {}
    for i, e in enumerate(state):
        on.setdefault(e, []).append(i)
    seg_w = g.h * CELL + (g.h - 1)
    seg_h = 2 * g.v - 1
    xs = [1 + c * (seg_w + 1) for c in range(g.n)]
    ys = [r * (seg_h + 1) for r in range(g.m)]
    canvas = _Canvas(xs[-1] + 2, ys[-1] + 1)
    for r in range(g.m):
        for c in range(g.n):
            canvas.put(ys[r], xs[c], "+")

    # edges are created horizontal segments first, row-major, then vertical ones
    e = 0
    for r in range(g.m):
        for c in range(g.n - 1):
            x = xs[c] + 1
            for k in range(g.h):
                canvas.put(ys[r], x, _label(on.get(e, [])))
                x += CELL
                if k < g.h - 1:
                    canvas.put(ys[r], x, ":")
                    x += 1
                e += 1
    for r in range(g.m - 1):
        for c in range(g.n):
            y = ys[r] + 1
            for k in range(g.v):
                canvas.put(y, xs[c] - 1, _label(on.get(e, [])))
                y += 1
                if k < g.v - 1:
                    canvas.put(y, xs[c], ":")
                    y += 1
                e += 1

    lines = canvas.lines()
    width = max(len(s) for s in lines)
    lines = [s.ljust(width) for s in lines]
    out_txt = "out[" + _label(on.get(layout.outbound, [])).strip() + "]"
    in_txt = "in[" + _label(on.get(layout.inbound, [])).strip() + "]"
    ry, cy = ys[g.exit[0]], ys[g.entry[0]]
    if ry == cy:
        lines[ry] += f"  -> {out_txt} -> P -> {in_txt} ->"
    else:
        lines[ry] += f"  -> {out_txt} -> P"
        lines[cy] += f"  <- {in_txt} <- P"
    return [s.rstrip() for s in lines]


def _list_frame(layout: Layout, state: tuple[int, ...]) -> list[str]:
    out = []
    for i, e in enumerate(state):
        kind = layout.edges[e].kind.value
        u, v = layout.edges[e].endpoints
        out.append(f"chain {i}: edge {e} ({kind}, nodes {u}-{v})")
    return out


def render_frame(layout: Layout, state: tuple[int, ...]) -> list[str]:
    if layout.grid is not None:
        return _grid_frame(layout, state)
    return _list_frame(layout, state)


def render_schedule(problem: ProblemInstance, schedule: Schedule) -> str:
    layout = problem.layout
    if any(len(row) != problem.num_chains for row in schedule.positions):
        raise ScheduleError("schedule and problem disagree on the number of chains")
    if any(not 0 <= e < layout.num_edges for row in schedule.positions for e in row):
        raise ScheduleError("schedule uses edges the layout does not have")
    if len(schedule.positions) != schedule.horizon + 1:
        raise ScheduleError("schedule length does not match its horizon")
    served: dict[int, list[int]] = {}
    for j, t in enumerate(schedule.satisfaction_times):
        served.setdefault(t, []).append(j)
    blocks = []
    for t, state in enumerate(schedule.positions):
        head = f"t={t}"
        for j in served.get(t, []):
            chains = " ".join(str(i) for i in problem.sequence[j])
            head += f"  served S{j}=({chains})"
        blocks.append("\n".join([head] + render_frame(layout, state)))
    return "\n\n".join(blocks) + "\n"
