import pytest

from shuttlesat.layout import build_grid_layout
from shuttlesat.problem import ProblemInstance, load_problem
from shuttlesat.verify import Schedule, ScheduleError, load_schedule, validate_schedule
from shuttlesat.viz import render_schedule

from conftest import DATA


def test_golden_frames():
    p = load_problem(DATA / "grid4x4_c4.json")
    s = load_schedule(DATA / "grid4x4_c4.schedule.json")
    assert validate_schedule(p, s).ok
    text = render_schedule(p, s)
    assert text == (DATA / "grid4x4_c4.frames.txt").read_text()
    frames = text.strip().split("\n\n")
    assert len(frames) == s.horizon + 1
    assert frames[0].startswith("t=0\n")


def test_first_frame_shows_placement(line_layout):
    # edge 1 is the right half of the top street, edge 2 the left half of the bottom one
    p = ProblemInstance(line_layout, (1, 2), ((0,), (1,)))
    s = Schedule(2, [(1, 2), (6, 2), (7, 2)], [2, 2])
    first = render_schedule(p, s).split("\n\n")[0].splitlines()
    assert first[1].startswith(" + . : 0 +")
    assert first[3].startswith(" + 1 : . +")
    assert "out[.]" in first[1] and "in[.]" in first[3]


def test_explicit_layout_listing():
    L = build_grid_layout(3, 3, 1, 1).without_edges([0])
    p = ProblemInstance(L, (1,), ((0,),))
    text = render_schedule(p, Schedule(0, [(1,)], [0]))
    assert "edge 1" in text


def test_shape_mismatch(line_layout):
    p = ProblemInstance(line_layout, (1,), ((0,),))
    with pytest.raises(ScheduleError):
        render_schedule(p, Schedule(1, [(1, 0), (1, 0)], [1]))
