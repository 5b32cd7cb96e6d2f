from hypothesis import HealthCheck, assume, given, settings, strategies as st

from shuttlesat.layout import build_grid_layout
from shuttlesat.problem import ProblemInstance, make_problem, parse_problem, serialize_problem
from shuttlesat.solver import MINIMAL, solve_minimal
from shuttlesat.verify import ENCODING, PHYSICAL, joint_moves, oracle_minimal, validate_schedule, Schedule

LAYOUTS = [build_grid_layout(2, 2, 1, 2), build_grid_layout(2, 2, 1, 3), build_grid_layout(2, 3, 1, 1),
           build_grid_layout(2, 2, 1, 2, entry=(0, 1))]


@st.composite
def problems(draw, max_chains=3, max_len=4):
    layout = draw(st.sampled_from(LAYOUTS))
    k = draw(st.integers(1, max_chains))
    placement = tuple(draw(st.permutations(layout.memory_edges))[:k])
    elements = st.one_of(st.tuples(st.integers(0, k - 1)),
                         st.tuples(st.integers(0, k - 1), st.integers(0, k - 1)).filter(lambda p: p[0] < p[1]))
    seq = tuple(draw(st.lists(elements, min_size=1, max_size=max_len)))
    return ProblemInstance(layout, placement, seq)


fast = settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@fast
@given(problems(), st.sampled_from([ENCODING, PHYSICAL]))
def test_minimal_horizon_equals_bfs(p, mode):
    ref = oracle_minimal(p, 25, mode=mode)
    out = solve_minimal(p, crossing=mode)
    assert out.kind == MINIMAL
    assert out.t_hat == ref.minimal_T
    assert out.t_hat >= len(p.sequence)
    assert validate_schedule(p, out.schedule, mode).ok
    if mode == ENCODING:
        # entering the outbound and the inbound edge both occupy the processing node
        served = {i for el in p.sequence for i in el}
        assert out.t_hat >= 2 * len(served)


@fast
@given(problems())
def test_stay_extension_keeps_schedule_valid(p):
    out = solve_minimal(p)
    s = out.schedule
    assume(p.layout.outbound not in s.positions[-1])
    assert validate_schedule(p, s.extended()).ok


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(LAYOUTS), st.integers(1, 4), st.integers(0, 10**6))
def test_document_roundtrip(layout, k, seed):
    p = make_problem(layout, k, seed)
    text = serialize_problem(p)
    assert parse_problem(text) == p
    assert serialize_problem(parse_problem(text)) == text


@settings(max_examples=50, deadline=None)
@given(problems(), st.sampled_from([ENCODING, PHYSICAL]))
def test_each_joint_move_is_a_valid_step(p, mode):
    state = p.placement
    for nxt in joint_moves(p.layout, state, mode):
        s = Schedule(1, [state, nxt], [1] * len(p.sequence))
        bad = validate_schedule(p, s, mode).rules() - {"sequence-presence", "sequence-order"}
        assert not bad, (state, nxt, bad)
