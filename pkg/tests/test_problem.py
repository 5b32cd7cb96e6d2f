import json
import random

import pytest

from shuttlesat.layout import build_grid_layout
from shuttlesat.problem import (CapacityError, ParseError, ProblemError, ProblemInstance, UnsupportedGateError,
                                full_register_access_sequence, make_problem, parse_problem, problem_to_dict,
                                qft_gate_list, qft_sequence, random_placement, sequence_from_gate_list,
                                serialize_problem)


def test_four_qubit_qft_example():
    gates = [(0,), (0, 1), (0, 2), (1,), (1, 2), (3,)]
    assert sequence_from_gate_list(gates) == ((0,), (0, 1), (0, 2), (1,), (1, 2), (3,))


@pytest.mark.parametrize("q", [1, 2, 5, 8])
def test_qft_length(q):
    assert len(qft_sequence(q)) == q * (q + 1) // 2


def test_qft_order():
    assert qft_gate_list(3) == [(0,), (0, 1), (0, 2), (1,), (1, 2), (2,)]


def test_qubit_to_chain_preprocessing():
    # qubits 0,1 share chain 0; qubit 2 lives on chain 1
    seq = sequence_from_gate_list([(0,), (1, 2), (0, 2)], {0: 0, 1: 0, 2: 1})
    assert seq == ((0,), (0, 1), (0, 1))


@pytest.mark.parametrize("gates,mapping,err", [
    ([], None, ProblemError),
    ([(0, 1, 2)], None, UnsupportedGateError),
    ([(0, 0)], None, UnsupportedGateError),
    ([(0, 1)], {0: 0, 1: 0}, UnsupportedGateError),
    ([(4,)], {0: 0}, ProblemError),
    ([()], None, ProblemError),
])
def test_gate_list_errors(gates, mapping, err):
    with pytest.raises(err):
        sequence_from_gate_list(gates, mapping)


def test_fra():
    assert full_register_access_sequence(3) == ((0,), (1,), (2,))


def test_placement_reproducible_and_injective():
    L = build_grid_layout(3, 3, 1, 1)
    a = random_placement(L, 6, 7)
    assert a == random_placement(L, 6, 7)
    assert len(set(a)) == 6 and set(a) <= set(L.memory_edges)
    assert a != random_placement(L, 6, 8)


def test_placement_is_stdlib_sample():
    # documented recipe: random.Random(seed).sample over ascending memory edge ids
    L = build_grid_layout(3, 3, 1, 1)
    for seed in range(5):
        want = tuple(random.Random(seed).sample(sorted(L.memory_edges), 6))
        assert random_placement(L, 6, seed) == want


def test_capacity():
    with pytest.raises(CapacityError):
        random_placement(build_grid_layout(2, 2, 1, 1), 5, 0)


def test_instance_validation(line_layout):
    L = line_layout
    with pytest.raises(ProblemError):
        ProblemInstance(L, (0, 0), ((0,),))
    with pytest.raises(ProblemError):
        ProblemInstance(L, (0, L.inbound), ((0,),))
    with pytest.raises(ProblemError):
        ProblemInstance(L, (0,), ())
    with pytest.raises(ProblemError):
        ProblemInstance(L, (0,), ((1,),))
    with pytest.raises(ProblemError):
        ProblemInstance(L, (0, 1, 2), ((0, 1, 2),))


def test_roundtrip_grid():
    p = make_problem(build_grid_layout(2, 3, 2, 1, exit=(1, 2), entry=(0, 0)), 3, 5,
                     sequence=[(0,), (1, 2)], label="x")
    text = serialize_problem(p)
    q = parse_problem(text)
    assert q == p
    assert serialize_problem(q) == text


def test_roundtrip_explicit():
    L = build_grid_layout(3, 3, 1, 1).without_edges([0])
    p = ProblemInstance(L, (1, 2), ((1,), (0, 1)), seed=None)
    text = serialize_problem(p)
    assert "explicit" in text
    q = parse_problem(text)
    assert q.layout == L and q.placement == p.placement
    assert serialize_problem(q) == text


def _doc():
    return problem_to_dict(make_problem(build_grid_layout(2, 2, 1, 2), 2, 1))


@pytest.mark.parametrize("mutate,where", [
    (lambda d: d.update(extra=1), "$"),
    (lambda d: d["chains"].append({"id": 2, "edge": 99}), "$.chains[2].edge"),
    (lambda d: d["chains"][1].update(edge=d["chains"][0]["edge"]), "$.chains[1].edge"),
    (lambda d: d["chains"][0].update(edge=6), "$.chains[0].edge"),
    (lambda d: d["sequence"].append([0, 1, 1]), "$.sequence[2]"),
    (lambda d: d["sequence"].append([7]), "$.sequence[2]"),
    (lambda d: d["layout"]["grid"].update(m="two"), "$.layout.grid.m"),
    (lambda d: d["layout"]["grid"].update(exit=[1, 1, 1]), "$.layout.grid.exit"),
    (lambda d: d.update(metadata={"seed": 1, "colour": "red"}), "$.metadata"),
])
def test_parse_errors_carry_location(mutate, where):
    d = _doc()
    mutate(d)
    with pytest.raises(ParseError) as info:
        parse_problem(json.dumps(d))
    assert info.value.location == where


def test_invalid_json():
    with pytest.raises(ParseError):
        parse_problem("{")
