import itertools

import pytest
from hypothesis import given, settings, strategies as st
from pysat.solvers import Minisat22

from shuttlesat.cardinality import (PAIRWISE_LIMIT, CnfBuilder, at_least_one, at_most_k, define_and, define_or,
                                    exactly_one)


def _feasible(b: CnfBuilder, assumptions) -> bool:
    with Minisat22(bootstrap_with=b.clauses) as s:
        return s.solve(assumptions=assumptions)


def _check_at_most(n, k):
    b = CnfBuilder()
    xs = list(b.new_vars(n))
    at_most_k(b, xs, k)
    for bits in itertools.product((0, 1), repeat=n):
        lits = [x if bit else -x for x, bit in zip(xs, bits)]
        assert _feasible(b, lits) == (sum(bits) <= k), (n, k, bits)


@pytest.mark.parametrize("n", [2, 3, PAIRWISE_LIMIT, PAIRWISE_LIMIT + 1, 11])
def test_at_most_one_exhaustive(n):
    _check_at_most(n, 1)


@pytest.mark.parametrize("n,k", [(4, 2), (6, 3), (7, 2), (5, 4)])
def test_at_most_k_exhaustive(n, k):
    _check_at_most(n, k)


def test_pairwise_below_limit_uses_no_aux():
    b = CnfBuilder()
    at_most_k(b, list(b.new_vars(PAIRWISE_LIMIT)), 1)
    assert b.num_vars == PAIRWISE_LIMIT
    assert len(b.clauses) == PAIRWISE_LIMIT * (PAIRWISE_LIMIT - 1) // 2


def test_counter_above_limit_is_linear():
    n = 40
    b = CnfBuilder()
    at_most_k(b, list(b.new_vars(n)), 1)
    assert b.aux["card"] == n - 1
    assert len(b.clauses) < 4 * n


def test_trivial_bounds():
    b = CnfBuilder()
    xs = list(b.new_vars(3))
    at_most_k(b, xs, 3)
    assert b.clauses == []
    with pytest.raises(ValueError):
        at_most_k(b, xs, 0)
    with pytest.raises(ValueError):
        at_least_one(b, [])


def test_exactly_one():
    b = CnfBuilder()
    xs = list(b.new_vars(4))
    exactly_one(b, xs)
    for bits in itertools.product((0, 1), repeat=4):
        lits = [x if bit else -x for x, bit in zip(xs, bits)]
        assert _feasible(b, lits) == (sum(bits) == 1)


@pytest.mark.parametrize("gate,fn", [(define_and, all), (define_or, any)])
def test_gate_definitions(gate, fn):
    b = CnfBuilder()
    xs = list(b.new_vars(3))
    y = gate(b, xs)
    for bits in itertools.product((0, 1), repeat=3):
        lits = [x if bit else -x for x, bit in zip(xs, bits)]
        assert _feasible(b, lits + [y]) == fn(bits)
        assert _feasible(b, lits + [-y]) == (not fn(bits))
    with pytest.raises(ValueError):
        gate(b, [])


def test_literal_range_checked():
    b = CnfBuilder()
    b.new_vars(2)
    with pytest.raises(ValueError):
        b.add([3])
    with pytest.raises(ValueError):
        b.add([0])


def test_family_stats():
    b = CnfBuilder()
    xs = list(b.new_vars(3))
    with b.family("a"):
        b.add(xs)
        with b.family("b"):
            b.add([-xs[0]])
        b.add([xs[1]])
    assert b.stats == {"a": 2, "b": 1}


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 9), st.integers(1, 4), st.lists(st.booleans(), min_size=9, max_size=9))
def test_at_most_k_random(n, k, bits):
    bits = bits[:n]
    b = CnfBuilder()
    xs = list(b.new_vars(n))
    at_most_k(b, xs, k)
    lits = [x if bit else -x for x, bit in zip(xs, bits)]
    assert _feasible(b, lits) == (sum(bits) <= k)
