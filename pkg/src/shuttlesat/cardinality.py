"""CNF construction helpers: clause store, cardinality constraints, gate definitions.

Literals are DIMACS-style signed integers.
"""

from __future__ import annotations

from collections import Counter
from contextlib import contextmanager
from typing import Iterable, Sequence

# below this size AtMost-1 is encoded pairwise, above with a sequential counter
PAIRWISE_LIMIT = 8


class CnfBuilder:
    def __init__(self):
        self.next_variable = 1
        self.clauses: list[list[int]] = []
        self.stats: Counter[str] = Counter()
        self.aux: Counter[str] = Counter()
        self._family = "misc"

    @property
    def num_vars(self) -> int:
        return self.next_variable - 1

    def new_var(self, tag: str | None = None) -> int:
        var = self.next_variable
        self.next_variable += 1
        if tag is not None:
            self.aux[tag] += 1
        return var

    def new_vars(self, count: int) -> range:
        start = self.next_variable
        self.next_variable += count
        return range(start, self.next_variable)

    def add(self, clause: Iterable[int]) -> None:
        clause = list(clause)
        for lit in clause:
            if lit == 0 or abs(lit) >= self.next_variable:
                raise ValueError(f"literal {lit} out of range")
        self.clauses.append(clause)
        self.stats[self._family] += 1

    @contextmanager
    def family(self, name: str):
        prev, self._family = self._family, name
        try:
            yield self
        finally:
            self._family = prev


def at_least_one(b: CnfBuilder, lits: Sequence[int]) -> None:
    if not lits:
        raise ValueError("AtLeast over an empty set is unsatisfiable")
    b.add(lits)


def at_most_k(b: CnfBuilder, lits: Sequence[int], k: int) -> None:
    if k < 1:
        raise ValueError("k must be at least 1")
    lits = list(lits)
    n = len(lits)
    if k >= n:
        return
    if k == 1 and n <= PAIRWISE_LIMIT:
        for a in range(n):
            for c in range(a + 1, n):
                b.add([-lits[a], -lits[c]])
        return
    _sequential_counter(b, lits, k)


def _sequential_counter(b: CnfBuilder, x: list[int], k: int) -> None:
    # Sinz 2005; s[i][j] <=> "at least j+1 of x[0..i] are true" (one-sided)
    n = len(x)
    s = [[b.new_var("card") for _ in range(k)] for _ in range(n - 1)]
    b.add([-x[0], s[0][0]])
    for j in range(1, k):
        b.add([-s[0][j]])
    for i in range(1, n - 1):
        b.add([-x[i], s[i][0]])
        b.add([-s[i - 1][0], s[i][0]])
        for j in range(1, k):
            b.add([-x[i], -s[i - 1][j - 1], s[i][j]])
            b.add([-s[i - 1][j], s[i][j]])
        b.add([-x[i], -s[i - 1][k - 1]])
    b.add([-x[n - 1], -s[n - 2][k - 1]])


def exactly_one(b: CnfBuilder, lits: Sequence[int]) -> None:
    at_least_one(b, lits)
    at_most_k(b, lits, 1)


def define_and(b: CnfBuilder, lits: Sequence[int], tag: str = "and") -> int:
    if not lits:
        raise ValueError("AND over an empty set")
    y = b.new_var(tag)
    for lit in lits:
        b.add([-y, lit])
    b.add([y] + [-lit for lit in lits])
    return y


def define_or(b: CnfBuilder, lits: Sequence[int], tag: str = "or") -> int:
    if not lits:
        raise ValueError("OR over an empty set")
    y = b.new_var(tag)
    b.add([-y] + list(lits))
    for lit in lits:
        b.add([y, -lit])
    return y
