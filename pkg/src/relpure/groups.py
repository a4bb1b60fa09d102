"""Coordinate-level computations in groups ``Z^q / diag(orders)``.

An order of 0 means an infinite cyclic coordinate.  Every finitely presented
module is brought into this shape by its Smith form (see ``modules``), after
which subgroups, kernels, intersections and memberships are single integer
linear systems.
"""

from __future__ import annotations

from itertools import product
from math import prod
from typing import Iterator, Optional, Sequence

from .errors import ScaleExceeded
from .linalg import IntegerSolver, Rows, vec_mod

Vec = list[int]


def diag_columns(orders: Sequence[int]) -> list[Vec]:
    q = len(orders)
    return [[o if k == i else 0 for k in range(q)] for i, o in enumerate(orders) if o]


def _columns_to_rows(cols: Sequence[Sequence[int]], nrows: int) -> Rows:
    return [[c[i] for c in cols] for i in range(nrows)]


class Span:
    """The subgroup generated by ``gens`` inside ``Z^q / diag(orders)``."""

    def __init__(self, orders: Sequence[int], gens: Sequence[Sequence[int]]):
        self.orders = list(orders)
        self.gens = [list(g) for g in gens]
        q = len(self.orders)
        cols = self.gens + diag_columns(self.orders)
        self._ng = len(self.gens)
        self._solver = IntegerSolver(_columns_to_rows(cols, q), q, len(cols))

    def coefficients(self, v: Sequence[int]) -> Optional[Vec]:
        """Integer c with ``sum c_i gens_i == v`` in the group, or None."""
        x = self._solver.solve(v)
        return None if x is None else x[:self._ng]

    def __contains__(self, v: Sequence[int]) -> bool:
        return self._solver.solve(v) is not None

    def contains_all(self, vs) -> bool:
        return all(v in self for v in vs)

    def relations(self) -> list[Vec]:
        """Generators of ``{c : sum c_i gens_i == 0}``."""
        out = []
        for v in self._solver.nullspace():
            w = v[:self._ng]
            if any(w):
                out.append(w)
        return out

    def index_diagonal(self) -> list[int]:
        return self._solver.diag

    def order(self) -> int:
        """Cardinality of the span (group must be finite)."""
        if not all(self.orders):
            raise ValueError("order of a span in an infinite group")
        total = prod(self.orders)
        return total // prod(self._solver.diag)


def reduce_vec(v: Sequence[int], orders: Sequence[int]) -> Vec:
    return vec_mod(v, orders)


def is_zero(v: Sequence[int], orders: Sequence[int]) -> bool:
    return all((x % o == 0) if o else x == 0 for x, o in zip(v, orders))


def kernel(src_orders: Sequence[int], tgt_orders: Sequence[int], phi: Rows) -> list[Vec]:
    """Generators of the kernel of the homomorphism with matrix ``phi``.

    ``phi`` has one row per target coordinate and one column per source
    coordinate; the result is expressed in source coordinates.
    """
    qs, qt = len(src_orders), len(tgt_orders)
    dcols = diag_columns(tgt_orders)
    rows = [list(phi[i]) + [c[i] for c in dcols] for i in range(qt)]
    solver = IntegerSolver(rows, qt, qs + len(dcols))
    out = []
    for v in solver.nullspace():
        w = reduce_vec(v[:qs], src_orders)
        if any(w) and w not in out:
            out.append(w)
    return out


def intersection(orders: Sequence[int], g1: Sequence[Vec], g2: Sequence[Vec]) -> list[Vec]:
    """Generators of ``<g1> ∩ <g2>``."""
    q = len(orders)
    n1 = len(g1)
    neg2 = [[-x for x in g] for g in g2]
    cols = [list(g) for g in g1] + neg2 + diag_columns(orders)
    solver = IntegerSolver(_columns_to_rows(cols, q), q, len(cols))
    out = []
    for v in solver.nullspace():
        s = v[:n1]
        w = reduce_vec([sum(s[k] * g1[k][i] for k in range(n1)) for i in range(q)], orders)
        if any(w) and w not in out:
            out.append(w)
    return out


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def _in_hnf_lattice(v: Vec, rows: Sequence[Vec], start: int) -> bool:
    v = list(v)
    for k, row in enumerate(rows):
        j = start + k
        h = row[j]
        if v[j] % h:
            return False
        c = v[j] // h
        if c:
            for t in range(j, len(v)):
                v[t] -= c * row[t]
    return not any(v)


def enumerate_subgroups(orders: Sequence[int], cap: Optional[int] = None) -> Iterator[list[Vec]]:
    """Every subgroup of the finite group ``Z^q / diag(orders)``, exactly once.

    Subgroups correspond to lattices between ``diag(orders) Z^q`` and ``Z^q``;
    each is produced from its unique row Hermite basis (upper triangular,
    positive diagonal, entries right of a pivot reduced modulo that column's
    pivot).  Yields generator lists; the trivial subgroup yields ``[]``.
    Ordering is deterministic.
    """
    orders = list(orders)
    if not all(orders):
        raise ValueError("subgroup enumeration needs a finite group")
    q = len(orders)
    count = 0

    def rec(i: int, after: list[Vec]):
        nonlocal count
        if i < 0:
            count += 1
            if cap is not None and count > cap:
                raise ScaleExceeded("submodule enumeration", count, cap)
            gens = []
            for r in after:
                w = reduce_vec(r, orders)
                if any(w):
                    gens.append(w)
            yield gens
            return
        d = orders[i]
        ranges = [range(after[k][i + 1 + k]) for k in range(len(after))]
        for h in divisors(d):
            mult = d // h
            for tail in product(*ranges):
                tail = list(tail)
                if not _in_hnf_lattice([0] * (i + 1) + [mult * x for x in tail], after, i + 1):
                    continue
                row = [0] * i + [h] + tail
                yield from rec(i - 1, [row] + after)

    yield from rec(q - 1, [])


def group_order(orders: Sequence[int]) -> Optional[int]:
    """Cardinality, or None when some coordinate is infinite."""
    return prod(orders) if all(orders) else None
