"""Seeded random short exact sequences and presentation changes."""

from __future__ import annotations

import random
from math import prod
from typing import Optional, Sequence

from . import groups
from .linalg import IntMatrix, RingSpec, ZZ
from .modules import FPModule, ModuleMap
from .purity import ShortExactSequence, make_ses

DEFAULT_RINGS = (ZZ, RingSpec.mod(2), RingSpec.mod(4), RingSpec.mod(6),
                 RingSpec.mod(8), RingSpec.mod(9), RingSpec.mod(12))
MAX_ORDER = 256


def random_unimodular(n: int, rng: random.Random, steps: Optional[int] = None) -> list[list[int]]:
    """A random integer matrix of determinant ±1 built from elementary operations."""
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps if steps is not None else 2 * n):
        if n < 2:
            if rng.random() < 0.5:
                U[0][0] = -U[0][0]
            continue
        i, j = rng.sample(range(n), 2)
        c = rng.randint(-2, 2)
        for k in range(n):
            U[i][k] += c * U[j][k]
    return U


def _inverse_unimodular(U: list[list[int]], ring: RingSpec = ZZ) -> list[list[int]]:
    # entries may already be reduced mod m, so invert over the ring itself
    from .linalg import solve_linear

    n = len(U)
    A = IntMatrix.from_rows(U, n)
    cols = [solve_linear(A, [int(i == j) for i in range(n)], ring)[0] for j in range(n)]
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def random_orders(ring: RingSpec, rng: random.Random, max_order: int = MAX_ORDER,
                  max_summands: int = 3) -> list[int]:
    """Invariant-factor style orders; 0 marks a free Z summand (over Z only)."""
    m = ring.modulus
    choices = [d for d in groups.divisors(m) if d > 1] if m else list(range(2, 13))
    out: list[int] = []
    for _ in range(rng.randint(1, max_summands)):
        if m is None and rng.random() < 0.2:
            out.append(0)
            continue
        d = rng.choice(choices)
        if prod(o for o in out if o) * d <= max_order:
            out.append(d)
    return out or [rng.choice(choices)]


def random_module(ring: RingSpec, rng: random.Random, max_order: int = MAX_ORDER,
                  scramble: bool = True) -> FPModule:
    orders = random_orders(ring, rng, max_order)
    M = FPModule.from_orders(ring, orders)
    return change_generators(M, rng)[0] if scramble else M


def change_generators(M: FPModule, rng: random.Random):
    """Re-present M by a random unimodular change of generators.

    Returns ``(M', iso)`` with ``iso: M -> M'``.
    """
    n = M.gens
    if n == 0:
        return M, ModuleMap.identity(M)
    U = random_unimodular(n, rng)
    rel = IntMatrix.from_rows(U, n) @ M.relations
    extra = []
    if rel.cols and rng.random() < 0.3:
        coeffs = [rng.randint(-1, 1) for _ in range(rel.cols)]
        extra = [[sum(c * x for c, x in zip(coeffs, rel.row(i))) for i in range(n)]]
    M2 = FPModule.from_columns(M.ring, n, rel.columns() + extra)
    iso = ModuleMap(M, M2, IntMatrix.from_rows(U, n), check=True)
    return M2, iso


def random_ses(ring: RingSpec, rng: random.Random, max_order: int = MAX_ORDER) -> ShortExactSequence:
    B = random_module(ring, rng, max_order)
    k = rng.randint(1, 2)
    bound = ring.modulus or 8
    gens = [[rng.randrange(bound) for _ in range(B.gens)] for _ in range(k)]
    return make_ses(B, gens)


def make_corpus(size: int, seed: int, rings: Sequence[RingSpec] = DEFAULT_RINGS,
                max_order: int = MAX_ORDER) -> list[ShortExactSequence]:
    """``size`` sequences, cycling through ``rings``; deterministic in ``seed``."""
    rng = random.Random(seed)
    return [random_ses(rings[i % len(rings)], rng, max_order) for i in range(size)]


def transport(seq: ShortExactSequence, rng: random.Random):
    """Carry a sequence along a random isomorphism ``B -> B'``.

    Returns the transported sequence and the isomorphism.
    """
    B2, iso = change_generators(seq.B, rng)
    gens = [iso.apply(c) for c in seq.incl.matrix.columns()]
    return make_ses(B2, gens), iso


def transport_map(f: ModuleMap, rng: random.Random):
    """Carry ``f: N -> M`` along random isomorphisms of both ends."""
    N2, a = change_generators(f.source, rng)
    M2, b = change_generators(f.target, rng)
    a_inv = ModuleMap(N2, f.source, IntMatrix.from_rows(_inverse_unimodular(a.matrix.tolist(), f.source.ring), N2.gens)
                      if N2.gens else IntMatrix.zeros(0, 0), check=True)
    return b.compose(f).compose(a_inv), a, b
