"""Finitely presented modules over Z and Z/m, maps between them, and functors.

A module is stored by a presentation ``R^k --mu--> R^n --> M --> 0``: ``gens``
is n and ``relations`` is the n×k matrix mu whose columns are relations.  The
presentation is kept as given (the Auslander transpose depends on it); all
element-level computation goes through the Smith form of the relations,
which identifies M with ``⊕ Z/d_i`` in canonical coordinates.

Over Z/m every module is an abelian group killed by m and R-linear maps are
the additive ones, so Hom and ⊗ over R agree with Hom and ⊗ over Z of the
underlying groups.  That is what lets one integer engine serve both rings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from math import gcd, prod
from typing import Iterator, Optional, Sequence

from . import groups
from .errors import InfiniteModule, InvalidMap, RingMismatch, ScaleExceeded
from .linalg import (
    IntegerSolver,
    IntMatrix,
    RingSpec,
    Rows,
    _smith_rows,
    identity_rows,
    matmul,
    matvec,
    vec_mod,
)

DEFAULT_HOM_CAP = 4096


@dataclass(frozen=True, eq=False)
class FPModule:
    ring: RingSpec
    gens: int
    relations: IntMatrix

    def __post_init__(self):
        if self.relations.rows != self.gens:
            raise ValueError(
                f"relation matrix has {self.relations.rows} rows but module has {self.gens} generators"
            )
        object.__setattr__(self, "relations", self.relations.reduce(self.ring))

    # -- constructors -----------------------------------------------------
    @classmethod
    def from_columns(cls, ring: RingSpec, gens: int, columns: Sequence[Sequence[int]]) -> "FPModule":
        return cls(ring, gens, IntMatrix.from_columns(columns, gens))

    @classmethod
    def free(cls, ring: RingSpec, rank: int = 1) -> "FPModule":
        """R^rank with the zero-relation presentation (k = n zero columns)."""
        return cls(ring, rank, IntMatrix.zeros(rank, rank))

    @classmethod
    def cyclic(cls, ring: RingSpec, d: int) -> "FPModule":
        return cls(ring, 1, IntMatrix.from_rows([[d]]))

    @classmethod
    def from_orders(cls, ring: RingSpec, orders: Sequence[int]) -> "FPModule":
        return cls(ring, len(orders), IntMatrix.diag(list(orders)))

    @classmethod
    def zero(cls, ring: RingSpec) -> "FPModule":
        return cls(ring, 0, IntMatrix.zeros(0, 0))

    # -- canonical coordinates -------------------------------------------
    @cached_property
    def full_relations(self) -> Rows:
        """Relations over Z: mu, plus m·I when the ring is Z/m."""
        rows = self.relations.tolist()
        m = self.ring.modulus
        if m is not None:
            n = self.gens
            rows = [rows[i] + [m if k == i else 0 for k in range(n)] for i in range(n)]
        return rows

    def _diagonal_canon(self):
        # relation columns with a single nonzero entry: M is a sum of cyclics already
        n = self.gens
        R = self.relations
        m = self.ring.modulus
        d = [m or 0] * n
        for col in R.columns():
            nz = [i for i, x in enumerate(col) if x]
            if len(nz) > 1:
                return None
            if nz:
                d[nz[0]] = gcd(d[nz[0]], col[nz[0]])
        keep = sorted((i for i in range(n) if d[i] != 1), key=lambda i: (d[i] == 0, d[i]))
        orders = [d[i] for i in keep]
        if any(b % a for a, b in zip(orders, orders[1:]) if a):
            return None
        to_canon = [[int(j == i) for j in range(n)] for i in keep]
        from_canon = [[int(r == i) for i in keep] for r in range(n)]
        return orders, to_canon, from_canon

    @cached_property
    def _canon(self):
        fast = self._diagonal_canon()
        if fast is not None:
            return fast
        n = self.gens
        rows = self.full_relations
        k = len(rows[0]) if rows else 0
        S, _, _, diag, Sinv = _smith_rows(rows, n, k, track_cols=False)
        inv = list(diag) + [0] * (n - len(diag))
        keep = [i for i, d in enumerate(inv) if d != 1]
        orders = [inv[i] for i in keep]
        to_canon = [S[i] for i in keep]
        from_canon = [[Sinv[r][i] for i in keep] for r in range(n)]
        return orders, to_canon, from_canon

    @property
    def orders(self) -> list[int]:
        """Cyclic orders of the canonical decomposition (0 = infinite), a divisibility chain."""
        return self._canon[0]

    @property
    def to_canon(self) -> Rows:
        return self._canon[1]

    @property
    def from_canon(self) -> Rows:
        return self._canon[2]

    def canon(self, v: Sequence[int]) -> list[int]:
        return vec_mod(matvec(self.to_canon, v), self.orders)

    def from_canonical(self, c: Sequence[int]) -> list[int]:
        return matvec(self.from_canon, c)

    def is_zero_vector(self, v: Sequence[int]) -> bool:
        return not any(self.canon(v))

    def equal(self, v: Sequence[int], w: Sequence[int]) -> bool:
        return self.is_zero_vector([a - b for a, b in zip(v, w)])

    # -- basic invariants --------------------------------------------------
    @property
    def is_finite(self) -> bool:
        return all(self.orders)

    @property
    def is_zero(self) -> bool:
        return not self.orders

    def order(self) -> Optional[int]:
        return groups.group_order(self.orders)

    def exponent(self) -> int:
        if not self.is_finite:
            raise InfiniteModule("exponent of an infinite module")
        return self.orders[-1] if self.orders else 1

    def iso_key(self) -> tuple:
        """Hashable isomorphism invariant: equal keys iff isomorphic."""
        return (self.ring.modulus, tuple(self.orders))

    def is_isomorphic(self, other: "FPModule") -> bool:
        return self.iso_key() == other.iso_key()

    def element(self, coords: Sequence[int]) -> "ModuleElement":
        return ModuleElement(self, tuple(coords))

    def generator(self, i: int) -> "ModuleElement":
        return self.element([int(j == i) for j in range(self.gens)])

    def describe(self) -> str:
        return describe_orders(self.orders, self.ring)

    def __repr__(self) -> str:
        return f"FPModule({self.ring}, gens={self.gens}, relations={self.relations.tolist()})"


def describe_orders(orders: Sequence[int], ring: RingSpec) -> str:
    if not orders:
        return "0"
    parts = []
    for o in orders:
        if o == 0:
            parts.append("Z")
        else:
            parts.append(f"Z/{o}")
    return " + ".join(parts)


def _same_ring(*mods: FPModule) -> RingSpec:
    ring = mods[0].ring
    for M in mods[1:]:
        if M.ring != ring:
            raise RingMismatch(f"{ring} vs {M.ring}")
    return ring


@dataclass(frozen=True, eq=False)
class ModuleElement:
    parent: FPModule
    coords: tuple[int, ...]

    def __post_init__(self):
        if len(self.coords) != self.parent.gens:
            raise ValueError(f"element needs {self.parent.gens} coordinates")

    def __eq__(self, other):
        if not isinstance(other, ModuleElement) or other.parent is not self.parent:
            return NotImplemented
        return self.parent.equal(self.coords, other.coords)

    def __hash__(self):
        return hash((id(self.parent), tuple(self.parent.canon(self.coords))))

    def __add__(self, other: "ModuleElement") -> "ModuleElement":
        return ModuleElement(self.parent, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __neg__(self):
        return ModuleElement(self.parent, tuple(-a for a in self.coords))

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, r: int) -> "ModuleElement":
        return ModuleElement(self.parent, tuple(r * a for a in self.coords))

    def is_zero(self) -> bool:
        return self.parent.is_zero_vector(self.coords)

    def canonical(self) -> tuple[int, ...]:
        return tuple(self.parent.canon(self.coords))


# ---------------------------------------------------------------------------
# maps

@dataclass(frozen=True, eq=False)
class ModuleMap:
    """Homomorphism given by its action on generator coordinates.

    ``matrix`` is n_target × n_source; well-definedness is checked on
    construction unless ``check=False`` (used only where the construction
    guarantees it).
    """

    source: FPModule
    target: FPModule
    matrix: IntMatrix
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        if self.matrix.shape != (self.target.gens, self.source.gens):
            raise ValueError(
                f"map matrix must be {self.target.gens}x{self.source.gens}, got {self.matrix.shape}"
            )
        _same_ring(self.source, self.target)
        object.__setattr__(self, "matrix", self.matrix.reduce(self.source.ring))
        if self.check and not self._well_defined():
            raise InvalidMap("matrix does not respect the source relations")

    def _well_defined(self) -> bool:
        F = self.matrix.tolist()
        rel = self.source.full_relations
        for j in range(len(rel[0]) if rel else 0):
            col = [r[j] for r in rel]
            if not self.target.is_zero_vector(matvec(F, col)):
                return False
        return True

    @classmethod
    def identity(cls, M: FPModule) -> "ModuleMap":
        return cls(M, M, IntMatrix.identity(M.gens), check=False)

    @classmethod
    def zero(cls, M: FPModule, N: FPModule) -> "ModuleMap":
        return cls(M, N, IntMatrix.zeros(N.gens, M.gens), check=False)

    @classmethod
    def from_canonical(cls, M: FPModule, N: FPModule, C: Rows) -> "ModuleMap":
        """Build from a matrix acting on canonical coordinates (q_N × q_M)."""
        qm = len(M.orders)
        F = matmul(matmul(N.from_canon, C, qm), M.to_canon, M.gens) if N.gens and M.gens else \
            [[0] * M.gens for _ in range(N.gens)]
        return cls(M, N, IntMatrix.from_rows(F, M.gens), check=False)

    @cached_property
    def canonical_matrix(self) -> Rows:
        """q_target × q_source matrix in canonical coordinates, rows reduced."""
        S, T = self.source, self.target
        F = self.matrix.tolist()
        qs = len(S.orders)
        C = matmul(matmul(T.to_canon, F, S.gens), S.from_canon, qs) if T.to_canon else []
        return [[x % o if o else x for x in row] for row, o in zip(C, T.orders)]

    def apply(self, v: Sequence[int]) -> list[int]:
        return self.matrix.apply(v)

    def __call__(self, x: ModuleElement) -> ModuleElement:
        return self.target.element(self.apply(x.coords))

    def compose(self, first: "ModuleMap") -> "ModuleMap":
        """``self ∘ first``."""
        if first.target.gens != self.source.gens:
            raise ValueError("maps are not composable")
        return ModuleMap(first.source, self.target, self.matrix @ first.matrix, check=False)

    def __add__(self, other: "ModuleMap") -> "ModuleMap":
        m = IntMatrix(self.matrix.rows, self.matrix.cols,
                      tuple(a + b for a, b in zip(self.matrix.entries, other.matrix.entries)))
        return ModuleMap(self.source, self.target, m, check=False)

    def scale(self, r: int) -> "ModuleMap":
        m = IntMatrix(self.matrix.rows, self.matrix.cols, tuple(r * a for a in self.matrix.entries))
        return ModuleMap(self.source, self.target, m, check=False)

    def equals(self, other: "ModuleMap") -> bool:
        return all(
            self.target.equal(a, b)
            for a, b in zip(self.matrix.columns(), other.matrix.columns())
        )

    def is_zero(self) -> bool:
        return not any(any(r) for r in self.canonical_matrix)

    def kernel_generators(self) -> list[list[int]]:
        """Kernel generators in source generator coordinates."""
        ker = groups.kernel(self.source.orders, self.target.orders, self.canonical_matrix)
        return [self.source.from_canonical(c) for c in ker]

    def is_injective(self) -> bool:
        return not groups.kernel(self.source.orders, self.target.orders, self.canonical_matrix)

    def image_span(self) -> groups.Span:
        cols = [[r[j] for r in self.canonical_matrix] for j in range(len(self.source.orders))]
        return groups.Span(self.target.orders, cols)

    def is_surjective(self) -> bool:
        span = self.image_span()
        q = len(self.target.orders)
        return all(span.coefficients([int(i == j) for i in range(q)]) is not None for j in range(q))

    def is_isomorphism(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def __repr__(self) -> str:
        return f"ModuleMap({self.source.describe()} -> {self.target.describe()}, {self.matrix.tolist()})"


# ---------------------------------------------------------------------------
# canonical form

@dataclass(frozen=True)
class CanonicalForm:
    invariant_factors: tuple[int, ...]
    free_rank: int
    iso_to_canonical: ModuleMap

    @property
    def module(self) -> FPModule:
        return self.iso_to_canonical.target


def canonical_module(ring: RingSpec, orders: Sequence[int]) -> FPModule:
    return FPModule.from_orders(ring, orders)


def canonicalize(M: FPModule) -> CanonicalForm:
    """Invariant factors d_1 | d_2 | ... (non-units) plus free rank over Z."""
    orders = M.orders
    N = canonical_module(M.ring, orders)
    iso = ModuleMap(M, N, IntMatrix.from_rows(M.to_canon, M.gens) if orders else IntMatrix.zeros(0, M.gens))
    inverse = ModuleMap(N, M, IntMatrix.from_rows(M.from_canon, len(orders)) if M.gens else IntMatrix.zeros(0, len(orders)))
    if not (inverse.compose(iso).equals(ModuleMap.identity(M))
            and iso.compose(inverse).equals(ModuleMap.identity(N))):
        raise AssertionError("canonical isomorphism failed to invert")
    finite = tuple(o for o in orders if o)
    return CanonicalForm(finite, sum(1 for o in orders if o == 0), iso)


# ---------------------------------------------------------------------------
# sums, submodules, quotients

@dataclass(frozen=True)
class DirectSum:
    module: FPModule
    injections: tuple[ModuleMap, ...]
    projections: tuple[ModuleMap, ...]


def direct_sum(*mods: FPModule) -> DirectSum:
    """Block-diagonal presentation with its biproduct structure maps."""
    if not mods:
        raise ValueError("direct_sum of nothing")
    ring = _same_ring(*mods)
    n = sum(M.gens for M in mods)
    k = sum(M.relations.cols for M in mods)
    rel = [[0] * k for _ in range(n)]
    r0 = c0 = 0
    for M in mods:
        R = M.relations.tolist()
        for i in range(M.gens):
            for j in range(M.relations.cols):
                rel[r0 + i][c0 + j] = R[i][j]
        r0 += M.gens
        c0 += M.relations.cols
    S = FPModule(ring, n, IntMatrix.from_rows(rel, k))
    inj, proj = [], []
    r0 = 0
    for M in mods:
        E = [[int(i == r0 + j) for j in range(M.gens)] for i in range(n)]
        inj.append(ModuleMap(M, S, IntMatrix.from_rows(E, M.gens), check=False))
        P = [[int(j == r0 + i) for j in range(n)] for i in range(M.gens)]
        proj.append(ModuleMap(S, M, IntMatrix.from_rows(P, n), check=False))
        r0 += M.gens
    return DirectSum(S, tuple(inj), tuple(proj))


def tuple_map(source: FPModule, maps: Sequence[ModuleMap], target: Optional[DirectSum] = None):
    """``x -> (f_1(x), ..., f_t(x))`` into the direct sum of the targets."""
    if target is None:
        target = direct_sum(*[f.target for f in maps]) if maps else None
    if target is None:
        Z = FPModule.zero(source.ring)
        return ModuleMap(source, Z, IntMatrix.zeros(0, source.gens), check=False), DirectSum(Z, (), ())
    rows = []
    for f in maps:
        rows.extend(f.matrix.tolist())
    return ModuleMap(source, target.module, IntMatrix.from_rows(rows, source.gens), check=False), target


def submodule(M: FPModule, vectors: Sequence[Sequence[int]]):
    """The submodule generated by ``vectors`` with its own presentation.

    Returns ``(A, inclusion)``.  A has one generator per vector; its
    relations generate the kernel of ``R^g -> M``.
    """
    g = len(vectors)
    cols = [M.canon(v) for v in vectors]
    rels = groups.Span(M.orders, cols).relations() if g else []
    ring = M.ring
    seen = []
    for r in rels:
        r = [ring.reduce(x) for x in r]
        if any(r) and r not in seen:
            seen.append(r)
    A = FPModule.from_columns(ring, g, seen)
    inc = ModuleMap(A, M, IntMatrix.from_columns([list(v) for v in vectors], M.gens) if g else IntMatrix.zeros(M.gens, 0),
                    check=False)
    return A, inc


def quotient(M: FPModule, vectors: Sequence[Sequence[int]]):
    """``M / <vectors>`` presented by appending the vectors as relations."""
    cols = M.relations.columns() + [list(v) for v in vectors]
    C = FPModule.from_columns(M.ring, M.gens, cols)
    return C, ModuleMap(M, C, IntMatrix.identity(M.gens), check=False)


def image_module(f: ModuleMap):
    return submodule(f.target, f.matrix.columns())


# ---------------------------------------------------------------------------
# tensor product

@dataclass(frozen=True)
class TensorProduct:
    left: FPModule
    right: FPModule
    module: FPModule

    def pair(self, x: Sequence[int], y: Sequence[int]) -> list[int]:
        """Coordinates of x ⊗ y."""
        return [a * b for a in x for b in y]


def tensor(M: FPModule, N: FPModule) -> TensorProduct:
    """``coker([mu_M ⊗ I | I ⊗ mu_N])`` on n_M·n_N generators (i, j) -> i·n_N + j."""
    ring = _same_ring(M, N)
    left = M.relations.kron(IntMatrix.identity(N.gens))
    right = IntMatrix.identity(M.gens).kron(N.relations)
    rel = left.hstack(right) if left.rows else IntMatrix.zeros(0, 0)
    return TensorProduct(M, N, FPModule(ring, M.gens * N.gens, rel))


def tensor_maps(f: ModuleMap, g: ModuleMap, source: TensorProduct, target: TensorProduct) -> ModuleMap:
    """``f ⊗ g`` between previously built tensor products."""
    return ModuleMap(source.module, target.module, f.matrix.kron(g.matrix), check=False)


# ---------------------------------------------------------------------------
# Hom

def _hom_cell(a: int, b: int):
    """Generator value and order of Hom(Z/a, Z/b); None when the group is 0."""
    if a == 0:
        return (1, b)
    if b == 0:
        return None
    g = gcd(a, b)
    if g == 1:
        return None
    return (b // g, g)


class HomModule:
    """Hom(M, N) as a finitely presented module, with encode/decode to maps."""

    def __init__(self, M: FPModule, N: FPModule):
        self.ring = _same_ring(M, N)
        self.source, self.target = M, N
        cells = []
        for i, a in enumerate(M.orders):
            for j, b in enumerate(N.orders):
                c = _hom_cell(a, b)
                if c is not None:
                    cells.append((i, j, c[0], c[1]))
        self.cells = cells
        self.cell_orders = [c[3] for c in cells]
        self.module = FPModule.from_orders(self.ring, self.cell_orders)

    def decode(self, coords: Sequence[int]) -> ModuleMap:
        qm, qn = len(self.source.orders), len(self.target.orders)
        C = [[0] * qm for _ in range(qn)]
        for (i, j, val, _), c in zip(self.cells, coords):
            C[j][i] += c * val
        return ModuleMap.from_canonical(self.source, self.target, C)

    def encode(self, f: ModuleMap) -> list[int]:
        """Cell coordinates of ``f`` (reduced); inverse of :meth:`decode`."""
        C = f.canonical_matrix
        out = []
        for i, j, val, order in self.cells:
            x = C[j][i]
            if x % val:
                raise InvalidMap("map is not a homomorphism of the expected shape")
            out.append(x // val % order if order else x // val)
        return out

    def generators(self) -> list[ModuleMap]:
        n = len(self.cells)
        return [self.decode([int(k == t) for k in range(n)]) for t in range(n)]

    def span(self, maps: Sequence[ModuleMap]) -> groups.Span:
        """The subgroup of Hom generated by ``maps``, in cell coordinates."""
        return groups.Span(self.cell_orders, [self.encode(f) for f in maps])

    @property
    def is_finite(self) -> bool:
        return all(self.cell_orders)

    def order(self) -> Optional[int]:
        return groups.group_order(self.cell_orders)

    def enumerate_coords(self, cap: int = DEFAULT_HOM_CAP) -> Iterator[tuple[int, ...]]:
        if not self.is_finite:
            raise InfiniteModule("Hom module is infinite")
        size = self.order()
        if size > cap:
            raise ScaleExceeded("Hom enumeration", size, cap)
        return product(*[range(o) for o in self.cell_orders])

    def enumerate(self, cap: int = DEFAULT_HOM_CAP) -> Iterator[ModuleMap]:
        for c in self.enumerate_coords(cap):
            yield self.decode(c)


def hom_module(M: FPModule, N: FPModule) -> HomModule:
    return HomModule(M, N)


def hom_via_presentation(M: FPModule, N: FPModule) -> FPModule:
    """Hom(M, N) as the kernel of ``N^n --mu^T--> N^k``.

    Independent of the canonical route in :class:`HomModule`; used to
    cross-check it.
    """
    ring = _same_ring(M, N)
    n = M.gens
    mu = M.full_relations
    k = len(mu[0]) if mu else 0
    o = N.orders
    q = len(o)
    src = o * n                          # N^n, block t = image of generator t
    tgt = o * k
    phi = [[0] * (q * n) for _ in range(q * k)]
    for j in range(k):
        for t in range(n):
            if mu[t][j]:
                for c in range(q):
                    phi[j * q + c][t * q + c] = mu[t][j]
    ker = groups.kernel(src, tgt, phi)
    sub = groups.Span(src, ker)
    rels = sub.relations()
    return FPModule.from_columns(ring, len(ker), [[ring.reduce(x) for x in r] for r in rels])


# ---------------------------------------------------------------------------
# transpose and enumeration

def auslander_transpose(M: FPModule) -> FPModule:
    """``coker(mu^T)`` for the stored presentation mu of M."""
    mu = M.relations
    return FPModule(M.ring, mu.cols, mu.T)


def enumerate_canonical(M: FPModule, cap: int = DEFAULT_HOM_CAP) -> Iterator[list[int]]:
    if not M.is_finite:
        raise InfiniteModule(f"{M.describe()} is infinite")
    size = M.order()
    if size > cap:
        raise ScaleExceeded("element enumeration", size, cap)
    for c in product(*[range(o) for o in M.orders]):
        yield list(c)


def enumerate_elements(M: FPModule, cap: int = DEFAULT_HOM_CAP) -> Iterator[ModuleElement]:
    """Every element once, lexicographic in canonical coordinates."""
    for c in enumerate_canonical(M, cap):
        yield M.element(M.from_canonical(c))
