"""Exact linear algebra over the integers and the residue rings Z/m.

Everything here works on arbitrary-precision Python ints.  The Smith normal
form is the single engine: linear systems over Z/m are lifted to Z by
appending ``m * I`` columns, so modular solvability becomes integer
solvability.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import chain
from math import gcd
from operator import mul
from typing import Iterable, Optional, Sequence

Rows = list[list[int]]


@dataclass(frozen=True)
class RingSpec:
    """The base ring: ``Z`` (modulus None) or ``Z/m`` with m >= 2."""

    modulus: Optional[int] = None

    def __post_init__(self):
        if self.modulus is not None and self.modulus < 2:
            raise ValueError(f"modulus must be >= 2, got {self.modulus}")

    @classmethod
    def integers(cls) -> "RingSpec":
        return cls(None)

    @classmethod
    def mod(cls, m: int) -> "RingSpec":
        return cls(m)

    @property
    def kind(self) -> str:
        return "Integers" if self.modulus is None else "IntegersMod"

    @property
    def is_finite(self) -> bool:
        return self.modulus is not None

    def reduce(self, x: int) -> int:
        return x if self.modulus is None else x % self.modulus

    def is_unit(self, x: int) -> bool:
        if self.modulus is None:
            return x in (1, -1)
        return gcd(x, self.modulus) == 1

    def __str__(self) -> str:
        return "Z" if self.modulus is None else f"Z/{self.modulus}"


ZZ = RingSpec()


@dataclass(frozen=True)
class IntMatrix:
    """Immutable integer matrix stored row-major."""

    rows: int
    cols: int
    entries: tuple[int, ...] = field(repr=False)

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} "
                f"entries, got {len(self.entries)}"
            )

    # -- constructors -----------------------------------------------------
    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "IntMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != cols:
                raise ValueError("ragged rows")
        return cls(len(rows), cols, tuple(map(int, chain.from_iterable(rows))))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], nrows: int) -> "IntMatrix":
        for c in columns:
            if len(c) != nrows:
                raise ValueError(f"column of length {len(c)}, expected {nrows}")
        return cls.from_rows([[c[i] for c in columns] for i in range(nrows)], len(columns))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls.from_rows([[int(i == j) for j in range(n)] for i in range(n)], n)

    @classmethod
    def diag(cls, values: Sequence[int], rows: Optional[int] = None, cols: Optional[int] = None) -> "IntMatrix":
        rows = len(values) if rows is None else rows
        cols = len(values) if cols is None else cols
        out = [[0] * cols for _ in range(rows)]
        for i, v in enumerate(values):
            out[i][i] = v
        return cls.from_rows(out, cols)

    # -- access -----------------------------------------------------------
    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i * self.cols + j]

    def tolist(self) -> Rows:
        c = self.cols
        return [list(self.entries[i * c:(i + 1) * c]) for i in range(self.rows)]

    def row(self, i: int) -> list[int]:
        return list(self.entries[i * self.cols:(i + 1) * self.cols])

    def col(self, j: int) -> list[int]:
        return [self.entries[i * self.cols + j] for i in range(self.rows)]

    def columns(self) -> list[list[int]]:
        return [self.col(j) for j in range(self.cols)]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    # -- algebra ----------------------------------------------------------
    @property
    def T(self) -> "IntMatrix":
        return IntMatrix.from_columns(self.tolist(), self.cols) if self.rows else IntMatrix.zeros(self.cols, 0)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        return IntMatrix.from_rows(matmul(self.tolist(), other.tolist(), other.cols), other.cols)

    def apply(self, v: Sequence[int]) -> list[int]:
        return matvec(self.tolist(), v)

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.rows != other.rows:
            raise ValueError("hstack needs equal row counts")
        a, b = self.tolist(), other.tolist()
        return IntMatrix.from_rows([a[i] + b[i] for i in range(self.rows)], self.cols + other.cols)

    def reduce(self, ring: RingSpec) -> "IntMatrix":
        if ring.modulus is None:
            return self
        m = ring.modulus
        return IntMatrix(self.rows, self.cols, tuple(x % m for x in self.entries))

    def kron(self, other: "IntMatrix") -> "IntMatrix":
        a, b = self.tolist(), other.tolist()
        out = []
        for i in range(self.rows):
            for k in range(other.rows):
                out.append([a[i][j] * b[k][l] for j in range(self.cols) for l in range(other.cols)])
        return IntMatrix.from_rows(out, self.cols * other.cols)

    def is_zero(self) -> bool:
        return not any(self.entries)

    def __str__(self) -> str:
        return str(self.tolist())


# ---------------------------------------------------------------------------
# list-of-lists helpers (hot paths avoid IntMatrix allocation)

def matmul(a: Rows, b: Rows, bcols: int) -> Rows:
    out = []
    for ra in a:
        row = [0] * bcols
        for k, x in enumerate(ra):
            if x:
                rb = b[k]
                for j in range(bcols):
                    if rb[j]:
                        row[j] += x * rb[j]
        out.append(row)
    return out


def matvec(a: Rows, v: Sequence[int]) -> list[int]:
    nz = [(k, y) for k, y in enumerate(v) if y]
    if len(nz) * 3 < len(v):
        return [sum(r[k] * y for k, y in nz) for r in a]
    return [sum(map(mul, r, v)) for r in a]


def identity_rows(n: int) -> Rows:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose_rows(a: Rows, ncols: int) -> Rows:
    return [[r[j] for r in a] for j in range(ncols)]


def hstack_rows(*blocks: Rows) -> Rows:
    return [sum((b[i] for b in blocks), []) for i in range(len(blocks[0]))]


# ---------------------------------------------------------------------------
# Smith normal form

def _smith_rows(a: Rows, nrows: int, ncols: int, track_cols: bool = True):
    """Integer Smith form: returns (S, D, T, diag, S⁻¹) with S·A·T = D.

    Pivot is the nonzero entry of least absolute value in the active block,
    ties broken by lowest (row, col).  With ``track_cols=False`` T is not
    built (returned as None); module canonical forms only need S and S⁻¹.
    """
    D = [list(r) for r in a]
    S = identity_rows(nrows)
    Sinv = identity_rows(nrows)
    T = identity_rows(ncols) if track_cols else []
    diag: list[int] = []
    t = 0

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        S[i], S[j] = S[j], S[i]
        for r in Sinv:
            r[i], r[j] = r[j], r[i]

    def swap_cols(i, j):
        for r in D:
            r[i], r[j] = r[j], r[i]
        for r in T:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, q):  # row dst -= q * row src
        rd, rs = D[dst], D[src]
        for k in range(t, ncols):
            if rs[k]:
                rd[k] -= q * rs[k]
        sd, ss = S[dst], S[src]
        for k in range(nrows):
            if ss[k]:
                sd[k] -= q * ss[k]
        for r in Sinv:
            if r[dst]:
                r[src] += q * r[dst]

    def add_col(dst, src, q):  # col dst -= q * col src
        for r in D:
            if r[src]:
                r[dst] -= q * r[src]
        for r in T:
            if r[src]:
                r[dst] -= q * r[src]

    while t < min(nrows, ncols):
        # first (row, col) in row-major order holding the least nonzero |entry|
        best = None
        for i in range(t, nrows):
            tail = D[i][t:]
            if not any(tail):
                continue
            v = min(map(abs, filter(None, tail)))
            if best is None or v < best[0]:
                best = (v, i)
                if v == 1:
                    break
        if best is None:
            break
        v, pi = best
        ri = D[pi]
        pj = min((ri.index(x, t) for x in (v, -v) if x in ri[t:]))
        if pi != t:
            swap_rows(t, pi)
        if pj != t:
            swap_cols(t, pj)
        while True:
            p = D[t][t]
            for i in range(t + 1, nrows):
                if D[i][t]:
                    add_row(i, t, D[i][t] // p)
            for j in range(t + 1, ncols):
                if D[t][j]:
                    add_col(j, t, D[t][j] // p)
            # remainders left behind: move the smallest one into the pivot
            cand = None
            for i in range(t + 1, nrows):
                x = D[i][t]
                if x and (cand is None or abs(x) < cand[0]):
                    cand = (abs(x), "r", i)
            for j in range(t + 1, ncols):
                x = D[t][j]
                if x and (cand is None or abs(x) < cand[0]):
                    cand = (abs(x), "c", j)
            if cand is not None:
                if cand[1] == "r":
                    swap_rows(t, cand[2])
                else:
                    swap_cols(t, cand[2])
                continue
            break
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            S[t] = [-x for x in S[t]]
            for r in Sinv:
                r[t] = -r[t]
        diag.append(D[t][t])
        t += 1

    # diagonal now; repair the divisibility chain pairwise (d_i, d_j) -> (gcd, lcm)
    r = t
    t = 0
    for i in range(r):
        for j in range(i + 1, r):
            if D[j][j] % D[i][i] == 0:
                continue
            add_col(i, j, -1)
            while D[j][i]:
                q = D[j][i] // D[i][i]
                add_row(j, i, q)
                if D[j][i]:
                    swap_rows(i, j)
            add_col(j, i, D[i][j] // D[i][i])
            for k in (i, j):
                if D[k][k] < 0:
                    D[k] = [-x for x in D[k]]
                    S[k] = [-x for x in S[k]]
                    for row in Sinv:
                        row[k] = -row[k]
    diag = [D[k][k] for k in range(r)]
    return S, D, T if track_cols else None, diag, Sinv


@dataclass(frozen=True)
class SmithDecomposition:
    """``U @ original @ V == D`` with D diagonal and a divisibility chain."""

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix
    original: IntMatrix
    ring: RingSpec = ZZ

    @property
    def diagonal(self) -> list[int]:
        return [self.D[i, i] for i in range(min(self.D.rows, self.D.cols))]

    def check(self) -> bool:
        lhs = (self.U @ self.original @ self.V).reduce(self.ring)
        if lhs != self.D.reduce(self.ring):
            return False
        d = self.diagonal
        m = self.ring.modulus
        for i in range(self.D.rows):
            for j in range(self.D.cols):
                if i != j and self.D[i, j]:
                    return False
        for x, y in zip(d, d[1:]):
            if m is None:
                if x == 0 and y != 0:
                    return False
                if x and y % x:
                    return False
            else:
                if gcd(y, m) % gcd(x, m):
                    return False
        return True


def _unit_cofactor(a: int, m: int) -> int:
    """A unit u mod m with a ≡ gcd(a, m)·u (mod m)."""
    g = gcd(a, m)
    if g == m:
        return 1
    u = (a // g) % (m // g)
    while gcd(u, m) != 1:
        u += m // g
    return u % m


def smith_normal_form(A: IntMatrix, ring: RingSpec = ZZ) -> SmithDecomposition:
    S, D, T, diag, _ = _smith_rows(A.tolist(), A.rows, A.cols)
    if ring.modulus is not None:
        m = ring.modulus
        # normalize each diagonal entry to its associate gcd(d, m)
        for i, d in enumerate(diag):
            u = _unit_cofactor(d % m, m)
            if u != 1:
                inv = pow(u, -1, m)
                S[i] = [x * inv for x in S[i]]
                D[i] = [x * inv for x in D[i]]
        S = [[x % m for x in r] for r in S]
        T = [[x % m for x in r] for r in T]
        D = [[x % m for x in r] for r in D]
        for i, d in enumerate(diag):
            D[i][i] = gcd(d, m) % m
    return SmithDecomposition(
        U=IntMatrix.from_rows(S, A.rows),
        D=IntMatrix.from_rows(D, A.cols),
        V=IntMatrix.from_rows(T, A.cols),
        original=A,
        ring=ring,
    )


def determinant(A: IntMatrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = A.rows
    if n != A.cols:
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return 1
    M = A.tolist()
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


# ---------------------------------------------------------------------------
# solving

class IntegerSolver:
    """Reusable solver for ``A x = b`` over Z with A fixed."""

    def __init__(self, a: Rows, nrows: int, ncols: int):
        self.nrows, self.ncols = nrows, ncols
        S, _, T, diag, _ = _smith_rows(a, nrows, ncols)
        self.S, self.T, self.diag = S, T, diag
        self.rank = len(diag)

    def solve(self, b: Sequence[int]) -> Optional[list[int]]:
        c = matvec(self.S, b) if self.nrows else []
        y = [0] * self.ncols
        for i, d in enumerate(self.diag):
            if c[i] % d:
                return None
            y[i] = c[i] // d
        if any(c[self.rank:]):
            return None
        return matvec(self.T, y) if self.ncols else []

    def contains(self, b: Sequence[int]) -> bool:
        return self.solve(b) is not None

    def nullspace(self) -> list[list[int]]:
        """Generators (as vectors) of the integer kernel of A."""
        return [[r[j] for r in self.T] for j in range(self.rank, self.ncols)]


def _lift_mod(a: Rows, nrows: int, ncols: int, m: int) -> Rows:
    return [list(a[i]) + [m if k == i else 0 for k in range(nrows)] for i in range(nrows)]


def solve_linear(A: IntMatrix, b: Sequence[int], ring: RingSpec = ZZ):
    """Solve ``A x = b`` over ``ring``.

    Returns None when there is no solution, otherwise ``(x, N)`` where the
    columns of ``N`` generate ``{x : A x = 0}``.
    """
    if len(b) != A.rows:
        raise ValueError(f"right-hand side has length {len(b)}, expected {A.rows}")
    rows = A.tolist()
    if ring.modulus is None:
        solver = IntegerSolver(rows, A.rows, A.cols)
        x = solver.solve(b)
        if x is None:
            return None
        return x, IntMatrix.from_columns(solver.nullspace(), A.cols)
    m = ring.modulus
    solver = IntegerSolver(_lift_mod(rows, A.rows, A.cols, m), A.rows, A.cols + A.rows)
    x = solver.solve(b)
    if x is None:
        return None
    x = [v % m for v in x[:A.cols]]
    null = []
    for v in solver.nullspace():
        v = [e % m for e in v[:A.cols]]
        if any(v) and v not in null:
            null.append(v)
    return x, IntMatrix.from_columns(null, A.cols)


def _prime_powers(m: int) -> list[tuple[int, int]]:
    out, p = [], 2
    while p * p <= m:
        if m % p == 0:
            q = 1
            while m % p == 0:
                m //= p
                q *= p
            out.append((p, q))
        p += 1
    if m > 1:
        out.append((m, m))
    return out


def _valuation(x: int, p: int, q: int) -> int:
    x %= q
    if not x:
        return q  # stands in for infinity
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def _solve_prime_power(a: Rows, b: Sequence[int], nrows: int, ncols: int, p: int, q: int):
    D = [[x % q for x in r] for r in a]
    c = [x % q for x in b]
    ops: list[tuple] = []   # column operations, replayed on the solution at the end
    t = 0
    pivots: list[int] = []
    while t < min(nrows, ncols):
        best = None
        for i in range(t, nrows):
            for j in range(t, ncols):
                if D[i][j]:
                    v = _valuation(D[i][j], p, q)
                    if best is None or v < best[0]:
                        best = (v, i, j)
                        if v == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        v, pi, pj = best
        D[t], D[pi] = D[pi], D[t]
        c[t], c[pi] = c[pi], c[t]
        if pj != t:
            for r in D:
                r[t], r[pj] = r[pj], r[t]
            ops.append((t, pj, None))
        pv = p ** v
        u = pow(D[t][t] // pv, -1, q)
        D[t] = [(x * u) % q for x in D[t]]
        c[t] = (c[t] * u) % q
        for i in range(t + 1, nrows):
            f = D[i][t] // pv
            if f:
                D[i] = [(x - f * y) % q for x, y in zip(D[i], D[t])]
                c[i] = (c[i] - f * c[t]) % q
        for j in range(t + 1, ncols):
            g = D[t][j] // pv
            if g:
                D[t][j] = 0
                ops.append((t, j, g))
        pivots.append(pv)
        t += 1
    y = [0] * ncols
    for i, pv in enumerate(pivots):
        if c[i] % pv:
            return None
        y[i] = c[i] // pv
    if any(c[len(pivots):]):
        return None
    for t, j, g in reversed(ops):
        if g is None:
            y[t], y[j] = y[j], y[t]
        else:
            y[t] = (y[t] - g * y[j]) % q
    return y


def solve_mod(A: IntMatrix, b: Sequence[int], m: int) -> Optional[list[int]]:
    """One solution of ``A x = b`` over Z/m, or None.

    Works one prime power at a time with pivots of least valuation, then
    glues the answers by CRT.  Cheaper than :func:`solve_linear` for wide
    systems since no nullspace is tracked and entries stay reduced.
    """
    if len(b) != A.rows:
        raise ValueError(f"right-hand side has length {len(b)}, expected {A.rows}")
    rows = A.tolist()
    x = [0] * A.cols
    for p, q in _prime_powers(m):
        part = _solve_prime_power(rows, b, A.rows, A.cols, p, q)
        if part is None:
            return None
        rest = m // q
        e = rest * pow(rest, -1, q)  # 1 mod q, 0 mod m/q
        x = [(xi + e * yi) % m for xi, yi in zip(x, part)]
    return x


def kernel_basis(A: IntMatrix, ring: RingSpec = ZZ) -> IntMatrix:
    """Matrix whose columns generate the kernel of A over ``ring``."""
    return solve_linear(A, [0] * A.rows, ring)[1]


@dataclass(frozen=True)
class LinearSystem:
    """Equations ``sum_i r[i][j] x_i = a_j`` (one per column j of r).

    ``coefficients`` is the n×k matrix (r_ij): row i belongs to unknown x_i,
    column j to equation j.  Unknowns and constants live in a module and are
    stored as coordinate vectors.
    """

    coefficients: IntMatrix
    constants: tuple[tuple[int, ...], ...]

    @property
    def unknown_count(self) -> int:
        return self.coefficients.rows

    def __post_init__(self):
        if len(self.constants) != self.coefficients.cols:
            raise ValueError("one constant per equation required")


def vec_mod(v: Iterable[int], orders: Sequence[int]) -> list[int]:
    return [x % o if o else x for x, o in zip(v, orders)]
