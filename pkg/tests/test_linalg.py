from itertools import combinations, permutations, product
from math import gcd

from hypothesis import given
from hypothesis import strategies as st

from relpure.linalg import (
    IntMatrix,
    RingSpec,
    ZZ,
    determinant,
    kernel_basis,
    smith_normal_form,
    solve_linear,
    solve_mod,
)

from .oracles import relation_lattice, small_matrices


def leibniz_det(rows):
    n = len(rows)
    total = 0
    for p in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if p[i] > p[j])
        term = -1 if inv % 2 else 1
        for i in range(n):
            term *= rows[i][p[i]]
        total += term
    return total


def determinantal_divisors(rows):
    """d_k = gcd of all k x k minors; invariant factors are d_k / d_{k-1}."""
    r, c = len(rows), len(rows[0])
    out = []
    for k in range(1, min(r, c) + 1):
        g = 0
        for I in combinations(range(r), k):
            for J in combinations(range(c), k):
                g = gcd(g, leibniz_det([[rows[i][j] for j in J] for i in I]))
        out.append(g)
    return out


def snf_oracle(rows):
    d = [1] + determinantal_divisors(rows)
    return [d[k] // d[k - 1] if d[k] else 0 for k in range(1, len(d))]


def test_snf_diag_2_3():
    D = smith_normal_form(IntMatrix.from_rows([[2, 0], [0, 3]]))
    assert D.diagonal == [1, 6]
    assert D.check()


def test_snf_zero():
    D = smith_normal_form(IntMatrix.zeros(2, 2))
    assert D.diagonal == [0, 0]
    assert D.U == IntMatrix.identity(2) and D.V == IntMatrix.identity(2)


def test_snf_2468():
    D = smith_normal_form(IntMatrix.from_rows([[2, 4], [6, 8]]))
    assert [abs(x) for x in D.diagonal] == [2, 4]


@given(small_matrices())
def test_snf_matches_determinantal_divisors(rows):
    A = IntMatrix.from_rows(rows)
    D = smith_normal_form(A)
    assert D.check()
    assert [abs(x) for x in D.diagonal] == snf_oracle(rows)


@given(small_matrices())
def test_snf_unimodular(rows):
    A = IntMatrix.from_rows(rows)
    D = smith_normal_form(A)
    assert abs(determinant(D.U)) == 1 and abs(determinant(D.V)) == 1


@given(small_matrices(max_rows=3, max_cols=3), st.sampled_from([2, 4, 6, 8, 9, 12]))
def test_snf_mod_m(rows, m):
    ring = RingSpec.mod(m)
    D = smith_normal_form(IntMatrix.from_rows(rows), ring)
    assert D.check()
    assert gcd(determinant(D.U), m) == 1 and gcd(determinant(D.V), m) == 1


@given(st.integers(1, 4).flatmap(lambda n: st.lists(st.lists(st.integers(-9, 9), min_size=n, max_size=n),
                                                    min_size=n, max_size=n)))
def test_determinant_matches_leibniz(rows):
    assert determinant(IntMatrix.from_rows(rows)) == leibniz_det(rows)


def test_solve_examples():
    Z4 = RingSpec.mod(4)
    assert solve_linear(IntMatrix.from_rows([[2]]), [1], Z4) is None
    x, N = solve_linear(IntMatrix.from_rows([[2]]), [0], ZZ)
    assert x == [0] and N.cols == 0
    x, N = solve_linear(IntMatrix.from_rows([[2]]), [2], Z4)
    assert (2 * x[0]) % 4 == 2
    assert {tuple(c) for c in N.columns()} == {(2,)}


def test_kernel_examples():
    assert kernel_basis(IntMatrix.from_rows([[2]])).cols == 0
    assert kernel_basis(IntMatrix.from_rows([[2]]), RingSpec.mod(4)).columns() == [[2]]
    K = kernel_basis(IntMatrix.from_rows([[1, 0]]))
    assert K.columns() in ([[0, 1]], [[0, -1]])


@given(small_matrices(max_rows=2, max_cols=3, lo=0, hi=11), st.sampled_from([2, 4, 6, 9, 12]), st.data())
def test_solve_exhaustive_mod_m(rows, m, data):
    ring = RingSpec.mod(m)
    A = IntMatrix.from_rows(rows)
    b = [data.draw(st.integers(0, m - 1)) for _ in range(A.rows)]
    sols = [x for x in product(range(m), repeat=A.cols)
            if all((sum(A[i, j] * x[j] for j in range(A.cols)) - b[i]) % m == 0 for i in range(A.rows))]
    res = solve_linear(A, b, ring)
    assert (res is None) == (not sols)
    if res is not None:
        x, N = res
        assert tuple(v % m for v in x) in sols
        for v in N.columns():
            assert all(sum(A[i, j] * v[j] for j in range(A.cols)) % m == 0 for i in range(A.rows))
        # nullspace generators span the full solution set difference
        kernel = {tuple((s - t) % m for s, t in zip(sol, x)) for sol in sols}
        assert relation_lattice(m, A.cols, N.columns()) == kernel


@given(small_matrices())
def test_solve_over_z_sound(rows):
    A = IntMatrix.from_rows(rows)
    b = A.apply([1] * A.cols)
    x, N = solve_linear(A, b)
    assert A.apply(x) == b
    for v in N.columns():
        assert not any(A.apply(v))


@given(small_matrices(max_rows=3, max_cols=4, lo=0, hi=35), st.sampled_from([2, 4, 6, 8, 9, 12, 36]), st.data())
def test_solve_mod_agrees_with_solve_linear(rows, m, data):
    A = IntMatrix.from_rows(rows)
    b = [data.draw(st.integers(0, m - 1)) for _ in range(A.rows)]
    x = solve_mod(A, b, m)
    assert (x is None) == (solve_linear(A, b, RingSpec.mod(m)) is None)
    if x is not None:
        assert all((sum(A[i, j] * x[j] for j in range(A.cols)) - b[i]) % m == 0 for i in range(A.rows))
