from itertools import product

import pytest

from relpure.classes import (
    CYCLIC_CYCLIC,
    CYCLIC_FREE,
    CYCLICALLY,
    FP_BOUNDED,
    GENERATED_KINDS,
    ClassBounds,
    explicit_class,
    generate_class,
    ideal_quotients,
    normalize_kind,
    purity_equivalent,
    transpose_class,
)
from relpure.corpus import make_corpus
from relpure.errors import RingMismatch
from relpure.linalg import IntMatrix, RingSpec, ZZ
from relpure.modules import FPModule
from relpure.purity import is_s_pure, make_ses

Z4 = RingSpec.mod(4)


def keys(S):
    return sorted(U.iso_key() for U in S.members)


def test_cyclic_cyclic_over_z4():
    S = generate_class(Z4, CYCLIC_CYCLIC)
    assert keys(S) == sorted([FPModule.cyclic(Z4, 4).iso_key(), FPModule.cyclic(Z4, 2).iso_key()])


@pytest.mark.parametrize("ring", [ZZ, Z4, RingSpec.mod(6)])
def test_cyclic_free_is_the_ring(ring):
    S = generate_class(ring, CYCLIC_FREE)
    assert len(S) == 1 and S.has_free_rank_one()


def test_cyclically_presented_over_z4():
    S = generate_class(Z4, CYCLICALLY)
    a = FPModule(Z4, 2, IntMatrix.from_rows([[1], [2]]))
    b = FPModule(Z4, 2, IntMatrix.from_rows([[2], [2]]))
    assert a.describe() == "Z/4"
    assert S.contains_iso(a) and S.contains_iso(b)


def test_cyclically_presented_by_brute_force():
    # every R^n / R g with n <= 2 and entries < 4, up to isomorphism
    expected = set()
    for n in (1, 2):
        for g in product(range(4), repeat=n):
            M = FPModule(Z4, n, IntMatrix(n, 1, g))
            if not M.is_zero:
                expected.add(M.iso_key())
    assert set(generate_class(Z4, CYCLICALLY).keys) == expected


@pytest.mark.parametrize("ring", [ZZ, Z4, RingSpec.mod(6), RingSpec.mod(12)])
@pytest.mark.parametrize("kind", GENERATED_KINDS)
def test_members_pairwise_non_isomorphic(ring, kind):
    S = generate_class(ring, kind)
    assert len(S.keys) == len(S.members)
    assert S.has_free_rank_one()
    assert all(not U.is_zero for U in S.members)


def test_fp_bounded_small_ring_by_brute_force():
    ring = RingSpec.mod(2)
    expected = set()
    for n in (1, 2):
        for k in (1, 2):
            for e in product(range(2), repeat=n * k):
                M = FPModule(ring, n, IntMatrix(n, k, e))
                if not M.is_zero:
                    expected.add(M.iso_key())
    assert set(generate_class(ring, FP_BOUNDED).keys) == expected


def test_transpose_examples():
    R = FPModule(ZZ, 1, IntMatrix.zeros(1, 1))
    T = transpose_class(explicit_class(ZZ, [R]))
    assert keys(T) == [R.iso_key()]
    T = transpose_class(explicit_class(ZZ, [FPModule.cyclic(ZZ, 2)]))
    assert [U.describe() for U in T.members] == ["Z/2"]


def test_ideal_quotients():
    assert sorted(U.describe() for U in ideal_quotients(Z4).members) == ["Z/2", "Z/4"]
    with pytest.raises(ValueError):
        ideal_quotients(ZZ)


def test_purity_equivalence_examples():
    S = generate_class(Z4, FP_BOUNDED)
    corpus = make_corpus(30, 1, rings=[Z4])
    assert purity_equivalent(S, S, corpus).equivalent

    times_two = make_ses(FPModule.free(ZZ, 1), [[2]])
    S1 = explicit_class(ZZ, [FPModule.free(ZZ, 1)])
    S2 = explicit_class(ZZ, [FPModule.free(ZZ, 1), FPModule.cyclic(ZZ, 2)])
    v = purity_equivalent(S1, S2, make_corpus(10, 2, rings=[ZZ]) + [times_two])
    assert not v.equivalent
    assert v.verdicts == (True, False)
    assert is_s_pure(v.witness, S1).pure and not is_s_pure(v.witness, S2).pure

    with pytest.raises(RingMismatch):
        purity_equivalent(S1, S, corpus)


@pytest.mark.parametrize("m", [4, 6, 8])
def test_transpose_of_cyclically_presented_matches_ideal_quotients(m):
    ring = RingSpec.mod(m)
    corpus = make_corpus(120, 3 + m, rings=[ring], max_order=64)
    v = purity_equivalent(transpose_class(generate_class(ring, CYCLICALLY)), ideal_quotients(ring), corpus)
    assert v.equivalent and v.checked == 120


def test_kind_aliases_and_bounds():
    assert normalize_kind("fp-bounded") == FP_BOUNDED
    assert normalize_kind("cyclic-free") == CYCLIC_FREE
    with pytest.raises(ValueError):
        normalize_kind("nonsense")
    small = generate_class(Z4, FP_BOUNDED, ClassBounds(1, 1))
    assert generate_class(Z4, FP_BOUNDED).includes(small) is None
