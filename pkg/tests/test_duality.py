import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from relpure.classes import CYCLIC_FREE, FP_BOUNDED, GENERATED_KINDS, generate_class
from relpure.corpus import make_corpus, random_module, random_ses
from relpure.duality import dual_map, dual_sequence, is_s_pure_flat, pontryagin_dual
from relpure.envelopes import is_s_pure_injective
from relpure.errors import InfiniteModule
from relpure.linalg import IntMatrix, RingSpec, ZZ
from relpure.modules import FPModule, HomModule, ModuleMap, direct_sum
from relpure.purity import make_ses

from .oracles import SMALL_RINGS

Z4 = RingSpec.mod(4)


def modules(rings=SMALL_RINGS + [ZZ], max_order=64):
    return st.builds(lambda r, s: random_module(r, random.Random(s), max_order),
                     st.sampled_from(rings), st.integers(0, 10 ** 9)).filter(lambda M: M.is_finite)


def test_dual_examples():
    assert pontryagin_dual(FPModule.cyclic(ZZ, 2)).dual.describe() == "Z/2"
    M = FPModule.from_orders(ZZ, [2, 4])
    assert pontryagin_dual(M).dual.iso_key() == M.iso_key()
    assert pontryagin_dual(FPModule.zero(Z4)).dual.is_zero
    with pytest.raises(InfiniteModule):
        pontryagin_dual(FPModule.free(ZZ, 1))


def test_pairing_values():
    D = pontryagin_dual(FPModule.cyclic(ZZ, 4))
    values = {D.pair([1], y) for y in ([0], [1], [2], [3])}
    assert values == {Fraction(k, 4) for k in range(4)}


def test_dual_map_examples():
    M = FPModule.from_orders(Z4, [2, 4])
    f, DM, DN = dual_map(ModuleMap.identity(M))
    assert f.equals(ModuleMap.identity(DM.dual))
    inc = ModuleMap(FPModule.cyclic(Z4, 2), FPModule.cyclic(Z4, 4), IntMatrix.from_rows([[2]]))
    d, _, _ = dual_map(inc)
    assert d.source.describe() == "Z/4" and d.target.describe() == "Z/2"
    assert d.is_surjective() and not d.is_injective()
    z, _, _ = dual_map(ModuleMap.zero(M, M))
    assert z.is_zero()


@given(st.sampled_from(SMALL_RINGS), st.integers(0, 10 ** 6))
def test_dual_is_contravariant(ring, seed):
    rnd = random.Random(seed)
    L, M, N = (random_module(ring, rnd, 32) for _ in range(3))

    def some_map(X, Y):
        f = ModuleMap.zero(X, Y)
        for g in HomModule(X, Y).generators():
            f = f + g.scale(rnd.randrange(3))
        return f

    f, g = some_map(L, M), some_map(M, N)
    gf, _, _ = dual_map(g.compose(f))
    fd, DL, _ = dual_map(f)
    gd, _, DN = dual_map(g)
    composed = ModuleMap(DN.dual, DL.dual, fd.matrix @ gd.matrix)
    assert composed.equals(gf)


@given(modules())
def test_double_dual_and_order(M):
    D = pontryagin_dual(M)
    assert D.dual.order() == M.order()
    assert D.non_degenerate()
    assert pontryagin_dual(D.dual).dual.iso_key() == M.iso_key()


@given(st.sampled_from(SMALL_RINGS + [ZZ]), st.integers(0, 10 ** 6))
def test_dual_sequence_is_exact(ring, seed):
    seq = random_ses(ring, random.Random(seed), 64)
    if not seq.B.is_finite:
        return
    d = dual_sequence(seq)
    assert d.A.order() == seq.C.order() and d.C.order() == seq.A.order()


def test_flat_examples():
    R = FPModule.free(Z4, 1)
    for kind in GENERATED_KINDS:
        assert is_s_pure_flat(R, generate_class(Z4, kind)).flat
    Z2 = FPModule.cyclic(Z4, 2)
    v = is_s_pure_flat(Z2, generate_class(Z4, CYCLIC_FREE))
    assert v.flat is False and v.witness is not None
    assert is_s_pure_flat(Z2, generate_class(Z4, FP_BOUNDED)).flat


def test_flat_over_z_only_refutes():
    seq = make_ses(FPModule.free(ZZ, 1), [[2]])
    v = is_s_pure_flat(FPModule.cyclic(ZZ, 2), generate_class(ZZ, CYCLIC_FREE), [seq])
    assert v.flat is False and not v.exact
    v = is_s_pure_flat(FPModule.free(ZZ, 1), generate_class(ZZ, CYCLIC_FREE), [seq])
    assert v.flat is None


@given(modules(rings=SMALL_RINGS, max_order=32), st.sampled_from(GENERATED_KINDS))
def test_flat_iff_dual_pure_injective(M, kind):
    S = generate_class(M.ring, kind)
    corpus = make_corpus(8, 0, rings=[M.ring], max_order=32)
    v = is_s_pure_flat(M, S, corpus)
    assert v.flat == is_s_pure_injective(pontryagin_dual(M).dual, S, mode="summands").injective


@given(st.sampled_from(SMALL_RINGS), st.integers(0, 10 ** 6), st.sampled_from(GENERATED_KINDS))
def test_sums_of_flats(ring, seed, kind):
    rnd = random.Random(seed)
    M, N = random_module(ring, rnd, 16), random_module(ring, rnd, 16)
    S = generate_class(ring, kind)
    both = is_s_pure_flat(M, S).flat and is_s_pure_flat(N, S).flat
    assert is_s_pure_flat(direct_sum(M, N).module, S).flat == both
