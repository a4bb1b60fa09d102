from math import gcd

import pytest
from hypothesis import given
from hypothesis import strategies as st

from relpure.errors import InfiniteModule, RingMismatch, ScaleExceeded
from relpure.linalg import IntMatrix, RingSpec, ZZ
from relpure.modules import (
    FPModule,
    HomModule,
    ModuleMap,
    auslander_transpose,
    canonicalize,
    direct_sum,
    enumerate_elements,
    hom_via_presentation,
    tensor,
    tensor_maps,
)

from .oracles import SMALL_RINGS, brute_hom_order, brute_order, finite_modules

Z4 = RingSpec.mod(4)
LOCAL_RINGS = [RingSpec.mod(m) for m in (2, 4, 8, 9)]


def test_canonicalize_examples():
    cf = canonicalize(FPModule(ZZ, 2, IntMatrix.from_rows([[2, 0], [0, 3]])))
    assert cf.invariant_factors == (6,) and cf.free_rank == 0
    cf = canonicalize(FPModule(ZZ, 1, IntMatrix.zeros(1, 0)))
    assert cf.invariant_factors == () and cf.free_rank == 1
    assert canonicalize(FPModule.cyclic(Z4, 2)).invariant_factors == (2,)


def test_direct_sum_examples():
    M = FPModule.from_orders(ZZ, [2, 0])
    assert direct_sum(M, FPModule.zero(ZZ)).module.iso_key() == M.iso_key()
    assert direct_sum(FPModule.cyclic(ZZ, 2), FPModule.cyclic(ZZ, 3)).module.describe() == "Z/6"
    assert direct_sum(FPModule.cyclic(Z4, 2), FPModule.cyclic(Z4, 2)).module.orders == [2, 2]
    with pytest.raises(RingMismatch):
        direct_sum(FPModule.cyclic(Z4, 2), FPModule.cyclic(ZZ, 2))


@given(finite_modules(max_gens=2), finite_modules(max_gens=2))
def test_biproduct_identities(M, N):
    if M.ring != N.ring:
        N = FPModule.from_columns(M.ring, N.gens, N.relations.columns())
    D = direct_sum(M, N)
    i1, i2 = D.injections
    p1, p2 = D.projections
    assert p1.compose(i1).equals(ModuleMap.identity(M))
    assert p2.compose(i2).equals(ModuleMap.identity(N))
    assert p1.compose(i2).is_zero() and p2.compose(i1).is_zero()
    assert (i1.compose(p1) + i2.compose(p2)).equals(ModuleMap.identity(D.module))


def test_tensor_examples():
    assert tensor(FPModule.cyclic(ZZ, 2), FPModule.cyclic(ZZ, 3)).module.is_zero
    assert tensor(FPModule.cyclic(ZZ, 4), FPModule.cyclic(ZZ, 6)).module.describe() == "Z/2"
    M = FPModule.from_orders(ZZ, [2, 0, 6])
    assert tensor(FPModule.free(ZZ, 1), M).module.iso_key() == M.iso_key()


def test_hom_examples():
    H = HomModule(FPModule.cyclic(ZZ, 2), FPModule.cyclic(ZZ, 4))
    assert H.module.describe() == "Z/2"
    images = sorted(f.apply([1])[0] % 4 for f in H.enumerate())
    assert images == [0, 2]
    M = FPModule.from_orders(Z4, [2, 4])
    assert HomModule(FPModule.free(Z4, 1), M).module.iso_key() == M.iso_key()
    assert HomModule(FPModule.cyclic(ZZ, 2), FPModule.cyclic(ZZ, 3)).order() == 1


def test_transpose_examples():
    assert auslander_transpose(FPModule.cyclic(ZZ, 2)).describe() == "Z/2"
    R = FPModule(ZZ, 1, IntMatrix.zeros(1, 1))
    assert auslander_transpose(R).iso_key() == FPModule.free(ZZ, 1).iso_key()
    U = FPModule(ZZ, 2, IntMatrix.from_rows([[2], [0]]))
    assert U.iso_key() == FPModule.from_orders(ZZ, [2, 0]).iso_key()
    assert auslander_transpose(U).describe() == "Z/2"


def test_enumeration_examples():
    assert len(list(enumerate_elements(FPModule.from_orders(Z4, [2, 2])))) == 4
    assert len(list(enumerate_elements(FPModule.zero(ZZ)))) == 1
    els = list(enumerate_elements(FPModule(ZZ, 2, IntMatrix.from_rows([[2, 0], [0, 3]]))))
    assert len(els) == 6 and len({e.canonical() for e in els}) == 6
    with pytest.raises(InfiniteModule):
        list(enumerate_elements(FPModule.free(ZZ, 1)))
    with pytest.raises(ScaleExceeded):
        list(enumerate_elements(FPModule.from_orders(Z4, [4, 4, 4]), cap=10))


@given(finite_modules())
def test_order_matches_brute_force(M):
    assert M.order() == brute_order(M)


@given(finite_modules(max_gens=2, max_rels=2), finite_modules(max_gens=2, max_rels=2))
def test_hom_order_matches_brute_force(M, N):
    if M.ring != N.ring:
        N = FPModule.from_columns(M.ring, N.gens, N.relations.columns())
    if M.ring.modulus ** (M.gens * N.gens) > 20000:
        return
    H = HomModule(M, N)
    assert H.order() == brute_hom_order(M, N)
    assert hom_via_presentation(M, N).iso_key() == H.module.iso_key()


@given(finite_modules(max_gens=2), finite_modules(max_gens=2))
def test_tensor_order_matches_brute_force(M, N):
    if M.ring != N.ring:
        N = FPModule.from_columns(M.ring, N.gens, N.relations.columns())
    T = tensor(M, N).module
    assert T.order() == brute_order(T)
    # Z/a ⊗ Z/b = Z/gcd(a, b), summand by summand
    expected = 1
    for a in M.orders:
        for b in N.orders:
            expected *= gcd(a, b)
    assert T.order() == expected


@given(finite_modules(max_gens=2, max_rels=2), finite_modules(max_gens=2, max_rels=2),
       finite_modules(max_gens=2, max_rels=2))
def test_hom_tensor_adjunction_cardinality(M, N, P):
    N = FPModule.from_columns(M.ring, N.gens, N.relations.columns())
    P = FPModule.from_columns(M.ring, P.gens, P.relations.columns())
    lhs = HomModule(tensor(M, N).module, P).order()
    rhs = HomModule(M, HomModule(N, P).module).order()
    assert lhs == rhs


@given(finite_modules())
def test_canonicalize_idempotent_and_verified(M):
    cf = canonicalize(M)
    again = canonicalize(cf.module)
    assert again.invariant_factors == cf.invariant_factors and again.free_rank == cf.free_rank
    assert cf.iso_to_canonical.is_isomorphism()


@given(finite_modules(rings=LOCAL_RINGS))
def test_double_transpose(M):
    # over Z/p^k projectives are free, so only free summands may change
    TT = auslander_transpose(auslander_transpose(M))
    strip = lambda X: sorted(o for o in X.orders if o != X.ring.modulus)
    assert strip(TT) == strip(M)


@given(finite_modules(max_gens=2), st.randoms(use_true_random=False))
def test_functoriality(M, rnd):
    I = ModuleMap.identity(M)
    TP = tensor(M, M)
    assert tensor_maps(I, I, TP, TP).equals(ModuleMap.identity(TP.module))
    H = HomModule(M, M)
    gens = H.generators()
    f = gens[rnd.randrange(len(gens))] if gens else I
    g = gens[rnd.randrange(len(gens))] if gens else I
    fg = tensor_maps(f.compose(g), I, TP, TP)
    assert fg.equals(tensor_maps(f, I, TP, TP).compose(tensor_maps(g, I, TP, TP)))
    assert H.decode(H.encode(f)).equals(f)


def test_hom_decoder_round_trip():
    for R in SMALL_RINGS:
        M = FPModule.from_orders(R, [R.modulus, 2 if R.modulus % 2 == 0 else 3])
        H = HomModule(M, M)
        for coords in list(H.enumerate_coords(cap=4096))[:30]:
            f = H.decode(list(coords))
            assert H.encode(f) == list(coords)
