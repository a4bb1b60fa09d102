import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relpure.classes import (
    CYCLIC_CYCLIC,
    CYCLIC_FREE,
    FP_BOUNDED,
    GENERATED_KINDS,
    explicit_class,
    generate_class,
)
from relpure.corpus import DEFAULT_RINGS, make_corpus, random_ses, transport
from relpure.envelopes import transpose_duals
from relpure.errors import InclusionFails, NotExact
from relpure.linalg import IntMatrix, RingSpec, ZZ
from relpure.modules import FPModule, HomModule, ModuleMap, direct_sum, submodule
from relpure.purity import (
    CRITERIA,
    ShortExactSequence,
    co26_check,
    is_s_pure,
    is_split,
    make_ses,
    purity_cross_check,
    verify_certificate,
)

from .oracles import literal_purity

Z4 = RingSpec.mod(4)
TIMES_TWO = make_ses(FPModule.free(ZZ, 1), [[2]])


def seqs(rings=DEFAULT_RINGS, max_order=64):
    return st.builds(lambda r, s: random_ses(r, random.Random(s), max_order),
                     st.sampled_from(list(rings)), st.integers(0, 10 ** 9))


def test_make_ses_examples():
    s = make_ses(FPModule.cyclic(Z4, 4), [[2]])
    assert s.A.describe() == "Z/2" and s.C.describe() == "Z/2"
    M = FPModule.from_orders(Z4, [2, 4])
    s = make_ses(M, [])
    assert s.A.is_zero and s.C.iso_key() == M.iso_key()
    s = make_ses(M, [[1, 0], [0, 1]])
    assert s.C.is_zero and s.A.iso_key() == M.iso_key()


def test_exactness_enforced():
    B = FPModule.cyclic(Z4, 4)
    A, incl = submodule(B, [[2]])
    wrong = ModuleMap(B, B, IntMatrix.identity(1))
    with pytest.raises(NotExact):
        ShortExactSequence(A, B, B, incl, wrong)


def test_times_two_not_pure_for_z2():
    S = [FPModule.cyclic(ZZ, 2)]
    rep = purity_cross_check(TIMES_TWO, S)
    assert set(rep.verdicts) == set(CRITERIA)
    assert not rep.pure
    for v in rep.verdicts.values():
        assert verify_certificate(TIMES_TWO, S, v)


def test_times_two_pure_for_z3():
    assert purity_cross_check(TIMES_TWO, [FPModule.cyclic(ZZ, 3)]).pure


@given(st.sampled_from(DEFAULT_RINGS[1:]), st.integers(0, 10 ** 6))
def test_split_sequences_are_pure(ring, seed):
    rnd = random.Random(seed)
    o = [d for d in range(2, ring.modulus + 1) if ring.modulus % d == 0]
    M = FPModule.from_orders(ring, [rnd.choice(o)])
    N = FPModule.from_orders(ring, [rnd.choice(o), rnd.choice(o)])
    D = direct_sum(M, N)
    seq = make_ses(D.module, D.injections[0].matrix.columns())
    assert is_split(seq) is not None
    for kind in GENERATED_KINDS:
        assert purity_cross_check(seq, generate_class(ring, kind)).pure


@settings(max_examples=60)
@given(seqs(), st.sampled_from(GENERATED_KINDS))
def test_criteria_agree_and_certificates_recheck(seq, kind):
    S = generate_class(seq.ring, kind)
    rep = purity_cross_check(seq, S)
    assert rep.agree
    if seq.ring.is_finite:
        assert "i" in rep.verdicts
    for v in rep.verdicts.values():
        if not v.pure:
            assert verify_certificate(seq, S, v)


@settings(max_examples=30)
@given(seqs(rings=[RingSpec.mod(m) for m in (2, 4, 6)], max_order=16), st.sampled_from([CYCLIC_CYCLIC, FP_BOUNDED]))
def test_literal_oracle(seq, kind):
    S = generate_class(seq.ring, kind)
    members = [U for U in S.members if seq.ring.modulus ** (U.gens * seq.B.gens) <= 5000]
    assert is_s_pure(seq, members, "ii").pure == literal_purity(seq, members)


@given(seqs(), st.sampled_from(GENERATED_KINDS), st.integers(0, 10 ** 6))
def test_transport_keeps_verdict(seq, kind, seed):
    S = generate_class(seq.ring, kind)
    seq2, iso = transport(seq, random.Random(seed))
    assert iso.is_isomorphism()
    assert is_s_pure(seq, S).pure == is_s_pure(seq2, S).pure


@given(seqs(max_order=32), st.integers(0, 10 ** 6), st.sampled_from(GENERATED_KINDS))
def test_purity_descends_to_intermediate_submodules(seq, seed, kind):
    rnd = random.Random(seed)
    L = seq.B
    a_gens = seq.incl.matrix.columns()
    bound = L.ring.modulus or 8
    extra = [[rnd.randrange(bound) for _ in range(L.gens)]]
    B, _ = submodule(L, a_gens + extra)
    inner = make_ses(B, [[int(i == j) for i in range(B.gens)] for j in range(len(a_gens))])
    S = generate_class(L.ring, kind)
    if is_s_pure(seq, S, "iv").pure:
        assert is_s_pure(inner, S, "iv").pure


@given(seqs())
def test_monotone_in_the_class(seq):
    small = generate_class(seq.ring, CYCLIC_CYCLIC)
    big = explicit_class(seq.ring, list(small.members) + list(generate_class(seq.ring, FP_BOUNDED).members))
    assert big.includes(small) is None
    if is_s_pure(seq, big).pure:
        assert is_s_pure(seq, small).pure
    assert is_s_pure(seq, generate_class(seq.ring, CYCLIC_FREE)).pure


@given(seqs(rings=DEFAULT_RINGS[1:]), st.sampled_from(GENERATED_KINDS))
def test_pure_sequences_stay_exact_under_hom_into_probes(seq, kind):
    S = generate_class(seq.ring, kind)
    if not is_s_pure(seq, S).pure:
        return
    for E in transpose_duals(S):
        HA = HomModule(seq.A, E)
        HB = HomModule(seq.B, E)
        assert HA.span([h.compose(seq.incl) for h in HB.generators()]).order() == HA.order()


def test_co26_examples():
    R = FPModule(ZZ, 1, IntMatrix.zeros(1, 1))
    corpus = make_corpus(40, 5, rings=[ZZ])
    assert co26_check(explicit_class(ZZ, [R]), corpus).passed
    rep = co26_check(explicit_class(ZZ, [R, FPModule.cyclic(ZZ, 2)]), corpus + [TIMES_TWO])
    assert rep.passed and rep.sequences_checked > 0
    U = FPModule(ZZ, 2, IntMatrix.from_rows([[2], [0]]))
    with pytest.raises(InclusionFails):
        co26_check(explicit_class(ZZ, [U]), corpus)


def test_auto_criterion_defaults():
    assert is_s_pure(TIMES_TWO, [FPModule.cyclic(ZZ, 2)]).criterion_used in ("iv", "EquationTransfer")
    s = make_ses(FPModule.cyclic(Z4, 4), [[2]])
    assert is_s_pure(s, [FPModule.cyclic(Z4, 2)]).criterion_used in ("i", "DefinitionLift")
