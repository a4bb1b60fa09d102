"""Acceptance criteria 1-8, each at full size.

Every test prints one ``[PASS]`` or ``[FAIL]`` line; the lines are repeated
in the terminal summary so they appear without ``-s``.
"""
import random
import time

import pytest

from relpure import suite
from relpure.corpus import DEFAULT_RINGS, make_corpus

SEED = 42
CORPUS_SIZE = 500
SUBMODULE_CAP = 4096
TIME_LIMIT = 600

LINES: list[str] = []


@pytest.fixture(scope="module")
def corpus():
    c = make_corpus(CORPUS_SIZE, SEED)
    assert len(c) >= 500
    assert {s.ring for s in c} == set(DEFAULT_RINGS)
    assert all(s.B.order() <= 256 for s in c if s.B.is_finite)
    return c


def report(key, title, fn):
    t = time.perf_counter()
    r = fn()
    r["seconds"] = round(time.perf_counter() - t, 2)
    line = f"[{'PASS' if r['passed'] else 'FAIL'}] {key}. {title}: {r['detail']} ({r['seconds']}s)"
    LINES.append(line)
    print(line)
    return r


def test_criterion_1_criteria_agree(corpus):
    r = report("1", "purity criteria agree", lambda: suite.check_equivalence(corpus))
    assert r["passed"], r
    assert r["seconds"] <= TIME_LIMIT


def test_criterion_2_flat_iff_dual_injective(corpus):
    r = report("2", "flat iff dual pure injective", lambda: suite.check_flat_dual(corpus))
    assert r["passed"], r


def test_criterion_3_preenvelopes(corpus):
    r = report("3", "preenvelopes", lambda: suite.check_preenvelopes(corpus, random.Random(SEED)))
    assert r["passed"], r


def test_criterion_4_envelopes():
    r = report("4", "envelopes", lambda: suite.check_envelopes(SUBMODULE_CAP))
    assert r["passed"], r
    assert all(r["reference_values"].values())
    assert r["seconds"] <= TIME_LIMIT


def test_criterion_5_balance():
    r = report("5", "Ext balance and dimensions", suite.check_balance)
    assert r["passed"], r


def test_criterion_6_class_examples():
    r = report("6", "class examples", suite.check_example_classes)
    assert r["passed"], r


def test_criterion_7_transport():
    r = report("7", "transport invariance", lambda: suite.check_transport(trials=200))
    assert r["trials"] >= 200
    assert r["passed"], r


def test_criterion_8_certificates_and_determinism(corpus):
    def both():
        det = suite.check_determinism(SEED)
        cert = suite.check_equivalence(corpus)
        ok = det["passed"] and cert["certificates"] == cert["certificates_rechecked"]
        return {"passed": ok, "detail": f"{cert['certificates_rechecked']}/{cert['certificates']} "
                                        f"certificates re-checked, reports {det['detail']}"}

    r = report("8", "certificates and determinism", both)
    assert r["passed"], r
