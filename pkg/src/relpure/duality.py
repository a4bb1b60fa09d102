"""Character modules of finite modules and relative flatness.

For a finite module M the character module ``Hom_Z(M, Q/Z)`` only sees the
subgroup ``(1/e)Z/Z ≅ Z/e`` with e a multiple of the exponent, so it is
computed as ``Hom(M, Z/e)``.  Over Z/m the ring itself plays that role
(``Z/m ≅ (1/m)Z/Z``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Optional, Sequence

from .errors import InfiniteModule, TheoryViolation
from .linalg import IntMatrix
from .modules import FPModule, HomModule, ModuleMap, quotient
from .purity import ShortExactSequence, is_s_pure, tensor_preserves_injectivity


def _target(M: FPModule, e: Optional[int] = None) -> FPModule:
    m = M.ring.modulus
    if m is not None:
        return FPModule.free(M.ring, 1)
    if e is None:
        e = M.exponent()
    return FPModule.cyclic(M.ring, max(e, 1))


@dataclass
class DualModule:
    original: FPModule
    dual: FPModule
    hom: HomModule = field(repr=False)
    denominator: int

    def functional(self, y: Sequence[int]) -> ModuleMap:
        return self.hom.decode(y)

    def pair(self, x: Sequence[int], y: Sequence[int]) -> Fraction:
        """``<x, y>`` in Q/Z, as a fraction in [0, 1)."""
        v = self.functional(y).apply(x)[0]
        return Fraction(v % self.denominator, self.denominator)

    def non_degenerate(self) -> bool:
        """Both pairing kernels vanish.

        Right side: ``y != 0`` is a nonzero functional, so it is nonzero
        somewhere.  Left side: each element of prime order must be detected by
        some basis functional.
        """
        M = self.original
        gens = self.hom.generators()
        for x in _prime_order(M):
            xv = M.from_canonical(x)
            if all(g.target.is_zero_vector(g.apply(xv)) for g in gens):
                return False
        return all(not g.is_zero() for g in gens)

    def to_dict(self) -> dict:
        return {"original": self.original.describe(), "dual": self.dual.describe(),
                "denominator": self.denominator}


def _prime_order(M: FPModule):
    from .envelopes import prime_order_elements
    return prime_order_elements(M)


def pontryagin_dual(M: FPModule, denominator: Optional[int] = None) -> DualModule:
    if not M.is_finite:
        raise InfiniteModule(f"{M.describe()} is infinite")
    C = _target(M, denominator)
    H = HomModule(M, C)
    D = DualModule(M, H.module, H, C.orders[0] if C.orders else 1)
    if D.dual.order() != M.order() or not D.non_degenerate():
        raise TheoryViolation("character module has the wrong size or a degenerate pairing")
    return D


def dual_map(f: ModuleMap, denominator: Optional[int] = None):
    """``f^+ : N^+ -> M^+`` for ``f: M -> N``; returns (map, dual of M, dual of N)."""
    M, N = f.source, f.target
    if not (M.is_finite and N.is_finite):
        raise InfiniteModule("dual of a map between infinite modules")
    if denominator is None and M.ring.modulus is None:
        denominator = lcm(M.exponent(), N.exponent())
    DM, DN = pontryagin_dual(M, denominator), pontryagin_dual(N, denominator)
    cols = [DM.hom.encode(psi.compose(f)) for psi in DN.hom.generators()]
    mat = IntMatrix.from_columns(cols, DM.dual.gens) if cols else IntMatrix.zeros(DM.dual.gens, 0)
    return ModuleMap(DN.dual, DM.dual, mat, check=True), DM, DN


@dataclass
class FlatVerdict:
    flat: Optional[bool]
    exact: bool
    dual_pure_injective: Optional[bool]
    witness: Optional[ShortExactSequence] = None
    sequences_checked: int = 0

    def to_dict(self) -> dict:
        out = {"flat": self.flat, "exact": self.exact, "dual_pure_injective": self.dual_pure_injective,
               "sequences_checked": self.sequences_checked}
        if self.witness is not None:
            out["witness"] = {"A": self.witness.A.describe(), "B": self.witness.B.describe(),
                              "incl": self.witness.incl.matrix.columns()}
        return out


def probe_sequence(M: FPModule, S) -> ShortExactSequence:
    """``0 -> M^+ -> E -> E/M^+ -> 0`` for an S-pure preenvelope of ``M^+``.

    Tensoring with M is injective on it exactly when ``M^+`` splits off E.
    """
    from .envelopes import _as_class, _dual_order_preenvelope

    D = pontryagin_dual(M).dual
    phi = _dual_order_preenvelope(D, _as_class(S, M.ring).with_ring_adjoined())
    C, proj = quotient(phi.target, phi.matrix.columns())
    return ShortExactSequence(D, phi.target, C, phi, proj)


def is_s_pure_flat(M: FPModule, S, corpus: Sequence[ShortExactSequence] = (),
                   criterion: str = "ii") -> FlatVerdict:
    """Is ``M ⊗ -`` injective on S-pure monomorphisms?

    Over Z/m with M finite the answer is exact: M is tested on the probe
    sequence built from ``M^+`` and on ``corpus``, and compared with the
    split test for ``M^+``.  Otherwise only refutations from ``corpus`` are
    possible and ``flat`` is None when none is found.
    """
    from .envelopes import is_s_pure_injective

    members = list(getattr(S, "members", S))
    exact = M.ring.is_finite and M.is_finite
    seqs = list(corpus)
    dual_inj = None
    if exact:
        seqs = [probe_sequence(M, S)] + seqs
        dual_inj = is_s_pure_injective(pontryagin_dual(M).dual, S).injective
    checked = 0
    for seq in seqs:
        if seq.ring != M.ring or not is_s_pure(seq, members, criterion).pure:
            continue
        checked += 1
        if not tensor_preserves_injectivity(M, seq):
            if exact and dual_inj:
                raise TheoryViolation("tensor refutes flatness of a module whose dual is pure injective")
            return FlatVerdict(False, exact, dual_inj, seq, checked)
    if exact and not dual_inj:
        raise TheoryViolation("dual is not pure injective but no tensor refutation exists")
    return FlatVerdict(True if exact else None, exact, dual_inj, None, checked)


def dual_sequence(seq: ShortExactSequence, denominator: Optional[int] = None):
    """``0 -> C^+ -> B^+ -> A^+ -> 0`` with exactness verified."""
    if denominator is None and seq.ring.modulus is None:
        denominator = lcm(seq.A.exponent(), seq.B.exponent(), seq.C.exponent())
    pp, DB, DC = dual_map(seq.proj, denominator)
    ip, DA, DB2 = dual_map(seq.incl, denominator)
    ip = ModuleMap(DB.dual, DA.dual, ip.matrix, check=False)
    return ShortExactSequence(DC.dual, DB.dual, DA.dual, pp, ip)

