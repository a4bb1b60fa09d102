"""Pure-injective preenvelopes, essential extensions and envelopes over Z/m.

Everything here is finite.  Two facts keep the searches small:

* a monomorphism ``phi: M -> E`` is S-pure exactly when
  ``Hom(E, tr(U)^+) -> Hom(M, tr(U)^+)`` is onto for each U in S (dualise the
  tensor criterion); since ``tr(U)^+`` splits into cyclic modules Z/d this
  is a finite list of "coverage" conditions, one per order d;
* if a nonzero K with ``K ∩ N = 0`` makes ``N -> M/K`` S-pure, so does every
  nonzero subgroup of K, so essentiality only has to be refuted by subgroups
  of prime order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from math import gcd, prod
from typing import Optional, Sequence

from . import groups
from .classes import ModuleClass, explicit_class
from .errors import InfiniteRing, ScaleExceeded, TheoryViolation
from .linalg import IntMatrix, RingSpec, matmul, solve_mod
from .modules import (
    DEFAULT_HOM_CAP,
    FPModule,
    HomModule,
    ModuleMap,
    auslander_transpose,
    quotient,
    submodule,
    tuple_map,
)
from .purity import is_pure_mono

DEFAULT_SUBMODULE_CAP = 64   # on |E_0|, the ambient module of the search
PURITY_CRITERION = "ii"


def _as_class(S, ring: RingSpec) -> ModuleClass:
    if isinstance(S, ModuleClass):
        return S
    return explicit_class(ring, list(S))


def _require_finite(ring: RingSpec):
    if not ring.is_finite:
        raise InfiniteRing("envelopes are only constructed over Z/m")


def _key(S: ModuleClass):
    return (S.ring.modulus, tuple(sorted(S.keys)))


# ---------------------------------------------------------------------------
# dual-transpose factors

_DUAL_ORDERS: dict = {}
_PI_ORDERS: dict = {}


def transpose_duals(S: ModuleClass) -> list[FPModule]:
    """``tr(U)^+ = Hom_R(tr(U), R)`` for each member (R adjoined)."""
    S = S.with_ring_adjoined()
    R = FPModule.free(S.ring, 1)
    return [HomModule(auslander_transpose(U), R).module for U in S.members]


def dual_orders(S: ModuleClass) -> tuple[int, ...]:
    """Orders d of the cyclic summands Z/d of the modules ``tr(U)^+``."""
    k = _key(S)
    if k not in _DUAL_ORDERS:
        ds = set()
        for T in transpose_duals(S):
            ds.update(T.orders)
        _DUAL_ORDERS[k] = tuple(sorted(ds))
    return _DUAL_ORDERS[k]


def coverage(phi: ModuleMap, d: int) -> tuple[int, int]:
    """(|image of Hom(E, Z/d) -> Hom(M, Z/d)|, |Hom(M, Z/d)|)."""
    C = FPModule.cyclic(phi.source.ring, d)
    HM = HomModule(phi.source, C)
    full = HM.order()
    if full == 1:
        return 1, 1
    HE = HomModule(phi.target, C)
    span = HM.span([h.compose(phi) for h in HE.generators()])
    return span.order(), full


def covers(phi: ModuleMap, orders: Sequence[int]) -> bool:
    return all(a == b for a, b in (coverage(phi, d) for d in orders))


def _coverage_score(phi: ModuleMap, orders: Sequence[int]) -> int:
    return prod(coverage(phi, d)[0] for d in orders)


# ---------------------------------------------------------------------------
# preenvelopes

@dataclass
class Preenvelope:
    source: FPModule
    target: FPModule
    map: ModuleMap
    index: list = field(default_factory=list)
    pruned: bool = False

    def to_dict(self) -> dict:
        return {
            "source": self.source.describe(),
            "target": self.target.describe(),
            "map": self.map.matrix.columns(),
            "factors": len(self.index),
            "pruned": self.pruned,
        }


def _assemble(M: FPModule, factors: list[tuple[int, list[int]]]) -> ModuleMap:
    E = FPModule.from_orders(M.ring, [d for d, _ in factors])
    rows = [row for _, row in factors]
    mat = IntMatrix.from_rows(rows, M.gens) if rows else IntMatrix.zeros(0, M.gens)
    return ModuleMap(M, E, mat, check=True)


def _greedy(M: FPModule, pool: list[tuple[int, list[int]]], targets: Sequence[int]) -> list:
    chosen: list = []
    score = _coverage_score(_assemble(M, chosen), targets)
    goal = prod(HomModule(M, FPModule.cyclic(M.ring, d)).order() for d in targets)
    for cand in pool:
        if score == goal:
            break
        trial = chosen + [cand]
        s = _coverage_score(_assemble(M, trial), targets)
        if s > score:
            chosen, score = trial, s
    if score != goal:
        raise TheoryViolation("candidate factors do not give a pure monomorphism")
    i = 0
    while i < len(chosen):
        trial = chosen[:i] + chosen[i + 1:]
        if covers(_assemble(M, trial), targets):
            chosen = trial
        else:
            i += 1
    return chosen


def _cyclic_pool(M: FPModule, orders: Sequence[int]) -> list[tuple[int, list[int]]]:
    pool = []
    for d in orders:
        for h in HomModule(M, FPModule.cyclic(M.ring, d)).generators():
            pool.append((d, h.matrix.row(0)))
    return pool


def pure_injective_orders(S: ModuleClass) -> tuple[int, ...]:
    """Orders o for which Z/o is S-pure injective (o | m, o > 1)."""
    k = _key(S)
    if k not in _PI_ORDERS:
        m = S.ring.modulus
        out = [o for o in groups.divisors(m) if o > 1
               and split_retraction(FPModule.cyclic(S.ring, o), S) is not None]
        _PI_ORDERS[k] = tuple(out)
    return _PI_ORDERS[k]


def preenvelope(M: FPModule, S, pruned: bool = False, verify: bool = True) -> Preenvelope:
    """An S-pure monomorphism of M into an S-pure injective module.

    Unpruned: one copy of ``tr(U)^+`` per generator of ``Hom(M, tr(U)^+)``.
    Pruned: a minimal-by-deletion set of cyclic pure-injective factors, with
    M's own cyclic summands tried first, so a pure-injective M maps
    isomorphically onto its preenvelope.
    """
    _require_finite(M.ring)
    S = _as_class(S, M.ring).with_ring_adjoined()
    if pruned:
        pi = pure_injective_orders(S)
        own = [(o, list(M.to_canon[i])) for i, o in enumerate(M.orders) if o in pi]
        chosen = _greedy(M, own + _cyclic_pool(M, pi), dual_orders(S))
        phi = _assemble(M, chosen)
        pre = Preenvelope(M, phi.target, phi, [(d, row) for d, row in chosen], pruned=True)
    else:
        maps, index = [], []
        for u_idx, T in enumerate(transpose_duals(S)):
            for f in HomModule(M, T).generators():
                maps.append(f)
                index.append((u_idx, f.matrix.columns()))
        phi, _ = tuple_map(M, maps)
        pre = Preenvelope(M, phi.target, phi, index)
    if verify:
        if not pre.map.is_injective():
            raise TheoryViolation("preenvelope map is not injective")
        if not is_pure_mono(pre.map, S, PURITY_CRITERION):
            raise TheoryViolation("preenvelope map is not a pure monomorphism")
    return pre


def _dual_order_preenvelope(M: FPModule, S: ModuleClass, prune: bool = True) -> ModuleMap:
    orders = dual_orders(S)
    pool = _cyclic_pool(M, orders)
    if prune:
        return _assemble(M, _greedy(M, pool, orders))
    # every generator of every Hom(M, Z/d) is a factor, so coverage holds by construction
    phi = _assemble(M, pool)
    if not covers(phi, orders):
        raise TheoryViolation("full cyclic pool does not give a pure monomorphism")
    return phi


def split_retraction(M: FPModule, S, phi: Optional[ModuleMap] = None) -> Optional[ModuleMap]:
    """g with ``g ∘ phi = id_M`` for a pure mono phi into a pure injective, else None."""
    S = _as_class(S, M.ring).with_ring_adjoined()
    if phi is None:
        phi = _dual_order_preenvelope(M, S)
    if M.is_finite and _is_diagonal(phi.target):
        return _diagonal_retraction(phi)
    H = HomModule(phi.target, M)
    End = HomModule(M, M)
    gens = H.generators()
    c = End.span([h.compose(phi) for h in gens]).coefficients(End.encode(ModuleMap.identity(M)))
    if c is None:
        return None
    g = ModuleMap.zero(phi.target, M)
    for a, h in zip(c, gens):
        if a:
            g = g + h.scale(a)
    return g


def _is_diagonal(E: FPModule) -> bool:
    R = E.relations
    return R.rows == R.cols and all(R[i, j] == 0 for i in range(R.rows) for j in range(R.cols) if i != j)


def _diagonal_retraction(phi: ModuleMap) -> Optional[ModuleMap]:
    # E = sum Z/e_j; a map E -> M is a choice of y_j in M with e_j y_j = 0,
    # and in canonical coordinates of M the equations separate per coordinate.
    M, E = phi.source, phi.target
    orders = M.orders
    if not orders:
        return ModuleMap.zero(E, M)
    e = [E.relations[j, j] for j in range(E.gens)]
    F = matmul(phi.matrix.tolist(), M.from_canon, len(orders)) if E.gens else []
    q = len(orders)
    cols = [[0] * q for _ in range(E.gens)]
    for k, o in enumerate(orders):
        steps = [o // gcd(o, ej) for ej in e]
        A = IntMatrix.from_rows([[F[j][i] * steps[j] for j in range(E.gens)] for i in range(q)], E.gens)
        sol = solve_mod(A, [int(i == k) for i in range(q)], o)
        if sol is None:
            return None
        for j, t in enumerate(sol):
            cols[j][k] = (t * steps[j]) % o
    g = ModuleMap(E, M, IntMatrix.from_columns([M.from_canonical(c) for c in cols], M.gens)
                  if E.gens else IntMatrix.zeros(M.gens, 0), check=True)
    if not g.compose(phi).equals(ModuleMap.identity(M)):
        raise TheoryViolation("retraction solve returned a map that does not split")
    return g


@dataclass
class InjectivityVerdict:
    injective: bool
    retraction: Optional[ModuleMap]
    preenvelope_map: Optional[ModuleMap]
    mode: str

    def to_dict(self) -> dict:
        out = {"pure_injective": self.injective, "mode": self.mode}
        if self.preenvelope_map is not None:
            out["embedding"] = {"target": self.preenvelope_map.target.describe(),
                                "map": self.preenvelope_map.matrix.columns()}
        if self.retraction is not None:
            out["retraction"] = self.retraction.matrix.columns()
        return out


def is_s_pure_injective(M: FPModule, S, mode: str = "direct") -> InjectivityVerdict:
    """Decide S-pure injectivity by splitting a preenvelope.

    ``direct`` splits a preenvelope of M built from summands of the modules
    ``tr(U)^+``; ``summands`` tests each cyclic summand of M on its own (a
    finite sum is pure injective iff each summand is).
    """
    _require_finite(M.ring)
    S = _as_class(S, M.ring).with_ring_adjoined()
    if mode == "direct":
        phi = _dual_order_preenvelope(M, S, prune=False)
        g = split_retraction(M, S, phi)
        return InjectivityVerdict(g is not None, g, phi, mode)
    if mode == "summands":
        pi = pure_injective_orders(S)
        return InjectivityVerdict(all(o in pi for o in M.orders), None, None, mode)
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# essential extensions

@dataclass
class EssentialWitness:
    K: list[list[int]]
    quotient_map: ModuleMap

    def to_dict(self) -> dict:
        return {"K": self.K, "quotient_map": self.quotient_map.matrix.columns()}


@dataclass
class EssentialVerdict:
    essential: bool
    pure: bool
    witness: Optional[EssentialWitness] = None

    def to_dict(self) -> dict:
        out = {"essential": self.essential, "pure": self.pure}
        if self.witness is not None:
            out["witness"] = self.witness.to_dict()
        return out


def prime_order_elements(M: FPModule) -> list[list[int]]:
    """Every element of prime order, in canonical coordinates, one per cyclic subgroup."""
    orders = M.orders
    out = []
    primes = sorted({p for o in orders for p in _prime_factors(o)})
    for p in primes:
        basis = [[(o // p) * int(i == j) for j, o in enumerate(orders)]
                 for i, o in enumerate(orders) if o % p == 0]
        for coeffs in product(range(p), repeat=len(basis)):
            lead = next((c for c in coeffs if c), 0)
            if lead != 1:       # normalise so each cyclic subgroup appears once
                continue
            v = [sum(c * b[j] for c, b in zip(coeffs, basis)) for j in range(len(orders))]
            out.append(groups.reduce_vec(v, orders))
    return out


def _prime_factors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def is_pure_essential(embedding: ModuleMap, S, criterion: str = PURITY_CRITERION) -> EssentialVerdict:
    """Is ``N -> M`` an S-pure essential extension?"""
    M = embedding.target
    _require_finite(M.ring)
    S = _as_class(S, M.ring)
    if not embedding.is_injective() or not is_pure_mono(embedding, S, criterion):
        return EssentialVerdict(False, False)
    image = embedding.image_span()
    for x in prime_order_elements(M):
        if x in image:
            continue
        k = M.from_canonical(x)
        Q, proj = quotient(M, [k])
        f = proj.compose(embedding)
        if is_pure_mono(f, S, criterion):
            return EssentialVerdict(False, True, EssentialWitness([k], f))
    return EssentialVerdict(True, True)


# ---------------------------------------------------------------------------
# envelopes

def _restrict(f: ModuleMap, incl: ModuleMap) -> ModuleMap:
    """Corestrict ``f`` to a submodule given by ``incl`` containing its image."""
    E = incl.source
    span = incl.image_span()
    cols = []
    for c in f.matrix.columns():
        coef = span.coefficients(incl.target.canon(c))
        if coef is None:
            raise ValueError("image not contained in the submodule")
        cols.append(E.from_canonical(coef))
    mat = IntMatrix.from_columns(cols, E.gens) if cols else IntMatrix.zeros(E.gens, 0)
    return ModuleMap(f.source, E, mat, check=False)


def extension_over(phi1: ModuleMap, phi2: ModuleMap) -> Optional[ModuleMap]:
    """Some g: E1 -> E2 with ``g ∘ phi1 = phi2``, or None."""
    E1, E2 = phi1.target, phi2.target
    H = HomModule(E1, E2)
    HM = HomModule(phi1.source, E2)
    gens = H.generators()
    c = HM.span([h.compose(phi1) for h in gens]).coefficients(HM.encode(phi2))
    if c is None:
        return None
    g = ModuleMap.zero(E1, E2)
    for a, h in zip(c, gens):
        if a:
            g = g + h.scale(a)
    return g


@dataclass
class Candidate:
    module: FPModule
    embedding: ModuleMap         # M -> candidate
    inclusion: ModuleMap         # candidate -> E_0
    span: groups.Span            # in E_0 canonical coordinates
    size: int


@dataclass
class EnvelopeResult:
    source: FPModule
    envelope: FPModule
    embedding: ModuleMap
    preenvelope: Preenvelope
    candidates_checked: int
    maximal_count: int
    uniqueness_check: list = field(default_factory=list)
    automorphism_check: dict = field(default_factory=dict)
    verification: Optional["EnvelopeReport"] = None

    def to_dict(self) -> dict:
        return {
            "source": self.source.describe(),
            "envelope": self.envelope.describe(),
            "embedding": self.embedding.matrix.columns(),
            "preenvelope": self.preenvelope.target.describe(),
            "candidates_checked": self.candidates_checked,
            "maximal_candidates": self.maximal_count,
            "uniqueness": self.uniqueness_check,
            "automorphism": self.automorphism_check,
            "verification": None if self.verification is None else self.verification.to_dict(),
        }


def _candidates(pre: Preenvelope, cap: Optional[int]):
    E0, phi = pre.target, pre.map
    Q, _ = quotient(E0, phi.matrix.columns())
    base = phi.matrix.columns()
    for sub in groups.enumerate_subgroups(Q.orders, cap=cap):
        gens = base + [Q.from_canonical(g) for g in sub]
        yield gens


def envelope(M: FPModule, S, cap: int = DEFAULT_SUBMODULE_CAP, hom_cap: int = DEFAULT_HOM_CAP,
             verify: bool = True) -> EnvelopeResult:
    """The S-pure injective envelope of a finite module over Z/m."""
    _require_finite(M.ring)
    S = _as_class(S, M.ring).with_ring_adjoined()
    pre = preenvelope(M, S, pruned=True)
    E0, phi = pre.target, pre.map
    if E0.order() > cap:
        raise ScaleExceeded("envelope search |E_0|", E0.order(), cap)
    subs = []
    for gens in _candidates(pre, None):
        span = groups.Span(E0.orders, [E0.canon(g) for g in gens])
        subs.append((span.order(), gens, span))
    subs.sort(key=lambda t: -t[0])          # largest first, enumeration order within a size
    maximal: list[Candidate] = []
    checked = 0
    for size, gens, span in subs:
        if any(size < c.size and c.span.contains_all([E0.canon(g) for g in gens]) for c in maximal):
            continue
        checked += 1
        E1, incl = submodule(E0, gens)
        emb = _restrict(phi, incl)
        if is_pure_essential(emb, S).essential:
            maximal.append(Candidate(E1, emb, incl, span, size))
    if not maximal:
        raise TheoryViolation("no essential extension found, not even M itself")
    best = maximal[0]
    uniq = []
    for other in maximal[1:]:
        g = extension_over(best.embedding, other.embedding)
        ok = g is not None and g.is_isomorphism()
        uniq.append({"candidate": other.module.describe(), "isomorphic_over_M": ok})
        if not ok:
            raise TheoryViolation("maximal essential extensions are not isomorphic over M")
    E, emb = _simplify(best)
    result = EnvelopeResult(M, E, emb, pre, checked, len(maximal), uniq)
    if verify:
        report = verify_envelope(result, S, cap=max(cap, E.order()), hom_cap=hom_cap)
        result.verification = report
        result.automorphism_check = report.details.get("d", {})
        if not report.all_pass:
            raise TheoryViolation(f"envelope fails its own verification: {report.failed()}")
    return result


def _simplify(c: Candidate) -> tuple[FPModule, ModuleMap]:
    """Re-present the chosen envelope in canonical (diagonal) form."""
    E = c.module
    C = FPModule.from_orders(E.ring, E.orders)
    iso = ModuleMap(E, C, IntMatrix.from_rows(E.to_canon, E.gens) if E.orders else IntMatrix.zeros(0, E.gens),
                    check=True)
    return C, iso.compose(c.embedding)


# ---------------------------------------------------------------------------
# verification

@dataclass
class EnvelopeReport:
    checks: dict
    details: dict

    @property
    def all_pass(self) -> bool:
        return all(self.checks.values())

    def failed(self) -> list[str]:
        return [k for k, v in self.checks.items() if not v]

    def to_dict(self) -> dict:
        return {"checks": self.checks, "all_pass": self.all_pass}


def _proper_intermediate(phi: ModuleMap, cap: Optional[int]):
    """Proper submodules of phi.target containing the image, as (module, embedding, inclusion)."""
    E = phi.target
    total = E.order()
    Q, _ = quotient(E, phi.matrix.columns())
    for sub in groups.enumerate_subgroups(Q.orders, cap=cap):
        gens = phi.matrix.columns() + [Q.from_canonical(g) for g in sub]
        span = groups.Span(E.orders, [E.canon(g) for g in gens])
        if span.order() == total:
            continue
        E1, incl = submodule(E, gens)
        yield E1, _restrict(phi, incl), incl


def endomorphism_fixing_kernel(phi: ModuleMap) -> Optional[list[int]]:
    """A nonzero x in ker(f) for some f with ``f ∘ phi = phi``, or None.

    Such f are ``id + h ∘ pi`` with ``h: E/M -> E``.  f kills x of prime order
    iff ``-x = h(pi x)`` for some h, i.e. x lies in the evaluation subgroup
    ``{h(pi x)}``.  A non-injective f always kills some element of prime order.
    """
    E = phi.target
    Q, pi = quotient(E, phi.matrix.columns())
    gens = HomModule(Q, E).generators()
    for x in prime_order_elements(E):
        xv = E.from_canonical(x)
        span = groups.Span(E.orders, [E.canon(h.apply(xv)) for h in gens])
        if x in span:
            return xv
    return None


def _brute_endomorphisms(phi: ModuleMap, hom_cap: int) -> Optional[dict]:
    E = phi.target
    H = HomModule(E, E)
    if H.order() > hom_cap:
        return None
    fixing = autos = 0
    for f in H.enumerate(hom_cap):
        if f.compose(phi).equals(phi):
            fixing += 1
            autos += f.is_isomorphism()
    return {"endomorphisms": H.order(), "fixing": fixing, "automorphisms": autos}


def verify_envelope(result: EnvelopeResult, S, cap: int = DEFAULT_SUBMODULE_CAP,
                    hom_cap: int = DEFAULT_HOM_CAP, strict: bool = False) -> EnvelopeReport:
    """Re-check the envelope characterisations on ``result.embedding``.

    (a) essential, with no proper essential extension inside a preenvelope of E;
    (b) essential and S-pure injective;
    (c) no proper S-pure injective submodule contains the image of M;
    (d) every endomorphism of E fixing the embedding is an automorphism.
    """
    phi = result.embedding
    E = phi.target
    S = _as_class(S, E.ring).with_ring_adjoined()
    checks, details = {}, {}
    ess = is_pure_essential(phi, S)
    inj = is_s_pure_injective(E, S)

    pre = preenvelope(E, S, pruned=True)
    if pre.target.order() > cap:
        raise ScaleExceeded("verification |E_1|", pre.target.order(), cap)
    bigger = False
    base = pre.map.compose(phi)
    Q, _ = quotient(pre.target, pre.map.matrix.columns())
    for sub in groups.enumerate_subgroups(Q.orders):
        if not sub:
            continue
        gens = pre.map.matrix.columns() + [Q.from_canonical(g) for g in sub]
        E1, incl = submodule(pre.target, gens)
        if is_pure_essential(_restrict(base, incl), S).essential:
            bigger = True
            break
    checks["a"] = ess.essential and not bigger

    checks["b"] = ess.essential and inj.injective

    smaller = None
    for E1, emb, _ in _proper_intermediate(phi, None if E.order() <= cap else cap):
        if is_s_pure_injective(E1, S).injective:
            smaller = E1.describe()
            break
    checks["c"] = smaller is None
    if smaller is not None:
        details["c"] = {"smaller_pure_injective": smaller}

    x = endomorphism_fixing_kernel(phi)
    d_info = {"exact": x is None}
    if x is not None:
        d_info["kernel_element"] = x
    brute = _brute_endomorphisms(phi, hom_cap)
    if brute is not None:
        d_info["enumeration"] = brute
        if (brute["fixing"] == brute["automorphisms"]) != (x is None):
            raise TheoryViolation("endomorphism checks disagree")
    checks["d"] = x is None
    details["d"] = d_info

    report = EnvelopeReport(checks, details)
    if strict and not report.all_pass:
        raise TheoryViolation(f"envelope checks failed: {report.failed()}")
    return report


__all__ = [
    "Preenvelope", "EssentialWitness", "EssentialVerdict", "EnvelopeResult", "EnvelopeReport",
    "InjectivityVerdict", "preenvelope", "is_s_pure_injective", "split_retraction",
    "is_pure_essential", "envelope", "verify_envelope", "dual_orders", "pure_injective_orders",
    "transpose_duals", "coverage", "covers", "prime_order_elements", "extension_over",
    "endomorphism_fixing_kernel"
]
