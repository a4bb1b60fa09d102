"""Relative homological algebra over Z/m.

S-pure projective precovers (sums of members of S), resolutions by iterated
precovers, coresolutions by iterated preenvelopes, relative Ext computed from
either side, and pure projective / injective dimensions at bounded depth.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from typing import Optional, Sequence

from . import groups
from .classes import ModuleClass
from .envelopes import _as_class, _require_finite, preenvelope, split_retraction
from .errors import TheoryViolation
from .linalg import IntMatrix, RingSpec
from .modules import (
    FPModule,
    HomModule,
    ModuleMap,
    direct_sum,
    quotient,
    submodule,
)
from .purity import is_pure_mono

PURITY_CRITERION = "ii"


# ---------------------------------------------------------------------------
# precovers

@dataclass
class Precover:
    source: FPModule                 # P
    target: FPModule                 # M
    map: ModuleMap                   # P -> M
    index: list = field(default_factory=list)


def _assemble(M: FPModule, pieces: list[tuple[FPModule, ModuleMap]]) -> ModuleMap:
    if not pieces:
        return ModuleMap.zero(FPModule.zero(M.ring), M)
    ds = direct_sum(*[U for U, _ in pieces])
    cols = []
    for _, g in pieces:
        cols.extend(g.matrix.columns())
    return ModuleMap(ds.module, M, IntMatrix.from_columns(cols, M.gens), check=True)


def precover_coverage(pi: ModuleMap, U: FPModule) -> tuple[int, int]:
    """(|image of Hom(U, P) -> Hom(U, M)|, |Hom(U, M)|)."""
    HM = HomModule(U, pi.target)
    full = HM.order()
    if full == 1:
        return 1, 1
    HP = HomModule(U, pi.source)
    return HM.span([pi.compose(h) for h in HP.generators()]).order(), full


def _greedy(M: FPModule, pool, members: Sequence[FPModule]):
    def score(pieces):
        pi = _assemble(M, pieces)
        return prod(precover_coverage(pi, U)[0] for U in members)

    goal = prod(HomModule(U, M).order() for U in members)
    chosen: list = []
    s = score(chosen)
    for cand in pool:
        if s == goal:
            break
        t = score(chosen + [cand])
        if t > s:
            chosen, s = chosen + [cand], t
    if s != goal:
        raise TheoryViolation("precover candidates do not cover every Hom(U, M)")
    i = 0
    while i < len(chosen):
        trial = chosen[:i] + chosen[i + 1:]
        if score(trial) == goal:
            chosen = trial
        else:
            i += 1
    return chosen


_PP_ORDERS: dict = {}


def pure_projective_orders(S: ModuleClass) -> tuple[int, ...]:
    """Orders o for which Z/o is S-pure projective."""
    key = (S.ring.modulus, tuple(sorted(S.keys)))
    if key not in _PP_ORDERS:
        out = []
        for o in groups.divisors(S.ring.modulus):
            if o > 1:
                C = FPModule.cyclic(S.ring, o)
                if section(_member_precover(C, S).map) is not None:
                    out.append(o)
        _PP_ORDERS[key] = tuple(out)
    return _PP_ORDERS[key]


def _member_pool(M: FPModule, members):
    return [(U, g) for U in members for g in HomModule(U, M).generators()]


def _member_precover(M: FPModule, S: ModuleClass) -> Precover:
    pieces = _greedy(M, _member_pool(M, S.members), S.members)
    pi = _assemble(M, pieces)
    return Precover(pi.source, M, pi, pieces)


def precover(M: FPModule, S, pruned: bool = True, verify: bool = True) -> Precover:
    """An S-pure epimorphism onto M from a sum of members (or pure-projective cyclics).

    Unpruned: one copy of U per generator of Hom(U, M), for every member U.
    Pruned: a deletion-minimal selection, trying M's own pure-projective
    cyclic summands first so that a pure-projective M is covered by itself.
    """
    _require_finite(M.ring)
    S = _as_class(S, M.ring).with_ring_adjoined()
    if pruned:
        pp = pure_projective_orders(S)
        own = []
        for i, o in enumerate(M.orders):
            if o in pp:
                C = FPModule.cyclic(M.ring, o)
                col = [row[i] for row in M.from_canon]
                own.append((C, ModuleMap(C, M, IntMatrix.from_columns([col], M.gens), check=True)))
        cyclics = [FPModule.cyclic(M.ring, o) for o in pp]
        pool = own + _member_pool(M, cyclics) + _member_pool(M, S.members)
        pieces = _greedy(M, pool, S.members)
    else:
        pieces = _member_pool(M, S.members)
    pi = _assemble(M, pieces)
    pc = Precover(pi.source, M, pi, [(U.describe(), g.matrix.columns()) for U, g in pieces])
    if verify:
        if not pi.is_surjective():
            raise TheoryViolation("precover is not onto")
        K, incl = submodule(pi.source, pi.kernel_generators())
        if not is_pure_mono(incl, S, PURITY_CRITERION):
            raise TheoryViolation("precover kernel is not pure")
    return pc


def section(pi: ModuleMap) -> Optional[ModuleMap]:
    """s with ``pi ∘ s = id``, or None."""
    M, P = pi.target, pi.source
    H = HomModule(M, P)
    End = HomModule(M, M)
    gens = H.generators()
    c = End.span([pi.compose(h) for h in gens]).coefficients(End.encode(ModuleMap.identity(M)))
    if c is None:
        return None
    s = ModuleMap.zero(M, P)
    for a, h in zip(c, gens):
        if a:
            s = s + h.scale(a)
    return s


def is_s_pure_projective(M: FPModule, S) -> bool:
    S = _as_class(S, M.ring).with_ring_adjoined()
    return section(_member_precover(M, S).map) is not None


# ---------------------------------------------------------------------------
# resolutions

@dataclass
class Resolution:
    """``... -> P_1 -> P_0 -> M -> 0`` with syzygies ``K_n = ker(P_{n-1} -> K_{n-1})``."""
    module: FPModule
    modules: list[FPModule]           # P_n
    covers: list[ModuleMap]           # P_n -> K_n
    syzygies: list[FPModule]          # K_n, K_0 = M
    inclusions: list[Optional[ModuleMap]]   # K_n -> P_{n-1}; None for n = 0
    split_at: Optional[int]           # first n with K_n pure projective
    depth: int

    def differential(self, n: int) -> ModuleMap:
        """``d_n: P_n -> P_{n-1}`` for n >= 1."""
        return self.inclusions[n].compose(self.covers[n])

    def to_dict(self) -> dict:
        return {"modules": [P.describe() for P in self.modules],
                "syzygies": [K.describe() for K in self.syzygies],
                "split_at": self.split_at, "depth": self.depth}


@dataclass
class Coresolution:
    """``0 -> N -> I^0 -> I^1 -> ...`` with cosyzygies ``C_{n+1} = coker(C_n -> I^n)``."""
    module: FPModule
    modules: list[FPModule]
    embeddings: list[ModuleMap]       # C_n -> I^n
    cosyzygies: list[FPModule]        # C_0 = N
    projections: list[ModuleMap]      # I^n -> C_{n+1}
    split_at: Optional[int]
    depth: int

    def differential(self, n: int) -> ModuleMap:
        """``d^n: I^n -> I^{n+1}``."""
        return self.embeddings[n + 1].compose(self.projections[n])

    def to_dict(self) -> dict:
        return {"modules": [I.describe() for I in self.modules],
                "cosyzygies": [C.describe() for C in self.cosyzygies],
                "split_at": self.split_at, "depth": self.depth}


def resolve(M: FPModule, S, depth: int, verify: bool = True) -> Resolution:
    """Precovers iterated on syzygies until ``depth`` terms exist."""
    _require_finite(M.ring)
    S = _as_class(S, M.ring).with_ring_adjoined()
    mods, covs, syz, incs = [], [], [M], [None]
    split_at = None
    K = M
    for n in range(depth):
        pc = precover(K, S, verify=verify)
        mods.append(pc.source)
        covs.append(pc.map)
        if split_at is None and section(pc.map) is not None:
            split_at = n
        K, inc = submodule(pc.source, pc.map.kernel_generators())
        syz.append(K)
        incs.append(inc)
    return Resolution(M, mods, covs, syz, incs, split_at, depth)


def coresolve(N: FPModule, S, depth: int, verify: bool = True) -> Coresolution:
    """Preenvelopes iterated on cosyzygies until ``depth`` terms exist."""
    _require_finite(N.ring)
    S = _as_class(S, N.ring).with_ring_adjoined()
    mods, embs, cos, projs = [], [], [N], []
    split_at = None
    C = N
    for n in range(depth):
        pre = preenvelope(C, S, pruned=True, verify=verify)
        mods.append(pre.target)
        embs.append(pre.map)
        if split_at is None and split_retraction(C, S, pre.map) is not None:
            split_at = n
        C, q = quotient(pre.target, pre.map.matrix.columns())
        cos.append(C)
        projs.append(q)
    return Coresolution(N, mods, embs, cos, projs, split_at, depth)


# ---------------------------------------------------------------------------
# Ext

def subquotient(ring: RingSpec, orders: Sequence[int], num: Sequence[Sequence[int]],
                den: Sequence[Sequence[int]]) -> FPModule:
    """``<num> / <den>`` inside ``Z^q / diag(orders)``; den must lie in <num>."""
    if not num:
        return FPModule.zero(ring)
    ambient = FPModule.from_orders(ring, orders)
    A, _ = submodule(ambient, num)
    span = groups.Span(list(orders), num)
    rels = []
    for v in den:
        c = span.coefficients(v)
        if c is None:
            raise TheoryViolation("boundaries are not cycles")
        rels.append(c)
    Q, _ = quotient(A, rels)
    return FPModule.from_orders(ring, Q.orders)


def _matrix_rows(cols: list[list[int]], nrows: int) -> list[list[int]]:
    return [[c[i] for c in cols] for i in range(nrows)]


def _cohomology(ring, H_src: HomModule, H_tgt: Optional[HomModule], apply_out,
                incoming: list[list[int]]) -> FPModule:
    """Cohomology at H_src: ker(out) / incoming."""
    orders = H_src.cell_orders
    if H_tgt is None:
        ker = [[int(i == j) for i in range(len(orders))] for j in range(len(orders))]
    else:
        cols = [H_tgt.encode(apply_out(f)) for f in H_src.generators()]
        rows = _matrix_rows(cols, len(H_tgt.cell_orders))
        ker = groups.kernel(orders, H_tgt.cell_orders, rows)
    return subquotient(ring, orders, ker, incoming)


def ext_via_projective(res: Resolution, N: FPModule, n: int) -> FPModule:
    """H^n of ``Hom(P_•, N)``."""
    if len(res.modules) < n + 2:
        raise ValueError(f"resolution depth {res.depth} too small for degree {n}")
    P = res.modules
    Hn = HomModule(P[n], N)
    Hnext = HomModule(P[n + 1], N)
    d_next = res.differential(n + 1)
    incoming = []
    if n >= 1:
        d_in = res.differential(n)
        Hprev = HomModule(P[n - 1], N)
        incoming = [Hn.encode(f.compose(d_in)) for f in Hprev.generators()]
    return _cohomology(N.ring, Hn, Hnext, lambda f: f.compose(d_next), incoming)


def ext_via_injective(M: FPModule, cor: Coresolution, n: int) -> FPModule:
    """H^n of ``Hom(M, I^•)``."""
    if len(cor.modules) < n + 2:
        raise ValueError(f"coresolution depth {cor.depth} too small for degree {n}")
    I = cor.modules
    Hn = HomModule(M, I[n])
    Hnext = HomModule(M, I[n + 1])
    d_out = cor.differential(n)
    incoming = []
    if n >= 1:
        d_in = cor.differential(n - 1)
        Hprev = HomModule(M, I[n - 1])
        incoming = [Hn.encode(d_in.compose(f)) for f in Hprev.generators()]
    return _cohomology(M.ring, Hn, Hnext, lambda f: d_out.compose(f), incoming)


@dataclass
class ExtResult:
    degree: int
    via_projective: FPModule
    via_injective: FPModule

    @property
    def agree(self) -> bool:
        return self.via_projective.iso_key() == self.via_injective.iso_key()

    def to_dict(self) -> dict:
        return {"degree": self.degree, "via_projective": self.via_projective.describe(),
                "via_injective": self.via_injective.describe(), "agree": self.agree}


def rel_ext(M: FPModule, N: FPModule, S, n: int, depth: Optional[int] = None,
            check: bool = True) -> ExtResult:
    """Relative Ext^n computed from a resolution of M and a coresolution of N."""
    depth = max(depth or 0, n + 2)
    res = resolve(M, S, depth, verify=False)
    cor = coresolve(N, S, depth, verify=False)
    r = ExtResult(n, ext_via_projective(res, N, n), ext_via_injective(M, cor, n))
    if check and not r.agree:
        raise TheoryViolation(
            f"Ext^{n} unbalanced: {r.via_projective.describe()} vs {r.via_injective.describe()}")
    return r


# ---------------------------------------------------------------------------
# dimensions

def projective_dimension(M: FPModule, S, depth: int) -> Optional[int]:
    """Least n < depth with the n-th syzygy pure projective; None when unresolved."""
    return resolve(M, S, depth, verify=False).split_at


def injective_dimension(N: FPModule, S, depth: int) -> Optional[int]:
    return coresolve(N, S, depth, verify=False).split_at


def modules_up_to(ring: RingSpec, order_bound: int) -> list[FPModule]:
    """Every finite module over Z/m of order <= order_bound, one per iso class."""
    _require_finite(ring)
    ds = [d for d in groups.divisors(ring.modulus) if d > 1]
    out = []

    def rec(prefix, size, start):
        out.append(FPModule.from_orders(ring, prefix))
        for i in range(start, len(ds)):
            if size * ds[i] <= order_bound:
                rec(prefix + [ds[i]], size * ds[i], i)

    rec([], 1, 0)
    seen, uniq = set(), []
    for M in out:
        if M.iso_key() not in seen:
            seen.add(M.iso_key())
            uniq.append(M)
    return uniq


@dataclass
class DimReport:
    ring: RingSpec
    order_bound: int
    depth: int
    per_module: list[dict]

    @staticmethod
    def _sup(values: list[Optional[int]]):
        return None if any(v is None for v in values) else max(values, default=0)

    @property
    def global_projective(self) -> Optional[int]:
        return self._sup([r["projective"] for r in self.per_module])

    @property
    def global_injective(self) -> Optional[int]:
        return self._sup([r["injective"] for r in self.per_module])

    def label(self, v: Optional[int]) -> str:
        return f">= {self.depth}" if v is None else str(v)

    @property
    def consistent(self) -> bool:
        p, i = self.global_projective, self.global_injective
        return p is None or i is None or p == i

    def to_dict(self) -> dict:
        return {
            "ring": str(self.ring), "order_bound": self.order_bound, "depth": self.depth,
            "global_projective": self.label(self.global_projective),
            "global_injective": self.label(self.global_injective),
            "modules": [{"module": r["module"], "projective": self.label(r["projective"]),
                         "injective": self.label(r["injective"])} for r in self.per_module],
        }


def pure_dims(ring: RingSpec, S, order_bound: int, depth: int) -> DimReport:
    """Pure projective and injective dimensions of every module up to order_bound.

    The suprema are over this bounded family only.
    """
    S = _as_class(S, ring).with_ring_adjoined()
    rows = []
    for M in modules_up_to(ring, order_bound):
        if M.is_zero:
            continue
        rows.append({"module": M.describe(),
                     "projective": projective_dimension(M, S, depth),
                     "injective": injective_dimension(M, S, depth)})
    rep = DimReport(ring, order_bound, depth, rows)
    if not rep.consistent:
        raise TheoryViolation("global pure projective and injective dimensions differ")
    return rep
