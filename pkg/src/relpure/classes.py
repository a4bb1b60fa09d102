"""Finite representative lists for module classes.

A class is always handled through an explicit list of pairwise
non-isomorphic finitely presented members together with the bounds that
produced it.  Verdicts computed against a generated class are therefore
statements about that bounded slice.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import product
from typing import Iterable, Optional, Sequence

from .errors import RingMismatch, ScaleExceeded
from .linalg import IntMatrix, RingSpec
from .modules import FPModule, auslander_transpose

CYCLIC_FREE = "CyclicFree"
FP_BOUNDED = "FinitelyPresentedBounded"
CYCLIC_CYCLIC = "CyclicCyclicallyPresented"
CYCLICALLY = "CyclicallyPresented"
TRANSPOSE_OF = "TransposeOf"
EXPLICIT = "Explicit"
GENERATED_KINDS = (CYCLIC_FREE, FP_BOUNDED, CYCLIC_CYCLIC, CYCLICALLY)

KIND_ALIASES = {
    "cyclic-free": CYCLIC_FREE,
    "finitely-presented-bounded": FP_BOUNDED,
    "fp-bounded": FP_BOUNDED,
    "cyclic-cyclically-presented": CYCLIC_CYCLIC,
    "cyclically-presented": CYCLICALLY,
    "explicit": EXPLICIT,
}

DEFAULT_CLASS_CAP = 512


@dataclass(frozen=True)
class ClassBounds:
    max_gens: int = 2
    max_rels: int = 2
    entry_bound: Optional[int] = None   # None: ring modulus, or 8 over Z

    def entries(self, ring: RingSpec) -> int:
        if self.entry_bound is not None:
            return self.entry_bound
        return ring.modulus if ring.modulus is not None else 8

    def as_tuple(self, ring: RingSpec) -> tuple[int, int, int]:
        return (self.max_gens, self.max_rels, self.entries(ring))


def normalize_kind(kind: str) -> str:
    if kind in GENERATED_KINDS or kind in (TRANSPOSE_OF, EXPLICIT):
        return kind
    try:
        return KIND_ALIASES[kind.lower()]
    except KeyError:
        raise ValueError(f"unknown class kind {kind!r}") from None


def _standard(M: FPModule) -> FPModule:
    """Free modules get the square zero presentation so that tr(R^n) = R^n."""
    free_order = M.ring.modulus or 0
    if M.orders and all(o == free_order for o in M.orders):
        return FPModule.free(M.ring, len(M.orders))
    return M


@dataclass(frozen=True, eq=False)
class ModuleClass:
    ring: RingSpec
    members: tuple[FPModule, ...]
    kind_tag: str
    bounds: Optional[tuple[int, int, int]] = None
    origin: Optional[str] = field(default=None, compare=False)

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    @cached_property
    def keys(self) -> frozenset:
        return frozenset(U.iso_key() for U in self.members)

    @cached_property
    def transposes(self) -> tuple[FPModule, ...]:
        return tuple(auslander_transpose(U) for U in self.members)

    def contains_iso(self, M: FPModule) -> bool:
        return M.iso_key() in self.keys

    def includes(self, other: "ModuleClass") -> Optional[FPModule]:
        """None when every member of ``other`` is isomorphic to one here; else a witness."""
        for U in other.members:
            if not self.contains_iso(U):
                return U
        return None

    def has_free_rank_one(self) -> bool:
        R = FPModule.free(self.ring, 1)
        return any(U.iso_key() == R.iso_key() and U.relations.is_zero() and U.gens == 1
                   for U in self.members)

    def with_ring_adjoined(self) -> "ModuleClass":
        if self.has_free_rank_one():
            return self
        R = FPModule.free(self.ring, 1)
        rest = [U for U in self.members if U.iso_key() != R.iso_key()]
        return ModuleClass(self.ring, (R, *rest), self.kind_tag, self.bounds, self.origin)

    def describe(self) -> str:
        body = ", ".join(U.describe() for U in self.members)
        b = "" if self.bounds is None else f" bounds={self.bounds}"
        return f"{self.kind_tag}[{self.ring}]{b} {{{body}}}"

    def to_dict(self) -> dict:
        return {
            "kind": self.kind_tag,
            "ring": str(self.ring),
            "bounds": list(self.bounds) if self.bounds else None,
            "members": [
                {"gens": U.gens, "relations": U.relations.columns(), "canonical": U.describe()}
                for U in self.members
            ],
        }


def _dedup(ring: RingSpec, candidates: Iterable[FPModule], cap: Optional[int]) -> list[FPModule]:
    seen: dict = {}
    for U in candidates:
        if U.ring != ring:
            raise RingMismatch(f"member over {U.ring} in a class over {ring}")
        if U.is_zero:
            continue
        key = U.iso_key()
        if key in seen:
            continue
        seen[key] = _standard(U)
        if cap is not None and len(seen) > cap:
            raise ScaleExceeded("class generation", len(seen), cap)
    return list(seen.values())


def _fp_candidates(ring: RingSpec, b: ClassBounds):
    e = b.entries(ring)
    for n in range(1, b.max_gens + 1):
        for k in range(1, b.max_rels + 1):
            for entries in product(range(e), repeat=n * k):
                yield FPModule(ring, n, IntMatrix(n, k, tuple(entries)))


def _cyclically_candidates(ring: RingSpec, b: ClassBounds):
    e = b.entries(ring)
    for n in range(1, b.max_gens + 1):
        for g in product(range(e), repeat=n):
            yield FPModule(ring, n, IntMatrix(n, 1, tuple(g)))


def generate_class(ring: RingSpec, kind: str, bounds: Optional[ClassBounds] = None,
                   cap: Optional[int] = DEFAULT_CLASS_CAP) -> ModuleClass:
    """Representatives of a standard class, bounded, deduplicated, R adjoined."""
    return _generate(ring, normalize_kind(kind), bounds or ClassBounds(), cap)


@lru_cache(maxsize=256)
def _generate(ring: RingSpec, kind: str, b: ClassBounds, cap: Optional[int]) -> ModuleClass:
    if kind == CYCLIC_FREE:
        members = [FPModule.free(ring, 1)]
    elif kind == FP_BOUNDED:
        members = _dedup(ring, _fp_candidates(ring, b), cap)
    elif kind == CYCLIC_CYCLIC:
        members = _dedup(ring, (FPModule.cyclic(ring, r) for r in range(b.entries(ring))), cap)
    elif kind == CYCLICALLY:
        members = _dedup(ring, _cyclically_candidates(ring, b), cap)
    else:
        raise ValueError(f"{kind} classes are not generated; use explicit_class or transpose_class")
    tag_bounds = None if kind == CYCLIC_FREE else b.as_tuple(ring)
    return ModuleClass(ring, tuple(members), kind, tag_bounds).with_ring_adjoined()


def explicit_class(ring: RingSpec, members: Sequence[FPModule], adjoin_ring: bool = False) -> ModuleClass:
    cls = ModuleClass(ring, tuple(_dedup(ring, members, None)), EXPLICIT)
    return cls.with_ring_adjoined() if adjoin_ring else cls


def transpose_class(S: ModuleClass) -> ModuleClass:
    """Member-wise transpose, deduplicated."""
    return ModuleClass(S.ring, tuple(_dedup(S.ring, S.transposes, None)), TRANSPOSE_OF, S.bounds,
                       origin=S.kind_tag)


def ideal_quotients(ring: RingSpec) -> ModuleClass:
    """``{R/I}`` for the ideals I of a finite ring Z/m (zero quotient dropped)."""
    m = ring.modulus
    if m is None:
        raise ValueError("ideal_quotients needs a finite ring")
    return explicit_class(ring, [FPModule.cyclic(ring, d) for d in range(m + 1) if d == 0 or m % d == 0])


@dataclass
class EquivalenceVerdict:
    equivalent: bool
    checked: int
    witness_index: Optional[int] = None
    witness: object = None
    verdicts: Optional[tuple[bool, bool]] = None

    def to_dict(self) -> dict:
        out = {"equivalent": self.equivalent, "checked": self.checked}
        if not self.equivalent:
            seq = self.witness
            out["witness"] = {
                "index": self.witness_index,
                "B": {"gens": seq.B.gens, "relations": seq.B.relations.columns()},
                "A_gens": seq.incl.matrix.columns(),
                "verdicts": list(self.verdicts),
            }
        return out


def purity_equivalent(S1: ModuleClass, S2: ModuleClass, corpus, criterion: str = "auto") -> EquivalenceVerdict:
    from .purity import is_s_pure

    if S1.ring != S2.ring:
        raise RingMismatch("classes over different rings")
    n = 0
    for idx, seq in enumerate(corpus):
        if seq.ring != S1.ring:
            continue
        n += 1
        a = is_s_pure(seq, S1, criterion).pure
        b = is_s_pure(seq, S2, criterion).pure
        if a != b:
            return EquivalenceVerdict(False, n, idx, seq, (a, b))
    return EquivalenceVerdict(True, n)
