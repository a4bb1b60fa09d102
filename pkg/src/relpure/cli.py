"""Command-line front end.

Jobs come either from a JSON document (``--input FILE``) or from shorthand
flags::

    relpure check-purity --ring Zmod4 --ses B=Z4,A=[2] --class cyclic-cyclically-presented
    relpure envelope --ring Zmod4 --module Z2 --class cyclic-free
    relpure cross-check --corpus-size 500 --seed 42

Exit codes: 0 completed, 1 theory violation, 2 bad input, 3 scale exceeded.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import time
from typing import Any, Optional

from . import __version__
from .classes import (
    ClassBounds,
    ModuleClass,
    explicit_class,
    generate_class,
    ideal_quotients,
    normalize_kind,
    transpose_class,
    GENERATED_KINDS,
)
from .errors import InclusionFails, ParseError, RelPureError, ScaleExceeded, TheoryViolation
from .linalg import IntMatrix, RingSpec, ZZ
from .modules import DEFAULT_HOM_CAP, FPModule, auslander_transpose, canonicalize, direct_sum
from .purity import (
    CRITERIA,
    CRITERION_NAMES,
    LITERAL_LIFT_CAP,
    ShortExactSequence,
    is_s_pure,
    make_ses,
    purity_cross_check,
    verify_certificate,
)

COMMANDS = ("canonicalize", "transpose", "check-purity", "class-equiv", "dual", "flat", "pinj",
            "preenvelope", "envelope", "ext", "dims", "cross-check", "suite")


# ---------------------------------------------------------------------------
# parsing

def _int(x, where: str) -> int:
    if isinstance(x, bool):
        raise ParseError(f"expected an integer, got {x!r}", where)
    if isinstance(x, int):
        return x
    if isinstance(x, str) and re.fullmatch(r"[+-]?\d+", x.strip()):
        return int(x)
    raise ParseError(f"expected an integer, got {x!r}", where)


def parse_ring(spec: Any, where: str = "ring") -> RingSpec:
    if isinstance(spec, str):
        s = spec.strip().replace(" ", "")
        if s in ("Z", "ZZ"):
            return ZZ
        m = re.fullmatch(r"(?:Zmod|Z/|Z)(\d+)", s)
        if m:
            return RingSpec.mod(int(m.group(1)))
        raise ParseError(f"unknown ring {spec!r}", where)
    if isinstance(spec, dict):
        if "Zmod" in spec:
            return RingSpec.mod(_int(spec["Zmod"], f"{where}.Zmod"))
        if "Z" in spec or spec.get("kind") == "Z":
            return ZZ
        if spec.get("kind") == "Zmod":
            return RingSpec.mod(_int(spec.get("m"), f"{where}.m"))
    if isinstance(spec, list) and spec:
        if spec[0] == "Z" and len(spec) == 1:
            return ZZ
        if spec[0] == "Zmod" and len(spec) == 2:
            return RingSpec.mod(_int(spec[1], f"{where}[1]"))
    raise ParseError(f"cannot read ring {spec!r}", where)


_CYCLIC = re.compile(r"(?:Z|R)(?:mod|/)?(\d*)(?:\^(\d+))?")


def parse_module(spec: Any, ring: RingSpec, named: Optional[dict] = None, where: str = "module") -> FPModule:
    """A module from a name, shorthand (``Z4``, ``Z2+Z4``, ``Z^2``, ``0``) or a presentation."""
    named = named or {}
    if isinstance(spec, str):
        s = spec.strip().replace(" ", "")
        if s in named:
            return named[s]
        if s == "0":
            return FPModule.zero(ring)
        parts = []
        for k, piece in enumerate(s.split("+")):
            m = _CYCLIC.fullmatch(piece)
            if not m:
                raise ParseError(f"cannot read module summand {piece!r}", f"{where}, summand {k}")
            d = int(m.group(1)) if m.group(1) else 0
            reps = int(m.group(2)) if m.group(2) else 1
            for _ in range(reps):
                parts.append(FPModule.free(ring, 1) if d == 0 else FPModule.cyclic(ring, d))
        if len(parts) == 1:
            return parts[0]
        return direct_sum(*parts).module
    if isinstance(spec, dict):
        if "gens" not in spec:
            raise ParseError("module presentation needs 'gens'", where)
        n = _int(spec["gens"], f"{where}.gens")
        cols = spec.get("relations", [])
        if not isinstance(cols, list):
            raise ParseError("'relations' must be a list of columns", f"{where}.relations")
        parsed = []
        for j, c in enumerate(cols):
            if not isinstance(c, list) or len(c) != n:
                raise ParseError(f"relation column must have {n} entries", f"{where}.relations[{j}]")
            parsed.append([_int(x, f"{where}.relations[{j}]") for x in c])
        if n and not parsed:
            return FPModule.free(ring, n)
        return FPModule.from_columns(ring, n, parsed)
    raise ParseError(f"cannot read module {spec!r}", where)


def module_to_json(M: FPModule) -> dict:
    return {"gens": M.gens, "relations": M.relations.columns()}


def parse_bounds(spec: Any, where: str = "bounds") -> ClassBounds:
    if spec is None:
        return ClassBounds()
    if isinstance(spec, str):
        spec = [x for x in spec.split(",") if x]
    if isinstance(spec, list):
        vals = [_int(x, where) for x in spec]
        if len(vals) not in (2, 3):
            raise ParseError("bounds are max_gens,max_rels[,entry_bound]", where)
        return ClassBounds(*vals)
    if isinstance(spec, dict):
        return ClassBounds(_int(spec.get("max_gens", 2), where), _int(spec.get("max_rels", 2), where),
                           None if spec.get("entry_bound") is None else _int(spec["entry_bound"], where))
    raise ParseError(f"cannot read bounds {spec!r}", where)


def parse_class(spec: Any, ring: RingSpec, named: Optional[dict] = None, bounds: Any = None,
                where: str = "class") -> ModuleClass:
    if isinstance(spec, str):
        s = spec.strip()
        if s.startswith("transpose:"):
            return transpose_class(parse_class(s[len("transpose:"):], ring, named, bounds, where))
        if s == "ideal-quotients":
            return ideal_quotients(ring)
        if s.startswith("explicit:"):
            mods = [parse_module(x, ring, named, f"{where} member {k}")
                    for k, x in enumerate(s[len("explicit:"):].split(","))]
            return explicit_class(ring, mods)
        try:
            kind = normalize_kind(s)
        except ValueError:
            raise ParseError(f"unknown class kind {s!r}", where) from None
        return generate_class(ring, kind, parse_bounds(bounds, f"{where}.bounds"))
    if isinstance(spec, dict):
        kind = spec.get("kind")
        if kind is None:
            raise ParseError("class needs 'kind'", where)
        if kind in ("explicit", "Explicit"):
            mods = [parse_module(x, ring, named, f"{where}.members[{k}]")
                    for k, x in enumerate(spec.get("members", []))]
            return explicit_class(ring, mods, adjoin_ring=bool(spec.get("adjoin_ring", False)))
        if kind in ("transpose", "TransposeOf"):
            return transpose_class(parse_class(spec.get("of"), ring, named, None, f"{where}.of"))
        if kind == "ideal-quotients":
            return ideal_quotients(ring)
        return parse_class(kind, ring, named, spec.get("bounds", bounds), where)
    raise ParseError(f"cannot read class {spec!r}", where)


def parse_elements(spec: Any, B: FPModule, where: str) -> list[list[int]]:
    if isinstance(spec, str):
        try:
            spec = json.loads(spec)
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad element list: {exc.msg}", f"{where}, column {exc.colno}") from None
    if not isinstance(spec, list):
        raise ParseError("elements must be a list", where)
    if all(not isinstance(x, list) for x in spec):
        if len(spec) == B.gens:
            spec = [spec]
        elif B.gens == 1:
            spec = [[x] for x in spec]
        elif not spec:
            return []
        else:
            raise ParseError(f"element needs {B.gens} coordinates", where)
    out = []
    for k, v in enumerate(spec):
        if not isinstance(v, list) or len(v) != B.gens:
            raise ParseError(f"element needs {B.gens} coordinates", f"{where}[{k}]")
        out.append([_int(x, f"{where}[{k}]") for x in v])
    return out


def parse_ses_shorthand(text: str, ring: RingSpec, named: dict) -> ShortExactSequence:
    m = re.fullmatch(r"\s*B=(.+?),\s*A=(\[.*\])\s*", text)
    if not m:
        raise ParseError("expected B=<module>,A=[elements]", f"--ses {text!r}")
    B = parse_module(m.group(1), ring, named, "--ses B")
    return make_ses(B, parse_elements(m.group(2), B, "--ses A"))


def load_job(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read input file: {exc.strerror}", path) from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"{path}:{exc.lineno}:{exc.colno}") from None
    if not isinstance(doc, dict):
        raise ParseError("job document must be an object", path)
    return doc


# ---------------------------------------------------------------------------
# job

class Job:
    def __init__(self, command: str, ring: RingSpec, args: dict, opts: argparse.Namespace,
                 named: Optional[dict] = None, class_spec: Any = None):
        self.command = command
        self.ring = ring
        self.args = args
        self.opts = opts
        self.named = named or {}
        self.class_spec = class_spec

    def cls(self, key: str = "class") -> ModuleClass:
        spec = self.args.get(key, self.class_spec if key == "class" else None)
        if spec is None:
            raise ParseError(f"missing {key}", key)
        return parse_class(spec, self.ring, self.named, self.args.get("bounds"), key)

    def module(self, key: str = "module") -> FPModule:
        if key not in self.args or self.args[key] is None:
            raise ParseError(f"missing {key}", key)
        return parse_module(self.args[key], self.ring, self.named, key)

    def ses(self) -> ShortExactSequence:
        spec = self.args.get("ses")
        if isinstance(spec, str):
            return parse_ses_shorthand(spec, self.ring, self.named)
        if isinstance(spec, dict):
            B = parse_module(spec.get("B"), self.ring, self.named, "ses.B")
            return make_ses(B, parse_elements(spec.get("A", []), B, "ses.A"))
        raise ParseError("missing ses", "ses")


def _verdict_dict(seq, S, v) -> dict:
    d = v.to_dict()
    d["certificate_rechecked"] = verify_certificate(seq, S, v)
    if v.certificate.member is not None:
        d["witness_member"] = S.members[v.certificate.member].describe()
    return d


def _describe_seq(seq: ShortExactSequence) -> dict:
    return {"A": seq.A.describe(), "B": seq.B.describe(), "C": seq.C.describe(),
            "B_presentation": module_to_json(seq.B), "A_generators": seq.incl.matrix.columns()}


def run(job: Job) -> dict:
    """Dispatch a job; returns the result block of the report."""
    o = job.opts
    c = job.command
    if c == "canonicalize":
        M = job.module()
        cf = canonicalize(M)
        return {"module": module_to_json(M), "canonical": M.describe(),
                "invariant_factors": list(cf.invariant_factors), "free_rank": cf.free_rank,
                "iso_to_canonical": cf.iso_to_canonical.matrix.columns()}
    if c == "transpose":
        if "module" in job.args and job.args["module"] is not None:
            M = job.module()
            T = auslander_transpose(M)
            return {"module": M.describe(), "transpose": module_to_json(T), "canonical": T.describe()}
        S = job.cls()
        return {"class": S.to_dict(), "transpose": transpose_class(S).to_dict()}
    if c == "check-purity":
        seq = job.ses()
        S = job.cls()
        crit = job.args.get("criterion") or "auto"
        out = {"sequence": _describe_seq(seq), "class": S.describe()}
        if crit == "all":
            rep = purity_cross_check(seq, S, literal_cap=o.cap_hom)
            out["pure"] = rep.pure
            out["verdicts"] = {CRITERION_NAMES[k]: _verdict_dict(seq, S, v) for k, v in rep.verdicts.items()}
            out["skipped"] = rep.skipped
        else:
            v = is_s_pure(seq, S, crit, literal_cap=o.cap_hom)
            out["pure"] = v.pure
            out["verdict"] = _verdict_dict(seq, S, v)
        return out
    if c == "class-equiv":
        from .classes import purity_equivalent
        from .corpus import make_corpus

        S1, S2 = job.cls("class"), job.cls("class2")
        corpus = make_corpus(o.corpus_size, o.seed, rings=[job.ring])
        v = purity_equivalent(S1, S2, corpus)
        return {"class": S1.describe(), "class2": S2.describe(), **v.to_dict()}
    if c == "dual":
        from .duality import pontryagin_dual

        M = job.module()
        D = pontryagin_dual(M)
        return {"module": M.describe(), **D.to_dict(), "non_degenerate": D.non_degenerate()}
    if c == "flat":
        from .corpus import make_corpus
        from .duality import is_s_pure_flat

        M = job.module()
        corpus = make_corpus(o.corpus_size, o.seed, rings=[job.ring])
        return {"module": M.describe(), **is_s_pure_flat(M, job.cls(), corpus).to_dict()}
    if c == "pinj":
        from .envelopes import is_s_pure_injective

        M = job.module()
        return {"module": M.describe(), **is_s_pure_injective(M, job.cls()).to_dict()}
    if c == "preenvelope":
        from .envelopes import preenvelope

        M = job.module()
        return preenvelope(M, job.cls(), pruned=bool(job.args.get("pruned"))).to_dict()
    if c == "envelope":
        from .envelopes import envelope

        M = job.module()
        return envelope(M, job.cls(), cap=o.cap_submodules, hom_cap=o.cap_hom).to_dict()
    if c == "ext":
        from .relhom import rel_ext

        M, N = job.module("module"), job.module("module2")
        n = _int(job.args.get("degree", 1), "degree")
        return rel_ext(M, N, job.cls(), n).to_dict()
    if c == "dims":
        from .relhom import pure_dims

        bound = _int(job.args.get("order_bound", 16), "order_bound")
        depth = _int(job.args.get("depth", 4), "depth")
        return pure_dims(job.ring, job.cls(), bound, depth).to_dict()
    if c == "cross-check":
        return cross_check(o.corpus_size, o.seed, o.cap_hom)
    if c == "suite":
        from .suite import run_suite

        return run_suite(seed=o.seed, corpus_size=o.corpus_size, cap_submodules=o.cap_submodules)
    raise ParseError(f"unknown command {c!r}", "command")


def cross_check(size: int, seed: int, literal_cap: int = LITERAL_LIFT_CAP) -> dict:
    """Run every criterion on a seeded corpus against every generated class kind."""
    from .corpus import make_corpus

    corpus = make_corpus(size, seed)
    agree = 0
    per_kind = {k: {"pure": 0, "not_pure": 0} for k in GENERATED_KINDS}
    certs = {"emitted": 0, "rechecked": 0}
    for seq in corpus:
        ok = True
        for k in GENERATED_KINDS:
            S = generate_class(seq.ring, k)
            rep = purity_cross_check(seq, S, literal_cap=literal_cap)
            per_kind[k]["pure" if rep.pure else "not_pure"] += 1
            for v in rep.verdicts.values():
                if not v.pure:
                    certs["emitted"] += 1
                    certs["rechecked"] += verify_certificate(seq, S, v)
            ok &= rep.agree
        agree += ok
    return {"sequences": size, "agreements": agree, "per_kind": per_kind, "certificates": certs}


# ---------------------------------------------------------------------------
# output

def _text(report: dict) -> str:
    lines = [f"relpure {report['version']}  command: {report['command']}  ring: {report['ring']}"]

    def walk(obj, indent):
        pad = "  " * indent
        if isinstance(obj, dict):
            for k in sorted(obj):
                v = obj[k]
                if isinstance(v, (dict, list)) and v and not _flat_list(v):
                    lines.append(f"{pad}{k}:")
                    walk(v, indent + 1)
                else:
                    lines.append(f"{pad}{k}: {_fmt(v)}")
        elif isinstance(obj, list):
            for v in obj:
                if isinstance(v, (dict, list)) and not _flat_list(v):
                    lines.append(f"{pad}-")
                    walk(v, indent + 1)
                else:
                    lines.append(f"{pad}- {_fmt(v)}")

    if "error" in report:
        lines.append(f"error: {report['error']}")
    else:
        walk(report["result"], 1)
    if "timing" in report:
        lines.append(f"elapsed: {report['timing']['seconds']:.3f}s")
    return "\n".join(lines) + "\n"


def _flat_list(v) -> bool:
    return isinstance(v, list) and all(not isinstance(x, dict) for x in v) and len(json.dumps(v)) < 100


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, (list, dict)):
        return json.dumps(v)
    return str(v)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="relpure", description="Relative purity over Z and Z/m.")
    ap.add_argument("--version", action="version", version=f"relpure {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--input", help="JSON job document")
        p.add_argument("--ring", help="Z, Zmod4, Z/6, ...")
        p.add_argument("--module", help="module shorthand (Z4, Z2+Z4, Z^2) or name from --input")
        p.add_argument("--module2", help="second module (ext)")
        p.add_argument("--ses", help="B=<module>,A=[elements]")
        p.add_argument("--class", dest="class_", help="class kind, transpose:<kind>, ideal-quotients, explicit:M1,M2")
        p.add_argument("--class2", help="second class (class-equiv)")
        p.add_argument("--bounds", help="max_gens,max_rels[,entry_bound]")
        p.add_argument("--criterion", choices=["auto", "all", *CRITERIA])
        p.add_argument("--degree", type=int)
        p.add_argument("--depth", type=int)
        p.add_argument("--order-bound", type=int)
        p.add_argument("--pruned", action="store_true")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--cap-hom", type=int, default=DEFAULT_HOM_CAP)
        p.add_argument("--cap-submodules", type=int, help="default 64, or 4096 for suite")
        p.add_argument("--corpus-size", type=int, help="default 100, or 500 for suite")
        p.add_argument("--format", choices=["text", "structured"], default="text")
        p.add_argument("--out", help="write the report here instead of standard output")
        p.add_argument("--no-timing", action="store_true", help="leave timing out of the report")
    return ap


def _job_from(opts: argparse.Namespace) -> Job:
    doc: dict = {}
    if opts.input:
        doc = load_job(opts.input)
        if doc.get("command") not in (None, opts.command):
            raise ParseError(f"document command {doc.get('command')!r} differs from {opts.command!r}", "command")
    ring_spec = opts.ring if opts.ring is not None else doc.get("ring", "Z")
    ring = parse_ring(ring_spec)
    named = {}
    for name, spec in (doc.get("modules") or {}).items():
        named[name] = parse_module(spec, ring, named, f"modules.{name}")
    args = dict(doc.get("args") or {})
    cli_args = {"module": opts.module, "module2": opts.module2, "ses": opts.ses, "class": opts.class_,
                "class2": opts.class2, "bounds": opts.bounds, "criterion": opts.criterion,
                "degree": opts.degree, "depth": opts.depth, "order_bound": opts.order_bound,
                "pruned": opts.pruned or None}
    for k, v in cli_args.items():
        if v is not None:
            args[k] = v
    for k in ("seed", "cap_hom", "cap_submodules", "corpus_size"):
        if k in doc.get("caps", {}):
            setattr(opts, k, _int(doc["caps"][k], f"caps.{k}"))
    for k in ("cap_hom", "cap_submodules", "corpus_size"):
        if getattr(opts, k) <= 0:
            raise ParseError(f"{k} must be positive", k)
    return Job(opts.command, ring, args, opts, named, doc.get("class"))


def main(argv: Optional[list[str]] = None) -> int:
    opts = build_parser().parse_args(argv)
    full = opts.command == "suite"
    if opts.cap_submodules is None:
        opts.cap_submodules = 4096 if full else 64
    if opts.corpus_size is None:
        opts.corpus_size = 500 if full else 100
    started = time.perf_counter()
    report: dict = {"version": __version__, "command": opts.command, "seed": opts.seed,
                    "caps": {"hom": opts.cap_hom, "submodules": opts.cap_submodules,
                             "corpus_size": opts.corpus_size}}
    code = 0
    try:
        job = _job_from(opts)
        report["ring"] = str(job.ring)
        report["args"] = {k: v for k, v in job.args.items() if v is not None}
        report["result"] = run(job)
    except InclusionFails as exc:
        report["result"] = {"hypothesis_met": False, "witness": exc.witness}
    except TheoryViolation as exc:
        report["error"], code = f"theory violation: {exc}", 1
    except ScaleExceeded as exc:
        report["error"], code = f"scale exceeded: {exc}", 3
    except RelPureError as exc:
        report["error"], code = f"bad input: {exc}", 2
    report.setdefault("ring", opts.ring or "?")
    if not opts.no_timing:
        report["timing"] = {"seconds": round(time.perf_counter() - started, 6)}
    if opts.format == "structured":
        text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    else:
        text = _text(report)
    if opts.out:
        with open(opts.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if code and opts.out:
        sys.stderr.write(report["error"] + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
