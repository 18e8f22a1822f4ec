"""Command line entry point: ``efpl <command> ...``.

Exit codes: 0 true / success, 1 false, 2 usage or parse error, 3 internal
invariant breach (oracle mismatch, failed truth transport, Sat disagreement).
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from . import __version__
from .evaluator import (
    Evaluator,
    UnboundVariableError,
    brute_force_evaluate,
    stage_bound,
    trace_lines,
)
from .generate import random_sentence
from .meta import meta_vocabulary
from .metacheck import (
    DepthInsufficient,
    depth_stability,
    load_corpus,
    meta_check,
    parse_sentences,
    sat_program,
)
from .parser import (
    ParseError,
    parse_formula,
    parse_program,
    parse_structure,
    parse_vocabulary,
    print_formula,
    print_program,
    print_vocabulary,
)
from .satgen import SatLimits
from .structure import Homomorphism, StructureError, check_homomorphism
from .syntax import EQ, NegAtom, NotExistentialLogic, free_vars, subformulas, to_prenex

OK, FALSE, USAGE, BREACH = 0, 1, 2, 3


class UsageError(Exception):
    pass


class Breach(Exception):
    pass


def _read(path):
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as e:
        raise UsageError(f"{path}: {e.strerror}") from None


def _located(path, e: ParseError):
    return UsageError(f"{path}: {e}")


def _structure(path):
    try:
        return parse_structure(_read(path))
    except (ParseError, StructureError) as e:
        raise UsageError(f"{path}: {e}") from None


def _formula(path, vocab):
    try:
        return parse_formula(_read(path), vocab)
    except ParseError as e:
        raise _located(path, e) from None


def _pairs(items, what):
    out = {}
    for item in items or ():
        if "=" not in item:
            raise UsageError(f"{what} {item!r} is not of the form name=value")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _emit(args, payload, text_lines):
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        for line in text_lines:
            print(line)


def _base_vocab(args):
    if getattr(args, "vocab", None):
        try:
            return parse_vocabulary(_read(args.vocab))
        except ParseError as e:
            raise _located(args.vocab, e) from None
    if getattr(args, "structure", None):
        return _structure(args.structure)[0]
    return load_corpus()[0].vocab


# ---------------------------------------------------------------------------
# commands


def cmd_check(args):
    vocab, X = _structure(args.structure)
    phi = _formula(args.formula, vocab)
    try:
        s = {v: X.element(a) for v, a in _pairs(args.bind, "binding").items()}
    except StructureError as e:
        raise UsageError(str(e)) from None
    missing = free_vars(phi) - set(s)
    if missing:
        raise UsageError(f"unbound free variables: {', '.join(sorted(missing))}")
    ev = Evaluator(X, strategy=args.strategy)
    try:
        verdict = ev.evaluate(phi, s)
    except UnboundVariableError as e:
        raise UsageError(str(e)) from None
    if args.cross_check and brute_force_evaluate(phi, s, X) != verdict:
        raise Breach("evaluator and reference evaluator disagree")
    lines = []
    if args.trace_stages:
        for _, _, trace in ev.traces:
            lines.extend(trace_lines(trace, X))
    _emit(args, {"verdict": verdict, "trace": lines}, lines + [str(verdict).lower()])
    return OK if verdict else FALSE


def cmd_prenex(args):
    phi = _formula(args.formula, None)
    try:
        out = print_formula(to_prenex(phi))
    except NotExistentialLogic as e:
        raise UsageError(str(e)) from None
    _emit(args, {"prenex": out}, [out])
    return OK


def cmd_stages(args):
    vocab, X = _structure(args.structure)
    try:
        program = parse_program(_read(args.program), vocab)
    except ParseError as e:
        raise _located(args.program, e) from None
    try:
        s = {v: X.element(a) for v, a in _pairs(args.bind, "binding").items()}
    except StructureError as e:
        raise UsageError(str(e)) from None
    ev = Evaluator(X, strategy="saturate", seminaive=not args.naive)
    try:
        res = ev.lfp(program, s, naive=args.naive)
    except UnboundVariableError as e:
        raise UsageError(str(e)) from None
    stage, bound = res.trace.closure_stage, stage_bound(program, X)
    if stage > bound:
        raise Breach(f"closure stage {stage} exceeds bound {bound}")
    lines = trace_lines(res.trace, X)
    tables = {h: sorted([X.name(e) for e in t] for t in res.tables[h]) for h in sorted(res.tables)}
    payload = {"closure_stage": stage, "bound": bound, "trace": lines, "tables": tables}
    _emit(args, payload, lines + [f"closure stage {stage} (bound {bound})"])
    return OK


def _has_negated_equality(phi):
    return any(isinstance(g, NegAtom) and g.rel == EQ for g in subformulas(phi))


def cmd_hom_check(args):
    vsrc, src = _structure(args.source)
    vtgt, tgt = _structure(args.target)
    names = _pairs(args.map, "map entry")
    try:
        mapping = {src.element(a): tgt.element(b) for a, b in names.items()}
        report = check_homomorphism(Homomorphism(src, tgt, mapping),
                                    equality_negatable=not args.allow_non_injective)
    except StructureError as e:
        raise UsageError(str(e)) from None
    lines = [f"violation: {kind} {sym} ({','.join(t) if isinstance(t, tuple) else t})"
             for kind, sym, t in report.violations]
    sentences = []
    if args.corpus:
        try:
            sentences = parse_sentences(_read(args.corpus), vsrc)
        except ParseError as e:
            raise _located(args.corpus, e) from None
    if args.random:
        rng = random.Random(args.seed)
        sentences += [(f"random{i}", random_sentence(rng, vsrc, depth=3))
                      for i in range(args.random)]
    transport = []
    if report.ok:
        for label, phi in sentences:
            if free_vars(phi):
                raise UsageError(f"{label}: not a sentence")
            if args.allow_non_injective and _has_negated_equality(phi):
                transport.append({"label": label, "status": "skipped"})
                continue
            a = Evaluator(src).evaluate(phi)
            b = Evaluator(tgt).evaluate(phi)
            status = "broken" if a and not b else "ok"
            transport.append({"label": label, "source": a, "target": b, "status": status})
    lines.append("homomorphism: " + ("yes" if report.ok else "no"))
    for t in transport:
        if t["status"] == "skipped":
            lines.append(f"{t['label']}: skipped (negated equality)")
        else:
            lines.append(f"{t['label']}: source={str(t['source']).lower()} "
                         f"target={str(t['target']).lower()} {t['status']}")
    payload = {"homomorphism": report.ok,
               "violations": [list(map(str, (k, s))) + [list(t) if isinstance(t, tuple) else t]
                              for k, s, t in report.violations],
               "transport": transport}
    _emit(args, payload, lines)
    if any(t["status"] == "broken" for t in transport):
        raise Breach("truth transport failed for a valid homomorphism")
    return OK if report.ok else FALSE


def _limits(args):
    return SatLimits(K=args.K, I=args.I)


def cmd_gen_sat(args):
    vocab = _base_vocab(args)
    program = sat_program(vocab, _limits(args))
    text = print_program(program) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        _emit(args, {"rules": len(program), "out": args.out},
              [f"wrote {len(program)} rules to {args.out}"])
    elif args.json:
        _emit(args, {"rules": len(program), "program": text}, [])
    else:
        sys.stdout.write(text)
    return OK


def cmd_gen_vocab(args):
    text = print_vocabulary(meta_vocabulary(_base_vocab(args)))
    if args.json:
        _emit(args, {"vocabulary": text}, [])
    else:
        sys.stdout.write(text)
    return OK


def cmd_meta_check(args):
    if args.structure:
        vocab, base = _structure(args.structure)
    else:
        base, _ = load_corpus()
        vocab = base.vocab
    if args.formula:
        try:
            sentences = parse_sentences(_read(args.formula), vocab)
        except ParseError as e:
            raise _located(args.formula, e) from None
    else:
        sentences = load_corpus()[1]
    if not sentences:
        raise UsageError("no sentences to check")
    limits = _limits(args)
    standardize = not args.no_standardize
    payload, lines, good = [], [], True
    for label, phi in sentences:
        if free_vars(phi):
            raise UsageError(f"{label}: not a sentence (free {', '.join(sorted(free_vars(phi)))})")
        try:
            if args.stability:
                depths = None
                if args.depth is not None:
                    depths = range(args.depth, args.depth + args.stability)
                st = depth_stability(phi, base, depths, args.stability, standardize, limits)
                reports, ok = st.reports, st.stable
                payload.append({"label": label, **st.as_dict()})
            else:
                r = meta_check(phi, base, args.depth, standardize, limits)
                reports, ok = [r], r.agreement
                payload.append(r.as_dict() if len(sentences) == 1 else {"label": label, **r.as_dict()})
        except DepthInsufficient as e:
            raise UsageError(f"{label}: {e}") from None
        good &= ok
        for r in reports:
            lines.append(f"{label}: d={r.depth} native={str(r.native_verdict).lower()} "
                         f"sat={str(r.sat_verdict).lower()} stage={r.closure_stage} "
                         f"{'agree' if r.agreement else 'DISAGREE'}")
    if args.json:
        print(json.dumps(payload[0] if len(payload) == 1 else payload, indent=2))
    else:
        for line in lines:
            print(line)
        print(f"{len(sentences)} sentences, {'all agree' if good else 'disagreement found'}")
    return OK if good else BREACH


# ---------------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="efpl", description="Existential fixed point logic tools.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--json", action="store_true", help="machine readable output")
    p.add_argument("--seed", type=int, default=0, help="seed for generated corpora")
    # the global flags are also accepted after the command name
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    c = add("check", help="evaluate a formula in a structure")
    c.add_argument("structure")
    c.add_argument("formula")
    c.add_argument("--bind", action="append", metavar="x=a", help="assign element a to x")
    c.add_argument("--trace-stages", action="store_true", help="log fixed point stages")
    c.add_argument("--strategy", choices=("saturate", "demand"), default="saturate")
    c.add_argument("--cross-check", action="store_true",
                   help="also run the reference evaluator; exit 3 if they differ")
    c.set_defaults(func=cmd_check)

    c = add("prenex", help="print the prenex form of a Let-free formula")
    c.add_argument("formula")
    c.set_defaults(func=cmd_prenex)

    c = add("stages", help="least fixed point of a program with its stages")
    c.add_argument("structure")
    c.add_argument("program")
    c.add_argument("--bind", action="append", metavar="x=a")
    c.add_argument("--naive", action="store_true", help="naive instead of semi-naive iteration")
    c.set_defaults(func=cmd_stages)

    c = add("hom-check", help="check a homomorphism and truth transport")
    c.add_argument("source")
    c.add_argument("target")
    c.add_argument("--map", nargs="+", metavar="a=u", default=[])
    c.add_argument("--corpus", help="file of sentences to transport")
    c.add_argument("--random", type=int, default=0, metavar="N",
                   help="also transport N random sentences (uses --seed)")
    c.add_argument("--allow-non-injective", action="store_true",
                   help="do not treat equality as negatable; skips sentences with !(t = u)")
    c.set_defaults(func=cmd_hom_check)

    for name, func, text in (("gen-sat", cmd_gen_sat, "print the Sat program"),
                             ("gen-vocab", cmd_gen_vocab, "print the meta vocabulary")):
        c = add(name, help=text)
        g = c.add_mutually_exclusive_group()
        g.add_argument("--vocab", help="base vocabulary file (default: bundled corpus)")
        g.add_argument("--structure", help="take the vocabulary of a structure file")
        if name == "gen-sat":
            c.add_argument("--out", help="write to a file instead of stdout")
            c.add_argument("--K", type=int, default=4, help="largest symbol arity")
            c.add_argument("--I", type=int, default=8, help="extra predicate index supply")
        c.set_defaults(func=func)

    c = add("meta-check", help="compare Sat with native evaluation")
    c.add_argument("--structure", help="base structure (default: bundled corpus)")
    c.add_argument("--formula", help="file of sentences (default: bundled corpus)")
    c.add_argument("--depth", type=int, help="truncation bound (default: footprint + 4)")
    c.add_argument("--stability", type=int, default=0, metavar="N",
                   help="check N consecutive bounds, starting at --depth or the footprint")
    c.add_argument("--no-standardize", action="store_true",
                   help="quote sentences without renaming bound variables apart")
    c.add_argument("--K", type=int, default=4)
    c.add_argument("--I", type=int, default=8)
    c.set_defaults(func=cmd_meta_check)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"efpl: error: {e}", file=sys.stderr)
        return USAGE
    except Breach as e:
        print(f"efpl: invariant breach: {e}", file=sys.stderr)
        return BREACH
    except Exception as e:  # never report an internal failure as a verdict
        print(f"efpl: invariant breach: {type(e).__name__}: {e}", file=sys.stderr)
        return BREACH


if __name__ == "__main__":
    sys.exit(main())
