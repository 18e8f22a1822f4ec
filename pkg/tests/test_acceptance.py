"""Acceptance criteria 1-10, one printed PASS/FAIL line each."""

import random
import time
from itertools import product

import pytest

from efpl.batch import agree_everywhere
from efpl.evaluator import Evaluator, evaluate, lfp, lfp_oracle, run_deep, stage_bound
from efpl.generate import (GRAPH_VOCAB, all_structures, random_formula, random_homomorphism,
                           random_program, random_sentence, random_structure, random_term)
from efpl.meta import (QuoteContext, build_meta_structure, encode, encode_assignment, mklist,
                       nat, to_meta_value, urelement, var_el, with_junk)
from efpl.metacheck import (depth_stability, footprint, load_corpus, native_extension,
                            sat_contract, sat_program)
from efpl.satgen import (AuxSupply, R, V, expand_bounded_forall, expand_forall_in_list,
                         literal_expansion, numeral)
from efpl.structure import UNDEFINED, Homomorphism, check_homomorphism, eval_term
from efpl.syntax import (EQ, Atom, Let, NegAtom, Vocabulary, all_variables, disj, free_vars,
                         standardize_apart, subformulas, to_prenex)

BASE, CORPUS = load_corpus()


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, detail=""):
        with capsys.disabled():
            print(f"\ncriterion {number} {'PASS' if ok else 'FAIL'}: {title}"
                  + (f" ({detail})" if detail else ""))
        assert ok, detail

    return emit


SHAPES = [(0,), (1,), (2,), (0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]


def test_criterion_01_lfp_matches_oracle(report):
    # every shape (head arities) gets the same number of seeded programs; each
    # is checked on all structures with 1 or 2 elements and random ones with 3
    rng = random.Random(101)
    start = time.perf_counter()
    small = list(all_structures(GRAPH_VOCAB, 1)) + list(all_structures(GRAPH_VOCAB, 2))
    per_shape = {shape: 0 for shape in SHAPES}
    checks = bad = 0
    while min(per_shape.values()) < 30:
        prog = random_program(rng, GRAPH_VOCAB, max_heads=2, max_arity=2, depth=2)
        shape = tuple(sorted(len(r.params) for r in prog))
        if per_shape[shape] >= 30:
            continue
        per_shape[shape] += 1
        worlds = small + [random_structure(rng, GRAPH_VOCAB, 3) for _ in range(6)]
        for X in worlds:
            checks += 1
            if lfp(prog, {}, X).tables != lfp_oracle(prog, {}, X):
                bad += 1
    elapsed = time.perf_counter() - start
    report(1, "lfp equals least closed point", bad == 0 and elapsed < 60,
           f"{sum(per_shape.values())} programs over {len(SHAPES)} shapes, "
           f"{checks} program/structure pairs, {bad} mismatches, {elapsed:.1f}s")


def test_criterion_02_closure_stage_bound(report):
    rng = random.Random(102)
    over = diff = 0
    for _ in range(1000):
        X = random_structure(rng, GRAPH_VOCAB, rng.randint(1, 3))
        prog = random_program(rng, GRAPH_VOCAB, max_heads=3, max_arity=2)
        a, b = lfp(prog, {}, X, naive=True), lfp(prog, {}, X)
        over += a.trace.closure_stage > stage_bound(prog, X)
        diff += a.trace.stages != b.trace.stages or a.tables != b.tables
    report(2, "closure stage within bound, naive equals semi-naive", over == 0 and diff == 0,
           f"1000 programs, {over} over bound, {diff} naive/semi-naive differences")


def test_criterion_03_prenex_equivalence(report):
    vocab = Vocabulary({"f": 1}, [("E", 2, True)])
    rng = random.Random(103)
    bad = []
    for _ in range(500):
        f = random_formula(rng, vocab, ("x", "y"), 3, lets=False)
        hit = agree_everywhere(f, to_prenex(f), vocab, max_n=3)
        if hit is not None:
            bad.append((f, hit))
    report(3, "prenex form agrees on all structures of size <= 3", not bad,
           f"500 formulas, {len(bad)} counterexamples")


def _negated_equality(f):
    return any(type(g) is NegAtom and g.rel == EQ for g in subformulas(f))


def test_criterion_04_homomorphism_preservation(report):
    vocab = Vocabulary({"f": 1, "c": 0}, [("E", 2, True), ("M", 1, False)])
    rng = random.Random(104)
    triples = held = broken = 0
    while triples < 200:
        src = random_structure(rng, vocab, rng.randint(1, 3))
        phi = random_sentence(rng, vocab, depth=3)
        # equality is negatable, so sentences using !(t = u) need injective maps
        injective = True if _negated_equality(phi) else None
        got = random_homomorphism(rng, src, rng.randint(src.size(), 4), injective)
        if got is None:
            continue
        tgt, mapping = got
        eq_neg = len(set(mapping.values())) == len(mapping)
        assert check_homomorphism(Homomorphism(src, tgt, mapping), equality_negatable=eq_neg).ok
        triples += 1
        if evaluate(phi, {}, src):
            held += 1
            broken += not evaluate(phi, {}, tgt)
    report(4, "truth is preserved along homomorphisms", broken == 0,
           f"200 triples, {held} true in source, {broken} counterexamples")


def _is_term(e, vocab, symbols):
    if e.tag == "Var":
        return True
    if e.tag == "Apply" and e.args[0].tag == "Sym" and e.args[1].tag == "List":
        name = symbols[e.args[0].args[0]]
        return (name in vocab.functions and len(e.args[1].args) == vocab.functions[name]
                and all(_is_term(x, vocab, symbols) for x in e.args[1].args))
    return False


def intended_extensions(X):
    """Brute-force extensions of the helper predicates over the elements of ``X``."""
    els = X.elements()
    inside = set(els)
    lists = [e for e in els if e.tag == "List"]
    assgts = [e for e in els if e.tag == "Assgt"]
    symbols = X.base.vocab.symbols()
    # the base clause b = Nil & l = a carries no list guard, so Cat(a, Nil, a)
    # holds for every element a; on lists Cat is concatenation
    cat = {(e, mklist(()), e) for e in els}
    for lst in lists:
        for k in range(len(lst.args) + 1):
            a, b = mklist(lst.args[:k]), mklist(lst.args[k:])
            if a in inside and b in inside:
                cat.add((a, b, lst))
    return {
        "N": {(e,) for e in els if e.tag == "Nat"},
        "List": {(e,) for e in lists},
        "HasLength": {(e, nat(len(e.args))) for e in lists if nat(len(e.args)) in inside},
        "Index": {(e, nat(i), x) for e in lists for i, x in enumerate(e.args)},
        "Cat": cat,
        "Assgt": {(s,) for s in assgts},
        "InDom": {(v, s) for s in assgts for v, _ in s.args},
        "Lookup": {(s, v, a) for s in assgts for v, a in s.args},
        "OneOneList": {(e,) for e in lists if len(set(e.args)) == len(e.args)},
        "Term": {(e,) for e in els if _is_term(e, X.base.vocab, symbols)},
    }


# (arity, key position) per helper
HELPER_MODES = {"N": (1, 0), "List": (1, 0), "HasLength": (2, 0), "Index": (3, 0),
                "Cat": (3, 2), "Assgt": (1, 0), "InDom": (2, 1), "Lookup": (3, 0),
                "OneOneList": (1, 0), "Term": (1, 0)}


def test_criterion_05_helper_extensions(report):
    X = build_meta_structure(BASE, 8)
    els = X.elements()
    want = intended_extensions(X)
    prog = sat_program(BASE.vocab)
    wrong = []
    sizes = {}
    for name, (arity, pos) in HELPER_MODES.items():
        got = native_extension(X, prog, name, arity, els, pos)
        sizes[name] = len(got)
        if got != want[name]:
            wrong.append(name)
        if name == "Cat":
            on_lists = {(a, b, c) for a, b, c in got
                        if a.tag == b.tag == c.tag == "List"}
            concat = {(a, b, c) for a, b, c in want["Cat"] if a.tag == "List"}
            if on_lists != concat or any(c.args != a.args + b.args for a, b, c in on_lists):
                wrong.append("Cat on lists")
    report(5, "helper predicates have their intended extensions over X_8", not wrong,
           f"|X_8| = {len(els)}, sizes {sizes}, wrong: {wrong or 'none'}")


def test_criterion_06_val_transport(report):
    rng = random.Random(106)
    prog = sat_program(BASE.vocab)
    bad = 0
    for _ in range(200):
        t = random_term(rng, BASE.vocab, ("x", "y"), depth=rng.randint(0, 3))
        probe = Atom(EQ, (t, t))
        fp = footprint(probe, BASE, standardize=False)
        j = fp.junk
        native = with_junk(BASE, j)
        X = build_meta_structure(BASE, fp.depth, junk=j)
        s = {v: rng.randrange(native.size()) for v in ("x", "y")}
        ctx = QuoteContext(BASE.vocab).scan(probe)
        for v in ("x", "y"):
            ctx.var(v)
        s_hat = encode_assignment({v: to_meta_value(X, e) for v, e in s.items()}, ctx)
        f = Let(prog, R("Val", "#t", "#s", "a"))
        ev = Evaluator(X, strategy="demand")
        got = run_deep(ev.answers, f, {"#t": encode(t, ctx), "#s": s_hat}, ["a"])
        value = eval_term(t, s, native)
        expect = set() if value is UNDEFINED else {(to_meta_value(X, value),)}
        bad += got != expect
    report(6, "Val agrees with term evaluation", bad == 0, f"200 pairs, {bad} disagreements")


def test_criterion_07_corpus_meta_circularity(report):
    start = time.perf_counter()
    unstable = []
    for label, phi in CORPUS:
        rep = depth_stability(phi, BASE, count=3)
        if not rep.stable:
            unstable.append(label)
    elapsed = time.perf_counter() - start
    report(7, "Sat verdict equals native verdict on the corpus at d, d+1, d+2",
           not unstable and len(CORPUS) >= 40 and elapsed <= 600,
           f"{len(CORPUS)} sentences, {len(unstable)} unstable or disagreeing, {elapsed:.1f}s")


def test_criterion_08_subformula_contract(report):
    rng = random.Random(108)
    samples = bad = true = 0
    while samples < 120:
        prog = random_program(rng, BASE.vocab, max_heads=2, max_arity=2, depth=1,
                              params=("w",) if rng.random() < 0.3 else ())
        heads = {r.head: len(r.params) for r in prog}
        psi = standardize_apart(random_formula(rng, BASE.vocab, ("w",), 2, lets=False,
                                               preds=heads, var_pool=("w", "v")))
        # bound variables of psi must not be parameters seen by the rule bodies
        if (all_variables(psi) - free_vars(psi)) & {"w"}:
            continue
        w = rng.randrange(BASE.size() + 1)
        r = sat_contract(psi, prog, {"w": w}, BASE)
        samples += 1
        true += r.native_verdict
        bad += not r.agreement
    report(8, "Sat(psi, Pi, s) matches native evaluation with lfp(Pi)", bad == 0,
           f"{samples} triples, {true} true natively, {bad} disagreements")


def test_criterion_09_convention_coherence(report):
    X = build_meta_structure(BASE, 8)
    els = X.elements()
    prog = sat_program(BASE.vocab)
    mismatched = []
    for name, arity in (("N", 1), ("List", 1), ("HasLength", 2)):
        literal = literal_expansion(prog, name)
        ev = Evaluator(X, strategy="demand")
        params = [p.name for p in literal.body.args]

        def run():
            out = set()
            for e in els:
                for t in ev.answers(literal, {params[0]: e}, params[1:]):
                    out.add((e,) + t)
            return out

        nested = run_deep(run)
        simultaneous = native_extension(X, prog, name, arity, els)
        if nested != simultaneous:
            mismatched.append(name)
    report(9, "nested Let expansion equals the simultaneous program over X_8", not mismatched,
           f"N, List, HasLength; mismatched: {mismatched or 'none'}")


def test_criterion_10_bounded_forall(report):
    X = build_meta_structure(BASE, 12)
    ev = Evaluator(X, strategy="demand")
    helpers = sat_program(BASE.vocab)
    bad = checks = 0

    # (forall i < n) i in S, for every S within {0..5} and n <= 6
    for mask in range(1 << 6):
        S = [k for k in range(6) if mask >> k & 1]
        body = disj(*(Atom(EQ, (V("i"), numeral(k))) for k in S)) if S else (
            NegAtom(EQ, (V("i"), V("i"))))
        supply = AuxSupply()
        g = expand_bounded_forall(body, "i", V("#n"), supply)
        f = Let(tuple(supply.rules), g)
        for n in range(7):
            checks += 1
            want = all(k in S for k in range(n))
            bad += run_deep(ev.evaluate, f, {"#n": nat(n)}) != want
    # with a parameter: (forall i < n) !(i = k) iff k >= n
    supply = AuxSupply()
    g = expand_bounded_forall(NegAtom(EQ, (V("i"), V("k"))), "i", V("#n"), supply)
    g = Let(tuple(supply.rules), g)
    for n, k in product(range(7), range(7)):
        checks += 1
        bad += run_deep(ev.evaluate, g, {"#n": nat(n), "k": nat(k)}) != (k >= n)

    # (forall x in l) x in T over lists of length <= 4 of three urelements
    vals = [urelement(i) for i in range(3)]
    for mask in range(1 << 3):
        T = [vals[i] for i in range(3) if mask >> i & 1]
        body = (disj(*(Atom(EQ, (V("x"), V(f"#t{i}"))) for i in range(len(T))))
                if T else Atom("Vbl", (V("x"),)))
        env0 = {f"#t{i}": v for i, v in enumerate(T)}
        supply = AuxSupply()
        h = expand_forall_in_list(body, "x", V("#l"), supply)
        h = Let(helpers + tuple(supply.rules), h)
        for n in range(5):
            for items in product(vals, repeat=n):
                checks += 1
                want = all(x in T for x in items)
                bad += run_deep(ev.evaluate, h, {**env0, "#l": mklist(items)}) != want
    # and lists of variables, where Vbl is the body
    supply = AuxSupply()
    g = expand_forall_in_list(Atom("Vbl", (V("x"),)), "x", V("#l"), supply)
    h = Let(helpers + tuple(supply.rules), g)
    for items in product([var_el(0), var_el(1), nat(0)], repeat=3):
        checks += 1
        want = all(x.tag == "Var" for x in items)
        bad += run_deep(ev.evaluate, h, {"#l": mklist(items)}) != want
    report(10, "bounded quantifier expansions agree with enumeration", bad == 0,
           f"{checks} cases, {bad} disagreements")
