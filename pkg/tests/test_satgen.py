from itertools import product
from pathlib import Path

import pytest

from efpl.evaluator import Evaluator, evaluate, run_deep
from efpl.meta import build_meta_structure, mklist, nat, urelement, var_el
from efpl.metacheck import load_corpus, sat_program
from efpl.parser import parse_program, print_program
from efpl.satgen import (
    AuxSupply,
    R,
    SatLimits,
    V,
    expand_bounded_forall,
    expand_forall_in_list,
    generate_sat_program,
    lift_plus,
    numeral,
    plus_displayed,
)
from efpl.structure import Structure
from efpl.syntax import (
    Atom,
    Conj,
    Disj,
    Exists,
    Let,
    NegAtom,
    Var,
    Vocabulary,
    VocabularyError,
    free_predicates,
    validate,
)

BASE, _ = load_corpus()
GOLDEN = Path(__file__).parent / "data" / "sat_corpus.efp"
TOY = Vocabulary({}, [("Edge", 2, True)])


def _atoms(f, out):
    t = type(f)
    if t in (Atom, NegAtom):
        out.append(f)
    elif t in (Conj, Disj):
        _atoms(f.left, out)
        _atoms(f.right, out)
    elif t is Exists:
        _atoms(f.body, out)
    return out


def _sat_literals(vocab):
    """(negated, relation) pairs of the object literals the Sat rule checks:
    those applied to the evaluated arguments ``b0, b1, ...``."""
    rule = next(r for r in generate_sat_program(vocab) if r.head == "Sat")
    return {(type(a) is NegAtom, a.rel) for a in _atoms(rule.body, [])
            if a.args and all(type(t) is Var and t.name[0] == "b" for t in a.args)}


def test_program_validates_over_meta_vocabulary():
    from efpl.meta import meta_vocabulary
    prog = sat_program(BASE.vocab)
    f = Let(prog, R("Sat", "phi", "Pi", "s"))
    assert validate(f, meta_vocabulary(BASE.vocab)).ok


def test_heads_are_distinct_and_simultaneous():
    prog = generate_sat_program(BASE.vocab)
    heads = [r.head for r in prog]
    assert len(heads) == len(set(heads)) == 21
    assert {"Sat", "Val", "HSPlus", "ValPlus", "OneOneList", "Change"} <= set(heads)


def test_deterministic():
    assert generate_sat_program(BASE.vocab) == generate_sat_program(BASE.vocab)


def test_atom_clauses_cover_each_relation():
    lits = _sat_literals(TOY)
    assert (False, "Edge") in lits and (False, "=") in lits
    assert (True, "Edge") in lits and (True, "=") in lits
    # positive relations get no negated clause
    lits = _sat_literals(Vocabulary({}, [("Mark", 1, False)]))
    assert (False, "Mark") in lits and (True, "Mark") not in lits


def test_atom_clause_variables():
    rule = next(r for r in generate_sat_program(TOY) if r.head == "Sat")
    first = rule.body
    while type(first) is Disj:
        first = first.left
    names = []
    while type(first) is Exists:
        names.append(first.var)
        first = first.body
    assert names == ["l", "u0", "u1", "b0", "b1"]


def test_clash_with_helpers_rejected():
    with pytest.raises(VocabularyError):
        generate_sat_program(Vocabulary({}, [("Sat", 3, False)]))
    with pytest.raises(VocabularyError):
        generate_sat_program(Vocabulary({"Append": 2}, []))


def _bounded(body, var):
    supply = AuxSupply()
    f = expand_bounded_forall(body, var, V("#n"), supply)
    return Let(tuple(supply.rules), f)


NAT_WORLD = build_meta_structure(BASE, 6)


def _eval(f, env, M=NAT_WORLD):
    return run_deep(evaluate, f, env, M, strategy="demand")


def test_bounded_forall_vacuous_at_zero():
    body = Atom("Vbl", (V("i"),))  # false of every natural
    assert _eval(_bounded(body, "i"), {"#n": nat(0)})
    assert not _eval(_bounded(body, "i"), {"#n": nat(1)})


def test_bounded_forall_counts_below_bound():
    # a body true of 0 and 1 only
    body = Disj(Atom("=", (V("i"), numeral(0))), Atom("=", (V("i"), numeral(1))))
    assert _eval(_bounded(body, "i"), {"#n": nat(2)})
    assert not _eval(_bounded(body, "i"), {"#n": nat(3)})


def test_bounded_forall_carries_parameters():
    supply = AuxSupply()
    body = NegAtom("=", (V("i"), V("k")))
    f = expand_bounded_forall(body, "i", V("#n"), supply)
    assert f.args[1:] == (V("k"),)
    prog = tuple(supply.rules)
    for n, k in product(range(4), range(4)):
        got = _eval(Let(prog, f), {"#n": nat(n), "k": nat(k)})
        assert got == (k >= n)


def test_one_one_list_brute_force():
    prog = sat_program(BASE.vocab)
    f = Let(prog, R("OneOneList", "#l"))
    M = build_meta_structure(BASE, 12)
    vals = [urelement(0), urelement(1), urelement(2)]
    for n in range(4):
        for items in product(vals, repeat=n):
            want = len(set(items)) == len(items)
            assert _eval(f, {"#l": mklist(items)}, M) == want


def test_forall_in_list():
    supply = AuxSupply()
    f = expand_forall_in_list(Atom("Vbl", (V("x"),)), "x", V("#l"), supply)
    f = Let(tuple(sat_program(BASE.vocab)) + tuple(supply.rules), f)
    M = build_meta_structure(BASE, 12)
    assert _eval(f, {"#l": mklist([])}, M)
    assert _eval(f, {"#l": mklist([var_el(0), var_el(1)])}, M)
    assert not _eval(f, {"#l": mklist([var_el(0), nat(1)])}, M)


def _plus_world():
    vocab = Vocabulary({}, [("Rel", 2, False)])
    base = Structure(vocab, ["a", "b", "c"], {}, {"Rel": {(0, 1), (1, 2), (2, 2)}})
    return base, build_meta_structure(base, 14)


def test_lifted_relation_examples():
    base, M = _plus_world()
    u = [urelement(i) for i in range(3)]
    prog = (lift_plus("Rel", name="RelPlus"),) + sat_program(base.vocab)
    f = Let(prog, R("RelPlus", "#l", "#m"))
    assert _eval(f, {"#l": mklist([]), "#m": mklist([])}, M)
    assert _eval(f, {"#l": mklist([u[0], u[1]]), "#m": mklist([u[1], u[2]])}, M)
    assert not _eval(f, {"#l": mklist([u[0], u[1]]), "#m": mklist([u[1], u[1]])}, M)
    assert not _eval(f, {"#l": mklist([u[0]]), "#m": mklist([u[1], u[2]])}, M)


def test_lifting_agrees_with_displayed_form():
    base, M = _plus_world()
    u = [urelement(i) for i in range(3)]
    helpers = sat_program(base.vocab)
    rec = Let((lift_plus("Rel", name="RelPlus"),) + helpers, R("RelPlus", "#l", "#m"))
    shown, supply = plus_displayed("Rel", V("#l"), V("#m"))
    disp = Let(helpers + tuple(supply.rules), shown)
    for n in range(3):
        for k in (n, n + 1):
            for xs in product(u, repeat=n):
                for ys in product(u, repeat=k):
                    env = {"#l": mklist(xs), "#m": mklist(ys)}
                    assert _eval(rec, env, M) == _eval(disp, env, M)


def test_golden_program_text():
    text = print_program(generate_sat_program(BASE.vocab, SatLimits()))
    assert GOLDEN.read_text() == text + "\n"


def test_program_predicates_are_defined_or_primitive():
    from efpl.meta import META_RELATIONS
    prog = generate_sat_program(BASE.vocab)
    heads = {r.head for r in prog}
    prims = {r for r, _, _ in META_RELATIONS} | set(BASE.vocab.relations)
    for r in prog:
        assert free_predicates(r.body) <= heads | prims


def test_bounded_forall_over_a_defined_order():
    less = parse_program("Less(i, j) <- (j = S(i) | exists k. (j = S(k) & Less(i, k)))")
    for n, want in ((3, True), (5, True), (6, False)):
        supply = AuxSupply()
        g = expand_bounded_forall(Atom("Less", (V("i"), numeral(5))), "i", numeral(n), supply)
        assert _eval(Let(less + tuple(supply.rules), g), {}, build_meta_structure(BASE, 8)) == want


def test_forall_in_list_matches_iteration():
    import random
    rng = random.Random(21)
    M = build_meta_structure(BASE, 14)
    pool = [var_el(0), var_el(1), nat(0), nat(1), urelement(0)]
    supply = AuxSupply()
    g = expand_forall_in_list(Atom("Vbl", (V("x"),)), "x", V("#l"), supply)
    f = Let(sat_program(BASE.vocab) + tuple(supply.rules), g)
    for _ in range(200):
        items = [rng.choice(pool) for _ in range(rng.randint(0, 4))]
        assert _eval(f, {"#l": mklist(items)}, M) == all(x.tag == "Var" for x in items)


def test_head_symbols_of_a_quoted_program():
    from efpl.meta import QuoteContext, encode, xpred
    ctx = QuoteContext(BASE.vocab)
    prog = parse_program("P(x) <- Mark(x); Q() <- exists y. P(y)")
    M = build_meta_structure(BASE, 40)
    f = Let(sat_program(BASE.vocab), R("HSPlus", "#pi", "m"))
    got = run_deep(lambda: Evaluator(M, "demand").answers(f, {"#pi": encode(prog, ctx)}, ["m"]))
    assert got == {(mklist([xpred(1, 0), xpred(0, 0)]),)}
