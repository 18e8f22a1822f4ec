import random

import pytest

from efpl.generate import (
    GRAPH_VOCAB,
    random_homomorphism,
    random_structure,
    random_term,
)
from efpl.parser import parse_formula, parse_structure
from efpl.structure import (
    EMPTY,
    UNDEFINED,
    Assignment,
    Homomorphism,
    StructureError,
    check_homomorphism,
    eval_term,
    modify,
)

TWO_CYCLE = "universe a b\nrel E/2 positive: (a,b) (b,a)\n"
LOOP = "universe u\nrel E/2 positive: (u,u)\n"


def test_modify_examples():
    s = modify(EMPTY, "x", "a")
    assert s.lookup("x") == "a"
    assert modify(s, "x", "b").lookup("x") == "b"
    t = modify(s, "y", "b")
    assert t.lookup("x") == "a" and t.lookup("y") == "b"
    assert EMPTY.lookup("x") is UNDEFINED
    assert s == Assignment({"x": "a"}) and hash(s) == hash(Assignment({"x": "a"}))
    assert "y" not in s  # value semantics


def test_eval_term_examples(chain):
    vocab, X = chain
    a, b = X.element("a"), X.element("b")
    x = parse_formula("x = s(c())").args
    assert eval_term(x[0], {"x": a}, X) == a
    assert eval_term(x[1], {}, X) == b
    assert eval_term(x[0], {}, X) is UNDEFINED


def test_structure_rejects_partial_tables(chain):
    vocab, X = chain
    from efpl.structure import Structure
    with pytest.raises(StructureError):
        Structure(vocab, ["a", "b"], {"c": {(): 0}, "s": {(0,): 1}}, {})


def test_identity_is_a_homomorphism(chain):
    _, X = chain
    assert check_homomorphism(Homomorphism(X, X, {a: a for a in X.universe})).ok


def test_collapse_breaks_negatable_relation():
    _, X = parse_structure("universe a b\nrel E/2 negatable: (a,b)\n")
    rep = check_homomorphism(Homomorphism(X, X, {0: 0, 1: 0}))
    assert ("negatable", "E", ("a", "b")) in rep.violations


def test_two_cycle_quotient():
    _, X = parse_structure(TWO_CYCLE)
    _, Y = parse_structure(LOOP)
    h = Homomorphism(X, Y, {0: 0, 1: 0})
    # with equality negatable the quotient is not injective, hence rejected
    assert check_homomorphism(h).violations == [("negatable", "=", ("a", "b"))]
    assert check_homomorphism(h, equality_negatable=False).ok


def test_non_total_mapping_is_an_error():
    _, X = parse_structure(TWO_CYCLE)
    _, Y = parse_structure(LOOP)
    with pytest.raises(StructureError, match="not total"):
        check_homomorphism(Homomorphism(X, Y, {0: 0}))


def test_function_violation_reported(chain):
    _, X = chain
    bad = {0: 0, 1: 2, 2: 1}
    rep = check_homomorphism(Homomorphism(X, X, bad))
    assert any(kind == "function" for kind, _, _ in rep.violations)


def test_eval_term_commutes_with_homomorphisms():
    rng = random.Random(2)
    checked = 0
    for _ in range(300):
        X = random_structure(rng, GRAPH_VOCAB, rng.randint(1, 3))
        made = random_homomorphism(rng, X, rng.randint(1, 4))
        if made is None:
            continue
        Y, h = made
        assert check_homomorphism(Homomorphism(X, Y, h), equality_negatable=False).ok
        t = random_term(rng, GRAPH_VOCAB, ("x", "y"), 3)
        s = {"x": rng.randrange(X.size()), "y": rng.randrange(X.size())}
        v = eval_term(t, s, X)
        assert h[v] == eval_term(t, {k: h[a] for k, a in s.items()}, Y)
        checked += 1
    assert checked > 100
