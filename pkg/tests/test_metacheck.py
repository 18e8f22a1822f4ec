import json
import random

import pytest

from efpl.metacheck import (DepthInsufficient, MetaCheckReport, depth_stability, footprint,
                            load_corpus, meta_check, minimized_counterexample, parse_sentences,
                            sat_contract)
from efpl.parser import parse_formula, parse_program, parse_structure
from efpl.syntax import Exists, Let, standardize_apart

BASE, CORPUS = load_corpus()
VOCAB = BASE.vocab
LABELS = dict(CORPUS)

PATH3 = """
universe a b c
fun c0/0 -> a
fun s/1: a -> b, b -> c, c -> c
rel Edge/2 negatable: (a,b) (b,c)
rel Mark/1 positive: (c)
"""

CAPTURE = ("exists x. (Mark(x) & let P() <- Mark(x) then "
           "exists x. ((x = c0()) & P()))")


def check(text, base=BASE, **kw):
    return meta_check(parse_formula(text, base.vocab), base, **kw)


def test_trivial_truth_and_falsity():
    r = check("exists x. x = x")
    assert (r.native_verdict, r.sat_verdict) == (True, True)
    r = check("!(c0() = c0())")
    assert (r.native_verdict, r.sat_verdict) == (False, False)


def test_reachability_on_a_path_and_its_reverse():
    _, base = parse_structure(PATH3)
    reach = "let T(x) <- (x = c0() | exists y. (T(y) & Edge(y, x))) then T(s(s(c0())))"
    r = check(reach, base)
    assert r.native_verdict and r.sat_verdict
    back = "let T(x) <- (x = s(s(c0())) | exists y. (T(y) & Edge(x, y))) then T(c0())"
    assert check(back, base).agreement and check(back, base).sat_verdict
    wrong = "let T(x) <- (x = s(s(c0())) | exists y. (T(y) & Edge(y, x))) then T(c0())"
    r = check(wrong, base)
    assert (r.native_verdict, r.sat_verdict) == (False, False)


def test_under_depth_is_refused():
    f = parse_formula("exists x. Edge(c0(), x)", VOCAB)
    need = footprint(f, BASE).depth
    with pytest.raises(DepthInsufficient) as exc:
        meta_check(f, BASE, d=need - 1)
    assert exc.value.needed == need
    assert meta_check(f, BASE, d=need).agreement


def test_rejects_open_formulas():
    with pytest.raises(ValueError):
        check("Edge(x, c0())")


def test_capture_without_standardizing():
    f = parse_formula(CAPTURE, VOCAB)
    raw = meta_check(f, BASE, standardize=False)
    assert raw.native_verdict and not raw.sat_verdict
    assert meta_check(f, BASE).agreement


def test_minimized_counterexample_still_disagrees():
    f = parse_formula(CAPTURE, VOCAB)
    small = minimized_counterexample(f, BASE, standardize=False)
    assert not meta_check(small, BASE, standardize=False).agreement
    assert len(repr(small)) <= len(repr(f))
    assert isinstance(small, (Exists, Let))


def test_corpus_sample_agrees():
    for label in ("el-exists-eq", "el-mark"):
        assert meta_check(LABELS[label], BASE).agreement


def test_stage_count_weakly_increases_with_depth():
    f = LABELS["el-mark"]
    d0 = footprint(f, BASE).depth
    stages = [meta_check(f, BASE, d).closure_stage for d in range(d0, d0 + 3)]
    assert stages == sorted(stages)


def test_depth_stability_report():
    rep = depth_stability(LABELS["el-exists-eq"], BASE, count=3)
    assert rep.stable and len(rep.reports) == 3
    assert [r.depth for r in rep.reports] == list(range(rep.reports[0].depth,
                                                        rep.reports[0].depth + 3))


def test_report_json_keys():
    r = check("exists x. x = x")
    assert isinstance(r, MetaCheckReport)
    assert list(json.loads(json.dumps(r.as_dict()))) == [
        "sentence", "depth", "native_verdict", "sat_verdict", "agreement",
        "closure_stage", "elapsed"]


def test_parse_sentences_labels_and_comments():
    got = parse_sentences("# comment\nfoo: exists x. x = x\n\nMark(c0())  # trailing\n", VOCAB)
    assert [label for label, _ in got] == ["foo", "line4"]


def test_sat_contract_with_free_variables():
    prog = parse_program("P(x) <- (Mark(x) | exists y. (P(y) & Edge(x, y)))")
    psi = parse_formula("P(z)")
    for e in range(BASE.size()):
        r = sat_contract(psi, prog, {"z": e}, BASE)
        assert r.agreement
    assert sat_contract(psi, prog, {"z": 2}, BASE).native_verdict


def test_sat_contract_random():
    rng = random.Random(5)
    from efpl.generate import random_formula, random_program
    for _ in range(8):
        prog = random_program(rng, VOCAB, max_heads=2, max_arity=1, depth=1)
        heads = {r.head: len(r.params) for r in prog}
        psi = random_formula(rng, VOCAB, ("w",), 1, lets=False, preds=heads,
                             var_pool=("w", "v"))
        psi = standardize_apart(psi)
        r = sat_contract(psi, prog, {"w": rng.randrange(BASE.size())}, BASE)
        assert r.agreement
