import json

import pytest

from efpl.cli import main

PATH = """
universe a b c d
fun c/0 -> a
rel E/2 negatable: (a,b) (b,c) (c,d)
"""
REACH = "let T(x, y) <- (E(x, y) | exists z. (E(x, z) & T(z, y))) then T(c(), w)"
TC = "T(x, y) <- (E(x, y) | exists z. (E(x, z) & T(z, y)))"


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)

    return write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_true_with_trace(files, capsys):
    s, f = files("p.efs", PATH), files("r.efl", REACH)
    code, out, _ = run(capsys, "check", s, f, "--bind", "w=d", "--trace-stages")
    assert code == 0
    assert out.splitlines() == [
        "stage 1: T += (a,b) (b,c) (c,d)",
        "stage 2: T += (a,c) (b,d)",
        "stage 3: T += (a,d)",
        "true",
    ]


def test_check_false_and_json(files, capsys):
    s = files("p.efs", PATH)
    f = files("r.efl", "let T(x, y) <- (E(x, y) | exists z. (E(x, z) & T(z, y))) then T(w, c())")
    code, out, _ = run(capsys, "check", s, f, "--bind", "w=d", "--json", "--cross-check")
    assert code == 1
    assert json.loads(out) == {"verdict": False, "trace": []}
    code, out, _ = run(capsys, "--json", "check", s, f, "--bind", "w=d", "--strategy", "demand")
    assert code == 1 and json.loads(out)["verdict"] is False


def test_check_usage_errors(files, capsys):
    s = files("p.efs", PATH)
    code, _, err = run(capsys, "check", s, files("u.efl", "E(x, y)"))
    assert code == 2 and "unbound free variables: x, y" in err
    code, _, err = run(capsys, "check", s, files("bad.efl", "E(x,"), "--bind", "x=a")
    assert code == 2 and "bad.efl" in err
    code, _, err = run(capsys, "check", s, files("ok.efl", "E(x, x)"), "--bind", "x=zz")
    assert code == 2
    code, _, err = run(capsys, "check", files("bad.efs", "universe a\nfun c/0 -> q\n"), s)
    assert code == 2
    code, _, err = run(capsys, "check", "/nonexistent/file", s)
    assert code == 2


def test_argparse_usage_exit():
    with pytest.raises(SystemExit) as exc:
        main(["check"])
    assert exc.value.code == 2


def test_prenex(files, capsys):
    f = files("f.efl", "(exists x. E(x, x) & exists x. E(x, c()))")
    code, out, _ = run(capsys, "prenex", f)
    assert code == 0
    assert out.strip() == "exists x. exists x'. (E(x, x) & E(x', c()))"
    code, _, err = run(capsys, "prenex", files("l.efl", "let P() <- P() then P()"))
    assert code == 2


def test_stages(files, capsys):
    s, p = files("p.efs", PATH), files("t.efp", TC)
    code, out, _ = run(capsys, "stages", s, p)
    assert code == 0
    assert out.splitlines()[-1] == "closure stage 3 (bound 17)"
    code, out, _ = run(capsys, "--json", "stages", s, p, "--naive")
    data = json.loads(out)
    assert data["closure_stage"] == 3 and len(data["tables"]["T"]) == 6


HOM_SRC = """
universe a b
fun c/0 -> a
rel E/2 positive: (a,b) (b,a)
"""
HOM_TGT = """
universe u
fun c/0 -> u
rel E/2 positive: (u,u)
"""


def test_hom_check(files, capsys):
    src, tgt = files("s.efs", HOM_SRC), files("t.efs", HOM_TGT)
    corpus = files("c.efl", "one: exists x. E(c(), x)\ntwo: exists x. !(x = c())\n"
                   "reach: let T(x) <- (x = c() | exists y. (T(y) & E(y, x))) "
                   "then exists z. (T(z) & E(z, c()))\n")
    code, out, _ = run(capsys, "hom-check", src, tgt, "--map", "a=u", "b=u")
    assert code == 1 and "homomorphism: no" in out
    code, out, _ = run(capsys, "hom-check", src, tgt, "--map", "a=u", "b=u",
                       "--allow-non-injective", "--corpus", corpus, "--random", "20")
    assert code == 0
    assert "one: source=true target=true ok" in out
    assert "two: skipped (negated equality)" in out
    assert "reach: source=true target=true ok" in out
    code, _, err = run(capsys, "hom-check", src, tgt, "--map", "a=u")
    assert code == 2


def test_hom_check_identity_json(files, capsys):
    src = files("s.efs", HOM_SRC)
    code, out, _ = run(capsys, "hom-check", src, src, "--map", "a=a", "b=b", "--random", "30",
                       "--seed", "3", "--json")
    data = json.loads(out)
    assert code == 0 and data["homomorphism"] is True
    assert len(data["transport"]) == 30
    assert all(t["status"] == "ok" for t in data["transport"])


def test_gen_sat_and_vocab(files, capsys, tmp_path):
    code, out, _ = run(capsys, "gen-sat")
    assert code == 0 and len(out.strip().splitlines()) == 21
    out_file = tmp_path / "sat.efp"
    code, out, _ = run(capsys, "gen-sat", "--out", str(out_file))
    assert code == 0 and out_file.read_text().count("<-") >= 21
    code, out, _ = run(capsys, "gen-sat", "--structure", files("p.efs", PATH), "--json")
    assert json.loads(out)["rules"] == 21
    code, out, _ = run(capsys, "gen-vocab")
    assert code == 0 and "Modify/3" in out


def test_meta_check(files, capsys):
    f = files("m.efl", "one: exists x. Edge(c0(), x)\ntwo: Mark(c0())\n")
    code, out, _ = run(capsys, "meta-check", "--formula", f)
    lines = out.splitlines()
    assert code == 0
    assert lines[0].startswith("one: d=") and lines[0].endswith("agree")
    assert "native=false sat=false" in lines[1]
    assert lines[-1] == "2 sentences, all agree"


def test_meta_check_json_and_depth(files, capsys):
    f = files("m.efl", "exists x. x = x\n")
    code, out, _ = run(capsys, "meta-check", "--formula", f, "--json")
    data = json.loads(out)
    assert code == 0 and data["agreement"] is True and data["native_verdict"] is True
    code, _, err = run(capsys, "meta-check", "--formula", f, "--depth", "3")
    assert code == 2 and "depth insufficient" in err
    code, out, _ = run(capsys, "meta-check", "--formula", f, "--stability", "3", "--json")
    assert json.loads(out)["stable"] is True


def test_meta_check_disagreement_is_a_breach(files, capsys):
    f = files("m.efl", "exists x. (Mark(x) & let P() <- Mark(x) then "
                       "exists x. ((x = c0()) & P()))\n")
    code, out, _ = run(capsys, "meta-check", "--formula", f, "--no-standardize")
    assert code == 3 and "DISAGREE" in out
    code, out, _ = run(capsys, "meta-check", "--formula", f)
    assert code == 0


def test_meta_check_open_formula(files, capsys):
    code, _, err = run(capsys, "meta-check", "--formula", files("o.efl", "Mark(x)\n"))
    assert code == 2 and "not a sentence" in err
