"""Seeded random vocabularies, structures, terms, formulas and programs."""

from __future__ import annotations

import random
from itertools import product

from .structure import Structure
from .syntax import (
    EQ,
    App,
    Atom,
    Conj,
    Disj,
    Exists,
    Let,
    NegAtom,
    Rule,
    Var,
    Vocabulary,
    free_vars,
)

GRAPH_VOCAB = Vocabulary({"f": 1, "c": 0}, [("E", 2, True)])


def random_structure(rng: random.Random, vocab: Vocabulary, n, density=0.4):
    names = [chr(ord("a") + i) for i in range(n)]
    funcs = {f: {args: rng.randrange(n) for args in product(range(n), repeat=k)}
             for f, k in vocab.functions.items()}
    rels = {r: {t for t in product(range(n), repeat=k) if rng.random() < density}
            for r, (k, _) in vocab.relations.items() if r != EQ}
    return Structure(vocab, names, funcs, rels)


def all_structures(vocab: Vocabulary, n):
    """Every structure over ``vocab`` with universe ``{0..n-1}`` (tiny cases only)."""
    names = [chr(ord("a") + i) for i in range(n)]
    fkeys = [(f, args) for f, k in sorted(vocab.functions.items())
             for args in product(range(n), repeat=k)]
    rkeys = [(r, t) for r, (k, _) in sorted(vocab.relations.items()) if r != EQ
             for t in product(range(n), repeat=k)]
    for fvals in product(range(n), repeat=len(fkeys)):
        funcs = {f: {} for f in vocab.functions}
        for (f, args), v in zip(fkeys, fvals):
            funcs[f][args] = v
        for bits in product((False, True), repeat=len(rkeys)):
            rels = {r: set() for r in vocab.relations if r != EQ}
            for (r, t), b in zip(rkeys, bits):
                if b:
                    rels[r].add(t)
            yield Structure(vocab, names, funcs, rels)


def random_term(rng, vocab, variables, depth=2):
    consts = [f for f, k in vocab.functions.items() if k == 0]
    if depth <= 0 or rng.random() < 0.5:
        if variables and (not consts or rng.random() < 0.75):
            return Var(rng.choice(sorted(variables)))
        if consts:
            return App(rng.choice(sorted(consts)), ())
    fs = sorted(f for f, k in vocab.functions.items() if k > 0)
    if not fs:
        return Var(rng.choice(sorted(variables))) if variables else App(consts[0], ())
    f = rng.choice(fs)
    return App(f, tuple(random_term(rng, vocab, variables, depth - 1)
                        for _ in range(vocab.functions[f])))


def random_formula(rng, vocab, variables=("x", "y"), depth=3, lets=True, preds=None,
                   var_pool=("x", "y", "z", "u")):
    """A random formula; ``preds`` maps usable extra predicates to arities.

    Only variables in ``variables`` occur free, so the result can be made a
    sentence by passing ``()``.
    """
    preds = dict(preds or {})
    variables = tuple(variables)
    rels = sorted((r, k, neg) for r, (k, neg) in vocab.relations.items())
    if not variables and not any(a == 0 for a in vocab.functions.values()):
        # no closed terms: bind something first
        v = rng.choice(var_pool)
        return Exists(v, random_formula(rng, vocab, (v,), max(depth - 1, 0), lets, preds,
                                        var_pool))

    def atom():
        choices = [(r, k, neg) for r, k, neg in rels] + [(p, k, False) for p, k in preds.items()]
        r, k, neg = rng.choice(choices)
        args = tuple(random_term(rng, vocab, variables, 1) for _ in range(k))
        if neg and rng.random() < 0.35:
            return NegAtom(r, args)
        return Atom(r, args)

    if depth <= 0:
        return atom()
    roll = rng.random()
    if roll < 0.25:
        return atom()
    if roll < 0.45:
        return Conj(random_formula(rng, vocab, variables, depth - 1, lets, preds, var_pool),
                    random_formula(rng, vocab, variables, depth - 1, lets, preds, var_pool))
    if roll < 0.62:
        return Disj(random_formula(rng, vocab, variables, depth - 1, lets, preds, var_pool),
                    random_formula(rng, vocab, variables, depth - 1, lets, preds, var_pool))
    if roll < 0.85 or not lets:
        v = rng.choice(var_pool)
        inner = tuple(sorted(set(variables) | {v}))
        return Exists(v, random_formula(rng, vocab, inner, depth - 1, lets, preds, var_pool))
    # an induction assertion with one or two rules
    nrules = rng.choice((1, 1, 2))
    names = [n for n in ("P", "Q", "R") if n not in preds] or ["P"]
    heads = {}
    for i in range(nrules):
        name = names[i % len(names)] if i < len(names) else f"P{i}"
        heads[name] = rng.choice((0, 1, 1, 2))
    inner_preds = {**preds, **heads}
    rules = []
    for h, k in heads.items():
        params = tuple(var_pool[:k])
        pool_vars = tuple(sorted(set(params) | set(variables)))
        body = random_formula(rng, vocab, pool_vars, depth - 1, lets, inner_preds, var_pool)
        rules.append(Rule(h, params, body))
    body = random_formula(rng, vocab, variables, depth - 1, lets, inner_preds, var_pool)
    return Let(tuple(rules), body)


def random_sentence(rng, vocab, depth=3, lets=True):
    f = random_formula(rng, vocab, (), depth, lets)
    assert not free_vars(f)
    return f


def random_program(rng, vocab, max_heads=2, max_arity=2, depth=2, params=()):
    """Random positive program; rule bodies are Let-free."""
    nheads = rng.randint(1, max_heads)
    heads = {("P", "Q", "R")[i]: rng.randint(0, max_arity) for i in range(nheads)}
    rules = []
    for h, k in heads.items():
        ps = ("x", "y", "z")[:k]
        body = random_formula(rng, vocab, tuple(ps) + tuple(params), depth, lets=False,
                              preds=heads, var_pool=("x", "y", "z"))
        rules.append(Rule(h, ps, body))
    return tuple(rules)


def random_homomorphism(rng, source: Structure, target_size, injective=None):
    """A random map plus the target structure it makes a homomorphism.

    Functions are pushed forward (conflicts resolved by keeping the first
    image), positive relations are the image plus random extra tuples, and
    negatable relations are exactly the image.  Returns ``(target, mapping)``,
    or ``None`` when function tables cannot be made consistent.
    """
    n = source.size()
    if injective is None:
        injective = rng.random() < 0.5
    if injective:
        if target_size < n:
            return None
        mapping = dict(enumerate(rng.sample(range(target_size), n)))
    else:
        mapping = {a: rng.randrange(target_size) for a in range(n)}
    vocab = source.vocab
    funcs = {}
    for f, k in vocab.functions.items():
        table = {}
        for args in product(range(n), repeat=k):
            img = tuple(mapping[a] for a in args)
            v = mapping[source.apply(f, args)]
            if table.setdefault(img, v) != v:
                return None
        for args in product(range(target_size), repeat=k):
            table.setdefault(args, rng.randrange(target_size))
        funcs[f] = table
    rels = {}
    for r, (k, neg) in vocab.relations.items():
        if r == EQ:
            continue
        image = {tuple(mapping[a] for a in t) for t in source.relations[r]}
        if neg:
            # a tuple in the image of a non-tuple would break the "iff"
            for args in product(range(n), repeat=k):
                if args not in source.relations[r] and tuple(mapping[a] for a in args) in image:
                    return None
        else:
            image |= {t for t in product(range(target_size), repeat=k) if rng.random() < 0.2}
        rels[r] = image
    names = [f"t{i}" for i in range(target_size)]
    return Structure(vocab, names, funcs, rels), mapping
