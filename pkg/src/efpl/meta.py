"""Encoding EFPL syntax as elements, and the truncated meta structure ``X_d``.

Elements are hash-consed :class:`MetaElement` nodes, so equal elements are the
same object and hashing is by identity.  The size of an element is the node
count of the canonical closed term that denotes it:

* ``Nat n`` is ``S^n(Zero())``, size ``n + 1``;
* ``VarName n`` and ``SymName n`` apply a name function to a numeral;
* ``XPred(k, i)`` names extra predicate number ``i`` of arity ``k``;
* a list is an ``Append`` chain over ``Nil()``;
* an assignment is the ``Modify`` chain over ``Empty()`` with variables in
  increasing order, so extensionally equal assignments are one element.

``X_d`` keeps only elements of size at most ``d``.  Applications whose result
would be larger, or that are ill-typed (``S`` of a list, ``Modify`` of a
non-variable, a base function on a non-urelement), have no value; the
evaluator treats them like undefined terms.  The universe is never
materialized: the evaluator reaches elements through function inversion,
relation queries in computed modes, and candidate hints for ``Modify``.
"""

from __future__ import annotations

from .structure import UNDEFINED, Structure
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
    VocabularyError,
)

# ---------------------------------------------------------------------------
# elements


class MetaElement:
    __slots__ = ("__weakref__", "args", "size", "tag")

    def __init__(self, tag, args, size):
        self.tag = tag
        self.args = args
        self.size = size

    def __repr__(self):
        return show(self)

    def __reduce__(self):
        return (_mk, (self.tag, self.args))


_INTERN = {}

ATOMIC_TAGS = ("Nat", "Var", "Sym", "XP", "U")
FORMULA_TAGS = frozenset(("Apply", "Neg", "Conj", "Disj", "Quant", "IndAsrt"))


def _mk(tag, args):
    key = (tag, args)
    e = _INTERN.get(key)
    if e is None:
        e = MetaElement(tag, args, _size(tag, args))
        _INTERN[key] = e
    return e


def _size(tag, args):
    if tag == "Nat":
        return args[0] + 1
    if tag in ("Var", "Sym"):
        return args[0] + 2
    if tag == "XP":
        return args[0] + args[1] + 3
    if tag == "U":
        return 1
    if tag == "List":
        return 1 + sum(1 + a.size for a in args)
    if tag == "Assgt":
        return 1 + sum(1 + v.size + a.size for v, a in args)
    return 1 + sum(a.size for a in args)


def nat(n):
    return _mk("Nat", (n,))


def var_el(n):
    return _mk("Var", (n,))


def sym_el(n):
    return _mk("Sym", (n,))


def xpred(k, i):
    return _mk("XP", (k, i))


def urelement(e):
    return _mk("U", (e,))


def mklist(items):
    return _mk("List", tuple(items))


NIL = mklist(())


def mkassgt(pairs):
    """Canonical assignment element from ``(Var element, value)`` pairs."""
    d = dict(pairs)
    return _mk("Assgt", tuple(sorted(d.items(), key=lambda p: p[0].args[0])))


EMPTY_ASSGT = mkassgt(())


def node(tag, *args):
    return _mk(tag, args)


def assgt_dict(s):
    return dict(s.args)


def show(e):
    t, a = e.tag, e.args
    if t == "Nat":
        return str(a[0])
    if t == "Var":
        return f"v{a[0]}"
    if t == "Sym":
        return f"sym{a[0]}"
    if t == "XP":
        return f"XP{a[0]}_{a[1]}"
    if t == "U":
        return f"u{a[0]}"
    if t == "List":
        return "<" + ", ".join(show(x) for x in a) + ">"
    if t == "Assgt":
        return "{" + ", ".join(f"{show(v)}:{show(x)}" for v, x in a) + "}"
    return f"{t}(" + ", ".join(show(x) for x in a) + ")"


def is_list(e):
    return e.tag == "List"


def is_formula(e):
    return e.tag in FORMULA_TAGS


def is_program(e):
    return e.tag == "List" and all(r.tag == "Rule" for r in e.args)


# ---------------------------------------------------------------------------
# the meta vocabulary

META_FUNCTIONS = {
    "Zero": 0, "S": 1, "Nil": 0, "Append": 2, "Empty": 0, "Modify": 3,
    "Apply": 2, "Neg": 1, "Conj": 2, "Disj": 2, "Quant": 2, "IndAsrt": 2, "Rule": 2,
    "SymName": 1, "VarName": 1, "XPred": 2,
}
META_RELATIONS = [("Vbl", 1, False), ("Arity", 2, False), ("RenameAway", 3, False)]


def meta_vocabulary(base: Vocabulary) -> Vocabulary:
    """The meta vocabulary extended by the base symbols."""
    clash = (set(META_FUNCTIONS) | {r for r, _, _ in META_RELATIONS}) & (
        set(base.functions) | set(base.relations))
    if clash:
        raise VocabularyError(f"base symbols clash with the meta vocabulary: {sorted(clash)}")
    rels = [(r, a, p) for r, (a, p) in base.relations.items() if r != EQ] + META_RELATIONS
    return Vocabulary({**base.functions, **META_FUNCTIONS}, rels)


# ---------------------------------------------------------------------------
# quotation


class QuoteError(ValueError):
    pass


class QuoteContext:
    """Names for variables and extra predicates, by order of first occurrence.

    Base symbols are numbered by ``vocab.symbols()``.  Extra predicate ``P`` of
    arity ``k`` becomes ``XPred(k, i)`` with ``i`` counting per arity; a name
    bound by several Lets keeps one code, which is what makes shadowing visible
    to RenameAway.
    """

    def __init__(self, vocab: Vocabulary):
        self.vocab = vocab
        self.symbols = vocab.symbols()
        self.sym_index = {s: i for i, s in enumerate(self.symbols)}
        self.vars = {}
        self.preds = {}
        self._next = {}

    def var(self, name):
        if name not in self.vars:
            self.vars[name] = len(self.vars)
        return self.vars[name]

    def pred(self, name, arity):
        if name in self.sym_index:
            if name not in self.vocab.relations:
                raise QuoteError(f"{name} is a function symbol")
            return ("Sym", self.sym_index[name])
        key = (name, arity)
        if key not in self.preds:
            i = self._next.get(arity, 0)
            self._next[arity] = i + 1
            self.preds[key] = (arity, i)
        return ("XP",) + self.preds[key]

    def fn(self, name):
        if name not in self.vocab.functions:
            raise QuoteError(f"unknown function symbol {name}")
        return self.sym_index[name]

    def var_name(self, n):
        for k, v in self.vars.items():
            if v == n:
                return k
        return f"v{n}"

    def pred_name(self, k, i):
        for (name, _), code in self.preds.items():
            if code == (k, i):
                return name
        return f"XP{k}_{i}"

    def scan(self, f):
        """Register names of ``f`` in traversal order."""
        encode(f, self)
        return self


def numeral(n):
    t = App("Zero", ())
    for _ in range(n):
        t = App("S", (t,))
    return t


def list_term(items):
    t = App("Nil", ())
    for x in items:
        t = App("Append", (t, x))
    return t


def _pred_term(code):
    if code[0] == "Sym":
        return App("SymName", (numeral(code[1]),))
    return App("XPred", (numeral(code[1]), numeral(code[2])))


def _pred_el(code):
    return sym_el(code[1]) if code[0] == "Sym" else xpred(code[1], code[2])


def _walk(obj, ctx, leaf_var, leaf_pred, leaf_sym, lst, cons):
    """Shared traversal for ``quote`` (terms) and ``encode`` (elements)."""

    def term(t):
        if isinstance(t, Var):
            return leaf_var(ctx.var(t.name))
        return cons("Apply", leaf_sym(ctx.fn(t.fn)), lst([term(a) for a in t.args]))

    def atom(rel, args):
        return cons("Apply", leaf_pred(ctx.pred(rel, len(args))), lst([term(a) for a in args]))

    def rule(r):
        head = cons("Apply", leaf_pred(ctx.pred(r.head, len(r.params))),
                    lst([leaf_var(ctx.var(p)) for p in r.params]))
        return cons("Rule", head, formula(r.body))

    def formula(f):
        if isinstance(f, Atom):
            return atom(f.rel, f.args)
        if isinstance(f, NegAtom):
            return cons("Neg", atom(f.rel, f.args))
        if isinstance(f, Conj):
            return cons("Conj", formula(f.left), formula(f.right))
        if isinstance(f, Disj):
            return cons("Disj", formula(f.left), formula(f.right))
        if isinstance(f, Exists):
            return cons("Quant", leaf_var(ctx.var(f.var)), formula(f.body))
        if isinstance(f, Let):
            prog = lst([rule(r) for r in f.program])
            return cons("IndAsrt", prog, formula(f.body))
        raise TypeError(f)

    if isinstance(obj, (Var, App)):
        return term(obj)
    if isinstance(obj, Rule):
        return rule(obj)
    if isinstance(obj, (tuple, list)):
        return lst([rule(r) for r in obj])
    return formula(obj)


def quote(obj, ctx: QuoteContext):
    """Closed meta-vocabulary term denoting the encoding of a term, formula,
    rule or program (a tuple of rules)."""
    return _walk(obj, ctx,
                 lambda n: App("VarName", (numeral(n),)),
                 _pred_term,
                 lambda n: App("SymName", (numeral(n),)),
                 list_term,
                 lambda tag, *args: App(tag, tuple(args)))


def encode(obj, ctx: QuoteContext):
    """The element denoted by ``quote(obj, ctx)``, built directly."""
    return _walk(obj, ctx, var_el, _pred_el, sym_el, mklist, node)


def encode_assignment(s, ctx: QuoteContext):
    """Encode ``{variable name: value}``; int values are base urelements."""
    pairs = []
    for name, v in s.items():
        if not isinstance(v, MetaElement):
            v = urelement(v)
        pairs.append((var_el(ctx.var(name)), v))
    return mkassgt(pairs)


class UnquoteError(ValueError):
    pass


def unquote(e, ctx: QuoteContext, kind="formula"):
    """Inverse of :func:`encode` for ``kind`` in formula, term, rule, program."""

    def var(x):
        if x.tag != "Var":
            raise UnquoteError(f"not a variable: {show(x)}")
        return ctx.var_name(x.args[0])

    def term(x):
        if x.tag == "Var":
            return Var(var(x))
        if x.tag == "Apply" and x.args[0].tag == "Sym":
            name = ctx.symbols[x.args[0].args[0]]
            if name in ctx.vocab.functions and is_list(x.args[1]):
                return App(name, tuple(term(a) for a in x.args[1].args))
        raise UnquoteError(f"not a term: {show(x)}")

    def pred(p):
        if p.tag == "Sym":
            name = ctx.symbols[p.args[0]]
            if name in ctx.vocab.relations:
                return name
        if p.tag == "XP":
            return ctx.pred_name(*p.args)
        raise UnquoteError(f"not a predicate: {show(p)}")

    def atom(x):
        if x.tag != "Apply" or not is_list(x.args[1]):
            raise UnquoteError(f"not an atom: {show(x)}")
        return pred(x.args[0]), tuple(term(a) for a in x.args[1].args)

    def rule(x):
        if x.tag != "Rule":
            raise UnquoteError(f"not a rule: {show(x)}")
        head, params = atom(x.args[0])
        return Rule(head, tuple(p.name for p in params), formula(x.args[1]))

    def formula(x):
        t = x.tag
        if t == "Apply":
            return Atom(*atom(x))
        if t == "Neg":
            return NegAtom(*atom(x.args[0]))
        if t == "Conj":
            return Conj(formula(x.args[0]), formula(x.args[1]))
        if t == "Disj":
            return Disj(formula(x.args[0]), formula(x.args[1]))
        if t == "Quant":
            return Exists(var(x.args[0]), formula(x.args[1]))
        if t == "IndAsrt":
            return Let(program(x.args[0]), formula(x.args[1]))
        raise UnquoteError(f"not a formula: {show(x)}")

    def program(x):
        if not is_list(x):
            raise UnquoteError(f"not a program: {show(x)}")
        return tuple(rule(r) for r in x.args)

    return {"formula": formula, "term": term, "rule": rule, "program": program}[kind](e)


# ---------------------------------------------------------------------------
# renaming bound predicates away from a program


def _program_heads(prog):
    return [r.args[0].args[0] for r in prog.args]


def _xps(e, out):
    if e.tag == "XP":
        out.add(e)
    elif e.tag not in ATOMIC_TAGS:
        for a in (e.args if e.tag != "Assgt" else ()):
            _xps(a, out)
    return out


def _subst_pred(e, mapping):
    """Replace free occurrences of extra predicates per ``mapping``."""
    if not mapping:
        return e
    t = e.tag
    if t == "Apply":
        p = mapping.get(e.args[0])
        return node("Apply", p, e.args[1]) if p is not None else e
    if t == "Neg":
        return node("Neg", _subst_pred(e.args[0], mapping))
    if t in ("Conj", "Disj"):
        return node(t, _subst_pred(e.args[0], mapping), _subst_pred(e.args[1], mapping))
    if t == "Quant":
        return node("Quant", e.args[0], _subst_pred(e.args[1], mapping))
    if t == "IndAsrt":
        prog, body = e.args
        inner = {k: v for k, v in mapping.items() if k not in set(_program_heads(prog))}
        rules = [node("Rule", r.args[0], _subst_pred(r.args[1], inner)) for r in prog.args]
        return node("IndAsrt", mklist(rules), _subst_pred(body, inner))
    return e


def rename_away_element(phi, prog, max_index):
    """Rename the bound predicates of ``phi`` that are heads of ``prog``.

    Each such binding gets the smallest ``XPred(k, i)`` of the same arity that
    occurs nowhere in ``phi`` or ``prog`` and was not chosen before.  Returns
    ``None`` when the supply ``i < max_index`` is exhausted.
    """
    avoid = set(_program_heads(prog))
    used = _xps(phi, set()) | _xps(prog, set())

    def fresh(p):
        k = p.args[0]
        for i in range(max_index):
            q = xpred(k, i)
            if q not in used:
                used.add(q)
                return q
        return None

    def go(e):
        t = e.tag
        if t in ("Apply", "Neg"):
            return e
        if t in ("Conj", "Disj"):
            a, b = go(e.args[0]), go(e.args[1])
            return None if a is None or b is None else node(t, a, b)
        if t == "Quant":
            b = go(e.args[1])
            return None if b is None else node("Quant", e.args[0], b)
        prog_e, body = e.args
        mapping = {}
        for h in _program_heads(prog_e):
            if h in avoid and h.tag == "XP":
                q = fresh(h)
                if q is None:
                    return None
                mapping[h] = q
        rules = []
        for r in prog_e.args:
            head, rbody = r.args
            h = head.args[0]
            if h in mapping:
                head = node("Apply", mapping[h], head.args[1])
            rb = go(_subst_pred(rbody, mapping))
            if rb is None:
                return None
            rules.append(node("Rule", head, rb))
        b = go(_subst_pred(body, mapping))
        return None if b is None else node("IndAsrt", mklist(rules), b)

    return go(phi)


# ---------------------------------------------------------------------------
# the structure


class MetaStructure:
    """The truncated structure ``X_d`` over the meta vocabulary plus the base.

    ``bound=None`` gives the untruncated structure (used for footprints).
    Assignment values are drawn from ``W`` = urelements plus the first
    ``junk`` naturals; ``K`` and ``I`` bound the extra predicate supply.
    """

    lazy = True

    def __init__(self, base: Structure, bound, junk=1, K=4, I=8):
        self.base = base
        self.bound = bound
        self.K, self.I = K, I
        self.vocab = meta_vocabulary(base.vocab)
        self.symbols = base.vocab.symbols()
        self.values = [urelement(e) for e in base.universe] + [nat(i) for i in range(junk)]
        self.value_set = frozenset(self.values)
        self._max_value = max(v.size for v in self.values)
        self._rename = {}
        self._by_size = {}
        if bound is not None and bound < 1:
            raise ValueError("bound must be at least 1")

    # -- membership ------------------------------------------------------------

    def _fits(self, e):
        return self.bound is None or e.size <= self.bound

    def contains(self, e):
        return isinstance(e, MetaElement) and self._fits(e) and self._well_typed(e)

    def _well_typed(self, e):
        t, a = e.tag, e.args
        if t == "Nat":
            return a[0] >= 0
        if t == "Var":
            return True
        if t == "Sym":
            return a[0] < len(self.symbols)
        if t == "XP":
            return a[0] <= self.K and a[1] < self.I
        if t == "U":
            return a[0] in self.base.universe
        if t == "List":
            return all(self._well_typed(x) for x in a)
        if t == "Assgt":
            return all(v.tag == "Var" and x in self.value_set for v, x in a)
        if t == "Apply":
            return a[0].tag in ("Sym", "XP") and is_list(a[1]) and self._well_typed(a[1])
        if t == "Neg":
            return a[0].tag == "Apply" and self._well_typed(a[0])
        if t in ("Conj", "Disj"):
            return is_formula(a[0]) and is_formula(a[1]) and all(map(self._well_typed, a))
        if t == "Quant":
            return a[0].tag == "Var" and is_formula(a[1]) and self._well_typed(a[1])
        if t == "IndAsrt":
            return is_program(a[0]) and is_formula(a[1]) and all(map(self._well_typed, a))
        if t == "Rule":
            return a[0].tag == "Apply" and is_formula(a[1]) and all(map(self._well_typed, a))
        return False

    # -- functions -------------------------------------------------------------

    def _ok(self, e):
        return e if self._fits(e) else UNDEFINED

    def apply(self, f, args):
        for a in args:
            if a is UNDEFINED:
                return UNDEFINED
        if f in self.base.vocab.functions:
            if all(a.tag == "U" for a in args):
                v = self.base.apply(f, [a.args[0] for a in args])
                return UNDEFINED if v is UNDEFINED else urelement(v)
            return UNDEFINED
        if f == "Zero":
            return self._ok(nat(0))
        if f == "S":
            a = args[0]
            return self._ok(nat(a.args[0] + 1)) if a.tag == "Nat" else UNDEFINED
        if f == "Nil":
            return NIL
        if f == "Empty":
            return EMPTY_ASSGT
        if f == "Append":
            l, x = args
            return self._ok(mklist(l.args + (x,))) if l.tag == "List" else UNDEFINED
        if f == "Modify":
            s, v, a = args
            if s.tag != "Assgt" or v.tag != "Var" or a not in self.value_set:
                return UNDEFINED
            d = dict(s.args)
            d[v] = a
            return self._ok(mkassgt(d.items()))
        if f == "SymName":
            n = args[0]
            ok = n.tag == "Nat" and n.args[0] < len(self.symbols)
            return self._ok(sym_el(n.args[0])) if ok else UNDEFINED
        if f == "VarName":
            n = args[0]
            return self._ok(var_el(n.args[0])) if n.tag == "Nat" else UNDEFINED
        if f == "XPred":
            k, i = args
            if k.tag == "Nat" and i.tag == "Nat" and k.args[0] <= self.K and i.args[0] < self.I:
                return self._ok(xpred(k.args[0], i.args[0]))
            return UNDEFINED
        e = self._construct(f, args)
        return UNDEFINED if e is None else self._ok(e)

    def _construct(self, f, args):
        a = args
        if f == "Apply":
            ok = a[0].tag in ("Sym", "XP") and is_list(a[1])
        elif f == "Neg":
            ok = a[0].tag == "Apply"
        elif f in ("Conj", "Disj"):
            ok = is_formula(a[0]) and is_formula(a[1])
        elif f == "Quant":
            ok = a[0].tag == "Var" and is_formula(a[1])
        elif f == "IndAsrt":
            ok = is_program(a[0]) and is_formula(a[1])
        elif f == "Rule":
            ok = a[0].tag == "Apply" and is_formula(a[1])
        else:
            raise KeyError(f"unknown function {f}")
        return node(f, *a) if ok else None

    def invert(self, f, value):
        """All in-universe argument tuples that ``f`` maps to ``value``."""
        t = value.tag
        if f in self.base.vocab.functions:
            if t != "U":
                return ()
            return [tuple(urelement(x) for x in args)
                    for args in self.base.invert(f, value.args[0])]
        if f == "Zero":
            return [()] if value is nat(0) else ()
        if f == "S":
            return [(nat(value.args[0] - 1),)] if t == "Nat" and value.args[0] > 0 else ()
        if f == "Nil":
            return [()] if value is NIL else ()
        if f == "Empty":
            return [()] if value is EMPTY_ASSGT else ()
        if f == "Append":
            if t != "List" or not value.args:
                return ()
            return [(mklist(value.args[:-1]), value.args[-1])]
        if f == "Modify":
            return self._invert_modify(value)
        if f == "SymName":
            return [(nat(value.args[0]),)] if t == "Sym" else ()
        if f == "VarName":
            return [(nat(value.args[0]),)] if t == "Var" else ()
        if f == "XPred":
            return [(nat(value.args[0]), nat(value.args[1]))] if t == "XP" else ()
        return [value.args] if t == f else ()

    def _invert_modify(self, s):
        if s.tag != "Assgt" or not s.args:
            return ()
        d = dict(s.args)
        out = []
        for v, a in s.args:
            rest = {k: x for k, x in d.items() if k is not v}
            out.append((mkassgt(rest.items()), v, a))
        for v, a in s.args:
            for b in self.values:
                t = dict(d)
                t[v] = b
                t = mkassgt(t.items())
                if self._fits(t):
                    out.append((t, v, a))
        return out

    def arg_candidates(self, f, pos, args):
        if f == "Modify" and pos == 2:
            return self.values
        return None

    # -- relations -------------------------------------------------------------

    def has_relation(self, r):
        return r == EQ or r in self.vocab.relations

    def holds(self, r, args):
        if r == EQ:
            return args[0] is args[1]
        if r in self.base.relations:
            if all(a.tag == "U" for a in args):
                return self.base.holds(r, [a.args[0] for a in args])
            return False
        if r == "Vbl":
            return args[0].tag == "Var" and self._fits(args[0])
        if r == "Arity":
            p, n = args
            return p.tag == "XP" and n.tag == "Nat" and p.args[0] == n.args[0]
        if r == "RenameAway":
            return self.rename_away(args[0], args[1]) is args[2]
        raise KeyError(r)

    def rename_away(self, phi, prog):
        """The unique ``phi'`` with ``RenameAway(phi, prog, phi')``, or ``None``."""
        key = (phi, prog)
        if key in self._rename:
            return self._rename[key]
        out = None
        if is_formula(phi) and is_program(prog):
            out = rename_away_element(phi, prog, self.I)
            if out is not None and not self._fits(out):
                out = None
        self._rename[key] = out
        return out

    def query(self, r, pattern):
        if all(p is not None for p in pattern):
            return [tuple(pattern)] if self.holds(r, pattern) else []
        if r == EQ:
            a, b = pattern
            v = a if a is not None else b
            if v is None:
                return [(e, e) for e in self.elements()]
            return [(v, v)]
        if r in self.base.relations:
            if any(p is not None and p.tag != "U" for p in pattern):
                return []
            raw = tuple(None if p is None else p.args[0] for p in pattern)
            return [tuple(urelement(x) for x in t) for t in self.base.query(r, raw)]
        if r == "Vbl":
            return [(e,) for e in self._atomic("Var")]
        if r == "Arity":
            p, n = pattern
            if p is not None:
                return [(p, nat(p.args[0]))] if p.tag == "XP" else []
            preds = [e for e in self._atomic("XP")]
            if n is not None:
                return [(e, n) for e in preds if n.tag == "Nat" and e.args[0] == n.args[0]]
            return [(e, nat(e.args[0])) for e in preds]
        if r == "RenameAway":
            phi, prog, _ = pattern
            if phi is None or prog is None:
                raise MetaModeError("RenameAway is computed from its first two arguments")
            out = self.rename_away(phi, prog)
            return [] if out is None else [(phi, prog, out)]
        raise KeyError(r)

    # -- enumeration -----------------------------------------------------------

    def _atomic(self, tag):
        if self.bound is None:
            raise MetaModeError("cannot enumerate the untruncated structure")
        if tag == "Var":
            return [var_el(n) for n in range(self.bound - 1)]
        return [xpred(k, i) for k in range(self.K + 1) for i in range(self.I)
                if k + i + 3 <= self.bound]

    def elements_of_size(self, n):
        """All universe elements of size exactly ``n``, in a fixed order."""
        if n in self._by_size:
            return self._by_size[n]
        out = []
        if n == 1:
            out += [urelement(e) for e in self.base.universe]
            out += [NIL, EMPTY_ASSGT]
        out.append(nat(n - 1))
        if n >= 2:
            out.append(var_el(n - 2))
            if n - 2 < len(self.symbols):
                out.append(sym_el(n - 2))
        for k in range(self.K + 1):
            i = n - 3 - k
            if 0 <= i < self.I:
                out.append(xpred(k, i))
        lists = self._lists(n - 1)
        out += [mklist(items) for items in lists if items]
        out += self._assignments(n)
        for total in range(2, n - 1):
            for f in self.elements_of_size(total):
                if f.tag in ("Sym", "XP"):
                    for l in self.elements_of_size(n - 1 - total):
                        if l.tag == "List":
                            out.append(node("Apply", f, l))
        for x in self.elements_of_size(n - 1) if n > 1 else ():
            if x.tag == "Apply":
                out.append(node("Neg", x))
        for total in range(1, n - 1):
            for a in self.elements_of_size(total):
                for b in self.elements_of_size(n - 1 - total):
                    if is_formula(b):
                        if is_formula(a):
                            out.append(node("Conj", a, b))
                            out.append(node("Disj", a, b))
                        if a.tag == "Var":
                            out.append(node("Quant", a, b))
                        if is_program(a):
                            out.append(node("IndAsrt", a, b))
                        if a.tag == "Apply":
                            out.append(node("Rule", a, b))
        self._by_size[n] = out
        return out

    def _lists(self, budget):
        """Item tuples whose list cost ``sum(1 + size)`` is exactly ``budget``."""
        if budget == 0:
            return [()]
        out = []
        for last in range(1, budget):
            for prefix in self._lists(budget - 1 - last):
                for x in self.elements_of_size(last):
                    out.append(prefix + (x,))
        return out

    def _assignments(self, n):
        out = []

        def go(start, budget, pairs):
            if budget == 0:
                if pairs:
                    out.append(mkassgt(pairs))
                return
            for v in range(start, budget):
                cost_v = 1 + (v + 2)
                for a in self.values:
                    c = cost_v + a.size
                    if c <= budget:
                        go(v + 1, budget - c, pairs + [(var_el(v), a)])

        go(0, n - 1, [])
        return out

    def elements(self):
        if self.bound is None:
            raise MetaModeError("cannot enumerate the untruncated structure")
        out = []
        for n in range(1, self.bound + 1):
            out.extend(self.elements_of_size(n))
        return out

    def name(self, e):
        return show(e)

    def __repr__(self):
        return f"MetaStructure(d={self.bound}, |W|={len(self.values)})"


class MetaModeError(RuntimeError):
    """A relation of the meta structure was queried in an unsupported mode."""


def build_meta_structure(base: Structure, bound, junk=1, K=4, I=8) -> MetaStructure:
    """``X_d`` for ``d = bound`` over the base world ``base``."""
    if bound is not None and bound < 1:
        raise ValueError("bound must be at least 1")
    return MetaStructure(base, bound, junk=junk, K=K, I=I)


def rename_away_relation(X: MetaStructure, formulas, programs):
    """The RenameAway triples of ``X`` for the given candidate arguments."""
    out = set()
    for phi in formulas:
        for prog in programs:
            r = X.rename_away(phi, prog)
            if r is not None:
                out.add((phi, prog, r))
    return out


def with_junk(base: Structure, junk: int) -> Structure:
    """Base structure plus ``junk`` fresh elements on which base functions are
    undefined and base relations false; mirrors the value set ``W``."""
    names = list(base.names) + [f"#{i}" for i in range(junk)]
    return Structure(base.vocab, names, base.functions, base.relations, partial=True)


def to_meta_value(X: MetaStructure, e):
    """Map an element of :func:`with_junk` to the corresponding value in ``W``."""
    n = len(X.base.names)
    return urelement(e) if e < n else nat(e - n)
