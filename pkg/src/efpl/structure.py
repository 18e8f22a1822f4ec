"""Finite structures, assignments, term evaluation and homomorphisms.

Elements of a finite :class:`Structure` are interned as the integers
``0 .. n-1`` with a printable name table.  ``UNDEFINED`` (``None``) is the
value of a term that mentions an unassigned variable or applies a partial
function outside its domain.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field
from itertools import product

from .syntax import EQ, Var, Vocabulary

UNDEFINED = None


class StructureError(ValueError):
    pass


class Assignment(Mapping):
    """Immutable finite partial map from variable names to elements."""

    __slots__ = ("_d", "_h")

    def __init__(self, items=()):
        self._d = dict(items)
        self._h = None

    def __getitem__(self, k):
        return self._d[k]

    def __iter__(self):
        return iter(self._d)

    def __len__(self):
        return len(self._d)

    def __hash__(self):
        if self._h is None:
            self._h = hash(frozenset(self._d.items()))
        return self._h

    def __eq__(self, other):
        if isinstance(other, Assignment):
            return self._d == other._d
        return NotImplemented

    def lookup(self, v):
        return self._d.get(v, UNDEFINED)

    def modify(self, v, a):
        d = dict(self._d)
        d[v] = a
        return Assignment(d)

    def __repr__(self):
        inner = ", ".join(f"{k}->{v!r}" for k, v in sorted(self._d.items()))
        return "{" + inner + "}"


EMPTY = Assignment()


def modify(s: Assignment, v, a) -> Assignment:
    """The assignment sending ``v`` to ``a`` and otherwise agreeing with ``s``."""
    return s.modify(v, a)


class Structure:
    """A finite interpretation of a vocabulary.

    ``functions[f]`` maps argument tuples to elements and ``relations[R]`` is
    a frozenset of tuples.  Equality is never stored.  Function tables may be
    partial only when built with ``partial=True`` (used for the base part of
    the meta structure); files always produce total structures.
    """

    def __init__(self, vocab: Vocabulary, names, functions, relations, partial=False):
        self.vocab = vocab
        self.names = tuple(names)
        self.universe = range(len(self.names))
        self.partial = partial
        self.functions = {f: dict(functions.get(f, {})) for f in vocab.functions}
        self.relations = {r: frozenset(relations.get(r, ())) for r in vocab.relations if r != EQ}
        self._index = {n: i for i, n in enumerate(self.names)}
        self._inverse = {}
        self._rel_index = {}
        self._check()

    @classmethod
    def from_names(cls, vocab, names, ftables, rtables, partial=False):
        idx = {n: i for i, n in enumerate(names)}
        fs = {f: {tuple(idx[a] for a in args): idx[v] for args, v in t.items()}
              for f, t in ftables.items()}
        rs = {r: {tuple(idx[a] for a in t) for t in ts} for r, ts in rtables.items()}
        return cls(vocab, names, fs, rs, partial=partial)

    def _check(self):
        if not self.names:
            raise StructureError("universe must be non-empty")
        n = len(self.names)
        for f, arity in self.vocab.functions.items():
            table = self.functions[f]
            for args, v in table.items():
                if len(args) != arity or not all(0 <= a < n for a in args) or not 0 <= v < n:
                    raise StructureError(f"bad entry for {f}: {args} -> {v}")
            if not self.partial and len(table) != n ** arity:
                raise StructureError(f"function {f} is not total")
        for r, ts in self.relations.items():
            arity = self.vocab.relations[r][0]
            for t in ts:
                if len(t) != arity or not all(0 <= a < n for a in t):
                    raise StructureError(f"tuple outside universe in {r}: {t}")

    # -- element helpers -----------------------------------------------------

    def element(self, name):
        try:
            return self._index[name]
        except KeyError:
            raise StructureError(f"unknown element {name!r}") from None

    def name(self, e):
        return self.names[e]

    def elements(self):
        return self.universe

    def size(self):
        return len(self.names)

    # -- evaluation hooks used by the evaluator --------------------------------

    def apply(self, f, args):
        if any(a is UNDEFINED for a in args):
            return UNDEFINED
        return self.functions[f].get(tuple(args), UNDEFINED)

    def holds(self, r, args):
        if r == EQ:
            return args[0] == args[1]
        return tuple(args) in self.relations[r]

    def has_relation(self, r):
        return r == EQ or r in self.relations

    def query(self, r, pattern):
        """Tuples of ``r`` agreeing with the non-``None`` positions of ``pattern``."""
        if r == EQ:
            a, b = pattern
            if a is not None and b is not None:
                return [(a, b)] if a == b else []
            if a is not None:
                return [(a, a)]
            if b is not None:
                return [(b, b)]
            return [(e, e) for e in self.universe]
        bound = tuple(i for i, p in enumerate(pattern) if p is not None)
        if not bound:
            return list(self.relations[r])
        if len(bound) == len(pattern):
            return [tuple(pattern)] if tuple(pattern) in self.relations[r] else []
        key = (r, bound)
        index = self._rel_index.get(key)
        if index is None:
            index = {}
            for t in self.relations[r]:
                index.setdefault(tuple(t[i] for i in bound), []).append(t)
            self._rel_index[key] = index
        return index.get(tuple(pattern[i] for i in bound), [])

    def invert(self, f, value):
        """All argument tuples that ``f`` maps to ``value``."""
        inv = self._inverse.get(f)
        if inv is None:
            inv = {}
            for args, v in self.functions[f].items():
                inv.setdefault(v, []).append(args)
            self._inverse[f] = inv
        return inv.get(value, [])

    def arg_candidates(self, f, pos, args):
        return None

    def contains(self, e):
        return isinstance(e, int) and 0 <= e < len(self.names)

    def __repr__(self):
        return f"Structure(|U|={len(self.names)}, {self.vocab!r})"


def eval_term(t, s, X):
    """Value of term ``t`` under assignment ``s`` in ``X`` (``UNDEFINED`` if unbound)."""
    if isinstance(t, Var):
        return s.get(t.name, UNDEFINED)
    args = [eval_term(a, s, X) for a in t.args]
    if any(a is UNDEFINED for a in args):
        return UNDEFINED
    return X.apply(t.fn, args)


# ---------------------------------------------------------------------------
# homomorphisms


@dataclass
class Homomorphism:
    source: Structure
    target: Structure
    mapping: dict  # source element -> target element


@dataclass
class HomomorphismReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def __bool__(self):
        return self.ok


def check_homomorphism(h: Homomorphism, equality_negatable=True) -> HomomorphismReport:
    """Check the three preservation conditions by enumeration.

    Functions must commute with ``h``; positive relations are preserved
    forwards; negatable relations hold of a tuple iff they hold of its image.
    Equality is negatable in every vocabulary here, so by default ``h`` must
    also be injective; ``equality_negatable=False`` drops that requirement
    (truth transport then only covers formulas without negated equations).
    """
    X, Y, m = h.source, h.target, h.mapping
    missing = [X.name(a) for a in X.universe if a not in m]
    if missing:
        raise StructureError(f"mapping is not total: no image for {', '.join(missing)}")
    for a in X.universe:
        if not Y.contains(m[a]):
            raise StructureError(f"image of {X.name(a)} is not in the target universe")
    out = []
    for f, arity in X.vocab.functions.items():
        if Y.vocab.functions.get(f) != arity:
            out.append(("vocabulary", f, "function missing or with another arity in target"))
            continue
        for args in product(X.universe, repeat=arity):
            v = X.apply(f, args)
            if v is UNDEFINED:
                continue
            w = Y.apply(f, tuple(m[a] for a in args))
            if w != m[v]:
                out.append(("function", f, tuple(X.name(a) for a in args)))
    for r, (arity, negatable) in X.vocab.relations.items():
        if r == EQ:
            continue
        if Y.vocab.relations.get(r) != (arity, negatable):
            out.append(("vocabulary", r, "relation missing or different in target"))
            continue
        for args in product(X.universe, repeat=arity):
            src = X.holds(r, args)
            tgt = Y.holds(r, tuple(m[a] for a in args))
            if src and not tgt:
                out.append(("positive" if not negatable else "negatable", r,
                            tuple(X.name(a) for a in args)))
            elif negatable and tgt and not src:
                out.append(("negatable", r, tuple(X.name(a) for a in args)))
    if not equality_negatable:
        return HomomorphismReport(out)
    for a in X.universe:
        for b in X.universe:
            if a < b and m[a] == m[b]:
                out.append(("negatable", EQ, (X.name(a), X.name(b))))
    return HomomorphismReport(out)
