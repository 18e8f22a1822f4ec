"""Vectorized evaluation of Let-free formulas over every structure of a size.

All structures with universe ``{0..n-1}`` over a small vocabulary are stacked
along axis 0; each variable of the formula gets its own axis of length ``n``.
A formula evaluates to a boolean array that broadcasts against
``(S, n, ..., n)``, so one pass decides it for all structures and all
assignments at once.
"""

from __future__ import annotations

from itertools import product

import numpy as np

from .syntax import (
    EQ,
    Atom,
    Conj,
    Disj,
    Exists,
    NegAtom,
    Var,
    Vocabulary,
    all_variables,
    free_vars,
)


class StructureBatch:
    """Every structure of size ``n`` over ``vocab``, or the slice ``[start, stop)``."""

    def __init__(self, vocab: Vocabulary, n, start=0, stop=None):
        self.vocab, self.n = vocab, n
        slots = []  # (kind, symbol, tuple) in a fixed order
        for f, k in sorted(vocab.functions.items()):
            slots += [("f", f, t) for t in product(range(n), repeat=k)]
        for r, (k, _) in sorted(vocab.relations.items()):
            if r != EQ:
                slots += [("r", r, t) for t in product(range(n), repeat=k)]
        radix = np.array([n if kind == "f" else 2 for kind, _, _ in slots], dtype=np.int64)
        total = int(np.prod(radix)) if len(radix) else 1
        stop = total if stop is None else min(stop, total)
        self.total, self.start, self.stop = total, start, stop
        idx = np.arange(start, stop, dtype=np.int64)
        self.size = len(idx)
        self.functions = {f: np.zeros((self.size,) + (n,) * k, dtype=np.int64)
                          for f, k in vocab.functions.items()}
        self.relations = {r: np.zeros((self.size,) + (n,) * k, dtype=bool)
                          for r, (k, _) in vocab.relations.items() if r != EQ}
        place = idx.copy()
        for (kind, sym, t), b in zip(slots, radix):
            digit = place % b
            place //= b
            if kind == "f":
                self.functions[sym][(slice(None),) + t] = digit
            else:
                self.relations[sym][(slice(None),) + t] = digit.astype(bool)

    def structure(self, i):
        """The ``i``-th structure of this slice as a :class:`Structure`."""
        from .structure import Structure

        n = self.n
        funcs = {f: {t: int(a[(i,) + t]) for t in product(range(n), repeat=a.ndim - 1)}
                 for f, a in self.functions.items()}
        rels = {r: {t for t in product(range(n), repeat=a.ndim - 1) if a[(i,) + t]}
                for r, a in self.relations.items()}
        return Structure(self.vocab, [chr(ord("a") + k) for k in range(n)], funcs, rels)

    @staticmethod
    def count(vocab: Vocabulary, n):
        c = 1
        for k in vocab.functions.values():
            c *= n ** (n ** k)
        for r, (k, _) in vocab.relations.items():
            if r != EQ:
                c *= 2 ** (n ** k)
        return c


def batch_evaluate(f, batch: StructureBatch, axes):
    """Truth array of ``f``; ``axes`` maps every variable of ``f`` to an axis >= 1."""
    n, S = batch.n, batch.size
    ndim = 1 + len(axes)
    sidx = np.arange(S).reshape((S,) + (1,) * (ndim - 1))

    def shaped(arr):
        return arr.reshape(arr.shape + (1,) * (ndim - arr.ndim))

    def term(t):
        if type(t) is Var:
            shape = [1] * ndim
            shape[axes[t.name]] = n
            return np.arange(n).reshape(shape)
        args = [term(a) for a in t.args]
        table = batch.functions[t.fn]
        if not args:
            return shaped(table)
        return table[(sidx,) + tuple(args)]

    def atom(g):
        args = [term(a) for a in g.args]
        if g.rel == EQ:
            return args[0] == args[1]
        table = batch.relations[g.rel]
        if not args:
            return shaped(table)
        return table[(sidx,) + tuple(args)]

    def go(g):
        t = type(g)
        if t is Atom:
            return atom(g)
        if t is NegAtom:
            return ~atom(g)
        if t is Conj:
            return go(g.left) & go(g.right)
        if t is Disj:
            return go(g.left) | go(g.right)
        if t is Exists:
            return go(g.body).any(axis=axes[g.var], keepdims=True)
        raise TypeError(f"batch evaluation handles Let-free formulas only: {g!r}")

    return go(f)


def agree_everywhere(f, g, vocab: Vocabulary, max_n=3, chunk=2048):
    """Whether ``f`` and ``g`` agree on every assignment over every structure
    with at most ``max_n`` elements.  Returns ``None`` or a counterexample
    ``(n, structure index, assignment)``."""
    if free_vars(f) != free_vars(g):
        raise ValueError("formulas have different free variables")
    names = sorted(all_variables(f) | all_variables(g))
    axes = {v: i + 1 for i, v in enumerate(names)}
    free = sorted(free_vars(f))
    for n in range(1, max_n + 1):
        total = StructureBatch.count(vocab, n)
        for start in range(0, total, chunk):
            batch = StructureBatch(vocab, n, start, start + chunk)
            full = (batch.size,) + tuple(n if v in free else 1 for v in names)
            a = np.broadcast_to(batch_evaluate(f, batch, axes), full)
            b = np.broadcast_to(batch_evaluate(g, batch, axes), full)
            diff = np.argwhere(a != b)
            if len(diff):
                hit = diff[0]
                s = {v: int(hit[axes[v]]) for v in free}
                return n, start + int(hit[0]), s
    return None
