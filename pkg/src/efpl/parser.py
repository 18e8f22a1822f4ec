"""Concrete syntax: formulas, programs, vocabularies and structure files.

Formula grammar (binary connectives are always parenthesized)::

    formula := atom | "!" atom | "(" formula ("&" | "|") formula ")"
             | "(" formula ")" | "exists" IDENT "." formula
             | "let" rule (";" rule)* "then" formula
    rule    := IDENT "(" identlist? ")" "<-" formula
    atom    := IDENT "(" termlist? ")" | term "=" term
    term    := IDENT | IDENT "(" termlist? ")"

``#`` starts a comment that runs to the end of the line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

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
    validate,
    validate_program,
)


@dataclass(frozen=True)
class SourceSpan:
    start: int
    end: int
    line: int
    column: int

    def __str__(self):
        return f"{self.line}:{self.column}"


class ParseError(ValueError):
    def __init__(self, message, line=None, column=None):
        self.line, self.column = line, column
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + message)


class FormulaValidationError(ParseError):
    def __init__(self, report, span=None):
        self.report = report
        v = report.first()
        super().__init__(str(v), span.line if span else None, span.column if span else None)


KEYWORDS = {"exists", "let", "then"}
_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<arrow><-)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<punct>[()&|!.,;=])
""", re.VERBOSE)


@dataclass
class Token:
    kind: str
    text: str
    start: int
    end: int
    line: int
    column: int


def tokenize(text):
    out = []
    pos, line, line_start = 0, 1, 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        s = m.group()
        if kind != "ws":
            if kind == "ident" and s in KEYWORDS or kind in ("punct", "arrow"):
                kind = s
            out.append(Token(kind, s, pos, m.end(), line, pos - line_start + 1))
        nl = s.count("\n")
        if nl:
            line += nl
            line_start = pos + s.rfind("\n") + 1
        pos = m.end()
    out.append(Token("eof", "", n, n, line, n - line_start + 1))
    return out


class _Parser:
    def __init__(self, text):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def peek(self, k=1):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        raise ParseError(msg, tok.line, tok.column)

    def expect(self, kind):
        t = self.tok
        if t.kind != kind:
            found = t.text or "end of input"
            self.error(f"expected {kind!r}, found {found!r}")
        self.i += 1
        return t

    def span_from(self, start_tok):
        end = self.toks[self.i - 1].end if self.i else start_tok.end
        return SourceSpan(start_tok.start, end, start_tok.line, start_tok.column)

    # -- terms ---------------------------------------------------------------

    def term(self):
        t = self.expect("ident")
        if self.tok.kind == "(":
            self.i += 1
            args = self.arglist(self.term)
            return App(t.text, tuple(args), span=self.span_from(t))
        return Var(t.text, span=self.span_from(t))

    def arglist(self, item):
        args = []
        if self.tok.kind != ")":
            args.append(item())
            while self.tok.kind == ",":
                self.i += 1
                args.append(item())
        self.expect(")")
        return args

    # -- formulas ------------------------------------------------------------

    def atom(self):
        start = self.tok
        if start.kind != "ident":
            self.error(f"expected an atomic formula, found {start.text or 'end of input'!r}")
        if self.peek().kind == "(":
            self.i += 2
            args = self.arglist(self.term)
            if self.tok.kind == "=":
                lhs = App(start.text, tuple(args), span=self.span_from(start))
                self.i += 1
                rhs = self.term()
                return Atom(EQ, (lhs, rhs), span=self.span_from(start))
            return Atom(start.text, tuple(args), span=self.span_from(start))
        lhs = self.term()
        self.expect("=")
        rhs = self.term()
        return Atom(EQ, (lhs, rhs), span=self.span_from(start))

    def formula(self):
        t = self.tok
        if t.kind == "!":
            self.i += 1
            if self.tok.kind == "(":
                self.i += 1
                a = self.atom()
                self.expect(")")
            else:
                a = self.atom()
            return NegAtom(a.rel, a.args, span=self.span_from(t))
        if t.kind == "(":
            self.i += 1
            left = self.formula()
            if self.tok.kind in ("&", "|"):
                op = self.tok.kind
                self.i += 1
                right = self.formula()
                self.expect(")")
                cls = Conj if op == "&" else Disj
                return cls(left, right, span=self.span_from(t))
            self.expect(")")
            return left
        if t.kind == "exists":
            self.i += 1
            v = self.expect("ident")
            self.expect(".")
            body = self.formula()
            return Exists(v.text, body, span=self.span_from(t))
        if t.kind == "let":
            self.i += 1
            rules = self.rules(stop=("then",))
            self.expect("then")
            body = self.formula()
            return Let(tuple(rules), body, span=self.span_from(t))
        return self.atom()

    def rule(self):
        t = self.expect("ident")
        self.expect("(")
        params = [p.text for p in self.arglist(lambda: self.expect("ident"))]
        self.expect("<-")
        body = self.formula()
        return Rule(t.text, tuple(params), body, span=self.span_from(t))

    def rules(self, stop):
        out = [self.rule()]
        while self.tok.kind == ";":
            self.i += 1
            if self.tok.kind in stop:
                break
            out.append(self.rule())
        return out


def _find_span(f, path):
    node = f
    for step in path:
        nxt = None
        if step in ("left", "right", "body") and hasattr(node, step):
            nxt = getattr(node, step)
        elif step == "then":
            nxt = node.body
        elif step.startswith("rule"):
            nxt = node.program[int(step[4:])]
        elif step.startswith("arg"):
            nxt = node.args[int(step[3:])]
        if nxt is None:
            break
        node = nxt
    return getattr(node, "span", None)


def parse_formula(text, vocab: Vocabulary = None, check=True):
    """Parse one formula; when ``vocab`` is given the result is validated."""
    p = _Parser(text)
    f = p.formula()
    if p.tok.kind != "eof":
        p.error(f"unexpected {p.tok.text!r} after formula")
    if vocab is not None and check:
        report = validate(f, vocab)
        if not report.ok:
            raise FormulaValidationError(report, _find_span(f, report.first().path))
    return f


def parse_program(text, vocab: Vocabulary = None):
    """Parse rules separated by ``;`` (a trailing ``;`` is allowed)."""
    p = _Parser(text)
    rules = p.rules(stop=("eof",))
    if p.tok.kind != "eof":
        p.error(f"unexpected {p.tok.text!r} after program")
    if vocab is not None:
        report = validate_program(rules, vocab)
        if not report.ok:
            raise FormulaValidationError(report)
    return tuple(rules)


# ---------------------------------------------------------------------------
# printing


def print_term(t):
    if isinstance(t, Var):
        return t.name
    return f"{t.fn}({', '.join(print_term(a) for a in t.args)})"


def _atom_text(rel, args):
    if rel == EQ:
        return f"{print_term(args[0])} = {print_term(args[1])}"
    return f"{rel}({', '.join(print_term(a) for a in args)})"


def print_formula(f):
    """Canonical fully parenthesized text; ``parse_formula`` inverts it."""
    if isinstance(f, Atom):
        return _atom_text(f.rel, f.args)
    if isinstance(f, NegAtom):
        return f"!({_atom_text(f.rel, f.args)})" if f.rel == EQ else "!" + _atom_text(f.rel, f.args)
    if isinstance(f, Conj):
        return f"({print_formula(f.left)} & {print_formula(f.right)})"
    if isinstance(f, Disj):
        return f"({print_formula(f.left)} | {print_formula(f.right)})"
    if isinstance(f, Exists):
        return f"exists {f.var}. {print_formula(f.body)}"
    if isinstance(f, Let):
        return f"let {'; '.join(print_rule(r) for r in f.program)} then {print_formula(f.body)}"
    raise TypeError(f"not a formula: {f!r}")


def print_rule(r):
    body = print_formula(r.body)
    if isinstance(r.body, Let):
        body = f"({body})"
    return f"{r.head}({', '.join(r.params)}) <- {body}"


def print_program(program, sep=";\n"):
    return sep.join(print_rule(r) for r in program)


# ---------------------------------------------------------------------------
# vocabulary and structure files

_DECL = re.compile(r"^(fun|rel)\s+([A-Za-z_][A-Za-z0-9_']*)\s*/\s*(\d+)\s*(.*)$")


def _strip_comment(line):
    i = line.find("#")
    return line if i < 0 else line[:i]


def parse_vocabulary(text):
    """Lines ``fun f/n`` and ``rel R/n negatable|positive``."""
    functions, relations = {}, []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        m = _DECL.match(line)
        if not m:
            raise ParseError(f"cannot read declaration {line!r}", lineno, 1)
        kind, name, arity, rest = m.group(1), m.group(2), int(m.group(3)), m.group(4).strip()
        if kind == "fun":
            if rest:
                raise ParseError(f"unexpected {rest!r} after function declaration", lineno, 1)
            if name in functions:
                raise ParseError(f"duplicate symbol {name}", lineno, 1)
            functions[name] = arity
        else:
            if rest not in ("negatable", "positive"):
                raise ParseError("relation polarity must be 'negatable' or 'positive'", lineno, 1)
            relations.append((name, arity, rest == "negatable"))
    try:
        return Vocabulary(functions, relations)
    except ValueError as e:
        raise ParseError(str(e)) from None


def print_vocabulary(vocab: Vocabulary):
    lines = [f"fun {n}/{a}" for n, a in sorted(vocab.functions.items())]
    for n, (a, neg) in sorted(vocab.relations.items()):
        if n != EQ:
            lines.append(f"rel {n}/{a} {'negatable' if neg else 'positive'}")
    return "\n".join(lines) + "\n"


_TUPLE = re.compile(r"\(([^()]*)\)")


def _split_names(s):
    return [x.strip() for x in s.split(",")] if s.strip() else []


def parse_structure(text):
    """Read a structure file; returns ``(vocabulary, structure)``.

    Format::

        universe a b c
        fun c/0 -> a
        fun s/1: a -> b, b -> c, c -> c
        fun g/2: (a,b) -> c, ...
        rel Edge/2 negatable: (a,b) (b,c)
    """
    from .structure import Structure

    universe = None
    functions, relations = {}, []
    ftables, rtables = {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw).strip()
        if not line:
            continue

        def err(msg):
            raise ParseError(msg, lineno, 1)

        if line.startswith("universe"):
            if universe is not None:
                err("universe declared twice")
            universe = line.split()[1:]
            if not universe:
                err("universe must be non-empty")
            if len(set(universe)) != len(universe):
                err("universe lists an element twice")
            continue
        m = _DECL.match(line)
        if not m:
            err(f"cannot read line {line!r}")
        if universe is None:
            err("universe must be declared before symbols")
        kind, name, arity, rest = m.group(1), m.group(2), int(m.group(3)), m.group(4).strip()
        if name in functions or name in rtables or name == EQ:
            err(f"duplicate symbol {name}")
        elems = set(universe)
        if kind == "fun":
            functions[name] = arity
            table = {}
            if rest.startswith("->"):
                if arity != 0:
                    err(f"function {name}/{arity} needs a table, not a constant value")
                entries = [("", rest[2:].strip())]
            else:
                if not rest.startswith(":"):
                    err(f"expected ':' after fun {name}/{arity}")
                entries = []
                for part in _split_top(rest[1:]):
                    if "->" not in part:
                        err(f"expected 'args -> value' in {part!r}")
                    lhs, rhs = part.split("->", 1)
                    entries.append((lhs.strip(), rhs.strip()))
            for lhs, rhs in entries:
                args = _split_names(lhs[1:-1]) if lhs.startswith("(") else _split_names(lhs)
                if len(args) != arity:
                    err(f"arity mismatch in function {name}: {lhs!r}")
                for a in args + [rhs]:
                    if a not in elems:
                        err(f"element {a!r} is not in the universe")
                key = tuple(args)
                if key in table and table[key] != rhs:
                    err(f"function not single-valued: {name}{key} has two values")
                table[key] = rhs
            need = _count(len(universe), arity)
            if len(table) != need:
                err(f"function not total: {name} defines {len(table)} of {need} argument tuples")
            ftables[name] = table
        else:
            head, sep, body = rest.partition(":")
            pol = head.strip()
            if pol not in ("negatable", "positive"):
                err("relation polarity must be 'negatable' or 'positive'")
            relations.append((name, arity, pol == "negatable"))
            tuples = set()
            for tm in _TUPLE.finditer(body):
                args = _split_names(tm.group(1))
                if len(args) != arity:
                    err(f"arity mismatch in relation {name}: ({tm.group(1)})")
                for a in args:
                    if a not in elems:
                        err(f"tuple outside universe: {a!r} in {name}")
                tuples.add(tuple(args))
            leftover = _TUPLE.sub("", body).strip()
            if leftover:
                err(f"cannot read relation tuples {leftover!r}")
            rtables[name] = tuples
    if universe is None:
        raise ParseError("missing universe declaration")
    vocab = Vocabulary(functions, relations)
    return vocab, Structure.from_names(vocab, universe, ftables, rtables)


def _count(n, k):
    return n ** k


def _split_top(s):
    """Split on commas that are not inside parentheses."""
    out, depth, cur = [], 0, []
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            out.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    if "".join(cur).strip():
        out.append("".join(cur).strip())
    return out


def print_structure(X):
    names = X.names
    lines = ["universe " + " ".join(names)]
    for f, arity in sorted(X.vocab.functions.items()):
        table = X.functions[f]
        if arity == 0:
            lines.append(f"fun {f}/0 -> {names[table[()]]}")
            continue
        parts = []
        for args in sorted(table):
            lhs = names[args[0]] if arity == 1 else "(" + ",".join(names[a] for a in args) + ")"
            parts.append(f"{lhs} -> {names[table[args]]}")
        lines.append(f"fun {f}/{arity}: " + ", ".join(parts))
    for r, (arity, neg) in sorted(X.vocab.relations.items()):
        if r == EQ:
            continue
        tuples = " ".join("(" + ",".join(names[a] for a in t) + ")" for t in sorted(X.relations[r]))
        lines.append(f"rel {r}/{arity} {'negatable' if neg else 'positive'}: {tuples}".rstrip())
    return "\n".join(lines) + "\n"
