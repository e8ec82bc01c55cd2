"""Problem-file and polynomial-expression parser.

Polynomial grammar (``^`` binds tightest, implicit multiplication is an error)::

    expr   := term (('+' | '-') term)*
    term   := unary ('*' unary)*
    unary  := ('-' | '+') unary | power
    power  := atom ('^' INT)?
    atom   := INT ('/' INT)? | IDENT | '(' expr ')'

A problem file is a sequence of ``;``-terminated statements; the colon after a
keyword is optional and ``#`` starts a comment::

    base y1 y2;
    fiber x;
    ideal: x*y1 - y2;
    module 2: [y2, -y1];          # optional, default F = A
    points: origin = (0, 0), p = (1, 0);
    expect: notflat;              # flat | notflat
    first_torsion: 2;             # an integer or none
    oracle: 1 2;                  # witness degree, multiplier degree
    tags: stretch;
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .groebner import Vector
from .poly import BASE, FIBER, QQ, Polynomial, Ring, Variable


class ProblemError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.message = message
        self.line = line
        self.col = col
        where = f"{line}:{col}: " if line else ""
        super().__init__(where + message)


class ParseError(ProblemError):
    """Malformed input text."""


class SemanticError(ProblemError):
    """Well-formed text with inconsistent content (undeclared names, rank mismatch)."""


_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+) | (?P<comment>\#[^\n]*) |
    (?P<num>\d+) | (?P<ident>[A-Za-z_][A-Za-z0-9_]*) |
    (?P<op>[;:,()\[\]+\-*^/=])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, chunk, line, col))
        nl = chunk.count("\n")
        if nl:
            line += nl
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        pos = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def advance(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind in ("op", "ident")

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.advance()
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}")
        return self.advance()

    def error(self, msg: str):
        t = self.tok
        got = "end of input" if t.kind == "eof" else repr(t.text)
        raise ParseError(f"{msg}, got {got}", t.line, t.col)

    # polynomial expressions
    def expr(self, ring: Ring) -> Polynomial:
        value = self.term(ring)
        while self.at("+") or self.at("-"):
            op = self.advance().text
            rhs = self.term(ring)
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self, ring: Ring) -> Polynomial:
        value = self.unary(ring)
        while True:
            if self.accept("*"):
                value = value * self.unary(ring)
            elif self.tok.kind in ("num", "ident") or self.at("("):
                self.error("implicit multiplication is not allowed; use '*'")
            else:
                return value

    def unary(self, ring: Ring) -> Polynomial:
        if self.accept("-"):
            return -self.unary(ring)
        if self.accept("+"):
            return self.unary(ring)
        return self.power(ring)

    def power(self, ring: Ring) -> Polynomial:
        base = self.atom(ring)
        if self.accept("^"):
            if self.tok.kind != "num":
                self.error("exponent must be a non-negative integer")
            base = base ** int(self.advance().text)
        return base

    def atom(self, ring: Ring) -> Polynomial:
        t = self.tok
        if t.kind == "num":
            self.advance()
            value = QQ(int(t.text))
            if self.at("/"):
                self.advance()
                if self.tok.kind != "num":
                    self.error("expected denominator")
                den = int(self.advance().text)
                if den == 0:
                    raise ParseError("zero denominator", t.line, t.col)
                value = QQ(int(t.text), den)
            return Polynomial.constant(ring, value)
        if t.kind == "ident":
            self.advance()
            if t.text not in ring:
                raise SemanticError(f"undeclared variable {t.text!r}", t.line, t.col)
            return ring.var(t.text)
        if self.accept("("):
            value = self.expr(ring)
            self.expect(")")
            return value
        self.error("expected a number, variable or '('")

    def rational(self):
        neg = self.accept("-")
        if self.tok.kind != "num":
            self.error("expected a rational number")
        num = int(self.advance().text)
        den = 1
        if self.accept("/"):
            if self.tok.kind != "num":
                self.error("expected denominator")
            den = int(self.advance().text)
            if den == 0:
                self.error("zero denominator")
        q = QQ(num, den)
        return -q if neg else q


def parse_polynomial(text: str, ring: Ring) -> Polynomial:
    p = _Parser(tokenize(text))
    value = p.expr(ring)
    if p.tok.kind != "eof":
        p.error("unexpected trailing input")
    return value


def problem_ring(base, fiber) -> Ring:
    """Ring of a problem: fiber variables first, then base variables."""
    return Ring(tuple(Variable(n, FIBER, 0) for n in fiber)
                + tuple(Variable(n, BASE) for n in base))


@dataclass(frozen=True)
class ProblemFile:
    base: tuple[str, ...]
    fiber: tuple[str, ...]
    ring: Ring
    ideal: tuple[Polynomial, ...] = ()
    module_rank: int | None = None
    module_rows: tuple[Vector, ...] = ()
    points: dict = field(default_factory=dict)
    expect: str | None = None
    first_torsion: int | None | str = "unset"
    oracle: tuple[int, int] | None = None
    tags: frozenset = frozenset()
    name: str = ""

    def problem(self):
        from .flatness import FlatnessProblem

        module = None
        if self.module_rank is not None:
            module = (self.module_rank, self.module_rows)
        return FlatnessProblem(self.base, self.fiber, self.ideal, module, ring=self.ring)


_KEYWORDS = ("base", "fiber", "ideal", "module", "points", "expect", "first_torsion",
             "oracle", "tags")


def parse_problem(text: str, name: str = "") -> ProblemFile:
    """Parse and validate a problem file; raises ParseError or SemanticError."""
    p = _Parser(tokenize(text))
    raw: dict = {}
    while p.tok.kind != "eof":
        t = p.tok
        if t.kind != "ident" or t.text not in _KEYWORDS:
            p.error(f"expected a section keyword ({', '.join(_KEYWORDS)})")
        if t.text in raw:
            raise SemanticError(f"duplicate section {t.text!r}", t.line, t.col)
        p.advance()
        start = p.i
        # collect the statement's tokens up to ';' or end of input
        while p.tok.kind != "eof" and not p.at(";"):
            p.advance()
        body = p.toks[start:p.i] + [Token("eof", "", p.tok.line, p.tok.col)]
        p.accept(";")
        raw[t.text] = (t, body)

    def names(key):
        if key not in raw:
            return ()
        kw, body = raw[key]
        sub = _Parser(body)
        sub.accept(":")
        out = []
        while sub.tok.kind != "eof":
            if sub.tok.kind != "ident":
                sub.error("expected a variable name")
            out.append(sub.advance())
        return tuple(out)

    base_toks, fiber_toks = names("base"), names("fiber")
    seen: dict = {}
    for tok in base_toks + fiber_toks:
        if tok.text in seen:
            raise SemanticError(f"variable {tok.text!r} declared twice", tok.line, tok.col)
        if tok.text in _KEYWORDS:
            raise SemanticError(f"{tok.text!r} is reserved", tok.line, tok.col)
        seen[tok.text] = tok
    base = tuple(t.text for t in base_toks)
    fiber = tuple(t.text for t in fiber_toks)
    ring = problem_ring(base, fiber)

    ideal: list = []
    if "ideal" in raw:
        sub = _Parser(raw["ideal"][1])
        sub.accept(":")
        if sub.tok.kind != "eof":
            ideal.append(sub.expr(ring))
            while sub.accept(","):
                ideal.append(sub.expr(ring))
        if sub.tok.kind != "eof":
            sub.error("expected ',' or ';'")

    rank, rows = None, []
    if "module" in raw:
        kw, body = raw["module"]
        sub = _Parser(body)
        if sub.tok.kind != "num":
            sub.error("expected the module rank")
        rank = int(sub.advance().text)
        if rank < 1:
            raise SemanticError("module rank must be positive", kw.line, kw.col)
        sub.accept(":")
        while sub.tok.kind != "eof":
            open_tok = sub.expect("[")
            entries = [sub.expr(ring)]
            while sub.accept(","):
                entries.append(sub.expr(ring))
            sub.expect("]")
            if len(entries) != rank:
                raise SemanticError(
                    f"row has {len(entries)} entries but the module rank is {rank}",
                    open_tok.line, open_tok.col)
            rows.append(Vector(entries))
            if not sub.accept(","):
                break
        if sub.tok.kind != "eof":
            sub.error("expected ',' or ';'")

    points: dict = {}
    if "points" in raw:
        sub = _Parser(raw["points"][1])
        sub.accept(":")
        while sub.tok.kind == "ident":
            ptok = sub.advance()
            sub.expect("=")
            sub.expect("(")
            coords = [] if sub.at(")") else [sub.rational()]
            while sub.accept(","):
                coords.append(sub.rational())
            sub.expect(")")
            if len(coords) != len(base):
                raise SemanticError(
                    f"point {ptok.text!r} has {len(coords)} coordinates, expected {len(base)}",
                    ptok.line, ptok.col)
            if ptok.text in points:
                raise SemanticError(f"point {ptok.text!r} defined twice", ptok.line, ptok.col)
            points[ptok.text] = tuple(coords)
            if not sub.accept(","):
                break
        if sub.tok.kind != "eof":
            sub.error("expected a point definition")

    expect = None
    if "expect" in raw:
        toks = names("expect")
        if len(toks) != 1 or toks[0].text not in ("flat", "notflat"):
            kw = raw["expect"][0]
            raise SemanticError("expect must be 'flat' or 'notflat'", kw.line, kw.col)
        expect = toks[0].text

    first_torsion: int | None | str = "unset"
    if "first_torsion" in raw:
        sub = _Parser(raw["first_torsion"][1])
        sub.accept(":")
        if sub.tok.kind == "num":
            first_torsion = int(sub.advance().text)
        elif sub.accept("none"):
            first_torsion = None
        else:
            sub.error("expected an integer or 'none'")
        if sub.tok.kind != "eof":
            sub.error("unexpected trailing input")

    oracle = None
    if "oracle" in raw:
        sub = _Parser(raw["oracle"][1])
        sub.accept(":")
        vals = []
        while sub.tok.kind == "num":
            vals.append(int(sub.advance().text))
            sub.accept(",")
        if len(vals) != 2 or sub.tok.kind != "eof":
            kw = raw["oracle"][0]
            raise SemanticError("oracle takes two integers: witness and multiplier degree",
                                kw.line, kw.col)
        oracle = (vals[0], vals[1])

    tags = frozenset(t.text for t in names("tags"))

    return ProblemFile(base, fiber, ring, tuple(ideal), rank, tuple(rows), points, expect,
                       first_torsion, oracle, tags, name)
