"""Exact multivariate polynomials over QQ on an explicit variable universe.

A :class:`Ring` is an immutable, ordered tuple of :class:`Variable` objects.
Every :class:`Polynomial` is bound to one ring and stores a sparse map from
exponent tuples (one entry per ring variable) to nonzero rationals.
Coefficients are ``gmpy2.mpq`` values.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

import gmpy2

QQ = gmpy2.mpq

Exponent = tuple  # tuple[int, ...], one entry per ring variable

BASE = "base"
FIBER = "fiber"
AUX = "aux"


def rational(value) -> "gmpy2.mpq":
    """Coerce ``value`` (int, Fraction, mpq, or a string like ``"3/2"``) to mpq."""
    if isinstance(value, type(QQ())):
        return value
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    if isinstance(value, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(value, (int, str)):
        return QQ(value)
    if isinstance(value, gmpy2.mpz().__class__):
        return QQ(value)
    raise TypeError(f"cannot use {type(value).__name__} as an exact coefficient")


def format_rational(c) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


@dataclass(frozen=True)
class Variable:
    """A named indeterminate; ``kind`` is base, fiber, or aux and ``copy`` numbers fiber blocks."""

    name: str
    kind: str = FIBER
    copy: int = 0

    def __post_init__(self):
        if self.kind not in (BASE, FIBER, AUX):
            raise ValueError(f"unknown variable kind {self.kind!r}")
        if self.kind == FIBER and self.copy < 0:
            raise ValueError("fiber copy index must be non-negative")


@dataclass(frozen=True)
class Ring:
    """Polynomial ring QQ[v1..vk] over an immutable variable universe."""

    variables: tuple[Variable, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")

    @classmethod
    def from_names(cls, names: Iterable[str], kind: str = FIBER, copy: int = 0) -> "Ring":
        return cls(tuple(Variable(n, kind, copy) for n in names))

    @cached_property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    @cached_property
    def _index(self) -> dict[str, int]:
        return {n: i for i, n in enumerate(self.names)}

    @property
    def ngens(self) -> int:
        return len(self.variables)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"variable {name!r} is not in ring {self.names}") from None

    def __contains__(self, name) -> bool:
        return name in self._index

    def names_of(self, kind: str, copy: int | None = None) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables
                     if v.kind == kind and (copy is None or v.copy == copy))

    def indices_of(self, names: Iterable[str]) -> tuple[int, ...]:
        return tuple(self.index(n) for n in names)

    def extend(self, *variables: Variable) -> "Ring":
        return Ring(self.variables + tuple(variables))

    def subring(self, names: Iterable[str]) -> "Ring":
        """The ring on ``names``, keeping this ring's variable order."""
        keep = set(names)
        return Ring(tuple(v for v in self.variables if v.name in keep))

    def fresh_name(self, stem: str) -> str:
        name = stem
        while name in self:
            name += "_"
        return name

    # constructors
    @property
    def zero(self) -> "Polynomial":
        return Polynomial(self)

    @property
    def one(self) -> "Polynomial":
        return Polynomial.constant(self, 1)

    def var(self, name: str) -> "Polynomial":
        return Polynomial.variable(self, name)

    def gens(self) -> tuple["Polynomial", ...]:
        return tuple(self.var(n) for n in self.names)

    def __call__(self, value) -> "Polynomial":
        """Coerce a number, polynomial string, or same-ring polynomial into this ring."""
        if isinstance(value, Polynomial):
            if value.ring == self:
                return value
            return value.to_ring(self)
        if isinstance(value, str):
            from .parsing import parse_polynomial

            return parse_polynomial(value, self)
        return Polynomial.constant(self, value)

    def __repr__(self):
        return f"Ring({', '.join(self.names)})"

    @cached_property
    def default_order(self) -> "MonomialOrder":
        return MonomialOrder.grevlex(self.ngens)


def _add_exp(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x + y for x, y in zip(a, b))


class Polynomial:
    """Immutable sparse polynomial; ``terms`` maps exponent tuples to nonzero mpq."""

    __slots__ = ("ring", "_terms", "_hash")

    def __init__(self, ring: Ring, terms: Mapping[Exponent, object] | None = None):
        self.ring = ring
        clean = {}
        n = ring.ngens
        for exp, c in (terms or {}).items():
            exp = tuple(exp)
            if len(exp) != n or any(e < 0 for e in exp):
                raise ValueError(f"bad exponent {exp} for ring with {n} variables")
            c = rational(c)
            if c:
                clean[exp] = clean.get(exp, 0) + c
                if not clean[exp]:
                    del clean[exp]
        self._terms = clean
        self._hash = None

    @classmethod
    def _from_clean(cls, ring: Ring, terms: dict) -> "Polynomial":
        # trusted path: exponents valid, coefficients nonzero mpq
        p = cls.__new__(cls)
        p.ring = ring
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def constant(cls, ring: Ring, c) -> "Polynomial":
        c = rational(c)
        return cls._from_clean(ring, {(0,) * ring.ngens: c} if c else {})

    @classmethod
    def variable(cls, ring: Ring, name: str) -> "Polynomial":
        i = ring.index(name)
        exp = tuple(1 if j == i else 0 for j in range(ring.ngens))
        return cls._from_clean(ring, {exp: QQ(1)})

    # inspection
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and not any(next(iter(self._terms))))

    def constant_term(self):
        return self._terms.get((0,) * self.ring.ngens, QQ(0))

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def variables_used(self) -> frozenset[str]:
        used = set()
        for exp in self._terms:
            used.update(self.ring.names[i] for i, e in enumerate(exp) if e)
        return frozenset(used)

    def lead(self, order: "MonomialOrder | None" = None):
        """(exponent, coefficient) of the leading term under ``order``."""
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        order = order or self.ring.default_order
        exp = max(self._terms, key=order.key)
        return exp, self._terms[exp]

    def monic(self, order: "MonomialOrder | None" = None) -> "Polynomial":
        if not self._terms:
            return self
        _, c = self.lead(order)
        return self.scale(1 / c)

    # arithmetic
    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.ring is not self.ring and other.ring != self.ring:
                raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}")
            return other
        return Polynomial.constant(self.ring, other)

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for exp, c in other._terms.items():
            v = out.get(exp)
            if v is None:
                out[exp] = c
            else:
                v = v + c
                if v:
                    out[exp] = v
                else:
                    del out[exp]
        return Polynomial._from_clean(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._from_clean(self.ring, {e: -c for e, c in self._terms.items()})

    def __pos__(self):
        return self

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Polynomial":
        c = rational(c)
        if not c:
            return Polynomial(self.ring)
        return Polynomial._from_clean(self.ring, {e: c * v for e, v in self._terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            try:
                return self.scale(other)
            except TypeError:
                return NotImplemented
        other = self._coerce(other)
        out: dict = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = _add_exp(e1, e2)
                v = out.get(e, 0) + c1 * c2
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return Polynomial._from_clean(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result, base = self.ring.one, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def mul_term(self, exp: Exponent, c) -> "Polynomial":
        """Multiply by the single term ``c * x^exp``."""
        c = rational(c)
        if not c:
            return Polynomial(self.ring)
        return Polynomial._from_clean(
            self.ring, {_add_exp(e, exp): c * v for e, v in self._terms.items()})

    # substitution
    def evaluate(self, assignment: Mapping[str, object]) -> "Polynomial":
        """Substitute rationals for a subset of variables; the ring is unchanged."""
        values = {self.ring.index(name): rational(v) for name, v in assignment.items()}
        out: dict = {}
        for exp, c in self._terms.items():
            e = list(exp)
            for i, v in values.items():
                if e[i]:
                    c = c * v ** e[i]
                    e[i] = 0
            if c:
                e = tuple(e)
                s = out.get(e, 0) + c
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return Polynomial._from_clean(self.ring, out)

    def substitute(self, images: Mapping[str, "Polynomial"]) -> "Polynomial":
        """Replace variables by polynomials of the same ring (simultaneously)."""
        idx = {self.ring.index(name): self._coerce(q) for name, q in images.items()}
        powers: dict = {}
        result = Polynomial(self.ring)
        for exp, c in self._terms.items():
            keep = tuple(0 if i in idx else e for i, e in enumerate(exp))
            term = Polynomial._from_clean(self.ring, {keep: c})
            for i, q in idx.items():
                if exp[i]:
                    key = (i, exp[i])
                    if key not in powers:
                        powers[key] = q ** exp[i]
                    term = term * powers[key]
            result = result + term
        return result

    def to_ring(self, ring: Ring, rename: Mapping[str, str] | None = None) -> "Polynomial":
        """Re-express in ``ring``, mapping variables by name (optionally renamed)."""
        rename = rename or {}
        target = []
        for i, name in enumerate(self.ring.names):
            new = rename.get(name, name)
            target.append(ring._index.get(new))
        out: dict = {}
        for exp, c in self._terms.items():
            e = [0] * ring.ngens
            for i, k in enumerate(exp):
                if k:
                    j = target[i]
                    if j is None:
                        raise ValueError(
                            f"variable {self.ring.names[i]!r} does not exist in {ring}")
                    e[j] += k
            e = tuple(e)
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Polynomial._from_clean(ring, out)

    # comparison and display
    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ring == other.ring and self._terms == other._terms
        try:
            return self == Polynomial.constant(self.ring, other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self._terms.items())))
        return self._hash

    def sorted_terms(self, order: "MonomialOrder | None" = None) -> list:
        order = order or self.ring.default_order
        return sorted(self._terms.items(), key=lambda t: order.key(t[0]), reverse=True)

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for exp, c in self.sorted_terms():
            mono = "*".join(
                name if e == 1 else f"{name}^{e}"
                for name, e in zip(self.ring.names, exp) if e)
            mag = abs(c)
            if not mono:
                body = format_rational(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{format_rational(mag)}*{mono}"
            if not parts:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append(("- " if c < 0 else "+ ") + body)
        return " ".join(parts)

    def __repr__(self):
        return f"Polynomial({str(self)!r})"


class MonomialOrder:
    """A matrix monomial order, optionally extended to free modules.

    ``rows`` is a weight matrix; a term's key is the tuple of row products.
    For module terms the component enters the key as ``-component`` after the
    first ``position`` rows, so ``position=0`` is position-over-term with
    component 0 greatest.
    """

    __slots__ = ("rows", "position", "label", "_sparse", "_n")

    def __init__(self, rows: Sequence[Sequence[int]], position: int = 0, label: str = "matrix"):
        self.rows = tuple(tuple(int(w) for w in r) for r in rows)
        n = len(self.rows[0]) if self.rows else 0
        if any(len(r) != n for r in self.rows):
            raise ValueError("ragged weight matrix")
        if not 0 <= position <= len(self.rows):
            raise ValueError("position out of range")
        self.position = position
        self.label = label
        self._n = n
        self._sparse = tuple(tuple((i, w) for i, w in enumerate(r) if w) for r in self.rows)

    @property
    def nvars(self) -> int:
        return self._n

    def key(self, exp: Exponent, comp: int = 0) -> tuple:
        vals = [sum(w * exp[i] for i, w in row) for row in self._sparse]
        vals.insert(self.position, -comp)
        return tuple(vals)

    def term_key(self, term) -> tuple:
        comp, exp = term
        return self.key(exp, comp)

    def compare(self, a: Exponent, b: Exponent, comp_a: int = 0, comp_b: int = 0) -> int:
        ka, kb = self.key(a, comp_a), self.key(b, comp_b)
        return (ka > kb) - (ka < kb)

    def with_position(self, position: int) -> "MonomialOrder":
        return MonomialOrder(self.rows, position, self.label)

    def __eq__(self, other):
        return (isinstance(other, MonomialOrder) and self.rows == other.rows
                and self.position == other.position)

    def __hash__(self):
        return hash((self.rows, self.position))

    def __repr__(self):
        return f"MonomialOrder({self.label}, position={self.position})"

    # constructors
    @staticmethod
    def _block_rows(n: int, idx: Sequence[int], kind: str) -> list[list[int]]:
        rows = []
        if kind == "lex":
            for i in idx:
                r = [0] * n
                r[i] = 1
                rows.append(r)
        elif kind == "grevlex":
            if not idx:
                return rows
            r = [0] * n
            for i in idx:
                r[i] = 1
            rows.append(r)
            for i in reversed(idx[1:]):
                r = [0] * n
                r[i] = -1
                rows.append(r)
        else:
            raise ValueError(f"unknown inner order {kind!r}")
        return rows

    @classmethod
    def lex(cls, n: int) -> "MonomialOrder":
        return cls(cls._block_rows(n, range(n), "lex"), 0, "lex") if n else cls((), 0, "lex")

    @classmethod
    def grevlex(cls, n: int) -> "MonomialOrder":
        return cls(cls._block_rows(n, list(range(n)), "grevlex"), 0, "grevlex") if n \
            else cls((), 0, "grevlex")

    @classmethod
    def block(cls, n: int, blocks: Sequence[tuple[Sequence[int], str]],
              position: int | None = 0) -> "MonomialOrder":
        """Block order: earlier blocks dominate; unlisted variables are not allowed.

        ``position`` counts the blocks compared before the module component;
        ``None`` puts the component last (term-over-position).
        """
        seen = [i for idx, _ in blocks for i in idx]
        if sorted(seen) != list(range(n)):
            raise ValueError("blocks must partition the variables")
        rows: list = []
        pos_row = None
        for b, (idx, kind) in enumerate(blocks):
            if position is not None and b == position:
                pos_row = len(rows)
            rows.extend(cls._block_rows(n, list(idx), kind))
        if pos_row is None:
            pos_row = len(rows)
        label = "block(" + ", ".join(f"{len(idx)}:{kind}" for idx, kind in blocks) + ")"
        return cls(rows, pos_row, label)


def monomial_divides(a: Exponent, b: Exponent) -> bool:
    return all(x <= y for x, y in zip(a, b))


def monomial_lcm(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x if x > y else y for x, y in zip(a, b))
