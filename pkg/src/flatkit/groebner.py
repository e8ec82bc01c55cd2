"""Buchberger's algorithm for ideals and submodules of free modules.

Module elements are handled internally as sparse dicts ``{(component, exponent): mpq}``.
Orders are :class:`~flatkit.poly.MonomialOrder` matrix orders; the component
enters through the order's ``position`` row, so position-over-term,
term-over-position and "eliminate these variables first" orders all go through
the same engine.

Besides the engine this module provides the derived operations used by the
rest of the package: normal forms, membership, elimination, intersection,
colon ideals, saturation and Krull dimension.
"""
from __future__ import annotations

import contextvars
import heapq
import os
import time
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import Iterable, Sequence, Union

from .poly import (AUX, QQ, MonomialOrder, Polynomial, Ring, Variable, monomial_divides,
                   monomial_lcm, rational)

EMPTY_DIMENSION = -1
"""Krull dimension reported for the unit ideal (empty variety)."""


class ResourceExceeded(RuntimeError):
    """A computation hit one of its :class:`ResourceLimits`; no answer was produced."""

    def __init__(self, reason: str, stats: dict | None = None):
        super().__init__(reason)
        self.reason = reason
        self.stats = dict(stats or {})


@dataclass(frozen=True)
class ResourceLimits:
    max_degree: int = 40
    max_basis: int = 5000
    max_pairs: int = 200_000
    timeout: float = 60.0
    deadline: float | None = None

    def __post_init__(self):
        for name in ("max_degree", "max_basis", "max_pairs", "timeout"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    def started(self) -> "ResourceLimits":
        """Fix the wall-clock deadline if it is not running yet."""
        if self.deadline is not None:
            return self
        return replace(self, deadline=time.monotonic() + self.timeout)

    def check_time(self, stats: dict | None = None):
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise ResourceExceeded(f"wall-clock budget of {self.timeout:g}s exhausted", stats)

    @classmethod
    def from_env(cls, **overrides) -> "ResourceLimits":
        """Defaults, with ``FLATKIT_TIMEOUT`` as the fallback wall-clock budget."""
        env = os.environ.get("FLATKIT_TIMEOUT")
        if env and overrides.get("timeout") is None:
            overrides["timeout"] = float(env)
        return cls(**{k: v for k, v in overrides.items() if v is not None})


def _start(limits: ResourceLimits | None) -> ResourceLimits:
    return (limits or ResourceLimits()).started()


# engine statistics are accumulated into whichever collector is active
_collector: contextvars.ContextVar = contextvars.ContextVar("flatkit_stats", default=None)


@contextmanager
def collect_stats():
    """Accumulate Buchberger statistics from every basis computed inside the block."""
    stats = {"bases": 0, "pairs": 0, "zero_reductions": 0, "max_basis_size": 0,
             "max_degree": 0}
    token = _collector.set(stats)
    try:
        yield stats
    finally:
        _collector.reset(token)


def _record(run: dict):
    stats = _collector.get()
    if stats is None:
        return
    stats["bases"] += 1
    stats["pairs"] += run["pairs"]
    stats["zero_reductions"] += run["zero_reductions"]
    stats["max_basis_size"] = max(stats["max_basis_size"], run["size"])
    stats["max_degree"] = max(stats["max_degree"], run["max_degree"])


class Vector:
    """An element of the free module S^rank, stored as a tuple of polynomials."""

    __slots__ = ("entries", "_hash")

    def __init__(self, entries: Sequence[Polynomial]):
        entries = tuple(entries)
        if not entries:
            raise ValueError("a vector needs rank >= 1")
        ring = entries[0].ring
        if any(e.ring != ring for e in entries):
            raise ValueError("vector entries live in different rings")
        self.entries = entries
        self._hash = None

    @classmethod
    def zero(cls, ring: Ring, rank: int) -> "Vector":
        return cls([ring.zero] * rank)

    @classmethod
    def unit(cls, ring: Ring, rank: int, i: int) -> "Vector":
        return cls([ring.one if j == i else ring.zero for j in range(rank)])

    @classmethod
    def from_terms(cls, ring: Ring, rank: int, terms: dict) -> "Vector":
        parts: list[dict] = [{} for _ in range(rank)]
        for (comp, exp), c in terms.items():
            parts[comp][exp] = c
        return cls([Polynomial._from_clean(ring, p) for p in parts])

    @property
    def ring(self) -> Ring:
        return self.entries[0].ring

    @property
    def rank(self) -> int:
        return len(self.entries)

    def terms(self) -> dict:
        return {(i, exp): c for i, p in enumerate(self.entries) for exp, c in p.items()}

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self.entries)

    def __bool__(self):
        return not self.is_zero()

    def __getitem__(self, i):
        return self.entries[i]

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def _check(self, other: "Vector"):
        if not isinstance(other, Vector) or other.rank != self.rank:
            raise ValueError("rank mismatch")

    def __add__(self, other):
        self._check(other)
        return Vector([a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other):
        self._check(other)
        return Vector([a - b for a, b in zip(self.entries, other.entries)])

    def __neg__(self):
        return Vector([-a for a in self.entries])

    def __mul__(self, scalar):
        if isinstance(scalar, Vector):
            return NotImplemented
        return Vector([a * scalar for a in self.entries])

    __rmul__ = __mul__

    def evaluate(self, assignment) -> "Vector":
        return Vector([a.evaluate(assignment) for a in self.entries])

    def to_ring(self, ring: Ring, rename=None) -> "Vector":
        return Vector([a.to_ring(ring, rename) for a in self.entries])

    def degree(self) -> int:
        return max(p.degree() for p in self.entries)

    def variables_used(self) -> frozenset:
        return frozenset().union(*(p.variables_used() for p in self.entries))

    def __eq__(self, other):
        return isinstance(other, Vector) and self.entries == other.entries

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.entries)
        return self._hash

    def __str__(self):
        return "[" + ", ".join(str(p) for p in self.entries) + "]"

    def __repr__(self):
        return f"Vector({str(self)})"


Element = Union[Polynomial, Vector]
FreeModuleVector = Vector


def _normalize(gens: Iterable[Element], ring: Ring | None = None, rank: int | None = None):
    """Return (ring, rank, is_ideal, list of term dicts) for polynomials or vectors."""
    gens = list(gens)
    is_ideal = None
    dicts = []
    for g in gens:
        if isinstance(g, Polynomial):
            if is_ideal is False:
                raise ValueError("cannot mix polynomials and vectors")
            is_ideal = True
            r, k = g.ring, 1
            terms = {(0, e): c for e, c in g.items()}
        elif isinstance(g, Vector):
            if is_ideal is True:
                raise ValueError("cannot mix polynomials and vectors")
            is_ideal = False
            r, k = g.ring, g.rank
            terms = g.terms()
        else:
            raise TypeError(f"expected Polynomial or Vector, got {type(g).__name__}")
        if ring is None:
            ring = r
        elif r != ring:
            raise ValueError(f"ring mismatch: {r} vs {ring}")
        if rank is None:
            rank = k
        elif k != rank:
            raise ValueError(f"rank mismatch: {k} vs {rank}")
        dicts.append(terms)
    if is_ideal is None:
        is_ideal = rank in (None, 1)
    return ring, rank, is_ideal, dicts


def _wrap(ring: Ring, rank: int, is_ideal: bool, terms: dict) -> Element:
    if is_ideal:
        return Polynomial._from_clean(ring, {e: c for (_, e), c in terms.items()})
    return Vector.from_terms(ring, rank, terms)


class _Elem:
    __slots__ = ("terms", "comp", "lexp", "lc", "tail", "deg", "sugar")

    def __init__(self, terms: dict, lead, sugar: int | None = None):
        self.terms = terms
        self.comp, self.lexp = lead
        self.lc = terms[lead]
        self.tail = [(c, e, a) for (c, e), a in terms.items() if (c, e) != lead]
        self.deg = sum(self.lexp)
        self.sugar = max(sum(e) for _, e in terms) if sugar is None else sugar


class _Keys:
    """Per-run memo of negated order keys, so heapq pops the greatest term first."""

    def __init__(self, order: MonomialOrder):
        self.order = order
        self.cache: dict = {}

    def neg(self, term):
        k = self.cache.get(term)
        if k is None:
            comp, exp = term
            k = tuple(-v for v in self.order.key(exp, comp))
            self.cache[term] = k
        return k

    def lead(self, terms: dict):
        return min(terms, key=self.neg)


def _reducer(by_comp: dict, term):
    comp, exp = term
    for g in by_comp.get(comp, ()):
        lexp = g.lexp
        for a, b in zip(exp, lexp):
            if a < b:
                break
        else:
            return g
    return None


def _reduce(p: dict, by_comp: dict, keys: _Keys, limits: ResourceLimits | None = None,
            stats: dict | None = None) -> dict:
    """Full normal form of ``p`` (consumed) modulo monic elements indexed by component."""
    neg = keys.neg
    heap = [(neg(t), t) for t in p]
    heapq.heapify(heap)
    rem = {}
    steps = 0
    while heap:
        _, t = heapq.heappop(heap)
        c = p.pop(t, None)
        if c is None:
            continue
        g = _reducer(by_comp, t)
        if g is None:
            rem[t] = c
            continue
        steps += 1
        if limits is not None and not steps & 15:
            limits.check_time(stats)
        shift = tuple(a - b for a, b in zip(t[1], g.lexp))
        for comp, exp, a in g.tail:
            nt = (comp, tuple(x + y for x, y in zip(exp, shift)))
            v = p.get(nt)
            if v is None:
                p[nt] = -c * a
                heapq.heappush(heap, (neg(nt), nt))
            else:
                v = v - c * a
                if v:
                    p[nt] = v
                else:
                    del p[nt]
    return rem


def _monic(terms: dict, keys: _Keys) -> tuple[dict, tuple]:
    lead = keys.lead(terms)
    inv = 1 / terms[lead]
    if inv != 1:
        terms = {t: c * inv for t, c in terms.items()}
    return terms, lead


def _spoly(f: _Elem, g: _Elem) -> dict:
    lcm = monomial_lcm(f.lexp, g.lexp)
    sf = tuple(a - b for a, b in zip(lcm, f.lexp))
    sg = tuple(a - b for a, b in zip(lcm, g.lexp))
    out: dict = {}
    for comp, exp, a in f.tail:
        out[(comp, tuple(x + y for x, y in zip(exp, sf)))] = a
    for comp, exp, a in g.tail:
        t = (comp, tuple(x + y for x, y in zip(exp, sg)))
        v = out.get(t, 0) - a
        if v:
            out[t] = v
        else:
            out.pop(t, None)
    return out


class GroebnerBasis:
    """A reduced Gröbner basis of a submodule of S^rank (rank 1 = ideal)."""

    def __init__(self, ring: Ring, rank: int, order: MonomialOrder, elems: list[_Elem],
                 is_ideal: bool = True, stats: dict | None = None):
        self.ring = ring
        self.rank = rank
        self.order = order
        self.is_ideal = is_ideal
        self.reduced = True
        self._elems = elems
        self._keys = _Keys(order)
        self._by_comp: dict = {}
        for g in elems:
            self._by_comp.setdefault(g.comp, []).append(g)
        self.stats = dict(stats or {})

    @property
    def elements(self) -> tuple:
        return tuple(_wrap(self.ring, self.rank, self.is_ideal, g.terms) for g in self._elems)

    gens = elements

    def __len__(self):
        return len(self._elems)

    def __iter__(self):
        return iter(self.elements)

    def leads(self) -> list[tuple[int, tuple]]:
        return [(g.comp, g.lexp) for g in self._elems]

    def is_unit(self) -> bool:
        """True when the submodule is the whole free module."""
        zero = (0,) * self.ring.ngens
        comps = {g.comp for g in self._elems if g.lexp == zero}
        return len(comps) == self.rank

    def is_zero(self) -> bool:
        return not self._elems

    def _terms_of(self, v: Element) -> dict:
        ring, rank, _, (terms,) = _normalize([v])
        if ring != self.ring or rank != self.rank:
            raise ValueError("element does not live in the basis' free module")
        return terms

    def reduce(self, v: Element, limits: ResourceLimits | None = None) -> Element:
        rem = _reduce(self._terms_of(v), self._by_comp, self._keys, limits)
        return _wrap(self.ring, self.rank, isinstance(v, Polynomial), rem)

    def contains(self, v: Element) -> bool:
        return not _reduce(self._terms_of(v), self._by_comp, self._keys)

    def __contains__(self, v):
        return self.contains(v)

    def contains_all(self, vs: Iterable[Element]) -> bool:
        return all(self.contains(v) for v in vs)

    def __eq__(self, other):
        if not isinstance(other, GroebnerBasis):
            return NotImplemented
        return (self.ring == other.ring and self.rank == other.rank
                and self.order == other.order
                and [g.terms for g in self._elems] == [g.terms for g in other._elems])

    def __repr__(self):
        return f"GroebnerBasis({[str(g) for g in self.elements]})"


def buchberger(gens: Iterable[Element], order: MonomialOrder | None = None,
               limits: ResourceLimits | None = None, *, ring: Ring | None = None,
               rank: int | None = None) -> GroebnerBasis:
    """Reduced Gröbner basis of the submodule generated by ``gens``.

    Pairs are selected by sugar degree (the normal strategy's degree with the
    homogenisation degree tracked through reductions), ties broken by the
    smallest lcm in the order. Redundant pairs are discarded with the
    Gebauer–Möller criteria; the coprime-leads criterion is used for ideals
    only, since it does not hold for modules.
    """
    gens = list(gens)
    ring0, rank0, is_ideal, dicts = _normalize(gens, ring, rank)
    ring = ring0 if ring0 is not None else ring
    rank = rank0 if rank0 is not None else (rank or 1)
    if ring is None:
        raise ValueError("empty generator list needs an explicit ring")
    order = order or ring.default_order
    if order.nvars != ring.ngens:
        raise ValueError("order does not match the ring's variable count")
    limits = _start(limits)
    keys = _Keys(order)
    ideal_case = rank == 1

    elems: list[_Elem] = []
    active: list[int] = []
    by_comp: dict = {}
    pairs: list = []
    counter = 0
    run = {"pairs": 0, "zero_reductions": 0, "size": 0, "max_degree": 0}

    def rebuild_index():
        by_comp.clear()
        for i in active:
            g = elems[i]
            by_comp.setdefault(g.comp, []).append(g)

    def lcm_of(i, j):
        return monomial_lcm(elems[i].lexp, elems[j].lexp)

    def update(terms: dict, sugar: int | None = None):
        nonlocal counter, pairs, active
        terms, lead = _monic(terms, keys)
        h = _Elem(terms, lead, sugar)
        hi = len(elems)
        elems.append(h)
        # new pairs with same-component active elements
        cands = []
        for i in active:
            g = elems[i]
            if g.comp != h.comp:
                continue
            lcm = monomial_lcm(g.lexp, h.lexp)
            coprime = ideal_case and all(a == 0 or b == 0 for a, b in zip(g.lexp, h.lexp))
            cands.append((i, lcm, coprime))
        kept = []
        for n, (i, lcm, coprime) in enumerate(cands):
            if coprime:
                kept.append((i, lcm, coprime))
                continue
            dominated = False
            for m, (j, lcm2, _) in enumerate(cands):
                if m == n:
                    continue
                if monomial_divides(lcm2, lcm) and (lcm2 != lcm or m < n):
                    dominated = True
                    break
            if not dominated:
                kept.append((i, lcm, coprime))
        # drop pairs whose lcm equals a coprime pair's lcm, then the coprime pairs
        coprime_lcms = {lcm for _, lcm, cp in kept if cp}
        new_pairs = [(i, lcm) for i, lcm, cp in kept if not cp and lcm not in coprime_lcms]
        # chain criterion on old pairs
        survivors = []
        for entry in pairs:
            i, j = entry[3], entry[4]
            gi, gj = elems[i], elems[j]
            if gi.comp == h.comp:
                lcm = monomial_lcm(gi.lexp, gj.lexp)
                if (monomial_divides(h.lexp, lcm)
                        and monomial_lcm(gi.lexp, h.lexp) != lcm
                        and monomial_lcm(gj.lexp, h.lexp) != lcm):
                    continue
            survivors.append(entry)
        for i, lcm in new_pairs:
            counter += 1
            d = sum(lcm)
            g = elems[i]
            sugar = max(g.sugar + d - g.deg, h.sugar + d - h.deg)
            survivors.append((sugar, order.key(lcm, h.comp), counter, i, hi, d))
        # smallest sugar first, then smallest lcm in the order
        pairs = survivors
        heapq.heapify(pairs)
        if len(pairs) > limits.max_pairs:
            raise ResourceExceeded(f"pair queue exceeded {limits.max_pairs}", run)
        active = [i for i in active
                  if not (elems[i].comp == h.comp and monomial_divides(h.lexp, elems[i].lexp))]
        active.append(hi)
        if len(active) > limits.max_basis:
            raise ResourceExceeded(f"basis size exceeded {limits.max_basis}", run)
        run["size"] = max(run["size"], len(active))
        rebuild_index()

    # insert generators, smallest leads first
    start = []
    for d in dicts:
        if d:
            start.append(d)
    start.sort(key=lambda d: order.term_key(keys.lead(d)))
    for d in start:
        limits.check_time(run)
        r = _reduce(dict(d), by_comp, keys, limits, run)
        if r:
            update(r)

    while pairs:
        limits.check_time(run)
        sugar, _, _, i, j, deg = heapq.heappop(pairs)
        if deg > limits.max_degree:
            raise ResourceExceeded(f"degree bound {limits.max_degree} exceeded", run)
        run["pairs"] += 1
        run["max_degree"] = max(run["max_degree"], deg)
        s = _spoly(elems[i], elems[j])
        r = _reduce(s, by_comp, keys, limits, run)
        if r:
            update(r, sugar)
        else:
            run["zero_reductions"] += 1

    # interreduce into the reduced basis
    final = [elems[i] for i in active]
    final = [g for g in final
             if not any(h is not g and h.comp == g.comp and monomial_divides(h.lexp, g.lexp)
                        for h in final)]
    reduced = []
    for g in final:
        others: dict = {}
        for h in final:
            if h is not g:
                others.setdefault(h.comp, []).append(h)
        terms = _reduce(dict(g.terms), others, keys, limits, run)
        terms, lead = _monic(terms, keys)
        reduced.append(_Elem(terms, lead))
    reduced.sort(key=lambda g: keys.neg((g.comp, g.lexp)))
    run["size"] = max(run["size"], len(reduced))
    _record(run)
    return GroebnerBasis(ring, rank, order, reduced, is_ideal, run)


groebner_basis = buchberger


def normal_form(v: Element, G: GroebnerBasis) -> Element:
    return G.reduce(v)


def membership(v: Element, gens: Iterable[Element] | GroebnerBasis,
               limits: ResourceLimits | None = None) -> bool:
    """True iff ``v`` lies in the submodule generated by ``gens``."""
    if isinstance(gens, GroebnerBasis):
        return gens.contains(v)
    ring, rank, _, (terms,) = _normalize([v])
    if not terms:
        return True
    return buchberger(gens, limits=limits, ring=ring, rank=rank).contains(v)


def s_vectors(G: GroebnerBasis) -> list[Element]:
    """All S-vectors of pairs of basis elements with equal lead components."""
    out = []
    for f, g in combinations(G._elems, 2):
        if f.comp == g.comp:
            out.append(_wrap(G.ring, G.rank, G.is_ideal, _spoly(f, g)))
    return out


def _elimination_order(ring: Ring, kill: Sequence[str]) -> MonomialOrder:
    kill_idx = ring.indices_of(kill)
    rest = [i for i in range(ring.ngens) if i not in set(kill_idx)]
    blocks = [(list(kill_idx), "grevlex"), (rest, "grevlex")]
    return MonomialOrder.block(ring.ngens, [b for b in blocks if b[0]],
                               position=1 if kill_idx else 0)


def eliminate(gens: Iterable[Element], kill: Iterable[str],
              limits: ResourceLimits | None = None, *, ring: Ring | None = None,
              rank: int | None = None) -> list[Element]:
    """Generators of the submodule's intersection with the free module over the kept variables.

    The result lives in the subring on the remaining variables and is the
    reduced Gröbner basis there (grevlex, position-over-term).
    """
    gens = list(gens)
    ring0, rank0, is_ideal, _ = _normalize(gens, ring, rank)
    ring = ring0 or ring
    rank = rank0 or rank or 1
    kill = [k for k in kill]
    for k in kill:
        ring.index(k)
    order = _elimination_order(ring, kill)
    G = buchberger(gens, order, limits, ring=ring, rank=rank)
    killed = set(ring.indices_of(kill))
    sub = ring.subring(n for n in ring.names if n not in set(kill))
    out = []
    for g in G._elems:
        if any(e[i] for (_, e) in g.terms for i in killed):
            continue
        out.append(_wrap(ring, rank, is_ideal, g.terms).to_ring(sub))
    return out


def _embed(v: Element, rank: int, offset: int, ring: Ring) -> Vector:
    """Place ``v`` (polynomial or vector) into S^rank starting at ``offset``."""
    entries = [ring.zero] * rank
    items = [v] if isinstance(v, Polynomial) else list(v.entries)
    for i, p in enumerate(items):
        entries[offset + i] = p
    return Vector(entries)


def intersect(N1: Iterable[Element], N2: Iterable[Element],
              limits: ResourceLimits | None = None, *, ring: Ring | None = None,
              rank: int | None = None) -> list[Element]:
    """Generators of N1 ∩ N2 (reduced Gröbner basis, default order).

    Uses the submodule of S^(2b) generated by (n1, 0) and (n2, n2): its
    elements with vanishing first block are exactly (0, w) with w in N1 ∩ N2.
    """
    N1, N2 = list(N1), list(N2)
    ring0, rank0, is_ideal, _ = _normalize(N1 + N2, ring, rank)
    ring = ring0 or ring
    rank = rank0 or rank or 1
    limits = _start(limits)
    gens = [_embed(v, 2 * rank, 0, ring) for v in N1]
    gens += [_embed(v, 2 * rank, 0, ring) + _embed(v, 2 * rank, rank, ring) for v in N2]
    if not gens:
        return []
    G = buchberger(gens, ring.default_order, limits)
    out = []
    for g in G._elems:
        if g.comp >= rank:
            terms = {(c - rank, e): a for (c, e), a in g.terms.items()}
            out.append(_wrap(ring, rank, is_ideal, terms))
    return _reduced_gens(out, ring, rank, is_ideal, limits)


def _reduced_gens(gens, ring, rank, is_ideal, limits) -> list[Element]:
    if not gens:
        return []
    return list(buchberger(gens, ring.default_order, limits, ring=ring, rank=rank).elements)


def colon(N: Iterable[Element], m: Element, limits: ResourceLimits | None = None,
          *, ring: Ring | None = None) -> list[Polynomial]:
    """Generators of the ideal (N : m) = {s : s*m in N}.

    Works in S^(b+1) with generators (m, 1) and (n, 0); under position-over-term
    with the first b components dominant, basis elements led by the last
    component carry exactly the multipliers s.
    """
    N = list(N)
    ring0, rank, _, _ = _normalize(N + [m], ring)
    ring = ring0
    limits = _start(limits)
    gens = [_embed(m, rank + 1, 0, ring) + Vector.unit(ring, rank + 1, rank)]
    gens += [_embed(v, rank + 1, 0, ring) for v in N]
    G = buchberger(gens, ring.default_order, limits)
    out = []
    for g in G._elems:
        if g.comp == rank:
            out.append(Polynomial._from_clean(ring, {e: a for (_, e), a in g.terms.items()}))
    return out


def module_quotient(N: Iterable[Element], h: Polynomial, limits: ResourceLimits | None = None,
                    *, rank: int | None = None) -> list[Element]:
    """Generators of (N :_{S^b} h) = {v : h*v in N}, via N ∩ h*S^b divided by h."""
    N = list(N)
    ring = h.ring
    _, rank0, is_ideal, _ = _normalize(N, ring, rank)
    rank = rank0 or rank or 1
    if is_ideal and rank == 1 and all(isinstance(v, Polynomial) for v in N):
        hS = [h]
    else:
        hS = [Vector.unit(ring, rank, i) * h for i in range(rank)]
        is_ideal = False
    meet = intersect(N, hS, limits, ring=ring, rank=rank)
    out = []
    for w in meet:
        out.append(_exact_divide(w, h))
    return _reduced_gens(out, ring, rank, is_ideal, _start(limits))


def _exact_divide(w: Element, h: Polynomial) -> Element:
    if isinstance(w, Polynomial):
        return _divide_poly(w, h)
    return Vector([_divide_poly(p, h) for p in w.entries])


def _divide_poly(p: Polynomial, h: Polynomial) -> Polynomial:
    """Exact division p / h (raises if h does not divide p)."""
    order = p.ring.default_order
    hexp, hc = h.lead(order)
    q = p.ring.zero
    r = p
    while not r.is_zero():
        exp, c = r.lead(order)
        if not monomial_divides(hexp, exp):
            raise ArithmeticError(f"{h} does not divide {p}")
        shift = tuple(a - b for a, b in zip(exp, hexp))
        t = Polynomial._from_clean(p.ring, {shift: c / hc})
        q = q + t
        r = r - h * t
    return q


def saturate(N: Iterable[Element], h: Polynomial, limits: ResourceLimits | None = None,
             *, rank: int | None = None) -> list[Element]:
    """Generators of (N : h^∞), by adjoining t and eliminating it from N + (1 - t*h)S^b."""
    N = list(N)
    ring = h.ring
    _, rank0, is_ideal, _ = _normalize(N, ring, rank)
    rank = rank0 or rank or 1
    if h.is_zero():
        raise ValueError("cannot saturate by zero")
    limits = _start(limits)
    if h.is_constant():
        return _reduced_gens(N, ring, rank, is_ideal, limits)
    t_name = ring.fresh_name("t")
    big = ring.extend(Variable(t_name, AUX))
    t = big.var(t_name)
    unit = 1 - t * h.to_ring(big)
    if is_ideal:
        gens = [v.to_ring(big) for v in N] + [unit]
    else:
        gens = [v.to_ring(big) for v in N]
        gens += [Vector.unit(big, rank, i) * unit for i in range(rank)]
    kept = eliminate(gens, [t_name], limits, ring=big, rank=rank)
    return [v.to_ring(ring) for v in kept]


def saturate_by_colon(N: Iterable[Element], h: Polynomial,
                      limits: ResourceLimits | None = None, *, rank: int | None = None,
                      max_rounds: int = 64) -> list[Element]:
    """(N : h^∞) by iterating N_{k+1} = (N_k : h) until the chain stabilises."""
    N = list(N)
    ring = h.ring
    _, rank0, is_ideal, _ = _normalize(N, ring, rank)
    rank = rank0 or rank or 1
    limits = _start(limits)
    current = _reduced_gens(N, ring, rank, is_ideal, limits)
    for _ in range(max_rounds):
        nxt = module_quotient(current, h, limits, rank=rank)
        if is_ideal and rank == 1:
            nxt = [v if isinstance(v, Polynomial) else v[0] for v in nxt]
        if nxt == current:
            return current
        current = nxt
    raise ResourceExceeded(f"colon chain did not stabilise within {max_rounds} rounds")


def krull_dimension(I: Iterable[Polynomial], limits: ResourceLimits | None = None,
                    *, ring: Ring | None = None) -> int:
    """Dimension of V(I): the largest set of variables independent modulo the lead-term ideal.

    Returns :data:`EMPTY_DIMENSION` (-1) for the unit ideal.
    """
    I = list(I)
    ring0, _, _, dicts = _normalize(I, ring)
    ring = ring0 or ring
    if ring is None:
        raise ValueError("empty generator list needs an explicit ring")
    n = ring.ngens
    if not any(dicts):
        return n
    G = buchberger(I, ring.default_order, limits, ring=ring)
    if G.is_unit():
        return EMPTY_DIMENSION
    supports = []
    for _, exp in G.leads():
        mask = 0
        for i, e in enumerate(exp):
            if e:
                mask |= 1 << i
        supports.append(mask)
    best = 0
    for subset in range(1 << n):
        size = bin(subset).count("1")
        if size <= best:
            continue
        if all(s & ~subset for s in supports):
            best = size
    return best
