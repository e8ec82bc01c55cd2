"""Finitely presented modules over a ring tower, tensor powers over the base, and R-torsion.

A module M = S^b / N is always presented over the tower's full polynomial ring
S = QQ[fiber variables, base variables]; the tower's ring relations times
every basis vector are part of N, so no quotient-ring arithmetic is needed.

Torsion over R = QQ[base] is computed by contraction. Take a Gröbner basis G
of N for an order in which every fiber variable (and the module position)
dominates the base block. Viewed over K = QQ(base), G is a Gröbner basis of
N ⊗ K[fiber], with leading coefficients in R. If h is the product of those
leading coefficients then

    N ⊗ K[fiber] ∩ S^b = (N : h^∞),

and the preimage of the torsion submodule is exactly the left-hand side, so
T(M) = (N : h^∞) / N.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .groebner import (GroebnerBasis, ResourceLimits, Vector, _start, buchberger, colon,
                       eliminate, saturate)
from .poly import BASE, FIBER, MonomialOrder, Polynomial, Ring, Variable


class CertificateFailure(RuntimeError):
    """A torsion certificate failed re-verification; this indicates an engine bug."""


def tower_ring(base: Sequence[str], fibers: Sequence[Sequence[str]]) -> Ring:
    variables = []
    for k, block in enumerate(fibers, start=1):
        variables.extend(Variable(n, FIBER, k) for n in block)
    variables.extend(Variable(n, BASE) for n in base)
    return Ring(tuple(variables))


@dataclass(frozen=True)
class RingTower:
    """Base variables, disjoint fiber blocks, and ring relations in the full ring."""

    base: tuple[str, ...]
    fibers: tuple[tuple[str, ...], ...]
    relations: tuple[Polynomial, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "base", tuple(self.base))
        object.__setattr__(self, "fibers", tuple(tuple(b) for b in self.fibers))
        ring = self.ring
        rels = tuple(ring(r) for r in self.relations)
        object.__setattr__(self, "relations", rels)

    @cached_property
    def ring(self) -> Ring:
        return tower_ring(self.base, self.fibers)

    @property
    def n(self) -> int:
        return len(self.base)

    @property
    def fiber_names(self) -> tuple[str, ...]:
        return tuple(v for b in self.fibers for v in b)

    @cached_property
    def base_ring(self) -> Ring:
        return self.ring.subring(self.base)

    def rename(self, mapping: dict) -> "RingTower":
        fibers = tuple(tuple(mapping.get(v, v) for v in b) for b in self.fibers)
        target = tower_ring(self.base, fibers)
        rels = tuple(r.to_ring(target, mapping) for r in self.relations)
        return RingTower(self.base, fibers, rels)

    def torsion_order(self) -> MonomialOrder:
        """Position first, then all fiber variables (grevlex), then the base (grevlex)."""
        ring = self.ring
        fib = list(ring.indices_of(self.fiber_names))
        base = list(ring.indices_of(self.base))
        blocks = [(b, "grevlex") for b in (fib, base) if b]
        if not blocks:
            return MonomialOrder.grevlex(0)
        return MonomialOrder.block(ring.ngens, blocks, position=0)


@dataclass(frozen=True)
class ModulePresentation:
    """M = S^rank / N with N generated by ``relations`` (ring relations included)."""

    tower: RingTower
    rank: int
    relations: tuple[Vector, ...]

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("rank must be positive")
        rels = tuple(self.relations)
        for v in rels:
            if v.rank != self.rank or v.ring != self.ring:
                raise ValueError("relation does not live in the ambient free module")
        object.__setattr__(self, "relations", rels)

    @property
    def ring(self) -> Ring:
        return self.tower.ring

    @classmethod
    def from_rows(cls, tower: RingTower, rank: int, rows: Iterable = ()) -> "ModulePresentation":
        """Presentation with the given rows plus the tower relations times each basis vector."""
        ring = tower.ring
        rels = []
        for row in rows:
            if isinstance(row, Vector):
                rels.append(row.to_ring(ring) if row.ring != ring else row)
            else:
                rels.append(Vector([ring(e) for e in row]))
        for r in tower.relations:
            for i in range(rank):
                rels.append(Vector.unit(ring, rank, i) * r)
        return cls(tower, rank, tuple(rels))

    @classmethod
    def algebra(cls, tower: RingTower) -> "ModulePresentation":
        return cls.from_rows(tower, 1)

    @classmethod
    def free(cls, tower: RingTower, rank: int) -> "ModulePresentation":
        return cls.from_rows(tower, rank)

    def rename(self, mapping: dict) -> "ModulePresentation":
        tower = self.tower.rename(mapping)
        rels = tuple(v.to_ring(tower.ring, mapping) for v in self.relations)
        return ModulePresentation(tower, self.rank, rels)

    def unit(self, i: int) -> Vector:
        return Vector.unit(self.ring, self.rank, i)

    def vector(self, entries) -> Vector:
        return Vector([self.ring(e) for e in entries])

    def groebner(self, limits: ResourceLimits | None = None,
                 order: MonomialOrder | None = None) -> GroebnerBasis:
        return buchberger(self.relations, order or self.ring.default_order, limits,
                          ring=self.ring, rank=self.rank)

    def contains(self, v: Vector, limits: ResourceLimits | None = None) -> bool:
        """Membership of ``v`` in N (i.e. v represents zero in M)."""
        return self.groebner(limits).contains(v)


def copy_name(name: str, k: int, taken: set) -> str:
    """Name of the k-th copy of a fiber variable (x -> x1, x1 -> x1_1)."""
    cand = f"{name}_{k}" if name[-1].isdigit() else f"{name}{k}"
    while cand in taken:
        cand += "_"
    return cand


def tensor_presentation(M1: ModulePresentation, M2: ModulePresentation) -> ModulePresentation:
    """Presentation of M1 ⊗_R M2 over the combined tower (fiber blocks made disjoint)."""
    t1, t2 = M1.tower, M2.tower
    if t1.base != t2.base:
        raise ValueError("tensor factors must share the base variables")
    taken = set(t1.base) | set(t1.fiber_names)
    clash = {v for v in t2.fiber_names if v in taken}
    if clash:
        used = taken | set(t2.fiber_names)
        mapping = {}
        for v in sorted(clash):
            new = v
            while new in used:
                new += "_"
            used.add(new)
            mapping[v] = new
        M2 = M2.rename(mapping)
        t2 = M2.tower
    # each factor's relations already include its ring relations times basis vectors
    ring = tower_ring(t1.base, t1.fibers + t2.fibers)
    rels1 = tuple(r.to_ring(ring) for r in t1.relations)
    rels2 = tuple(r.to_ring(ring) for r in t2.relations)
    tower = RingTower(t1.base, t1.fibers + t2.fibers, rels1 + rels2)
    b1, b2 = M1.rank, M2.rank
    rank = b1 * b2
    zero = ring.zero
    out = []
    for u in M1.relations:
        u = u.to_ring(ring)
        for j in range(b2):
            entries = [zero] * rank
            for i in range(b1):
                entries[i * b2 + j] = u[i]
            out.append(Vector(entries))
    for v in M2.relations:
        v = v.to_ring(ring)
        for i in range(b1):
            entries = [zero] * rank
            for j in range(b2):
                entries[i * b2 + j] = v[j]
            out.append(Vector(entries))
    return ModulePresentation(tower, rank, _dedupe(out))


def _dedupe(vectors: Iterable[Vector]) -> tuple[Vector, ...]:
    seen = set()
    out = []
    for v in vectors:
        if v.is_zero() or v in seen:
            continue
        seen.add(v)
        out.append(v)
    return tuple(out)


def tensor_power(M: ModulePresentation, k: int) -> ModulePresentation:
    """M^{⊗k} over R; for k >= 2 copy j of each fiber variable v is renamed like v -> vj."""
    if k < 1:
        raise ValueError("tensor power needs k >= 1")
    if k == 1:
        return M
    taken = set(M.tower.base)
    copies = []
    for j in range(1, k + 1):
        mapping = {}
        for v in M.tower.fiber_names:
            new = copy_name(v, j, taken)
            taken.add(new)
            mapping[v] = new
        copies.append(M.rename(mapping))
    result = copies[0]
    for c in copies[1:]:
        result = tensor_presentation(result, c)
    return result


@dataclass(frozen=True)
class Torsion:
    """Generators (preimages in S^b) of the R-torsion submodule, and the clearing element h."""

    generators: tuple[Vector, ...]
    clearing: Polynomial
    notice: str = ""

    def is_zero(self) -> bool:
        return not self.generators


def lead_coefficients(G: GroebnerBasis, tower: RingTower) -> list[Polynomial]:
    """Distinct non-constant base-only leading coefficients of G's elements.

    For an element led by (component c, monomial x^a y^b), its coefficient over
    QQ(base) is the sum of all its terms in component c with fiber part x^a.
    """
    ring = tower.ring
    fib_idx = ring.indices_of(tower.fiber_names)
    fib = set(fib_idx)
    out = []
    for g, (comp, lexp) in zip(G._elems, G.leads()):
        fiber_part = tuple(lexp[i] for i in fib_idx)
        coeff = {}
        for (c, exp), a in g.terms.items():
            if c == comp and tuple(exp[i] for i in fib_idx) == fiber_part:
                coeff[tuple(0 if i in fib else e for i, e in enumerate(exp))] = a
        p = Polynomial(ring, coeff)
        if not p.is_constant():
            p = p.monic()
            if p not in out:
                out.append(p)
    return out


def torsion_submodule(M: ModulePresentation, limits: ResourceLimits | None = None) -> Torsion:
    """R-torsion of M as (generators of (N : h^∞) not in N, h)."""
    ring = M.ring
    if M.tower.n == 0:
        return Torsion((), ring.one, "base ring is a field: every module is torsion-free")
    limits = _start(limits)
    G = buchberger(M.relations, M.tower.torsion_order(), limits, ring=ring, rank=M.rank)
    if G.is_unit():
        return Torsion((), ring.one, "zero module: torsion-free by convention")
    h = ring.one
    for c in lead_coefficients(G, M.tower):
        h = h * c
    if h.is_constant():
        return Torsion((), h)
    sat = saturate(M.relations, h, limits, rank=M.rank) if M.relations else []
    gens = []
    for v in sat:
        if M.rank == 1 and not isinstance(v, Vector):
            v = Vector([v])
        r = G.reduce(v, limits)
        if not r.is_zero() and r not in gens:
            gens.append(r)
    return Torsion(tuple(gens), h)


def is_torsion_free(M: ModulePresentation, limits: ResourceLimits | None = None) -> bool:
    return torsion_submodule(M, limits).is_zero()


def annihilator_in_base(M: ModulePresentation, m: Vector,
                        limits: ResourceLimits | None = None) -> list[Polynomial]:
    """Generators of (N : m) ∩ QQ[base], in the base ring."""
    limits = _start(limits)
    ideal = colon(M.relations, m, limits, ring=M.ring)
    base_ring = M.tower.base_ring
    if not M.tower.fiber_names:
        return [p.to_ring(base_ring) for p in ideal]
    return eliminate(ideal, M.tower.fiber_names, limits, ring=M.ring)


@dataclass(frozen=True)
class TorsionCertificate:
    """A verified pair (m, r): r in QQ[base] nonzero, r*m in N, m not in N."""

    element: Vector
    annihilator: Polynomial
    verification_trace: tuple[str, ...] = field(default=(), compare=False)

    @classmethod
    def build(cls, M: ModulePresentation, m: Vector, r: Polynomial,
              limits: ResourceLimits | None = None) -> "TorsionCertificate":
        r = M.ring(r) if r.ring != M.ring else r
        trace = check_certificate(M, m, r, limits)
        return cls(m, r, trace)

    def verify(self, M: ModulePresentation, limits: ResourceLimits | None = None) -> bool:
        check_certificate(M, self.element, self.annihilator, limits)
        return True

    def to_dict(self) -> dict:
        return {"element": [str(p) for p in self.element],
                "annihilator": str(self.annihilator),
                "trace": list(self.verification_trace)}


def check_certificate(M: ModulePresentation, m: Vector, r: Polynomial,
                      limits: ResourceLimits | None = None) -> tuple[str, ...]:
    """Re-verify a certificate with membership tests only; raises CertificateFailure."""
    if r.is_zero():
        raise CertificateFailure("annihilator is zero")
    extra = r.variables_used() - set(M.tower.base)
    if extra:
        raise CertificateFailure(f"annihilator uses non-base variables {sorted(extra)}")
    G = M.groebner(limits)
    rm = m * r
    if not G.contains(rm):
        raise CertificateFailure(f"r*m is not in N for r = {r}, m = {m}")
    nf = G.reduce(m)
    if nf.is_zero():
        raise CertificateFailure(f"m = {m} lies in N")
    return (f"({r})*m reduces to 0 modulo N",
            f"m has nonzero normal form {nf} modulo N")


def pick_annihilator(ann: Sequence[Polynomial]) -> Polynomial | None:
    """Lowest-degree nonzero generator, ties broken by the largest leading term."""
    cands = [p for p in ann if not p.is_zero()]
    if not cands:
        return None
    order = cands[0].ring.default_order
    return min(cands, key=lambda p: (p.degree(), tuple(-v for v in order.key(p.lead()[0]))))


def make_certificate(M: ModulePresentation, m: Vector,
                     limits: ResourceLimits | None = None) -> TorsionCertificate:
    ann = annihilator_in_base(M, m, limits)
    r = pick_annihilator(ann)
    if r is None:
        raise CertificateFailure(f"no nonzero base annihilator for {m}")
    return TorsionCertificate.build(M, m, r.to_ring(M.ring), limits)
