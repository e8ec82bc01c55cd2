"""Flatness of F over R = QQ[y1..yn] via torsion-freeness of the n-fold tensor power.

F is a finitely generated module over A = R[x]/I. F is R-flat exactly when
F^{⊗n} (tensor over R, n = dim R) has no R-torsion. When F is finite over R
(no fiber variables) this is the classical freeness test for finite modules.
"""
from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field
from typing import Sequence

from .groebner import ResourceExceeded, ResourceLimits, Vector, _start, colon, collect_stats, intersect
from .modules import (CertificateFailure, ModulePresentation, RingTower, TorsionCertificate,
                      make_certificate, tensor_power, torsion_submodule)
from .poly import Polynomial, Ring
from .parsing import problem_ring


class Status(str, enum.Enum):
    FLAT = "flat"
    NOT_FLAT = "notflat"
    INCONCLUSIVE = "inconclusive"
    RESOURCE_EXCEEDED = "resource-exceeded"


class OriginNotOnVariety(ValueError):
    """The origin is not a point of V(I), so there is nothing to localise at."""


@dataclass(frozen=True)
class FlatnessProblem:
    """R = QQ[base], A = R[fiber]/(ideal), and F = A^rank/(rows) (default F = A)."""

    base: tuple[str, ...]
    fiber: tuple[str, ...]
    ideal: tuple[Polynomial, ...] = ()
    module: tuple[int, Sequence[Vector]] | None = None
    ring: Ring | None = None

    def __post_init__(self):
        object.__setattr__(self, "base", tuple(self.base))
        object.__setattr__(self, "fiber", tuple(self.fiber))
        ring = problem_ring(self.base, self.fiber)
        if self.ring is not None and self.ring != ring:
            raise ValueError("ring does not match base and fiber variables")
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "ideal", tuple(ring(g) for g in self.ideal))
        if self.module is not None:
            rank, rows = self.module
            rows = tuple(r if isinstance(r, Vector) else Vector([ring(e) for e in r])
                         for r in rows)
            if any(r.rank != rank for r in rows):
                raise ValueError("module row length differs from the rank")
            object.__setattr__(self, "module", (rank, rows))

    @classmethod
    def from_strings(cls, base: Sequence[str], fiber: Sequence[str], ideal=(), module=None):
        ring = problem_ring(base, fiber)
        ideal = tuple(ring(g) for g in ideal)
        if module is not None:
            rank, rows = module
            module = (rank, tuple(Vector([ring(e) for e in row]) for row in rows))
        return cls(tuple(base), tuple(fiber), ideal, module)

    @property
    def n(self) -> int:
        return len(self.base)

    @property
    def rank(self) -> int:
        return 1 if self.module is None else self.module[0]

    def tower(self) -> RingTower:
        fibers = (self.fiber,) if self.fiber else ()
        tower = RingTower(self.base, fibers)
        return RingTower(self.base, fibers, tuple(g.to_ring(tower.ring) for g in self.ideal))

    def presentation(self) -> ModulePresentation:
        tower = self.tower()
        if self.module is None:
            return ModulePresentation.algebra(tower)
        rank, rows = self.module
        return ModulePresentation.from_rows(tower, rank, [r.to_ring(tower.ring) for r in rows])

    def power(self, k: int) -> ModulePresentation:
        return tensor_power(self.presentation(), k)


@dataclass
class FlatnessVerdict:
    status: Status
    power_used: int
    certificate: TorsionCertificate | None = None
    presentation: ModulePresentation | None = field(default=None, repr=False)
    scope: str = "global"
    authoritative: bool = True
    notices: list[str] = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    seconds: float = 0.0
    annihilator: tuple[Polynomial, ...] = ()

    @property
    def flat(self) -> bool:
        return self.status is Status.FLAT

    def to_dict(self, timings: bool = False) -> dict:
        out = {
            "status": self.status.value,
            "scope": self.scope,
            "power": self.power_used,
            "authoritative": self.authoritative,
            "notices": list(self.notices),
            "statistics": dict(sorted(self.stats.items())),
            "certificate": self.certificate.to_dict() if self.certificate else None,
        }
        if self.annihilator:
            out["torsion_annihilator"] = [str(p) for p in self.annihilator]
        if timings:
            out["seconds"] = round(self.seconds, 6)
        return out


def _certify(P: ModulePresentation, gens, limits) -> TorsionCertificate:
    last = None
    for g in gens:
        try:
            return make_certificate(P, g, limits)
        except CertificateFailure as exc:
            last = exc
    raise CertificateFailure(f"no torsion generator could be certified: {last}")


def flat_check(problem: FlatnessProblem, power: int | None = None,
               limits: ResourceLimits | None = None) -> FlatnessVerdict:
    """Decide R-flatness of F from the torsion of F^{⊗power} (default power n).

    With ``power < n`` a torsion-free answer proves nothing and is reported
    as INCONCLUSIVE; torsion at any power still proves non-flatness.
    """
    n = problem.n
    k = n if power is None else power
    t0 = time.perf_counter()
    if n == 0:
        return FlatnessVerdict(Status.FLAT, 0, notices=["no base variables: R is a field"])
    if k < 1:
        raise ValueError("power must be at least 1")
    notices = []
    authoritative = k >= n
    limits = _start(limits)
    with collect_stats() as stats:
        try:
            P = problem.power(k)
            tor = torsion_submodule(P, limits)
            if tor.notice:
                notices.append(tor.notice)
            if tor.is_zero():
                status = Status.FLAT if authoritative else Status.INCONCLUSIVE
                cert = None
                if not authoritative:
                    notices.append(f"inconclusive: power {k} < base dimension {n}")
            else:
                status = Status.NOT_FLAT
                cert = _certify(P, tor.generators, limits)
                if not authoritative:
                    notices.append(f"torsion at power {k} < {n} already proves non-flatness")
                authoritative = True
        except ResourceExceeded as exc:
            partial = dict(stats)
            partial.update({f"aborted_{key}": v for key, v in exc.stats.items()})
            return FlatnessVerdict(Status.RESOURCE_EXCEEDED, k, notices=notices + [exc.reason],
                                   stats=partial, seconds=time.perf_counter() - t0,
                                   authoritative=False)
    return FlatnessVerdict(status, k, cert, P, "global", authoritative, notices, dict(stats),
                           time.perf_counter() - t0)


def first_torsion_power(problem: FlatnessProblem,
                        limits: ResourceLimits | None = None) -> int | None:
    """Smallest k <= n with torsion in F^{⊗k}; None means F is flat."""
    limits = _start(limits)
    for k in range(1, problem.n + 1):
        if not torsion_submodule(problem.power(k), limits).is_zero():
            return k
    return None


def origin_on_variety(problem: FlatnessProblem) -> bool:
    return all(g.constant_term() == 0 for g in problem.ideal)


def flat_at_origin(problem: FlatnessProblem, limits: ResourceLimits | None = None
                   ) -> FlatnessVerdict:
    """Flatness of F localised at the origin of the n-fold fibred power.

    The torsion T of F^{⊗n} localises to the torsion of the localisation, so F
    is flat near the origin iff the origin lies outside Supp T = V(Ann T).
    """
    if not origin_on_variety(problem):
        raise OriginNotOnVariety("the origin is not a point of V(I)")
    n = problem.n
    t0 = time.perf_counter()
    if n == 0:
        return FlatnessVerdict(Status.FLAT, 0, scope="origin",
                               notices=["no base variables: R is a field"])
    limits = _start(limits)
    with collect_stats() as stats:
        try:
            P = problem.power(n)
            tor = torsion_submodule(P, limits)
            if tor.is_zero():
                return FlatnessVerdict(Status.FLAT, n, None, P, "origin", True,
                                       [tor.notice] if tor.notice else [], dict(stats),
                                       time.perf_counter() - t0)
            origin = {v: 0 for v in P.ring.names}
            per_gen = [colon(P.relations, t, limits, ring=P.ring) for t in tor.generators]
            ann = per_gen[0]
            for J in per_gen[1:]:
                ann = intersect(ann, J, limits, ring=P.ring)
            at_origin = all(p.evaluate(origin).is_zero() for p in ann)
            if not at_origin:
                return FlatnessVerdict(Status.FLAT, n, None, P, "origin", True,
                                       ["torsion exists but is supported away from the origin"],
                                       dict(stats), time.perf_counter() - t0, tuple(ann))
            local = [t for t, J in zip(tor.generators, per_gen)
                     if all(p.evaluate(origin).is_zero() for p in J)]
            cert = _certify(P, local, limits)
        except ResourceExceeded as exc:
            return FlatnessVerdict(Status.RESOURCE_EXCEEDED, n, scope="origin",
                                   notices=[exc.reason], stats=dict(stats),
                                   seconds=time.perf_counter() - t0, authoritative=False)
    return FlatnessVerdict(Status.NOT_FLAT, n, cert, P, "origin", True, [], dict(stats),
                           time.perf_counter() - t0, tuple(ann))
