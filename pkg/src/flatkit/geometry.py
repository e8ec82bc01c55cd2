"""Fibre dimensions, image closures and vertical components of X = V(I) -> Y = QQ^n.

Everything works on a :class:`~flatkit.modules.RingTower` (base variables,
fiber blocks, relations). A :class:`~flatkit.flatness.FlatnessProblem` is
accepted wherever a tower is expected.

Only point queries and caller-supplied components are supported. The
stratification of Y by fibre dimension of the fibred powers is not computed,
since it needs an irreducible decomposition of the fibred powers.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .groebner import (EMPTY_DIMENSION, ResourceLimits, _start, buchberger, eliminate,
                       krull_dimension)
from .modules import ModulePresentation, RingTower, tensor_power
from .poly import BASE, QQ, Polynomial, Ring, rational


class DegenerateComponentWarning(UserWarning):
    """A component ideal is the unit ideal (empty component)."""


def as_tower(X) -> RingTower:
    if isinstance(X, RingTower):
        return X
    if hasattr(X, "tower"):
        return X.tower()
    raise TypeError(f"expected a RingTower or a FlatnessProblem, got {type(X).__name__}")


def _assignment(tower: RingTower, point) -> dict:
    if isinstance(point, Mapping):
        missing = set(tower.base) - set(point)
        if missing:
            raise ValueError(f"point misses coordinates for {sorted(missing)}")
        return {v: rational(point[v]) for v in tower.base}
    point = tuple(point)
    if len(point) != tower.n:
        raise ValueError(f"point has {len(point)} coordinates, expected {tower.n}")
    return {v: rational(c) for v, c in zip(tower.base, point)}


def fibre_dimension_at(X, point, limits: ResourceLimits | None = None) -> int:
    """Dimension of the fibre of V(I) over ``point``; -1 if the fibre is empty."""
    tower = as_tower(X)
    values = _assignment(tower, point)
    fiber_ring = tower.ring.subring(tower.fiber_names)
    fibre = [g.evaluate(values).to_ring(fiber_ring) for g in tower.relations]
    fibre = [g for g in fibre if not g.is_zero()]
    if fiber_ring.ngens == 0:
        return EMPTY_DIMENSION if fibre else 0
    return krull_dimension(fibre, _start(limits), ring=fiber_ring)


def image_closure(X, limits: ResourceLimits | None = None) -> list[Polynomial]:
    """Generators of I ∩ QQ[base] (reduced Gröbner basis); [] means the zero ideal."""
    tower = as_tower(X)
    rels = [g for g in tower.relations if not g.is_zero()]
    base_ring = tower.base_ring
    if not rels:
        return []
    if not tower.fiber_names:
        G = buchberger(rels, tower.ring.default_order, limits, ring=tower.ring)
        return [g.to_ring(base_ring) for g in G.elements]
    return eliminate(rels, tower.fiber_names, limits, ring=tower.ring)


def is_dominant(X, limits: ResourceLimits | None = None) -> bool:
    return not image_closure(X, limits)


def variety_dimension(X, limits: ResourceLimits | None = None) -> int:
    tower = as_tower(X)
    return krull_dimension(tower.relations, limits, ring=tower.ring)


def generic_fibre_dimension(X, limits: ResourceLimits | None = None) -> int:
    """dim V(I) - dim (closure of the image).

    Exact for irreducible V(I). For reducible inputs it compares the largest
    components only; pass components to :func:`openness_witness` instead.
    """
    limits = _start(limits)
    tower = as_tower(X)
    total = variety_dimension(tower, limits)
    if total == EMPTY_DIMENSION:
        return EMPTY_DIMENSION
    image = image_closure(tower, limits)
    return total - krull_dimension(image, limits, ring=tower.base_ring)


@dataclass(frozen=True)
class FibreReport:
    point: tuple
    fibre_dimension_at_point: int
    generic_fibre_dimension: int
    image_closure: tuple[Polynomial, ...]
    dominant: bool

    @property
    def semicontinuous(self) -> bool:
        """Fibre dimension over any point of the image is at least the generic one."""
        if self.fibre_dimension_at_point == EMPTY_DIMENSION:
            return True
        return self.fibre_dimension_at_point >= self.generic_fibre_dimension

    def to_dict(self) -> dict:
        return {
            "point": [str(QQ(c)) for c in self.point],
            "fibre_dimension": self.fibre_dimension_at_point,
            "generic_fibre_dimension": self.generic_fibre_dimension,
            "image_closure": [str(p) for p in self.image_closure],
            "dominant": self.dominant,
        }


def fibre_report(X, point, limits: ResourceLimits | None = None) -> FibreReport:
    limits = _start(limits)
    tower = as_tower(X)
    values = _assignment(tower, point)
    image = tuple(image_closure(tower, limits))
    return FibreReport(tuple(values[v] for v in tower.base),
                       fibre_dimension_at(tower, values, limits),
                       generic_fibre_dimension(tower, limits), image, not image)


@dataclass(frozen=True)
class ComponentIdeal:
    """A caller-supplied component candidate of a (fibred power of) V(I)."""

    generators: tuple[Polynomial, ...]
    label: str
    ring: Ring | None = field(default=None, compare=False)

    def __post_init__(self):
        gens = tuple(self.generators)
        ring = self.ring or (gens[0].ring if gens else None)
        if ring is None:
            raise ValueError("a component without generators needs an explicit ring")
        object.__setattr__(self, "generators", tuple(ring(g) for g in gens))
        object.__setattr__(self, "ring", ring)

    def contains(self, polys: Iterable[Polynomial], limits: ResourceLimits | None = None) -> bool:
        G = buchberger(self.generators, self.ring.default_order, limits, ring=self.ring)
        return all(G.contains(p.to_ring(self.ring)) for p in polys)


def _component_tower(Q: ComponentIdeal) -> RingTower:
    ring = Q.ring
    base = tuple(v.name for v in ring.variables if v.kind == BASE)
    blocks: dict = {}
    for v in ring.variables:
        if v.kind != BASE:
            blocks.setdefault(v.copy, []).append(v.name)
    fibers = tuple(tuple(blocks[c]) for c in sorted(blocks))
    tower = RingTower(base, fibers)
    return RingTower(base, fibers, tuple(g.to_ring(tower.ring) for g in Q.generators))


def is_algebraically_vertical(Q: ComponentIdeal, limits: ResourceLimits | None = None) -> bool:
    """True iff the component maps into a proper closed subset of the base.

    The unit ideal (empty component) counts as vertical, with a warning.
    """
    image = image_closure(_component_tower(Q), limits)
    if any(p.is_constant() for p in image):
        warnings.warn(f"component {Q.label!r} is the unit ideal (empty); "
                      "reported as vertical by convention", DegenerateComponentWarning,
                      stacklevel=2)
    return bool(image)


def fibred_power(X, k: int) -> RingTower:
    """Tower of the k-fold fibred power: relations are the ideal of A^{⊗k}."""
    tower = as_tower(X)
    return tensor_power(ModulePresentation.algebra(tower), k).tower


def fibred_power_ideal(X, k: int) -> tuple[Polynomial, ...]:
    return fibred_power(X, k).relations


def openness_witness(X, components: Sequence[ComponentIdeal], power: int | None = None,
                     limits: ResourceLimits | None = None) -> list[str]:
    """Labels of the supplied components of the fibred power that are algebraically vertical."""
    limits = _start(limits)
    tower = as_tower(X)
    k = tower.n if power is None else power
    if k < 1:
        return []
    ideal = fibred_power_ideal(tower, k)
    flagged = []
    for Q in components:
        if not Q.contains(ideal, limits):
            raise ValueError(f"component {Q.label!r} does not contain the fibred-power ideal")
        if is_algebraically_vertical(Q, limits):
            flagged.append(Q.label)
    return flagged
