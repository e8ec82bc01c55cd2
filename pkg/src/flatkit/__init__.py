"""Exact R-flatness tests via torsion in tensor powers over QQ[y1..yn]."""

from .flatness import (FlatnessProblem, FlatnessVerdict, Status, first_torsion_power,
                       flat_at_origin, flat_check)
from .groebner import ResourceExceeded, ResourceLimits, Vector, buchberger
from .modules import ModulePresentation, RingTower, TorsionCertificate, torsion_submodule
from .parsing import parse_problem
from .poly import MonomialOrder, Polynomial, Ring

__version__ = "0.1.0"

__all__ = [
    "FlatnessProblem", "FlatnessVerdict", "ModulePresentation", "MonomialOrder", "Polynomial",
    "ResourceExceeded", "ResourceLimits", "Ring", "RingTower", "Status", "TorsionCertificate",
    "Vector", "buchberger", "first_torsion_power", "flat_at_origin", "flat_check",
    "parse_problem", "torsion_submodule",
]
