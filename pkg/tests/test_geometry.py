import warnings

import pytest

from conftest import blowup, free_poly
from flatkit.flatness import FlatnessProblem
from flatkit.geometry import (ComponentIdeal, DegenerateComponentWarning, fibre_dimension_at,
                              fibre_report, fibred_power, fibred_power_ideal,
                              generic_fibre_dimension, image_closure, is_algebraically_vertical,
                              openness_witness, variety_dimension)


def test_fibre_dimensions():
    assert fibre_dimension_at(blowup(), (0, 0)) == 1
    assert fibre_dimension_at(blowup(), (1, 0)) == 0
    assert fibre_dimension_at(blowup(), (0, 1)) == -1
    assert fibre_dimension_at(free_poly(), ("3/2", -7)) == 1
    with pytest.raises(ValueError):
        fibre_dimension_at(blowup(), (1,))


def test_image_closure():
    assert image_closure(blowup()) == []
    p = FlatnessProblem.from_strings(["y1", "y2"], ["x"], ["x", "y1"])
    assert [str(g) for g in image_closure(p)] == ["y1"]
    p = FlatnessProblem.from_strings(["y1", "y2"], ["x"], ["1"])
    assert [str(g) for g in image_closure(p)] == ["1"]


def test_dominance_consistency():
    for problem, n in ((blowup(), 2), (free_poly(), 2)):
        dominant = not image_closure(problem)
        assert dominant == (generic_fibre_dimension(problem) == variety_dimension(problem) - n)
    p = FlatnessProblem.from_strings(["y1", "y2"], ["x"], ["x", "y1"])
    assert image_closure(p)
    assert generic_fibre_dimension(p) == 0


def test_report():
    r = fibre_report(blowup(), (0, 0))
    assert r.dominant and r.fibre_dimension_at_point == 1 and r.generic_fibre_dimension == 0
    assert r.semicontinuous
    assert r.to_dict()["image_closure"] == []


def test_fibred_power_block_symmetry():
    P = fibred_power(blowup(), 2)
    swapped = {p.to_ring(P.ring, {"x1": "x2", "x2": "x1"}) for p in P.relations}
    assert swapped == set(P.relations)


def test_vertical_components():
    P = fibred_power(blowup(), 2)
    r = P.ring
    whole = ComponentIdeal(P.relations, "whole")
    origin = ComponentIdeal((r("y1"), r("y2")) + P.relations, "origin-fibre")
    strict = ComponentIdeal((r("x1 - x2"), r("x1*y1 - y2")), "strict")
    assert not is_algebraically_vertical(whole)
    assert is_algebraically_vertical(origin)
    assert openness_witness(blowup(), [origin, strict]) == ["origin-fibre"]
    assert openness_witness(blowup(), [whole]) == []
    F = fibred_power(free_poly(), 2)
    assert openness_witness(free_poly(), [ComponentIdeal((), "all", ring=F.ring)]) == []


def test_unit_component_warns():
    r = fibred_power(blowup(), 2).ring
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        assert is_algebraically_vertical(ComponentIdeal((r(1),), "empty"))
    assert any(issubclass(w.category, DegenerateComponentWarning) for w in caught)


def test_component_must_contain_relations():
    r = fibred_power(blowup(), 2).ring
    with pytest.raises(ValueError):
        openness_witness(blowup(), [ComponentIdeal((r("x1"),), "bad")])
    assert len(fibred_power_ideal(blowup(), 3)) == 3
