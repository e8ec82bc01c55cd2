import pytest

from conftest import blowup, double_cover, free_poly, max_ideal, r_mod_y1
from flatkit.flatness import (FlatnessProblem, OriginNotOnVariety, Status, first_torsion_power,
                              flat_at_origin, flat_check)
from flatkit.groebner import ResourceLimits


def test_blowup_not_flat():
    v = flat_check(blowup())
    assert v.status is Status.NOT_FLAT and v.power_used == 2
    c = v.certificate
    assert (str(c.element), str(c.annihilator)) == ("[x1 - x2]", "y1")
    assert c.verify(v.presentation)
    assert v.stats["bases"] > 0


@pytest.mark.parametrize("make", [free_poly, double_cover])
@pytest.mark.parametrize("n", [1, 2])
def test_flat_instances(make, n):
    assert flat_check(make(n)).status is Status.FLAT


def test_first_torsion_power():
    assert first_torsion_power(r_mod_y1()) == 1
    assert first_torsion_power(max_ideal(2)) == 2
    free = FlatnessProblem.from_strings(["y1", "y2"], [], [], (2, []))
    assert first_torsion_power(free) is None


def test_power_below_n():
    v = flat_check(blowup(), power=1)
    assert v.status is Status.INCONCLUSIVE
    assert any("inconclusive" in n for n in v.notices)
    v = flat_check(r_mod_y1(), power=1)
    assert v.status is Status.NOT_FLAT and v.authoritative


def test_at_origin():
    v = flat_at_origin(blowup())
    assert v.status is Status.NOT_FLAT
    assert all(p.evaluate({q: 0 for q in p.ring.names}).is_zero() for p in v.annihilator)
    assert flat_at_origin(double_cover()).status is Status.FLAT


def test_torsion_away_from_origin():
    # F = A/(x - 1)A is supported on x = 1, so x - 1 is a unit near the origin of X
    p = FlatnessProblem.from_strings(["y1", "y2"], ["x"], ["x*y1 - y2"], (1, [["x"]]))
    assert flat_check(p).status is Status.NOT_FLAT
    q = FlatnessProblem.from_strings(["y1", "y2"], ["x"], ["x*y1 - y2"], (1, [["x - 1"]]))
    g = flat_check(q)
    local = flat_at_origin(q)
    assert g.status is Status.NOT_FLAT
    assert local.status is Status.FLAT
    assert any(not a.evaluate({v: 0 for v in a.ring.names}).is_zero() for a in local.annihilator)


def test_origin_off_variety():
    with pytest.raises(OriginNotOnVariety):
        flat_at_origin(FlatnessProblem.from_strings(["y1"], ["x"], ["x - 1 - y1", "y1 - 1"]))


def test_global_flat_implies_local_flat():
    for make in (free_poly, double_cover):
        assert flat_at_origin(make()).status is Status.FLAT


@pytest.mark.parametrize("make", [free_poly, double_cover])
def test_flat_means_all_lower_powers_torsion_free(make):
    problem = make()
    for k in range(1, problem.n + 1):
        assert flat_check(problem, power=k).status in (Status.FLAT, Status.INCONCLUSIVE)


def test_determinism():
    a = flat_check(blowup()).to_dict()
    b = flat_check(blowup()).to_dict()
    assert a == b


def test_resource_exceeded_is_a_verdict():
    v = flat_check(max_ideal(3), limits=ResourceLimits(max_basis=3))
    assert v.status is Status.RESOURCE_EXCEEDED and not v.authoritative


def test_no_base_variables():
    v = flat_check(FlatnessProblem.from_strings([], ["x"], ["x^2"]))
    assert v.status is Status.FLAT
