import pytest

from conftest import blowup, double_cover, free_poly, max_ideal, r_mod_y1
from flatkit.flatness import FlatnessProblem
from flatkit.groebner import Vector
from flatkit.modules import (CertificateFailure, ModulePresentation, RingTower,
                             TorsionCertificate, annihilator_in_base, check_certificate,
                             is_torsion_free, make_certificate, tensor_power,
                             tensor_presentation, torsion_submodule)


def test_free_tensor_free():
    tower = RingTower(("y1", "y2"), ())
    P = tensor_presentation(ModulePresentation.free(tower, 2), ModulePresentation.free(tower, 3))
    assert P.rank == 6 and P.relations == ()


def test_blowup_square_shape():
    P = blowup().power(2)
    assert P.rank == 1
    assert P.ring.names == ("x1", "x2", "y1", "y2")
    assert sorted(str(v[0]) for v in P.relations) == ["x1*y1 - y2", "x2*y1 - y2"]
    assert tensor_power(blowup().presentation(), 1) == blowup().presentation()


def test_ideal_square_shape():
    P = max_ideal(2).power(2)
    assert P.rank == 4 and len(P.relations) == 4


@pytest.mark.parametrize("k", [1, 2, 3])
def test_rank_law(k):
    assert max_ideal(2).power(k).rank == 2 ** k
    assert max_ideal(3).power(k).rank == 3 ** k


def test_copy_names_for_digit_suffix():
    p = FlatnessProblem.from_strings(["y1"], ["x1", "z"], ["x1*z - y1"])
    assert p.power(2).ring.names == ("x1_1", "z1", "x1_2", "z2", "y1")


def test_torsion_examples():
    assert torsion_submodule(free_poly().power(2)).is_zero()
    P = blowup().power(2)
    tor = torsion_submodule(P)
    assert len(tor.generators) == 1
    m = tor.generators[0]
    assert str(m) == "[x1 - x2]"
    T = torsion_submodule(r_mod_y1().presentation())
    assert [str(g) for g in T.generators] == ["[1]"]
    assert str(T.clearing) == "y1"


def test_annihilators():
    P = blowup().power(2)
    ann = annihilator_in_base(P, P.vector(["x1 - x2"]))
    assert "y1" in [str(p) for p in ann]
    F = free_poly().presentation()
    assert annihilator_in_base(F, F.unit(0)) == []
    Q = r_mod_y1().presentation()
    assert [str(p) for p in annihilator_in_base(Q, Q.unit(0))] == ["y1"]


def test_certificates():
    P = blowup().power(2)
    c = make_certificate(P, P.vector(["x1 - x2"]))
    assert (str(c.element), str(c.annihilator)) == ("[x1 - x2]", "y1")
    assert c.verify(P)
    Q = r_mod_y1().presentation()
    c = make_certificate(Q, Q.unit(0))
    assert (str(c.element), str(c.annihilator)) == ("[1]", "y1")
    M = max_ideal(2).power(2)
    c = make_certificate(M, M.vector(["0", "1", "-1", "0"]))
    assert c.annihilator.degree() == 1


def test_bad_certificates_rejected():
    P = blowup().power(2)
    with pytest.raises(CertificateFailure):
        check_certificate(P, P.vector(["x1 - x2"]), P.ring("y2 + 1"))
    with pytest.raises(CertificateFailure):
        check_certificate(P, P.vector(["x1*y1 - y2"]), P.ring("y1"))
    with pytest.raises(CertificateFailure):
        check_certificate(P, P.vector(["x1 - x2"]), P.ring("x1"))
    with pytest.raises(CertificateFailure):
        TorsionCertificate.build(P, P.vector(["x1 - x2"]), P.ring(0))


def test_is_torsion_free():
    assert is_torsion_free(free_poly().presentation())
    assert is_torsion_free(max_ideal(2).presentation())
    assert not is_torsion_free(max_ideal(2).power(2))


def test_every_torsion_generator_certifies():
    for problem in (blowup(), max_ideal(2), max_ideal(3), r_mod_y1()):
        P = problem.power(2)
        for g in torsion_submodule(P).generators:
            assert make_certificate(P, g).verify(P)


def test_factor_symmetry():
    pairs = [(blowup(), double_cover()), (max_ideal(2), free_poly()), (blowup(), r_mod_y1()),
             (double_cover(), free_poly())]
    for a, b in pairs:
        ab = tensor_presentation(a.presentation(), b.presentation())
        ba = tensor_presentation(b.presentation(), a.presentation())
        assert is_torsion_free(ab) == is_torsion_free(ba)


@pytest.mark.parametrize("make", [blowup, free_poly, double_cover, r_mod_y1, max_ideal])
def test_power_monotonicity(make):
    problem = make()
    flags = [is_torsion_free(problem.power(k)) for k in range(1, problem.n + 1)]
    for k, free in enumerate(flags):
        if free:
            assert all(flags[:k])


def _change_coordinates(problem, images):
    ring = problem.ring
    sub = {v: ring(e) for v, e in images.items()}
    ideal = [g.substitute(sub) for g in problem.ideal]
    module = None
    if problem.module is not None:
        rank, rows = problem.module
        module = (rank, [Vector([p.substitute(sub) for p in r]) for r in rows])
    return FlatnessProblem(problem.base, problem.fiber, ideal, module)


@pytest.mark.parametrize("make", [blowup, double_cover, r_mod_y1, max_ideal])
def test_renaming_invariance(make):
    problem = make()
    moved = _change_coordinates(problem, {"y1": "y1 + 2*y2", "y2": "y2 - y1"})
    n = problem.n
    assert is_torsion_free(problem.power(n)) == is_torsion_free(moved.power(n))


def test_zero_module_and_no_base():
    zero = FlatnessProblem.from_strings(["y1"], ["x"], ["1"])
    T = torsion_submodule(zero.presentation())
    assert T.is_zero() and "zero module" in T.notice
    field = FlatnessProblem.from_strings([], ["x"], ["x^2"])
    assert torsion_submodule(field.presentation()).is_zero()
