from fractions import Fraction

import pytest
import sympy

from tristab.cubic import CubicPoly
from tristab.errors import DomainError, NotApplicableError, RangeError
from tristab.stability import (
    F_SQ,
    SQ_NABLA_LAP_FNU,
    bound_poly_from_estimate,
    clifford_index_bound,
    evaluate_form,
    hessian_density_terms,
    small_sphere_form_poly,
    small_sphere_normal_index,
    umbilic_hessian_poly,
)

SQRT2 = sympy.sqrt(2)


def corrected_form(m):
    """Oracle confirmed at m = 1 by the discrete Hessian of the small circle."""
    return CubicPoly(1, 4 * (m + 6), -3 * m * m - 16 * m + 40, -24 * m**3)


def test_printed_form_examples():
    assert small_sphere_form_poly(1) == CubicPoly(1, 28, 33, -24)
    assert small_sphere_form_poly(2) == CubicPoly(1, 32, 20, -192)


def test_first_level_value():
    for m in range(1, 51):
        assert evaluate_form(small_sphere_form_poly(m), 3 * m) == 30 * m**3 + 204 * m**2 + 120 * m


def test_sphere_index_examples():
    for m in (1, 2, 50):
        rep = small_sphere_normal_index(m)
        assert rep.index == 1
        assert [lv.verdict for lv in rep.levels] == ["negative", "positive"]
        assert rep.exact and rep.certificate.lam == 3 * m


def test_sphere_index_with_longer_sweep():
    rep = small_sphere_normal_index(4, 500)
    assert rep.index == 1
    assert all(lv.verdict == "positive" for lv in rep.levels[1:])
    assert rep.index == sum(lv.multiplicity for lv in rep.levels if lv.verdict == "negative")


def test_sphere_index_range_error():
    with pytest.raises(RangeError):
        small_sphere_normal_index(3, 8)


def test_umbilic_assembled_values():
    for m in range(1, 8):
        assert umbilic_hessian_poly(m, SQRT2, 1) == corrected_form(m)


def test_umbilic_index_is_one_under_corrected_form():
    for m in (1, 2, 10):
        assert small_sphere_normal_index(m, poly=umbilic_hessian_poly(m, SQRT2, 1)).index == 1


def test_umbilic_totally_geodesic():
    for m in (1, 3, 9):
        assert umbilic_hessian_poly(m, 0, -1) == CubicPoly(1, 2 * m, m * m, 0)
        assert umbilic_hessian_poly(m, 0, 0) == CubicPoly(1, 0, 0, 0)
        assert umbilic_hessian_poly(m, 0, -1).nonnegative_on(0)


def test_umbilic_inadmissible():
    with pytest.raises(DomainError):
        umbilic_hessian_poly(2, 1, 1)
    with pytest.raises(DomainError):
        umbilic_hessian_poly(2, SQRT2, -1)


def test_density_flat_is_pure_square():
    d = hessian_density_terms(4, Fraction(1, 2), 3, 0)
    assert d.nonzero() == {SQ_NABLA_LAP_FNU: 1}


def test_density_small_sphere_coefficients():
    d = hessian_density_terms(2, -SQRT2, 4, 1)
    assert d[F_SQ] == 2**2 * 4 + 5 * 8 * 2 - 7 * 4 * 4 * 2


def test_bound_poly_examples():
    for m in (1, 2, 5):
        B = bound_poly_from_estimate(m, 2 * m)
        assert B.a0 == -54 * m**3 and B.a3 == 1
    assert bound_poly_from_estimate(3, 3.77)(0) == pytest.approx(-261, abs=0.5)
    with pytest.raises(DomainError):
        bound_poly_from_estimate(3, 2)


def test_clifford_bound():
    rep = clifford_index_bound(1, 2, 100)
    assert rep.bound and rep.caveat
    assert rep.levels[0].verdict == "negative"
    c = rep.certificate
    assert c.value > 0 and c.slope > 0 and c.curvature >= 0
    assert rep.index == sum(lv.multiplicity for lv in rep.levels if lv.verdict == "negative")


def test_clifford_bound_errors():
    with pytest.raises(NotApplicableError):
        clifford_index_bound(1, 1, 100)
    with pytest.raises(RangeError):
        clifford_index_bound(1, 2, 5)
