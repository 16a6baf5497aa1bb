from fractions import Fraction

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from tristab.catalog import clifford_geometry, clifford_polynomial
from tristab.cubic import CubicPoly
from tristab.spaceform import curvature_operator
from tristab.spectrum import product_spectrum, sphere_spectrum
from tristab.stability import bound_poly_from_estimate, small_sphere_form_poly, umbilic_hessian_poly

vec3 = st.lists(st.floats(-10, 10, allow_nan=False), min_size=3, max_size=3).map(np.array)
curv = st.floats(-5, 5, allow_nan=False)
radius_sq = st.fractions(min_value=Fraction(1, 20), max_value=Fraction(5), max_denominator=20).filter(lambda r: r > 0)


@given(curv, vec3, vec3, vec3)
def test_curvature_antisymmetric(K, X, Y, Z):
    assert np.allclose(curvature_operator(K, X, Y, Z), -curvature_operator(K, Y, X, Z), atol=1e-9)


@given(curv, vec3, vec3, vec3, vec3)
def test_curvature_pair_symmetry(K, X, Y, Z, W):
    lhs = curvature_operator(K, X, Y, Z) @ W
    rhs = -(curvature_operator(K, X, Y, W) @ Z)
    assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(lhs))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), radius_sq, st.integers(1, 4), radius_sq, st.integers(0, 60))
def test_product_commutes(p, r1, q, r2, lam_max):
    a, b = sphere_spectrum(p, r1, lam_max), sphere_spectrum(q, r2, lam_max)
    assert product_spectrum(a, b, lam_max).as_pairs() == product_spectrum(b, a, lam_max).as_pairs()


@given(st.integers(1, 50))
def test_small_sphere_only_constant_mode_negative(m):
    Q = small_sphere_form_poly(m)
    assert Q(0) < 0
    for j in range(1, 6):
        assert Q(Fraction(3 * j * (j + m - 1))) > 0


@given(st.integers(1, 50), st.sampled_from([0, -1]), st.fractions(min_value=0, max_value=1000))
def test_totally_geodesic_nonnegative(m, K, lam):
    assert umbilic_hessian_poly(m, 0, K)(lam) >= 0


@given(st.integers(1, 10), st.floats(1.0, 20.0))
def test_bound_poly_monic(m, ratio):
    B = bound_poly_from_estimate(m, m * ratio)
    assert B.a3 == 1


@given(st.integers(1, 6), st.integers(1, 6), st.fractions(min_value=Fraction(1, 100), max_value=Fraction(99, 100), max_denominator=100))
def test_geometry_invariants_exact(p, q, x):
    g = clifford_geometry(p, q, x)
    assert isinstance(g.A_sq, Fraction)
    assert g.norm_sq_from_principal() == g.A_sq or abs(float(g.norm_sq_from_principal() - g.A_sq)) < 1e-12


@given(st.integers(1, 10), st.integers(1, 10))
def test_returned_roots_have_small_residual(p, q):
    for r in clifford_polynomial(p, q).roots_in(0, 1):
        assert r.residual <= 1e-12


@given(st.lists(st.integers(-20, 20), min_size=3, max_size=3), st.integers(1, 5))
def test_rational_roots_found(roots, lead):
    # oracle: a cubic built from its integer roots
    a, b, c = roots
    P = CubicPoly(lead, -lead * (a + b + c), lead * (a * b + b * c + a * c), -lead * a * b * c)
    assert P.rational_roots() == sorted({Fraction(a), Fraction(b), Fraction(c)})
