from fractions import Fraction

import pytest
import sympy

from tristab.catalog import (
    check_triharmonicity,
    clifford_geometry,
    clifford_polynomial,
    clifford_torus,
    small_triharmonic_hypersphere,
    solve_clifford_radii,
)
from tristab.cubic import CubicPoly
from tristab.errors import DomainError, NotApplicableError
from tristab.spaceform import HypersurfaceData

# bisection oracle on (9, -11, 5, -1), frozen
R1_SQ_12 = 0.6101665016995474


def test_small_hypersphere():
    d1 = small_triharmonic_hypersphere(1)
    assert d1.A_sq == 2 and sympy.simplify(d1.H**2 - 2) == 0
    assert small_triharmonic_hypersphere(5).A_sq == 10
    for m in range(1, 20):
        assert check_triharmonicity(small_triharmonic_hypersphere(m)) == 0


def test_clifford_polynomial_examples():
    assert clifford_polynomial(1, 0) == CubicPoly(3, -7, 5, -1)
    assert clifford_polynomial(1, 0)(Fraction(1, 3)) == 0
    assert clifford_polynomial(1, 1) == CubicPoly(6, -9, 5, -1)
    assert clifford_polynomial(1, 1)(Fraction(1, 2)) == 0
    assert clifford_polynomial(1, 2) == CubicPoly(9, -11, 5, -1)
    with pytest.raises(DomainError):
        clifford_polynomial(0, 0)


def test_solve_examples():
    r11 = solve_clifford_radii(1, 1)
    assert r11.proper == () and [r.x for r in r11.minimal] == [Fraction(1, 2)]
    r12 = solve_clifford_radii(1, 2)
    assert len(r12.proper) == 1
    assert r12.proper[0].x == pytest.approx(R1_SQ_12, abs=1e-12)
    assert solve_clifford_radii(2, 1).real_root_count >= 1
    with pytest.raises(DomainError):
        solve_clifford_radii(1, 0)


def test_bisection_oracle_agrees():
    P = lambda x: 9 * x**3 - 11 * x**2 + 5 * x - 1
    lo, hi = 0.5, 0.7
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if P(mid) < 0 else (lo, mid)
    assert solve_clifford_radii(1, 2).proper[0].x == pytest.approx(lo, abs=1e-13)


def test_geometry_examples():
    g = clifford_geometry(1, 1, Fraction(1, 2))
    assert g.H == 0 and g.A_sq == 2
    g = clifford_geometry(1, 2, R1_SQ_12)
    assert g.A_sq == pytest.approx(3.7693, abs=1e-4)
    assert g.H == pytest.approx(0.5676, abs=1e-4)
    with pytest.raises(DomainError):
        clifford_geometry(1, 2, 1.0)


def test_geometry_mirror():
    for p, q, x in [(1, 2, 0.3), (3, 5, 0.71), (2, 2, 0.4)]:
        a, b = clifford_geometry(p, q, x), clifford_geometry(q, p, 1 - x)
        assert a.H == pytest.approx(-b.H, abs=1e-14)
        assert a.A_sq == pytest.approx(b.A_sq, rel=1e-14)


def test_geometry_exact_for_rational():
    g = clifford_geometry(2, 3, Fraction(2, 5))
    assert isinstance(g.A_sq, Fraction)
    assert sympy.simplify(g.mean_from_principal() - g.H) == 0


def test_triharmonicity_residual_clifford_12():
    g = clifford_torus(1, 2).geometry
    assert abs(check_triharmonicity(g)) < 1e-8


def test_minimal_hyperbolic_forces_totally_geodesic():
    # |A|^4 + m|A|^2 = 0 with H = 0 and K = -1
    assert check_triharmonicity(HypersurfaceData(2, 0, 0, ((0, 2),)), K=-1) == 0
    assert check_triharmonicity(HypersurfaceData(2, 0, 2, ((1, 1), (-1, 1))), K=-1) > 0


def test_proper_roots_are_triharmonic_sweep():
    for p in range(1, 11):
        for q in range(1, 11):
            roots = solve_clifford_radii(p, q)
            for r in roots.proper:
                assert abs(clifford_polynomial(p, q)(r.x)) <= 1e-12
                assert abs(check_triharmonicity(clifford_geometry(p, q, r.x))) <= 1e-8


def test_equal_factors_only_minimal_half():
    for p in range(1, 11):
        roots = solve_clifford_radii(p, p)
        assert roots.proper == ()
        assert [r.x for r in roots.minimal] == [Fraction(1, 2)]


def test_torus_not_applicable():
    with pytest.raises(NotApplicableError):
        clifford_torus(2, 2)
    t = clifford_torus(1, 2)
    assert t.R1_sq + t.R2_sq == pytest.approx(1.0)
    assert t.geometry.m == 3
