from fractions import Fraction

import numpy as np
import pytest

from tristab.cubic import CubicPoly
from tristab.errors import DomainError


def test_horner_and_derivatives():
    P = CubicPoly(2, -3, 5, -7)
    assert P(3) == 2 * 27 - 3 * 9 + 15 - 7
    assert P.derivative(3) == 6 * 9 - 6 * 3 + 5
    assert P.derivative(3, 2) == 12 * 3 - 6
    assert P.derivative(0, 3) == 12


def test_real_root_count():
    assert CubicPoly(1, 0, -1, 0).real_root_count() == 3
    assert CubicPoly(1, 0, 1, 0).real_root_count() == 1
    assert CubicPoly(1, -3, 0, 4).real_root_count() == 2  # (x+1)(x-2)^2
    assert CubicPoly(1, -3, 3, -1).real_root_count() == 1  # (x-1)^3


def test_cardano_matches_numpy():
    for coeffs in [(1, -6, 11, -6), (3, -7, 5, -1), (9, -11, 5, -1), (1, 0, 1, 1)]:
        P = CubicPoly(*coeffs)
        ref = sorted(r.real for r in np.roots(coeffs) if abs(r.imag) < 1e-7)
        got = P.cardano_roots()
        assert len(got) == len(set(np.round(ref, 6)))
        for r in got:
            assert min(abs(r - s) for s in ref) < 1e-6


def test_rational_roots():
    assert CubicPoly(3, -7, 5, -1).rational_roots() == [Fraction(1, 3), Fraction(1)]
    assert CubicPoly(1, 0, 0, 0).rational_roots() == [Fraction(0)]
    with pytest.raises(DomainError):
        CubicPoly(1.5, 0, 0, 1).rational_roots()


def test_roots_in_exact_and_numeric():
    roots = CubicPoly(6, -9, 5, -1).roots_in(0, 1)
    assert [r.x for r in roots] == [Fraction(1, 2)] and roots[0].exact
    (root,) = CubicPoly(9, -11, 5, -1).roots_in(0, 1)
    assert not root.exact and root.residual <= 1e-12
    assert root.x == pytest.approx(0.61016650169954, abs=1e-12)


def test_double_root_detected():
    roots = CubicPoly(1.0, -3.0, 0.0, 4.0).roots_in(0, 3)
    assert len(roots) == 1 and roots[0].double and roots[0].x == pytest.approx(2.0)


def test_not_a_cubic():
    with pytest.raises(DomainError):
        CubicPoly(0, 1, 1, 1).roots_in(0, 1)


def test_nonnegative_on():
    assert CubicPoly(1, 2, 1, 0).nonnegative_on(0)
    assert CubicPoly(1, -3, 0, 4).nonnegative_on(0)  # touches zero at 2
    assert not CubicPoly(1, -3, 0, 3).nonnegative_on(0)
    assert not CubicPoly(-1, 0, 0, 5).nonnegative_on(0)
    assert CubicPoly(1.0, -3.0, 0.0, 4.0).nonnegative_on(0, tol=1e-12)
