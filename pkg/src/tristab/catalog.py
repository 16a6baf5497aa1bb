"""Proper triharmonic hypersurfaces of the sphere: small hypersphere and Clifford tori."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import sympy

from .cubic import CubicPoly, Root
from .errors import DomainError, NotApplicableError
from .spaceform import HypersurfaceData

MINIMAL_TOL = 1e-10


def to_number(value):
    """Collapse sympy results to Fraction when rational, float otherwise."""
    if isinstance(value, (int, Fraction, float)):
        return value
    value = sympy.sympify(value)
    if not value.is_Float:
        value = sympy.simplify(value)
    if value.is_Rational:
        return Fraction(int(value.p), int(value.q))
    return float(value)


def small_triharmonic_hypersphere(m: int) -> HypersurfaceData:
    """``S^m(1/sqrt 3)`` in ``S^{m+1}``: ``A = -sqrt(2) Id``, ``|A|^2 = 2m``, ``H = -sqrt(2)``."""
    if m < 1:
        raise DomainError("m must be >= 1")
    k = -sympy.sqrt(2)
    return HypersurfaceData(m=m, H=k, A_sq=2 * m, principal=((k, m),))


def clifford_polynomial(p: int, q: int) -> CubicPoly:
    """``P(x) = 3(p+q) x^3 - (2q+7p) x^2 + 5p x - p`` whose roots in (0,1) give ``R1^2``."""
    if p < 0 or q < 0 or p + q < 1:
        raise DomainError("need p, q >= 0 and p + q >= 1")
    return CubicPoly(3 * (p + q), -(2 * q + 7 * p), 5 * p, -p)


@dataclass(frozen=True)
class CliffordRoots:
    p: int
    q: int
    real_root_count: int
    proper: tuple[Root, ...]
    minimal: tuple[Root, ...]


def solve_clifford_radii(p: int, q: int, tol: float = 1e-12) -> CliffordRoots:
    """Roots of ``P`` in (0,1), split into proper ones and those giving a minimal torus.

    No root in (0,1) is not an error; both lists are then empty.
    """
    if p < 1 or q < 1:
        raise DomainError("Clifford tori need p, q >= 1; use clifford_polynomial for a degenerate factor")
    poly = clifford_polynomial(p, q)
    proper, minimal = [], []
    for root in poly.roots_in(0, 1, tol):
        geo = clifford_geometry(p, q, root.x)
        if abs(float(geo.m * geo.H)) <= MINIMAL_TOL:
            minimal.append(root)
        else:
            proper.append(root)
    return CliffordRoots(p, q, poly.real_root_count(), tuple(proper), tuple(minimal))


def clifford_geometry(p: int, q: int, x) -> HypersurfaceData:
    """Shape data of ``S^p(R1) x S^q(R2)`` in ``S^{p+q+1}`` with ``R1^2 = x``.

    Principal curvatures ``-R2/R1`` (multiplicity p) and ``R1/R2`` (multiplicity q).
    Rational ``x`` is handled exactly.  A zero ``p`` or ``q`` gives the round
    hypersphere of the other factor.
    """
    if p < 0 or q < 0 or p + q < 1:
        raise DomainError("need p, q >= 0 and p + q >= 1")
    if not 0 < x < 1:
        raise DomainError(f"R1^2 must lie in (0, 1), got {x}")
    m = p + q
    if isinstance(x, (int, Fraction)):
        xs = sympy.Rational(x.numerator, x.denominator) if isinstance(x, Fraction) else sympy.Integer(x)
        r = sympy.sqrt((1 - xs) / xs)  # R2 / R1
        k1, k2 = -r, 1 / r
        H = sympy.simplify((k1 * p + k2 * q) / m)
        A_sq = to_number((1 - xs) / xs * p + xs / (1 - xs) * q)
    else:
        x = float(x)
        r = math.sqrt((1.0 - x) / x)
        k1, k2 = -r, 1.0 / r
        H = (k1 * p + k2 * q) / m
        A_sq = (1.0 - x) / x * p + x / (1.0 - x) * q
    principal = tuple((k, mult) for k, mult in ((k1, p), (k2, q)) if mult > 0)
    return HypersurfaceData(m=m, H=H, A_sq=A_sq, principal=principal)


@dataclass(frozen=True)
class CliffordTorus:
    p: int
    q: int
    R1_sq: float | Fraction
    geometry: HypersurfaceData

    @property
    def R2_sq(self):
        return 1 - self.R1_sq


def clifford_torus(p: int, q: int, tol: float = 1e-12, which: int = 0) -> CliffordTorus:
    """The ``which``-th proper triharmonic Clifford torus for ``(p, q)``."""
    if p < 1 or q < 1:
        raise DomainError("Clifford tori need p, q >= 1")
    roots = solve_clifford_radii(p, q, tol)
    if not roots.proper:
        raise NotApplicableError(f"no proper triharmonic Clifford torus for (p, q) = ({p}, {q})")
    if not 0 <= which < len(roots.proper):
        raise DomainError(f"only {len(roots.proper)} proper root(s) available")
    x = roots.proper[which].x
    return CliffordTorus(p, q, x, clifford_geometry(p, q, x))


def check_triharmonicity(data: HypersurfaceData, K=1):
    """Residual ``|A|^4 - m K |A|^2 - m^2 K H^2`` of the constant-|A|^2 triharmonic condition."""
    m, A_sq, H = data.m, data.A_sq, data.H
    res = A_sq * A_sq - m * K * A_sq - m * m * K * H * H
    if isinstance(res, sympy.Basic):
        return to_number(sympy.expand(res))
    return res
