"""Cubic polynomials with exact or real coefficients, and certified real roots."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterator

import sympy

from .errors import DomainError


@dataclass(frozen=True)
class Root:
    x: float | Fraction
    residual: float  # |P(x)|, evaluated exactly for rational coefficients
    exact: bool
    double: bool = False


@dataclass(frozen=True)
class CubicPoly:
    """``a3 x^3 + a2 x^2 + a1 x + a0``; coefficients stored leading first."""

    a3: object
    a2: object
    a1: object
    a0: object

    @property
    def coefficients(self) -> tuple:
        return (self.a3, self.a2, self.a1, self.a0)

    def __call__(self, x):
        acc = self.a3
        for c in (self.a2, self.a1, self.a0):
            acc = acc * x + c
        return acc

    def __iter__(self) -> Iterator:
        return iter(self.coefficients)

    def __eq__(self, other):
        if not isinstance(other, CubicPoly):
            return NotImplemented
        return all(a == b for a, b in zip(self.coefficients, other.coefficients))

    def __hash__(self):
        return hash(self.coefficients)

    def __sub__(self, other: CubicPoly) -> CubicPoly:
        return CubicPoly(*(a - b for a, b in zip(self.coefficients, other.coefficients)))

    def derivative(self, x, order: int = 1):
        a3, a2, a1, _ = self.coefficients
        if order == 1:
            return (3 * a3 * x + 2 * a2) * x + a1
        if order == 2:
            return 6 * a3 * x + 2 * a2
        if order == 3:
            return 6 * a3
        raise ValueError("order must be 1, 2 or 3")

    def is_exact(self) -> bool:
        return all(isinstance(c, (int, Fraction)) for c in self.coefficients)

    def as_float(self) -> CubicPoly:
        return CubicPoly(*(float(c) for c in self.coefficients))

    def discriminant(self):
        a, b, c, d = self.coefficients
        return 18 * a * b * c * d - 4 * b**3 * d + b * b * c * c - 4 * a * c**3 - 27 * a * a * d * d

    def real_root_count(self) -> int:
        """Number of distinct real roots, from the sign of the discriminant."""
        self._require_cubic()
        disc = self.discriminant()
        if disc > 0:
            return 3
        if disc < 0:
            return 1
        a, b, c, _ = self.coefficients
        # triple root iff the depressed linear coefficient also vanishes
        return 1 if 3 * a * c - b * b == 0 else 2

    def cardano_roots(self) -> list[float]:
        """Real roots by the closed form (trigonometric branch for three roots)."""
        self._require_cubic()
        a, b, c, d = (float(v) for v in self.coefficients)
        b, c, d = b / a, c / a, d / a
        p = c - b * b / 3.0
        q = 2.0 * b**3 / 27.0 - b * c / 3.0 + d
        shift = -b / 3.0
        count = self.real_root_count()
        if count == 3:
            r = 2.0 * math.sqrt(-p / 3.0)
            arg = max(-1.0, min(1.0, 3.0 * q / (p * r)))
            phi = math.acos(arg) / 3.0
            roots = [r * math.cos(phi - 2.0 * math.pi * k / 3.0) + shift for k in range(3)]
        elif count == 2:
            roots = [3.0 * q / p + shift, -1.5 * q / p + shift]
        else:
            disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
            s = math.sqrt(max(disc, 0.0))
            roots = [math.copysign(abs(-q / 2.0 + s) ** (1 / 3), -q / 2.0 + s)
                     + math.copysign(abs(-q / 2.0 - s) ** (1 / 3), -q / 2.0 - s) + shift]
        return sorted(roots)

    def rational_roots(self) -> list[Fraction]:
        """All rational roots (requires rational coefficients)."""
        if not self.is_exact():
            raise DomainError("rational roots need rational coefficients")
        coeffs = [Fraction(c) for c in self.coefficients]
        den = math.lcm(*(c.denominator for c in coeffs))
        ints = [int(c * den) for c in coeffs]
        while ints and ints[-1] == 0:
            ints.pop()
        found = {Fraction(0)} if len(ints) < 4 else set()
        if not ints or ints[0] == 0:
            return sorted(found)
        lead, const = abs(ints[0]), abs(ints[-1])
        for num, dd in product(_divisors(const), _divisors(lead)):
            for cand in (Fraction(num, dd), Fraction(-num, dd)):
                if self(cand) == 0:
                    found.add(cand)
        return sorted(found)

    def roots_in(self, lo: float, hi: float, tol: float = 1e-12) -> list[Root]:
        """Real roots in the open interval ``(lo, hi)``, each with ``|P(x)| <= tol``.

        Rational roots are reported exactly.  The remaining roots are bracketed
        on monotone pieces (split at the critical points), bisected and then
        polished by Newton steps kept inside the bracket.  A critical point
        where ``|P| <= tol`` is reported as a double root.
        """
        self._require_cubic()
        if tol <= 0:
            raise DomainError("tol must be positive")
        exact = [r for r in self.rational_roots() if lo < r < hi] if self.is_exact() else []
        out = [Root(r, 0.0, True, double=self.derivative(r) == 0) for r in exact]

        fp = self.as_float()
        crit = sorted(x for x in _quadratic_real_roots(3 * fp.a3, 2 * fp.a2, fp.a1) if lo < x < hi)
        knots = [float(lo), *crit, float(hi)]
        numeric: list[tuple[float, bool]] = []
        for u, v in zip(knots, knots[1:]):
            pu, pv = fp(u), fp(v)
            if pu == 0.0 or pv == 0.0 or pu * pv > 0:
                continue
            numeric.append((_bracketed_root(fp, u, v), False))
        for c in crit:
            if abs(fp(c)) <= tol:
                numeric.append((c, True))
        for x, double in numeric:
            if any(abs(x - float(r.x)) < 1e-9 for r in out):
                continue
            res = self._residual(x)
            if res <= tol:
                out.append(Root(x, res, False, double=double))
        out.sort(key=lambda r: float(r.x))
        return out

    def nonnegative_on(self, lo=0, tol: float = 0.0) -> bool:
        """Whether ``P >= -tol`` on ``[lo, inf)``.

        Decided exactly (critical values via sympy) for rational coefficients;
        otherwise from the float critical values.
        """
        self._require_cubic()
        if self.a3 < 0:
            return False
        if self.is_exact():
            x = sympy.Symbol("x")
            expr = sum(sympy.Rational(Fraction(c).numerator, Fraction(c).denominator) * x**k
                       for k, c in zip((3, 2, 1, 0), self.coefficients))
            lo_s = sympy.Rational(Fraction(lo).numerator, Fraction(lo).denominator)
            points = [lo_s] + [c for c in sympy.solve(sympy.diff(expr, x), x) if c.is_real and c > lo_s]
            return all(sympy.simplify(expr.subs(x, c)) >= -tol for c in points)
        fp = self.as_float()
        points = [float(lo)] + [c for c in _quadratic_real_roots(3 * fp.a3, 2 * fp.a2, fp.a1) if c > lo]
        return all(fp(c) >= -tol for c in points)

    def _residual(self, x: float) -> float:
        if self.is_exact():
            return float(abs(self(Fraction(x))))
        return abs(self.as_float()(x))

    def _require_cubic(self):
        if self.a3 == 0:
            raise DomainError("leading coefficient vanishes; not a cubic")


def _divisors(n: int) -> list[int]:
    n = abs(n)
    return [d for d in range(1, n + 1) if n % d == 0]


def _quadratic_real_roots(a: float, b: float, c: float) -> list[float]:
    if a == 0:
        return [] if b == 0 else [-c / b]
    disc = b * b - 4 * a * c
    if disc < 0:
        return []
    s = math.sqrt(disc)
    q = -0.5 * (b + math.copysign(s, b))
    roots = [q / a] + ([c / q] if q != 0 else [])
    return sorted(set(roots))


def _bracketed_root(poly: CubicPoly, u: float, v: float) -> float:
    fu = poly(u)
    for _ in range(60):
        mid = 0.5 * (u + v)
        fm = poly(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (fu > 0):
            u, fu = mid, fm
        else:
            v = mid
        if v - u < 1e-6:
            break
    x = 0.5 * (u + v)
    for _ in range(20):
        d = poly.derivative(x)
        if d == 0.0:
            break
        step = poly(x) / d
        nxt = x - step
        if not (u <= nxt <= v):
            break
        x = nxt
        if abs(step) <= 4e-16 * max(1.0, abs(x)):
            break
    return x
