"""Normal-stability quadratic forms and normal indices.

A normal variation ``V = f nu`` of a CMC hypersurface turns the Hessian of
the trienergy into an integral of a density built from ``f``.  On a closed
manifold, plugging in a Laplace eigenfunction (``Delta f = lambda f``, with
the positive-spectrum sign) collapses every density used here into a cubic
in ``lambda`` times ``int f^2``.  The index is then read off the spectrum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import sympy

from .catalog import clifford_geometry, solve_clifford_radii, to_number
from .cubic import CubicPoly
from .errors import DomainError, NotApplicableError, RangeError
from .spectrum import SphereSource, ProductSource, Spectrum, spectrum_up_to

# Bundle-valued terms of the CMC Hessian density (V = f nu).
SQ_NABLA_LAP_FNU = "sq_nabla_lap_fnu"  # |nabla-bar Delta-bar (f nu)|^2
SQ_LAP_FNU = "sq_lap_fnu"  # |Delta-bar (f nu)|^2
NABLA_LAP_FNU_DPHI_F = "nabla_lap_fnu_dphi_f"  # <nabla-bar Delta-bar (f nu), dphi> f
# Scalar terms in f.
SQ_GRAD_LAP_F = "sq_grad_lap_f"  # |grad Delta f|^2
SQ_LAP_F = "sq_lap_f"  # |Delta f|^2
SQ_HESS_F = "sq_hess_f"  # |nabla^2 f|^2
SQ_GRAD_F = "sq_grad_f"  # |grad f|^2
F_SQ = "f_sq"  # f^2
F_LAP_F = "f_lap_f"  # f Delta f
GRAD_LAP_F_GRAD_F = "grad_lap_f_grad_f"  # <grad Delta f, grad f>
ABS_F_ABS_LAP_F = "abs_f_abs_lap_f"  # |f| |Delta f|
ABS_GRAD_F_ABS_GRAD_LAP_F = "abs_grad_f_abs_grad_lap_f"  # |grad f| |grad Delta f|

BUNDLE_TERMS = (SQ_NABLA_LAP_FNU, SQ_LAP_FNU, NABLA_LAP_FNU_DPHI_F)
SCALAR_TERMS = (
    SQ_GRAD_LAP_F,
    SQ_LAP_F,
    SQ_HESS_F,
    SQ_GRAD_F,
    F_SQ,
    F_LAP_F,
    GRAD_LAP_F_GRAD_F,
    ABS_F_ABS_LAP_F,
    ABS_GRAD_F_ABS_GRAD_LAP_F,
)

LABELS = {
    SQ_NABLA_LAP_FNU: "|∇̄Δ̄(fν)|²",
    SQ_LAP_FNU: "|Δ̄(fν)|²",
    NABLA_LAP_FNU_DPHI_F: "⟨∇̄Δ̄(fν),dφ⟩f",
    SQ_GRAD_LAP_F: "|∇Δf|²",
    SQ_LAP_F: "|Δf|²",
    SQ_HESS_F: "|∇²f|²",
    SQ_GRAD_F: "|∇f|²",
    F_SQ: "f²",
    F_LAP_F: "fΔf",
    GRAD_LAP_F_GRAD_F: "⟨∇Δf,∇f⟩",
    ABS_F_ABS_LAP_F: "|f||Δf|",
    ABS_GRAD_F_ABS_GRAD_LAP_F: "|∇f||∇Δf|",
}


def _is_zero(c) -> bool:
    if isinstance(c, sympy.Basic):
        return sympy.simplify(c) == 0
    return c == 0


@dataclass(frozen=True)
class HessianDensity:
    """Coefficient table ``term -> coefficient`` of a Hessian integrand."""

    terms: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.terms.get(key, 0)

    def nonzero(self) -> dict:
        return {k: v for k, v in self.terms.items() if not _is_zero(v)}

    def __add__(self, other: HessianDensity) -> HessianDensity:
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return HessianDensity(out)

    def scaled(self, factor) -> HessianDensity:
        return HessianDensity({k: factor * v for k, v in self.terms.items()})


def hessian_density_terms(m, H, A_sq, K) -> HessianDensity:
    """Integrand of ``Hess E3(f nu, f nu)`` for a CMC triharmonic hypersurface.

    Arguments may be numbers or sympy symbols.  Only the first entry survives
    when ``K = 0``.
    """
    return HessianDensity(
        {
            SQ_NABLA_LAP_FNU: 1,
            SQ_LAP_FNU: -2 * m * K,
            NABLA_LAP_FNU_DPHI_F: 2 * m * H * K,
            SQ_GRAD_F: m**2 * K**2,
            F_SQ: m**2 * K**2 * A_sq + 5 * m**3 * K**2 * H**2 - 7 * m**2 * K * A_sq * H**2,
            F_LAP_F: -2 * m**2 * K * H**2,
        }
    )


def reduce_umbilic(density: HessianDensity, m, alpha) -> HessianDensity:
    """Expand the bundle terms for ``A = alpha Id``, ``nabla A = 0`` (so ``H = alpha``).

    Uses ``Delta-bar(f nu) = (Delta f + m alpha^2 f) nu + 2 alpha grad f`` and
    ``nabla-bar_X Delta-bar(f nu) = (X(Delta f) + (m+2) alpha^2 X f) nu
    + alpha (2 nabla_X grad f - (Delta f + m alpha^2 f) X)``, with
    ``tr nabla^2 f = -Delta f``.
    """
    a2 = alpha * alpha
    out = HessianDensity({k: v for k, v in density.terms.items() if k not in BUNDLE_TERMS})
    c = density[SQ_NABLA_LAP_FNU]
    out = out + HessianDensity(
        {
            SQ_GRAD_LAP_F: c,
            GRAD_LAP_F_GRAD_F: c * 2 * (m + 2) * a2,
            SQ_GRAD_F: c * (m + 2) ** 2 * a2 * a2,
            SQ_HESS_F: c * 4 * a2,
            SQ_LAP_F: c * (m + 4) * a2,
            F_LAP_F: c * (4 * m + 2 * m * m) * a2 * a2,
            F_SQ: c * m**3 * a2**3,
        }
    )
    c = density[SQ_LAP_FNU]
    out = out + HessianDensity(
        {
            SQ_LAP_F: c,
            F_LAP_F: c * 2 * m * a2,
            F_SQ: c * m * m * a2 * a2,
            SQ_GRAD_F: c * 4 * a2,
        }
    )
    c = density[NABLA_LAP_FNU_DPHI_F]
    out = out + HessianDensity({F_LAP_F: -c * alpha * (m + 2), F_SQ: -c * alpha * m * m * a2})
    return out


def integrate_by_parts(density: HessianDensity) -> HessianDensity:
    """Fold ``<grad Delta f, grad f> -> |Delta f|^2`` and ``f Delta f -> |grad f|^2``."""
    terms = dict(density.terms)
    g = terms.pop(GRAD_LAP_F_GRAD_F, 0)
    h = terms.pop(F_LAP_F, 0)
    terms[SQ_LAP_F] = terms.get(SQ_LAP_F, 0) + g
    terms[SQ_GRAD_F] = terms.get(SQ_GRAD_F, 0) + h
    return HessianDensity(terms)


def eigen_reduce(density: HessianDensity, ricci=0) -> CubicPoly:
    """Cubic in ``lambda`` whose value times ``int f^2`` is the integral of ``density``.

    Valid for eigenfunctions ``Delta f = lambda f`` on a closed manifold with
    ``Ric = ricci * g`` (Bochner: ``int |nabla^2 f|^2 = lambda^2 - ricci lambda``).
    The absolute-value cross terms are replaced by their eigenfunction values.
    """
    for k in BUNDLE_TERMS:
        if not _is_zero(density[k]):
            raise DomainError(f"bundle term {k} must be reduced before eigen-reduction")
    d = density
    hess = d[SQ_HESS_F]
    c3 = d[SQ_GRAD_LAP_F]
    c2 = d[SQ_LAP_F] + d[GRAD_LAP_F_GRAD_F] + d[ABS_GRAD_F_ABS_GRAD_LAP_F] + hess
    c1 = d[SQ_GRAD_F] + d[F_LAP_F] + d[ABS_F_ABS_LAP_F] - ricci * hess
    c0 = d[F_SQ]
    return CubicPoly(*(to_number(c) for c in (c3, c2, c1, c0)))


def small_sphere_form_poly(m: int) -> CubicPoly:
    """Reference reduced form ``lambda^3 + 4(m+6) lambda^2 + (-3m^2-4m+40) lambda - 24 m^3``.

    Assembling the CMC Hessian
    directly (``umbilic_hessian_poly(m, sqrt(2), 1)``) gives ``-3m^2-16m+40``
    for the linear coefficient; the finite-difference oracle in
    :mod:`tristab.varcheck` agrees with the assembled one.
    """
    if m < 1:
        raise DomainError("m must be >= 1")
    return CubicPoly(1, 4 * (m + 6), -3 * m * m - 4 * m + 40, -24 * m**3)


def evaluate_form(poly: CubicPoly, lam):
    return poly(lam)


def _umbilic_admissible(c, K) -> bool:
    c_sq = c * c
    if isinstance(c_sq, sympy.Basic):
        c_sq = to_number(c_sq)
    if isinstance(c_sq, (int, Fraction)) and isinstance(K, (int, Fraction)):
        return c_sq == 0 or (K > 0 and c_sq == 2 * K)
    c_sq, K = float(c_sq), float(K)
    return c_sq == 0.0 or (K > 0 and abs(c_sq - 2 * K) <= 1e-12 * max(1.0, K))


def umbilic_hessian_poly(m: int, c, K) -> CubicPoly:
    """Reduced normal Hessian of an umbilic triharmonic hypersurface ``A = -c Id``.

    Admissible data: ``c = 0`` (totally geodesic) or ``c^2 = 2K`` with ``K > 0``.
    ``c`` may be a sympy expression such as ``sympy.sqrt(2)`` for exact output.
    """
    if m < 1:
        raise DomainError("m must be >= 1")
    if not _umbilic_admissible(c, K):
        raise DomainError(f"(c, K) = ({c}, {K}) is not umbilic triharmonic data")
    alpha = -c
    a2 = alpha * alpha
    density = hessian_density_terms(m, alpha, m * a2, K)
    reduced = integrate_by_parts(reduce_umbilic(density, m, alpha))
    ricci = (m - 1) * (K + a2)
    return eigen_reduce(reduced, ricci)


def estimate_density(m: int, A_sq) -> HessianDensity:
    """Lower-bound density for proper CMC triharmonic hypersurfaces of ``S^{m+1}``
    with constant ``|A|^2``; the constant-``f^2`` bracket is read as one coefficient."""
    if float(A_sq) < m:
        raise DomainError(f"|A|^2 = {A_sq} < m = {m}; no real estimate")
    exact = isinstance(A_sq, (int, Fraction))
    if exact:
        A = sympy.Rational(A_sq.numerator, A_sq.denominator) if isinstance(A_sq, Fraction) else sympy.Integer(A_sq)
        cross = 2 * sympy.sqrt(m) * A * sympy.sqrt(A - m)
    else:
        A = float(A_sq)
        cross = 2 * math.sqrt(m) * A * math.sqrt(A - m)
    return HessianDensity(
        {
            SQ_GRAD_LAP_F: 1,
            SQ_LAP_F: -2 * m,
            ABS_GRAD_F_ABS_GRAD_LAP_F: -4 * A,
            ABS_F_ABS_LAP_F: -cross,
            SQ_GRAD_F: m * m - 10 * m * A,
            F_SQ: A * (7 * m * A - m * m - cross - 9 * A * A),
        }
    )


def bound_poly_from_estimate(m: int, A_sq) -> CubicPoly:
    """``B(lambda)``: the estimate evaluated on a Laplace eigenfunction."""
    return eigen_reduce(estimate_density(m, A_sq))


@dataclass(frozen=True)
class LevelVerdict:
    lam: object
    multiplicity: int
    value: object
    verdict: str  # "negative" | "zero" | "positive"


@dataclass(frozen=True)
class TailCertificate:
    """At ``lam``: ``P > 0``, ``P' > 0``, ``P'' >= 0`` for a cubic with positive
    leading coefficient, so ``P`` is increasing and positive on ``[lam, inf)``."""

    lam: object
    value: object
    slope: object
    curvature: object


@dataclass(frozen=True)
class IndexReport:
    surface: str
    levels: tuple[LevelVerdict, ...]
    index: int
    lambda_threshold: object
    certificate: TailCertificate
    poly: CubicPoly
    bound: bool = False
    exact: bool = True
    tolerance: float = 0.0
    caveat: str | None = None
    details: dict = field(default_factory=dict)


def _verdict(value, tol) -> str:
    if isinstance(value, (int, Fraction)):
        return "negative" if value < 0 else "zero" if value == 0 else "positive"
    if abs(value) <= tol:
        return "zero"
    return "negative" if value < 0 else "positive"


def _certify_tail(poly: CubicPoly, verdicts: list[LevelVerdict], tol) -> TailCertificate:
    if not float(poly.a3) > 0:
        raise DomainError("tail certification needs a positive leading coefficient")
    for i, lv in enumerate(verdicts):
        lam = lv.lam
        value, slope, curv = poly(lam), poly.derivative(lam), poly.derivative(lam, 2)
        if value > tol and slope > tol and curv >= 0:
            if all(v.verdict == "positive" for v in verdicts[i:]):
                return TailCertificate(lam, value, slope, curv)
    raise RangeError("spectrum too short: no level certifies positivity of the tail")


def _index_report(surface, poly, spectrum: Spectrum, tol, **kw) -> IndexReport:
    verdicts = []
    for lv in spectrum.levels:
        value = poly(lv.lam)
        verdicts.append(LevelVerdict(lv.lam, lv.multiplicity, value, _verdict(value, tol)))
    cert = _certify_tail(poly, verdicts, tol)
    index = sum(v.multiplicity for v in verdicts if v.verdict == "negative")
    return IndexReport(
        surface=surface,
        levels=tuple(verdicts),
        index=index,
        lambda_threshold=cert.lam,
        certificate=cert,
        poly=poly,
        tolerance=tol,
        **kw,
    )


def small_sphere_normal_index(m: int, lambda_max=None, poly: CubicPoly | None = None) -> IndexReport:
    """Normal index of ``S^m(1/sqrt 3)`` in ``S^{m+1}`` in exact arithmetic.

    ``poly`` defaults to :func:`small_sphere_form_poly`; pass
    ``umbilic_hessian_poly(m, sympy.sqrt(2), 1)`` for the assembled form.
    """
    if m < 1:
        raise DomainError("m must be >= 1")
    lambda_max = Fraction(3 * m) if lambda_max is None else Fraction(lambda_max)
    if lambda_max < 3 * m:
        raise RangeError(f"lambda_max = {lambda_max} is below the first nonzero eigenvalue 3m = {3 * m}")
    poly = small_sphere_form_poly(m) if poly is None else poly
    spectrum = spectrum_up_to(SphereSource(m, Fraction(1, 3)), lambda_max)
    return _index_report(f"S^{m}(1/sqrt3) in S^{m + 1}", poly, spectrum, 0, exact=poly.is_exact())


CLIFFORD_CAVEAT = (
    "upper-bound heuristic: the estimate is evaluated level by level on pure "
    "eigenfunctions; its absolute-value cross terms are not diagonal over mixed "
    "eigenfunctions, so this is not a proven bound on the normal index"
)


def clifford_index_bound(p: int, q: int, lambda_max, which: int = 0, tol: float = 1e-12) -> IndexReport:
    """Estimate-based index bound for the proper triharmonic Clifford torus.

    Solve ``P(R1^2) = 0``, build ``|A|^2`` and the product spectrum of
    ``S^p(R1) x S^q(R2)``, then evaluate ``B`` on every level.  The reported
    ``index`` sums the multiplicities of the negative levels; ``details`` also
    carries the first level where ``B > 0`` and its multiplicity.
    """
    roots = solve_clifford_radii(p, q, tol)
    if not roots.proper:
        minimal = ", ".join(str(r.x) for r in roots.minimal) or "none"
        raise NotApplicableError(
            f"(p, q) = ({p}, {q}) has no proper triharmonic Clifford torus (minimal roots: {minimal})"
        )
    x = float(roots.proper[which].x)
    geo = clifford_geometry(p, q, x)
    m = p + q
    poly = bound_poly_from_estimate(m, geo.A_sq)
    source = ProductSource(SphereSource(p, x), SphereSource(q, 1.0 - x))
    spectrum = spectrum_up_to(source, float(lambda_max))
    scale = sum(abs(float(c)) for c in poly.coefficients) * max(1.0, float(lambda_max)) ** 3
    level_tol = 1e-13 * scale
    report = _index_report(
        f"S^{p}(R1) x S^{q}(R2) in S^{m + 1}, R1^2 = {x!r}",
        poly,
        spectrum,
        level_tol,
        bound=True,
        exact=False,
        caveat=CLIFFORD_CAVEAT,
    )
    first_pos = next(v for v in report.levels if v.verdict == "positive")
    details = {
        "R1_sq": x,
        "A_sq": geo.A_sq,
        "H": geo.H,
        "root_residual": roots.proper[which].residual,
        "first_positive_lambda": first_pos.lam,
        "first_positive_multiplicity": first_pos.multiplicity,
    }
    return IndexReport(**{**report.__dict__, "details": details})
