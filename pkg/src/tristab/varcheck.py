"""Discrete variational oracle for closed curves in the unit 2-sphere.

A map is sampled at ``theta_k = 2 pi k / N`` on a domain circle with metric
``R^2 dtheta^2``.  The pulled-back connection is realized extrinsically:
second-order central differences in ``theta`` scaled by ``1/R``, followed by
projection onto the tangent plane of the sphere at each sample.  The rough
Laplacian uses the positive sign, ``Delta-bar W = -nabla-bar nabla-bar W``,
and every composite operator is built from that single derivative.

Maps are float64 by default.  Sixth-order quantities amplify sample rounding
by roughly ``eps / (R dtheta)^6``, which is O(1) at ``N = 2048``; pass
``dps`` to sample and differentiate with mpmath at that many digits instead.
"""

from __future__ import annotations

import contextlib
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import mpmath
import numpy as np
from scipy.spatial.transform import Rotation

from .errors import DomainError
from .spaceform import SpaceForm, curvature_operator

SPHERE = SpaceForm(dim=2, K=1)
NORM_TOL = 1e-12
MIN_SAMPLES = 16


@dataclass(frozen=True, eq=False)
class DiscreteMap:
    samples: np.ndarray  # (N, 3), unit rows
    domain_radius: float
    target: SpaceForm = SPHERE
    projection_defect: float = 0.0  # max | |x| - 1 | before renormalization
    dps: int | None = None  # mpmath digits when samples are an object array of mpf

    @property
    def N(self) -> int:
        return self.samples.shape[0]

    @property
    def dtheta(self):
        return 2 * _pi(self.dps) / self.N

    @property
    def volume_element(self) -> float:
        return self.domain_radius * self.dtheta

    @property
    def theta(self) -> np.ndarray:
        return self.dtheta * np.arange(self.N)

    def integrate(self, density: np.ndarray) -> float:
        with precision(self.dps):
            return float(np.sum(density) * self.volume_element)


def precision(dps: int | None):
    return mpmath.workdps(dps) if dps else contextlib.nullcontext()


def _pi(dps):
    if dps:
        with mpmath.workdps(dps):
            return +mpmath.pi
    return math.pi


def _mp_ufunc(np_fn, mp_fn):
    vec = np.vectorize(mp_fn, otypes=[object])

    def apply(a):
        a = np.asarray(a)
        return vec(a) if a.dtype == object else np_fn(a)

    return apply


_sqrt = _mp_ufunc(np.sqrt, mpmath.sqrt)
_cos = _mp_ufunc(np.cos, mpmath.cos)
_sin = _mp_ufunc(np.sin, mpmath.sin)


def _norms(x: np.ndarray) -> np.ndarray:
    return _sqrt(np.sum(x * x, axis=-1))


def _real(value, dps):
    if dps:
        if isinstance(value, Fraction):
            return mpmath.mpf(value.numerator) / value.denominator
        return mpmath.mpf(value)
    return float(value)


@dataclass(frozen=True)
class VariationResult:
    lhs: float
    rhs: float
    relative_error: float
    N: int
    h: float
    seed: int | None = None
    warnings: tuple[str, ...] = field(default_factory=tuple)


def relative_error(lhs: float, rhs: float, eps: float = 1e-300) -> float:
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), eps)


def discretize(generator: Callable[[np.ndarray], np.ndarray], R, N: int, dps: int | None = None) -> DiscreteMap:
    """Sample ``generator(theta)`` (shape ``(N, 3)``) and renormalize onto the sphere.

    With ``dps`` the angles are mpf and the generator must work on object arrays.
    """
    if N < MIN_SAMPLES:
        raise DomainError(f"need at least {MIN_SAMPLES} samples, got {N}")
    if not R > 0:
        raise DomainError("domain radius must be positive")
    with precision(dps):
        theta = np.array([2 * _pi(dps) * k / N for k in range(N)], dtype=object) if dps else (
            2.0 * math.pi * np.arange(N) / N
        )
        x = np.asarray(generator(theta), dtype=object if dps else float)
        if x.shape != (N, 3):
            raise DomainError(f"generator must return shape ({N}, 3), got {x.shape}")
        norms = _norms(x)
        defect = float(np.max(np.abs((norms - 1).astype(float))))
        if defect > NORM_TOL:
            warnings.warn(f"generator output off the sphere by {defect:.3e}; projected", stacklevel=2)
        return DiscreteMap(x / norms[:, None], _real(R, dps), SPHERE, defect, dps)


def _project(x: np.ndarray, w: np.ndarray) -> np.ndarray:
    return w - np.sum(w * x, axis=1, keepdims=True) * x


def covariant_derivative(phi: DiscreteMap, W: np.ndarray) -> np.ndarray:
    """``nabla-bar_e W`` with ``e = (1/R) d/dtheta``."""
    with precision(phi.dps):
        diff = (np.roll(W, -1, axis=0) - np.roll(W, 1, axis=0)) / (2 * phi.dtheta * phi.domain_radius)
        return _project(phi.samples, diff)


def rough_laplacian(phi: DiscreteMap, W: np.ndarray) -> np.ndarray:
    with precision(phi.dps):
        return -covariant_derivative(phi, covariant_derivative(phi, W))


def differential(phi: DiscreteMap) -> np.ndarray:
    """``dphi(e)``."""
    return covariant_derivative(phi, phi.samples)


def tension(phi: DiscreteMap) -> np.ndarray:
    return covariant_derivative(phi, differential(phi))


def trienergy(phi: DiscreteMap) -> float:
    with precision(phi.dps):
        nabla_tau = covariant_derivative(phi, tension(phi))
        return 0.5 * phi.integrate(np.sum(nabla_tau**2, axis=1))


def tritension(phi: DiscreteMap) -> np.ndarray:
    """``-Delta-bar^2 tau + R(nabla-bar_e tau, tau) dphi(e) + R(Delta-bar tau, dphi(e)) dphi(e)``."""
    K = phi.target.K
    with precision(phi.dps):
        dphi = differential(phi)
        tau = covariant_derivative(phi, dphi)
        nabla_tau = covariant_derivative(phi, tau)
        lap_tau = -covariant_derivative(phi, nabla_tau)
        bilap_tau = rough_laplacian(phi, lap_tau)
        return (
            -bilap_tau
            + curvature_operator(K, nabla_tau, tau, dphi)
            + curvature_operator(K, lap_tau, dphi, dphi)
        )


def sup_norm(phi: DiscreteMap, W: np.ndarray) -> float:
    with precision(phi.dps):
        return float(np.max(_norms(W)))


def geodesic_variation(phi: DiscreteMap, V: np.ndarray, t: float) -> DiscreteMap:
    """``x -> cos(t|V|) x + sin(t|V|) V/|V|`` at every sample."""
    with precision(phi.dps):
        x = phi.samples
        n = _norms(V)[:, None]
        positive = (n > 0).astype(bool)
        safe = np.where(positive, n, 1)
        coeff = np.where(positive, _sin(t * n) / safe, t)
        moved = _cos(t * n) * x + coeff * V
        moved = moved / _norms(moved)[:, None]
        return DiscreteMap(moved, phi.domain_radius, phi.target, 0.0, phi.dps)


def _check_tangent(phi: DiscreteMap, V: np.ndarray):
    if V.shape != phi.samples.shape:
        raise DomainError(f"field shape {V.shape} does not match map {phi.samples.shape}")
    normal = float(np.max(np.abs(np.sum(V * phi.samples, axis=1).astype(float)), initial=0.0))
    if normal > 1e-10 * max(1.0, float(np.max(np.abs(V.astype(float)), initial=0.0))):
        raise DomainError(f"variation field is not tangent to the sphere (normal part {normal:.3e})")


def first_variation_check(phi: DiscreteMap, V: np.ndarray, h: float = 1e-3, seed: int | None = None) -> VariationResult:
    """Compare ``dE3/dt`` at ``t = 0`` (central difference) with ``int <V, tau3>``."""
    if not h > 0:
        raise DomainError("step must be positive")
    _check_tangent(phi, V)
    notes = []
    if h < 1e-10:
        msg = f"step h = {h:g} is below 1e-10; difference quotient is ill-conditioned"
        warnings.warn(msg, stacklevel=2)
        notes.append(msg)
    lhs = (trienergy(geodesic_variation(phi, V, h)) - trienergy(geodesic_variation(phi, V, -h))) / (2.0 * h)
    rhs = phi.integrate(np.sum(V * tritension(phi), axis=1))
    return VariationResult(lhs, rhs, relative_error(lhs, rhs), phi.N, h, seed, tuple(notes))


CRITICAL_TOL = 1e-2
CRITICALITY_SAMPLES = 256


def criticality_residual(phi: DiscreteMap, samples: int = CRITICALITY_SAMPLES) -> float:
    """``|tau3|_inf`` measured on an evenly strided subsample of about ``samples`` points.

    At large ``N`` the float64 tritension is dominated by amplified rounding;
    the coarser subsample of the same map keeps it resolvable.
    """
    stride = 1
    while phi.N % (2 * stride) == 0 and phi.N // (2 * stride) >= samples:
        stride *= 2
    coarse = DiscreteMap(phi.samples[::stride], phi.domain_radius, phi.target, 0.0, phi.dps)
    return sup_norm(coarse, tritension(coarse))


def hessian_quadratic(phi: DiscreteMap, V: np.ndarray, h: float = 1e-2, critical_tol: float = CRITICAL_TOL) -> float:
    """Five-point second derivative of ``t -> E3(geodesic variation by tV)`` at 0.

    Warns when the map is not near-critical, since the value then depends on
    more than ``V``.
    """
    _check_tangent(phi, V)
    residual = criticality_residual(phi)
    if residual > critical_tol:
        warnings.warn(
            f"map is not near-critical (|tau3|_inf = {residual:.3e}); Hessian value is biased",
            stacklevel=2,
        )
    e = {k: trienergy(geodesic_variation(phi, V, k * h)) for k in (-2, -1, 0, 1, 2)}
    return (-e[2] + 16.0 * e[1] - 30.0 * e[0] + 16.0 * e[-1] - e[-2]) / (12.0 * h * h)


# ---------------------------------------------------------------- fixtures


def _circle_radii(radius_sq, dps):
    if not 0 < radius_sq <= 1:
        raise DomainError("squared circle radius must lie in (0, 1]")
    with precision(dps):
        r_sq = _real(radius_sq, dps)
        if dps:
            return mpmath.sqrt(r_sq), mpmath.sqrt(1 - r_sq)
        return math.sqrt(r_sq), math.sqrt(1.0 - r_sq)


def circle_generator(radius_sq, dps: int | None = None) -> Callable[[np.ndarray], np.ndarray]:
    """Horizontal circle with squared Euclidean radius ``radius_sq`` at height ``sqrt(1 - radius_sq)``."""
    radius, height = _circle_radii(radius_sq, dps)

    def gen(theta):
        with precision(dps):
            column = np.full(len(theta), height, dtype=object if dps else float)
            return np.stack([radius * _cos(theta), radius * _sin(theta), column], axis=1)

    return gen


def circle_map(radius_sq, N: int, dps: int | None = None) -> DiscreteMap:
    """Isometric immersion of ``S^1(r)``, ``r^2 = radius_sq``, as a small circle of ``S^2``."""
    radius, _ = _circle_radii(radius_sq, dps)
    return discretize(circle_generator(radius_sq, dps), radius, N, dps)


def circle_normal(phi: DiscreteMap) -> np.ndarray:
    """Unit normal of a horizontal circle inside the sphere (pointing to the equator)."""
    with precision(phi.dps):
        x = phi.samples
        r = _sqrt(x[:, 0] * x[:, 0] + x[:, 1] * x[:, 1])
        height = x[:, 2]
        return np.stack([height * x[:, 0] / r, height * x[:, 1] / r, -r], axis=1)


# Fixed by a calibration study on seeds 1000-1199, disjoint from the seeds
# used by the acceptance checks (0-19).
CURVE_MODES = 3
CURVE_AMPLITUDE = 0.05
MIN_ALIGNMENT = 0.1  # |<V, tau3>| / (|V| |tau3|) below this makes relative error ill-conditioned
MAX_FIELD_DRAWS = 100


def random_curve_generator(seed: int, modes: int = CURVE_MODES, amplitude: float = CURVE_AMPLITUDE):
    """A smooth closed curve: a randomly tilted circle plus a low-mode perturbation."""
    rng = np.random.default_rng(seed)
    height = rng.uniform(-0.6, 0.6)
    base_r = math.sqrt(1.0 - height * height)
    coeffs = [(rng.normal(size=3) * amplitude / k, rng.normal(size=3) * amplitude / k) for k in range(1, modes + 1)]
    rot = Rotation.random(random_state=seed).as_matrix()

    def gen(theta):
        c = np.stack([base_r * np.cos(theta), base_r * np.sin(theta), np.full_like(theta, height)], axis=1)
        for k, (a, b) in enumerate(coeffs, start=1):
            c = c + np.outer(np.cos(k * theta), a) + np.outer(np.sin(k * theta), b)
        return c @ rot.T

    return gen


def random_curve(seed: int, N: int, R: float = 1.0) -> DiscreteMap:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # the generator is off-sphere by construction
        return discretize(random_curve_generator(seed), R, N)


def l2_norm(phi: DiscreteMap, W: np.ndarray) -> float:
    return math.sqrt(phi.integrate(np.sum(W * W, axis=1)))


def _draw_field(phi: DiscreteMap, rng: np.random.Generator, modes: int) -> np.ndarray:
    theta = phi.theta
    V = np.zeros_like(phi.samples)
    for k in range(modes + 1):
        V += np.outer(np.cos(k * theta), rng.normal(size=3)) + np.outer(np.sin(k * theta), rng.normal(size=3))
    V = _project(phi.samples, V)
    return V / l2_norm(phi, V)


def random_tangent_field(phi: DiscreteMap, seed: int, modes: int = CURVE_MODES, min_alignment: float = 0.0) -> np.ndarray:
    """Low-mode random tangent field with unit ``L^2`` norm.

    With ``min_alignment > 0`` fields are redrawn (from the same seeded stream)
    until their ``L^2`` cosine with the tritension reaches that value.
    """
    rng = np.random.default_rng([seed, 1])
    if min_alignment <= 0:
        return _draw_field(phi, rng, modes)
    tau3 = tritension(phi)
    scale = min_alignment * l2_norm(phi, tau3)
    for _ in range(MAX_FIELD_DRAWS):
        V = _draw_field(phi, rng, modes)
        if abs(phi.integrate(np.sum(V * tau3, axis=1))) >= scale:
            return V
    raise DomainError(f"no field with alignment >= {min_alignment} in {MAX_FIELD_DRAWS} draws")


def random_first_variation(seed: int, N: int = 512, h: float = 1e-3) -> VariationResult:
    phi = random_curve(seed, N)
    return first_variation_check(phi, random_tangent_field(phi, seed, min_alignment=MIN_ALIGNMENT), h, seed)


def first_variation_refinement(seeds, N: int = 512, h: float = 1e-3) -> tuple[float, list[VariationResult], list[VariationResult]]:
    """Aggregate error ratio ``sum|lhs - rhs|`` at ``N`` over that at ``2N``.

    The field at ``2N`` is the same seeded draw, so both grids sample one
    smooth pair (curve, field).
    """
    coarse = [random_first_variation(s, N, h) for s in seeds]
    fine = [random_first_variation(s, 2 * N, h) for s in seeds]
    num = sum(abs(r.lhs - r.rhs) for r in coarse)
    den = sum(abs(r.lhs - r.rhs) for r in fine)
    return num / den, coarse, fine


SMALL_RADIUS_SQ = Fraction(1, 3)
SMALL_RADIUS = 1.0 / math.sqrt(3.0)


def circle_hessian_vs_formula(j: int, N: int = 2048, h: float = 1e-2, poly=None) -> VariationResult:
    """Finite-difference Hessian on ``S^1(1/sqrt 3)`` with ``f = cos(j theta)`` against
    ``Q(3 j^2) int f^2``.  ``Q`` defaults to ``small_sphere_form_poly(1)``."""
    from .stability import small_sphere_form_poly

    if j < 0:
        raise DomainError("mode index must be >= 0")
    poly = small_sphere_form_poly(1) if poly is None else poly
    phi = circle_map(SMALL_RADIUS_SQ, N)
    f = np.cos(j * phi.theta)
    lhs = hessian_quadratic(phi, f[:, None] * circle_normal(phi), h)
    norm_sq = 2.0 * math.pi * SMALL_RADIUS if j == 0 else math.pi * SMALL_RADIUS
    rhs = float(poly(3 * j * j)) * norm_sq
    return VariationResult(lhs, rhs, relative_error(lhs, rhs), N, h)


def circle_curvature_sq(radius_sq):
    """Squared geodesic curvature ``k^2 = (1 - r^2) / r^2`` of the circle in the sphere."""
    if not 0 < radius_sq <= 1:
        raise DomainError("squared circle radius must lie in (0, 1]")
    if isinstance(radius_sq, (int, Fraction)):
        return (1 - Fraction(radius_sq)) / Fraction(radius_sq)
    return (1.0 - radius_sq) / radius_sq


def circle_tritension_exact(radius_sq) -> float:
    """Continuum ``|tau3| = k^3 |2 - k^2|``; zero exactly when ``r^2 = 1/3``."""
    k_sq = circle_curvature_sq(radius_sq)
    return math.sqrt(k_sq) ** 3 * float(abs(2 - k_sq))


def stencil_factor(N: int) -> float:
    """``sin(dtheta)/dtheta``: the central difference's symbol on the first Fourier mode."""
    d = 2.0 * math.pi / N
    return math.sin(d) / d


def circle_tritension_sup(radius_sq, N: int, dps: int | None = None) -> float:
    phi = circle_map(radius_sq, N, dps)
    return sup_norm(phi, tritension(phi))
