"""Space forms, CMC hypersurface data and the constant-curvature tensor."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DimensionError, DomainError


@dataclass(frozen=True)
class SpaceForm:
    """Target manifold of constant sectional curvature ``K`` and dimension ``dim``."""

    dim: int
    K: float | Fraction | int = 1

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 2:
            raise DomainError(f"space form dimension must be an integer >= 2, got {self.dim}")
        if not math.isfinite(float(self.K)):
            raise DomainError("curvature must be finite")


@dataclass(frozen=True)
class HypersurfaceData:
    """Pointwise-constant geometry of a CMC hypersurface with constant |A|^2.

    ``principal`` lists (principal curvature, multiplicity).  ``H`` is the
    signed mean curvature, i.e. the coefficient of the unit normal in
    ``tau = m H nu``.  Values may be ints, Fractions, floats or sympy numbers;
    the consistency relations are checked exactly when possible.
    """

    m: int
    H: object
    A_sq: object
    principal: tuple[tuple[object, int], ...]

    def __post_init__(self):
        if self.m < 1:
            raise DomainError("hypersurface dimension must be >= 1")
        if sum(k for _, k in self.principal) != self.m:
            raise DomainError("principal multiplicities must sum to m")
        if any(k < 1 for _, k in self.principal):
            raise DomainError("multiplicities must be positive")
        if float(self.A_sq) < 0:
            raise DomainError("|A|^2 must be nonnegative")
        if not _close(self.mean_from_principal(), self.H):
            raise DomainError("H is inconsistent with the principal curvatures")
        if not _close(self.norm_sq_from_principal(), self.A_sq):
            raise DomainError("|A|^2 is inconsistent with the principal curvatures")

    def mean_from_principal(self):
        return sum(v * k for v, k in self.principal) / Fraction(self.m)

    def norm_sq_from_principal(self):
        return sum(v * v * k for v, k in self.principal)

    @property
    def minimal(self) -> bool:
        return float(self.H) == 0.0


def _close(a, b, tol=1e-12) -> bool:
    try:
        d = a - b
        if hasattr(d, "simplify"):  # sympy
            d = d.simplify()
            if d == 0:
                return True
        elif isinstance(d, (int, Fraction)):
            return d == 0
        return abs(float(d)) <= tol * max(1.0, abs(float(a)), abs(float(b)))
    except TypeError:
        return False


def _inner(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.sum(a * b, axis=-1, keepdims=True)


def curvature_operator(K, X, Y, Z):
    """``R(X, Y) Z = K (<Y, Z> X - <X, Z> Y)`` for a space form of curvature ``K``.

    Accepts single vectors or stacks of vectors (rows), in which case the
    operator is applied row by row.
    """
    X, Y, Z = (_as_array(v) for v in (X, Y, Z))
    if not (X.shape == Y.shape == Z.shape):
        raise DimensionError(f"shape mismatch: {X.shape}, {Y.shape}, {Z.shape}")
    scale = K if X.dtype == object else float(K)
    return scale * (_inner(Y, Z) * X - _inner(X, Z) * Y)


def _as_array(v) -> np.ndarray:
    # object arrays (extended precision scalars) are kept as they are
    v = np.asarray(v)
    return v if v.dtype == object else v.astype(float)


def tension_of_immersion(data: HypersurfaceData):
    """Coefficient ``m H`` of the unit normal in the tension field."""
    return data.m * data.H


def vector(components: Sequence[float]) -> np.ndarray:
    v = np.asarray(components, dtype=float)
    if v.ndim != 1 or not np.all(np.isfinite(v)):
        raise DomainError("vector must be a finite 1-d sequence")
    return v
