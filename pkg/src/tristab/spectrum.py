"""Laplace-Beltrami spectra of round spheres and of Riemannian products."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import DomainError, RangeError


@dataclass(frozen=True)
class SpectrumLevel:
    lam: Fraction | float
    multiplicity: int

    def __post_init__(self):
        if self.lam < 0:
            raise DomainError("eigenvalues of the Laplacian are nonnegative")
        if self.multiplicity < 1:
            raise DomainError("multiplicity must be positive")


@dataclass(frozen=True)
class SphereSource:
    """Round sphere ``S^p`` of squared radius ``R_sq``."""

    p: int
    R_sq: Fraction | float

    def __post_init__(self):
        if self.p < 1:
            raise DomainError("sphere dimension must be >= 1")
        if not self.R_sq > 0:
            raise DomainError("squared radius must be positive")

    def __str__(self):
        return f"S^{self.p}(R^2={self.R_sq})"


@dataclass(frozen=True)
class ProductSource:
    left: "Source"
    right: "Source"

    def __str__(self):
        return f"{self.left} x {self.right}"


Source = Union[SphereSource, ProductSource]


@dataclass(frozen=True)
class Spectrum:
    """Levels in strictly increasing order, complete up to ``complete_to``."""

    levels: tuple[SpectrumLevel, ...]
    source: Source
    complete_to: Fraction | float

    def __iter__(self):
        return iter(self.levels)

    def __len__(self):
        return len(self.levels)

    def as_pairs(self) -> list[tuple]:
        return [(lv.lam, lv.multiplicity) for lv in self.levels]


def _as_exact(x):
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    return float(x)


def sphere_multiplicity(p: int, j: int) -> int:
    if j == 0:
        return 1
    if j == 1:
        return p + 1
    return math.comb(p + j, j) - math.comb(p + j - 2, j - 2)


def sphere_level(p: int, R_sq, j: int) -> SpectrumLevel:
    """The ``j``-th eigenvalue ``j(j+p-1)/R^2`` of ``S^p(R)`` and its multiplicity."""
    if p < 1:
        raise DomainError("sphere dimension must be >= 1")
    if j < 0:
        raise DomainError("level index must be >= 0")
    R_sq = _as_exact(R_sq)
    if not R_sq > 0:
        raise DomainError("squared radius must be positive")
    return SpectrumLevel(j * (j + p - 1) / R_sq, sphere_multiplicity(p, j))


def sphere_spectrum(p: int, R_sq, lambda_max) -> Spectrum:
    src = SphereSource(p, _as_exact(R_sq))
    levels = []
    j = 0
    while True:
        lv = sphere_level(p, src.R_sq, j)
        if lv.lam > lambda_max:
            break
        levels.append(lv)
        j += 1
    return Spectrum(tuple(levels), src, lambda_max)


def _merge(pairs, exact: bool, rel_tol: float) -> list[SpectrumLevel]:
    if exact:
        acc: dict = defaultdict(int)
        for lam, mult in pairs:
            acc[lam] += mult
        return [SpectrumLevel(lam, acc[lam]) for lam in sorted(acc)]
    merged: list[list] = []
    for lam, mult in sorted(pairs):
        if merged and math.isclose(lam, merged[-1][0], rel_tol=rel_tol, abs_tol=rel_tol):
            merged[-1][1] += mult
        else:
            merged.append([lam, mult])
    return [SpectrumLevel(lam, mult) for lam, mult in merged]


def product_spectrum(s1: Spectrum, s2: Spectrum, lambda_max, rel_tol: float = 1e-12) -> Spectrum:
    """Spectrum of the Riemannian product: sums of eigenvalues, multiplicities multiply.

    Exact (rational) inputs are merged by equality.  Real inputs, which arise
    for irrational radii, are merged when equal to ``rel_tol``.
    """
    for s in (s1, s2):
        if s.complete_to < lambda_max:
            raise RangeError(
                f"factor spectrum {s.source} only complete to {s.complete_to} < {lambda_max}"
            )
    pairs = [
        (a.lam + b.lam, a.multiplicity * b.multiplicity)
        for a in s1.levels
        for b in s2.levels
        if a.lam + b.lam <= lambda_max
    ]
    exact = all(isinstance(lam, Fraction) for lam, _ in pairs)
    return Spectrum(tuple(_merge(pairs, exact, rel_tol)), ProductSource(s1.source, s2.source), lambda_max)


def spectrum_up_to(source: Source, lambda_max) -> Spectrum:
    """Complete, sorted, merged spectrum of ``source`` up to ``lambda_max``."""
    if lambda_max < 0:
        raise DomainError("lambda_max must be nonnegative")
    if isinstance(source, SphereSource):
        return sphere_spectrum(source.p, source.R_sq, lambda_max)
    if isinstance(source, ProductSource):
        return product_spectrum(
            spectrum_up_to(source.left, lambda_max),
            spectrum_up_to(source.right, lambda_max),
            lambda_max,
        )
    raise DomainError(f"unknown spectrum source {source!r}")
