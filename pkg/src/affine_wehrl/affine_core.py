"""The ax+b group, its left Haar density and its unitary action on L^2(R_+, dk)."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .closed_forms import log_normalization_c
from .grids import KGrid

__all__ = [
    "AffineElement",
    "IDENTITY",
    "compose",
    "inverse",
    "haar_weight",
    "FiducialSpec",
    "SampledFunction",
    "fiducial",
    "normalized_fiducial",
    "apply_rep",
    "TailMassError",
]

# tolerated L^2 mass pushed off the k-grid by a dilation, relative to ||f||^2
TAIL_TOLERANCE = 1e-10


class TailMassError(ValueError):
    """A dilation moved more than TAIL_TOLERANCE of the mass off the k-grid."""


@dataclass(frozen=True)
class AffineElement:
    a: float
    b: float = 0.0

    def __post_init__(self):
        a = float(self.a)
        if not (a > 0 and math.isfinite(a)):
            raise ValueError(f"dilation a must be positive and finite, got {self.a}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", float(self.b))

    def __matmul__(self, other: "AffineElement") -> "AffineElement":
        return compose(self, other)

    def __iter__(self):
        return iter((self.a, self.b))


IDENTITY = AffineElement(1.0, 0.0)


def compose(g: AffineElement, h: AffineElement) -> AffineElement:
    """(a, b)(a', b') = (a a', a b' + b)."""
    return AffineElement(g.a * h.a, g.a * h.b + g.b)


def inverse(g: AffineElement) -> AffineElement:
    return AffineElement(1.0 / g.a, -g.b / g.a)


def haar_weight(g: AffineElement) -> float:
    """Density a^{-2} of the left Haar measure with respect to da db."""
    return g.a**-2


@dataclass(frozen=True)
class FiducialSpec:
    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Complex samples of f on a k-grid, together with the grid's quadrature weights."""

    grid: KGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != self.grid.nodes.shape:
            raise ValueError(
                f"values have shape {values.shape}, grid has {self.grid.nodes.shape}"
            )
        object.__setattr__(self, "values", values)

    @classmethod
    def from_callable(cls, func: Callable, grid: KGrid) -> "SampledFunction":
        return cls(grid, func(grid.nodes))

    @property
    def k(self) -> np.ndarray:
        return self.grid.nodes

    @property
    def weights(self) -> np.ndarray:
        return self.grid.weights

    def norm_squared(self) -> float:
        return float(np.sum(self.weights * np.abs(self.values) ** 2))

    def inner(self, other: "SampledFunction") -> complex:
        """<self, other>, conjugate-linear in self."""
        self._check_grid(other)
        return complex(np.sum(self.weights * np.conj(self.values) * other.values))

    def normalized(self) -> "SampledFunction":
        return self * (1.0 / math.sqrt(self.norm_squared()))

    def _check_grid(self, other):
        if other.grid is not self.grid and not np.array_equal(other.k, self.k):
            raise ValueError("functions live on different k-grids")

    def __add__(self, other: "SampledFunction") -> "SampledFunction":
        self._check_grid(other)
        return SampledFunction(self.grid, self.values + other.values)

    def __sub__(self, other: "SampledFunction") -> "SampledFunction":
        self._check_grid(other)
        return SampledFunction(self.grid, self.values - other.values)

    def __mul__(self, c) -> "SampledFunction":
        return SampledFunction(self.grid, complex(c) * self.values)

    __rmul__ = __mul__


def fiducial_values(alpha: float, k) -> np.ndarray:
    k = np.asarray(k, dtype=float)
    return np.exp(log_normalization_c(alpha) + alpha * np.log(k) - k)


def fiducial(spec: FiducialSpec, grid: KGrid) -> SampledFunction:
    """eta_alpha(k) = C(alpha) k^alpha e^{-k}."""
    return SampledFunction(grid, fiducial_values(spec.alpha, grid.nodes))


def normalized_fiducial(alpha: float, grid: KGrid) -> SampledFunction:
    """f0 = alpha^{-1/2} eta_alpha, the unit vector generating the coherent states."""
    return fiducial(FiducialSpec(alpha), grid) * (alpha**-0.5)


def apply_rep(g: AffineElement, f: SampledFunction) -> SampledFunction:
    """[U(a, b) f](k) = e^{-2 pi i b k} a^{1/2} f(a k), resampled onto f's grid.

    f is interpolated by a cubic spline in ln k. Values pulled from outside
    the grid are zero; that is only accepted when the L^2 mass carried there
    is below TAIL_TOLERANCE of ||f||^2.
    """
    if g.a == 1.0:
        moved = f.values
    else:
        k = f.k
        k_hi = k[-1]
        norm2 = f.norm_squared()
        if g.a < 1.0:
            # U f on [0, k_max] only sees f on [0, a k_max]; the rest drops off
            lost = float(np.sum((f.weights * np.abs(f.values) ** 2)[k > g.a * k_hi]))
            if norm2 > 0 and lost > TAIL_TOLERANCE * norm2:
                raise TailMassError(
                    f"dilation a={g.a} pushes {lost / norm2:.2e} of ||f||^2 off the grid"
                )
        moved = f.grid.spline(f.values)(g.a * k)
    phase = np.exp(-2j * np.pi * g.b * f.k) if g.b != 0.0 else 1.0
    return SampledFunction(f.grid, math.sqrt(g.a) * phase * moved)
