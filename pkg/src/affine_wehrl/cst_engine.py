"""Coherent-state transform h_f(a, b) = <U(a, b) eta_alpha, f> on single points and lattices.

For a fixed row a the b-dependence is a Fourier transform,

    h_f(a, b) = sum_j c_j(a) e^{2 pi i b k_j},
    c_j(a)    = C(alpha) a^{alpha + 1/2} w_j e^{-a k_j} k_j^alpha f(k_j),

and the b-nodes of a row are uniform, so each row is one type-1 nonuniform
FFT (finufft). Direct summation over the same nodes is kept as the
cross-check path.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .affine_core import AffineElement, SampledFunction
from .closed_forms import log_normalization_c
from .grids import (
    PhaseGrid,
    PhaseGridSpec,
    TailExponents,
    build_phase_grid,
    lattice_integral,
    refine,
)

__all__ = [
    "ResolutionError",
    "WindowError",
    "transform_at",
    "fourier_rows",
    "transform_rows",
    "transform_field",
    "field_from_transform",
    "HusimiField",
]

NUFFT_EPS = 1e-14
# relative isometry defect tolerated by transform_field
ISOMETRY_TOL = 1e-3

_nufft_threads = 0


def set_nufft_threads(n: int) -> None:
    """0 lets finufft choose; 1 gives a fixed, single-threaded summation order."""
    global _nufft_threads
    _nufft_threads = int(n)


class ResolutionError(ValueError):
    """The k-grid cannot resolve the requested frequency."""


class WindowError(RuntimeError):
    """The phase window loses too much of the isometry mass."""


def _kernel(f: SampledFunction, weight_power: float) -> np.ndarray:
    """w_j k_j^power f(k_j)."""
    return f.weights * np.exp(weight_power * f.grid.log_nodes) * f.values


def transform_at(f: SampledFunction, alpha: float, g: AffineElement) -> complex:
    """Quadrature form of h_f(a, b)."""
    if not f.grid.resolves(g.a, 2 * np.pi * g.b):
        raise ResolutionError(
            f"k-grid does not resolve b={g.b} at a={g.a}; build a wider k-grid"
        )
    k = f.k
    pref = math.exp(log_normalization_c(alpha) + (alpha + 0.5) * math.log(g.a))
    s = np.sum(_kernel(f, alpha) * np.exp(-k * g.a + 2j * np.pi * g.b * k))
    return complex(pref * s)


def check_resolution(f: SampledFunction, grid: PhaseGrid):
    for a, sig in ((grid.a[0], grid.sigma[0]), (grid.a[-1], grid.sigma[-1])):
        if not f.grid.resolves(a, 2 * np.pi * sig * grid.t_max):
            raise ResolutionError(
                f"k-grid does not resolve the phase window at a={a:.3g} "
                f"(|b| up to {sig * grid.t_max:.3g}); use grids.kgrid_for(phase_spec)"
            )


def fourier_rows(k, kernel, grid: PhaseGrid, method: str = "fast") -> np.ndarray:
    """S[i, j] = sum_m kernel[m] e^{-a_i k_m} e^{2 pi i b_ij k_m}."""
    k = np.asarray(k, dtype=float)
    kernel = np.asarray(kernel, dtype=complex)
    out = np.empty(grid.shape, dtype=complex)
    n_t = len(grid.t)
    ht = grid.ht
    if method == "fast":
        import finufft

        # t_j = (j - n_t // 2) ht, so e^{i (j - n_t//2) theta_m} with theta_m = 2 pi sigma ht k_m
        for i, (a, sig) in enumerate(zip(grid.a, grid.sigma)):
            c = kernel * np.exp(-a * k)
            theta = np.mod(2 * np.pi * sig * ht * k, 2 * np.pi)
            out[i] = finufft.nufft1d1(
                theta, c, n_t, isign=1, eps=NUFFT_EPS, nthreads=_nufft_threads
            )
    elif method == "direct":
        for i, (a, sig) in enumerate(zip(grid.a, grid.sigma)):
            c = kernel * np.exp(-a * k)
            phase = np.exp(2j * np.pi * sig * np.outer(grid.t, k))
            out[i] = phase @ c
    else:
        raise ValueError(f"unknown method {method!r}")
    return out


def transform_rows(f: SampledFunction, alpha: float, grid: PhaseGrid, method: str = "fast"):
    """Complex h_f on every lattice node."""
    check_resolution(f, grid)
    rows = fourier_rows(f.k, _kernel(f, alpha), grid, method)
    pref = np.exp(log_normalization_c(alpha) + (alpha + 0.5) * grid.u)
    return pref[:, None] * rows


def husimi_tails(alpha: float, s: float = 1.0) -> TailExponents:
    return TailExponents.for_power(s * (2 * alpha + 1))


@dataclass(frozen=True, eq=False)
class HusimiField:
    """|h_f|^2 on a phase lattice, with the trapezoid Haar weights of each node."""

    grid: PhaseGrid
    values: np.ndarray
    alpha: float
    source: SampledFunction | None = None
    method: str = "fast"

    @property
    def haar_weights(self) -> np.ndarray:
        return self.grid.haar_weights

    @cached_property
    def norm_squared(self) -> float:
        return self.source.norm_squared() if self.source is not None else float("nan")

    def mass(self) -> float:
        """Haar integral of |h_f|^2 including the power-law tails outside the window."""
        return lattice_integral(self.grid, self.values, husimi_tails(self.alpha))[0]

    def window_mass(self) -> float:
        return float(np.sum(self.values * self.haar_weights))

    def isometry_defect(self) -> float:
        return abs(self.mass() - self.norm_squared)

    @cached_property
    def refined(self) -> "HusimiField":
        if self.source is None:
            raise ValueError("field has no source function to refine")
        grid = build_phase_grid(refine(self.grid.spec))
        return transform_field(self.source, self.alpha, grid, self.method, check=False)

    def to_csv(self, path) -> Path:
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["a", "b", "husimi", "haarWeight"])
            a = np.broadcast_to(self.grid.a[:, None], self.grid.shape)
            for ai, bi, v, hw in zip(
                a.ravel(), self.grid.b.ravel(), self.values.ravel(), self.haar_weights.ravel()
            ):
                w.writerow([repr(float(ai)), repr(float(bi)), repr(float(v)), repr(float(hw))])
        return path


def field_from_transform(h: np.ndarray, alpha: float, grid: PhaseGrid, source=None, method="fast"):
    return HusimiField(grid, np.abs(h) ** 2, float(alpha), source, method)


def transform_field(
    f: SampledFunction,
    alpha: float,
    grid: PhaseGrid | PhaseGridSpec | None = None,
    method: str = "fast",
    check: bool = True,
    tol: float = ISOMETRY_TOL,
) -> HusimiField:
    """|h_f|^2 on the lattice.

    With ``check`` the isometry int |h_f|^2 = ||f||^2 is enforced to relative
    tolerance ``tol``; a larger defect means the window is too small and
    raises WindowError.
    """
    if grid is None:
        grid = PhaseGridSpec()
    if isinstance(grid, PhaseGridSpec):
        grid = build_phase_grid(grid)
    h = transform_rows(f, alpha, grid, method)
    field = field_from_transform(h, alpha, grid, f, method)
    if check:
        norm2 = field.norm_squared
        defect = field.isometry_defect()
        if norm2 > 0 and defect > tol * norm2:
            raise WindowError(
                f"isometry defect {defect / norm2:.3e} exceeds {tol:g}: "
                f"window mass {field.mass():.6g} vs ||f||^2 {norm2:.6g}"
            )
    return field
