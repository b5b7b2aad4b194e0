"""Generalized Laguerre functions orthonormal in L^2(R_+, dk).

    phi_n(k) = N_n k^alpha e^{-k} L_n^{(2 alpha)}(2k),
    N_n^2   = 2^{2 alpha + 1} n! / Gamma(n + 2 alpha + 1).

phi_0 is the normalized fiducial alpha^{-1/2} eta_alpha. Their coherent-state
transforms are explicit: with z = 2 pi b + i a and zeta = (z - i) / (z + i),

    h_{phi_n}(a, b) = h_{f0}(a, b) * d_n * zeta^n,
    d_n^2 = Gamma(n + 2 alpha + 1) / (n! Gamma(2 alpha + 1)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import eval_genlaguerre, gammaln

from .affine_core import SampledFunction
from .closed_forms import fiducial_transform, log_normalization_c
from .grids import KGrid

__all__ = [
    "BasisSpec",
    "laguerre_values",
    "basis_matrix",
    "synthesize",
    "laguerre_transform",
    "laguerre_transform_laplace",
    "combination_transform",
    "family_coefficients",
    "random_coefficients",
    "project",
]


@dataclass(frozen=True)
class BasisSpec:
    alpha: float
    dim: int

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if self.dim < 1:
            raise ValueError("dim must be >= 1")


def _log_norm(n: int, alpha: float) -> float:
    return 0.5 * ((2 * alpha + 1) * math.log(2.0) + gammaln(n + 1) - gammaln(n + 2 * alpha + 1))


def laguerre_values(n: int, alpha: float, k) -> np.ndarray:
    k = np.asarray(k, dtype=float)
    env = np.exp(_log_norm(n, alpha) + alpha * np.log(k) - k)
    return env * eval_genlaguerre(n, 2 * alpha, 2 * k)


def basis_matrix(spec: BasisSpec, grid: KGrid) -> np.ndarray:
    """Columns phi_0 .. phi_{dim-1} sampled on the grid."""
    return np.stack([laguerre_values(n, spec.alpha, grid.nodes) for n in range(spec.dim)], axis=1)


def synthesize(coefficients, alpha: float, grid: KGrid) -> SampledFunction:
    c = np.asarray(coefficients, dtype=complex)
    return SampledFunction(grid, basis_matrix(BasisSpec(alpha, len(c)), grid) @ c)


def _log_d(n, alpha):
    return 0.5 * (gammaln(n + 2 * alpha + 1) - gammaln(n + 1) - gammaln(2 * alpha + 1))


def laguerre_transform(n: int, alpha: float, a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    z = 2 * np.pi * b + 1j * a
    zeta = (z - 1j) / (z + 1j)
    return fiducial_transform(alpha, a, b) * math.exp(_log_d(n, alpha)) * zeta**n


def laguerre_transform_laplace(n: int, alpha: float, a, b):
    """Same transform from int e^{-pt} t^beta L_n^beta(t) dt = G(n+beta+1)(p-1)^n / (n! p^{n+beta+1}).

    Independent of the zeta form above; used as a cross-check.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    beta = 2 * alpha
    w = (1 + a - 2j * np.pi * b) / 2
    log_c = (
        log_normalization_c(alpha)
        + _log_norm(n, alpha)
        - (beta + 1) * math.log(2.0)
        + gammaln(n + beta + 1)
        - gammaln(n + 1)
    )
    return np.exp(log_c + (alpha + 0.5) * np.log(a)) * (w - 1) ** n / w ** (n + beta + 1)


def combination_transform(coefficients, alpha: float, a, b):
    """h_f(a, b) for f = sum_n c_n phi_n, evaluated in closed form."""
    c = np.asarray(coefficients, dtype=complex)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    z = 2 * np.pi * b + 1j * a
    zeta = (z - 1j) / (z + 1j)
    d = np.exp(_log_d(np.arange(len(c)), alpha))
    poly = np.polynomial.polynomial.polyval(zeta, c * d)
    return fiducial_transform(alpha, a, b) * poly


def family_coefficients(A: complex, B: complex, alpha: float, dim: int) -> np.ndarray:
    """<phi_n, A k^alpha e^{-Bk}> for n < dim (Re B > 0)."""
    if not np.real(B) > 0:
        raise ValueError("need Re B > 0")
    beta = 2 * alpha
    n = np.arange(dim)
    w = (1 + complex(B)) / 2
    log_mag = (
        np.array([_log_norm(int(j), alpha) for j in n])
        - (beta + 1) * math.log(2.0)
        + gammaln(n + beta + 1)
        - gammaln(n + 1)
    )
    return complex(A) * np.exp(log_mag) * (w - 1) ** n / w ** (n + beta + 1)


def random_coefficients(rng: np.random.Generator, dim: int) -> np.ndarray:
    c = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return c / np.linalg.norm(c)


def project(f: SampledFunction, alpha: float, dim: int) -> np.ndarray:
    """Coefficients of the orthogonal projection of f onto the first dim basis functions."""
    phi = basis_matrix(BasisSpec(alpha, dim), f.grid)
    return phi.T @ (f.weights * f.values)
