"""Exact reference values for the affine coherent-state problem.

Everything here is evaluated in log space: s(2*alpha + 1) grows quickly and
the plain Gamma function overflows long before the quantities of interest do.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betaln, gammaln

__all__ = [
    "TheoremBoundInputs",
    "normalization_c",
    "log_normalization_c",
    "conjectured_max",
    "minimal_entropy",
    "fiducial_transform",
    "fiducial_renyi",
    "dirichlet_integral",
    "theorem_upper_bound",
    "extremal_bergman_ratio",
    "paper_bergman_constant",
    "transported_bergman_constant",
    "maximizer_family",
]


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    return alpha


def _check_s(s: float) -> float:
    s = float(s)
    if not s >= 1:
        raise ValueError(f"s must be >= 1, got {s}")
    return s


def log_normalization_c(alpha: float) -> float:
    """ln C(alpha) = alpha ln 2 - lgamma(2 alpha) / 2."""
    alpha = _check_alpha(alpha)
    return alpha * math.log(2.0) - 0.5 * float(gammaln(2.0 * alpha))


def normalization_c(alpha: float) -> float:
    """Constant making int |eta_alpha(k)|^2 / k dk equal to one."""
    return math.exp(log_normalization_c(alpha))


def conjectured_max(s: float, alpha: float) -> float:
    """Conjectured supremum of int |h_f|^{2s} over unit vectors f."""
    s = _check_s(s)
    alpha = _check_alpha(alpha)
    return 2.0 * alpha**s / ((2.0 * alpha + 1.0) * s - 1.0)


def minimal_entropy(alpha: float) -> float:
    alpha = _check_alpha(alpha)
    return 1.0 + 1.0 / (2.0 * alpha) - math.log(alpha)


def fiducial_transform(alpha: float, a, b):
    """Closed form of h_{f0}(a, b) for the normalized fiducial f0 = eta_alpha / sqrt(alpha).

    Works elementwise on arrays. The base 1 + a - 2 pi i b has real part
    1 + a > 0, so numpy's principal branch never crosses its cut.
    """
    alpha = _check_alpha(alpha)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(a <= 0):
        raise ValueError("dilation a must be positive")
    p = 2.0 * alpha + 1.0
    log_pref = 2.0 * log_normalization_c(alpha) - 0.5 * math.log(alpha) + float(gammaln(p))
    base = 1.0 + a - 2j * np.pi * b
    out = np.exp(log_pref + (alpha + 0.5) * np.log(a) - p * np.log(base))
    return out[()] if out.ndim == 0 else out


def fiducial_renyi(s: float, alpha: float) -> float:
    """Haar integral of |h_{f0}|^{2s}, reduced to Beta functions.

    The b-integral is int (c^2 + x^2)^{-ps} dx = c^{1-2ps} sqrt(pi) G(ps-1/2)/G(ps)
    with c = 1 + a, x = 2 pi b and p = 2 alpha + 1; the remaining a-integral is
    B(ps - 1, ps).
    """
    s = _check_s(s)
    alpha = _check_alpha(alpha)
    p = 2.0 * alpha + 1.0
    ps = p * s
    log_k2 = 2.0 * log_normalization_c(alpha) - 0.5 * math.log(alpha) + float(gammaln(p))
    log_val = (
        2.0 * s * log_k2
        - math.log(2.0 * math.pi)
        + 0.5 * math.log(math.pi)
        + float(gammaln(ps - 0.5) - gammaln(ps))
        + float(betaln(ps - 1.0, ps))
    )
    return math.exp(log_val)


def dirichlet_integral(s: int, alpha: float) -> float:
    """Integral of [u_1 ... u_{s-1} (1 - sum u)]^{2 alpha} over the (s-1)-simplex."""
    s = _check_integer_s(s)
    alpha = _check_alpha(alpha)
    if s == 1:
        return 1.0
    q = 2.0 * alpha + 1.0
    return math.exp(s * float(gammaln(q)) - float(gammaln(s * q)))


def _check_integer_s(s) -> int:
    if isinstance(s, bool) or int(s) != s or s < 1:
        raise ValueError(f"s must be a positive integer, got {s!r}")
    return int(s)


@dataclass(frozen=True)
class TheoremBoundInputs:
    s: int
    alpha: float

    def __post_init__(self):
        _check_integer_s(self.s)
        _check_alpha(self.alpha)


def theorem_upper_bound(inputs: TheoremBoundInputs) -> float:
    """Constant produced by the Cauchy-Schwarz step of the integer-s argument.

    2^{1 - s(2a+1)} C(a)^{2s} Gamma(s(2a+1) - 1) times the simplex integral.
    """
    s, alpha = int(inputs.s), float(inputs.alpha)
    if s == 1:
        return 1.0
    ps = s * (2.0 * alpha + 1.0)
    log_val = (
        (1.0 - ps) * math.log(2.0)
        + 2.0 * s * log_normalization_c(alpha)
        + float(gammaln(ps - 1.0))
        + math.log(dirichlet_integral(s, alpha))
    )
    return math.exp(log_val)


# Bergman-space constants at alpha = 1/2; d^2 z is Lebesgue measure dx dy.

def extremal_bergman_ratio(s: float) -> float:
    """lhs / l2norm^s for F = (z + i)^{-2}, computed in closed form.

    lhs = sqrt(pi) G(2s - 1/2) / G(2s) * B(2s - 1, 2s) and l2norm = pi / 4.
    """
    s = _check_s(s)
    log_lhs = (
        0.5 * math.log(math.pi)
        + float(gammaln(2 * s - 0.5) - gammaln(2 * s))
        + float(betaln(2 * s - 1.0, 2 * s))
    )
    return math.exp(log_lhs - s * math.log(math.pi / 4.0))


def paper_bergman_constant(s: float) -> float:
    """pi^{1-s} / (2s - 1), the constant stated for the weighted Bergman inequality."""
    s = _check_s(s)
    return math.pi ** (1.0 - s) / (2.0 * s - 1.0)


def transported_bergman_constant(s: float) -> float:
    """Conjectured maximum at alpha = 1/2 carried through h = sqrt(2 pi) Im z F(z).

    With da db = d^2z / (2 pi) this gives (4 pi)^{1-s} / (2s - 1).
    """
    s = _check_s(s)
    return (4.0 * math.pi) ** (1.0 - s) / (2.0 * s - 1.0)


def maximizer_family(A: complex, B: complex, grid, alpha: float, normalize: bool = False):
    """A k^alpha e^{-Bk} sampled on ``grid`` (a KGrid); Re B > 0.

    U(a, b) f0 is the member with B = a + 2 pi i b. With ``normalize`` A is
    rescaled to unit L^2 norm (its phase is kept).
    """
    from .affine_core import SampledFunction

    alpha = _check_alpha(alpha)
    A, B = complex(A), complex(B)
    if not B.real > 0:
        raise ValueError(f"need Re B > 0 for a square-integrable member, got B={B}")
    if normalize:
        if A == 0:
            raise ValueError("cannot normalize A = 0")
        # ||k^alpha e^{-Bk}||^2 = Gamma(2 alpha + 1) / (2 Re B)^{2 alpha + 1}
        log_n2 = float(gammaln(2 * alpha + 1)) - (2 * alpha + 1) * math.log(2 * B.real)
        A = A / abs(A) * math.exp(-0.5 * log_n2)
    k = grid.nodes
    values = A * np.exp(alpha * np.log(k) - B * k)
    return SampledFunction(grid, values)
