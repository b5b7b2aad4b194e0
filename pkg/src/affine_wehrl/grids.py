"""Quadrature grids for dk on R_+ and for the left Haar measure a^{-2} da db.

Phase lattice
-------------
Rows are log-uniform in ``a`` (u = ln a, step ``hu``). Within a row the
b-nodes are uniform in the scaled variable ``t``::

    b = sigma(a) * t,   sigma(a) = (1 + a) / (2 pi)    (b_scaling="row")
    b = (b_max / t_max) * t                           (b_scaling="fixed")

With row scaling every coherent-state transform of a Laguerre-type function
is analytic in a strip |Im t| < 1, so the trapezoid rule converges
exponentially in both directions and only the window truncation matters.
Truncation is handled by leading-order power-law tails, see
:func:`lattice_integral`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np
from scipy.interpolate import CubicSpline

__all__ = [
    "KGridSpec",
    "KGrid",
    "build_kgrid",
    "PhaseGridSpec",
    "PhaseGrid",
    "build_phase_grid",
    "refine",
    "kgrid_for",
    "TailExponents",
    "lattice_integral",
    "lattice_weights",
    "lattice_entropy",
    "GridError",
]

SCHEMES = ("gauss-legendre-composite", "log-uniform")
_PANEL_NODES = 16
# panel phase budget: omega * width <= _PHASE_BUDGET (radians) per 16-node panel
_PHASE_BUDGET = 20.0
# e^{-kMax} must be below this for the grid to be accepted
_K_TAIL = 1e-12


class GridError(ValueError):
    """Grid parameters cannot deliver the requested accuracy."""


@dataclass(frozen=True)
class KGridSpec:
    """k-grid request.

    ``t_max`` and ``a_max`` describe the largest phase window the grid must
    resolve: frequencies up to (1 + a) t_max on rows a <= a_max. ``kappa``
    bounds (1 + a) k on the effective support of e^{-ka} f(k).
    ``n=None`` picks the resolution from the built-in phase budget.
    """

    n: int | None = None
    k_max: float = 90.0
    scheme: str = "gauss-legendre-composite"
    k_min: float = 1e-14
    t_max: float = 20.0
    a_max: float = 1500.0
    kappa: float = 60.0

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown k-grid scheme {self.scheme!r}")
        if self.n is not None and self.n < 16:
            raise ValueError("a k-grid needs at least 16 nodes")
        if not (0 < self.k_min < self.k_max):
            raise ValueError("need 0 < k_min < k_max")


@dataclass(frozen=True, eq=False)
class KGrid:
    spec: KGridSpec
    nodes: np.ndarray
    weights: np.ndarray
    # resolvable frequency profile omega_max(k) = min(omega_cap, bandwidth / k)
    bandwidth: float = math.inf
    omega_cap: float = math.inf

    def __len__(self):
        return len(self.nodes)

    @property
    def n(self) -> int:
        return len(self.nodes)

    @cached_property
    def log_nodes(self) -> np.ndarray:
        return np.log(self.nodes)

    def integrate(self, values) -> complex | float:
        return np.sum(self.weights * values)

    def max_frequency(self, k_top: float) -> float:
        """Largest omega for which e^{i omega k} is resolved on [0, k_top]."""
        return min(self.omega_cap, self.bandwidth / max(k_top, 1e-300))

    def resolves(self, a: float, omega: float) -> bool:
        k_top = min(self.spec.k_max, self.spec.kappa / (1.0 + a))
        return abs(omega) <= self.max_frequency(k_top) * (1.0 + 1e-12)

    def spline(self, values: np.ndarray):
        """Interpolant of complex ``values``: cubic in ln k on the grid.

        Below the first node it continues the power law through the first two
        nodes (f ~ k^alpha near 0); above the last node it is zero.
        """
        values = np.asarray(values, dtype=complex)
        v = self.log_nodes
        re = CubicSpline(v, values.real, extrapolate=False)
        im = CubicSpline(v, values.imag, extrapolate=False)
        f0, f1 = values[0], values[1]
        with np.errstate(divide="ignore", invalid="ignore"):
            gamma = np.log(f1 / f0) / (v[1] - v[0]) if f0 != 0 and f1 != 0 else 0.0

        def evaluate(k):
            x = np.log(np.asarray(k, dtype=float))
            out = re(x) + 1j * im(x)
            out = np.where(np.isnan(out), 0.0, out)
            below = x < v[0]
            if np.any(below) and f0 != 0:
                out = np.where(below, f0 * np.exp(gamma * (np.minimum(x, v[0]) - v[0])), out)
            return out

        return evaluate


def _gl_panels(edges: np.ndarray, m: int = _PANEL_NODES):
    g, wg = np.polynomial.legendre.leggauss(m)
    lo, hi = edges[:-1, None], edges[1:, None]
    nodes = (0.5 * (hi - lo) * g + 0.5 * (hi + lo)).ravel()
    weights = (0.5 * (hi - lo) * wg).ravel()
    return nodes, weights


def _panel_edges(spec: KGridSpec, budget: float) -> np.ndarray:
    """Panels halve toward k = 0 and are narrow enough for the phase window."""
    cap = (1.0 + spec.a_max) * spec.t_max
    band = spec.kappa * spec.t_max
    edges = [spec.k_min]
    x = spec.k_min
    while x < spec.k_max:
        omega = min(cap, band / x)
        width = min(x, budget / omega) if omega > 0 else x
        x = min(x + width, spec.k_max)
        edges.append(x)
    return np.asarray(edges)


def build_kgrid(spec: KGridSpec = KGridSpec()) -> KGrid:
    if math.exp(-spec.k_max) >= _K_TAIL:
        raise GridError(
            f"k_max={spec.k_max} too small: e^-k_max must be < {_K_TAIL:g}"
        )
    band = spec.kappa * spec.t_max
    cap = (1.0 + spec.a_max) * spec.t_max
    if spec.scheme == "log-uniform":
        n = spec.n or 4096
        v = np.linspace(math.log(spec.k_min), math.log(spec.k_max), n)
        h = v[1] - v[0]
        nodes = np.exp(v)
        weights = nodes * h
        weights[0] *= 0.5
        weights[-1] *= 0.5
        # local node spacing is k h, so a phase step of ~1 rad per node
        return KGrid(spec, nodes, weights, bandwidth=1.0 / h, omega_cap=math.inf)

    budget = _PHASE_BUDGET
    if spec.n is not None:
        budget = _budget_for(spec, spec.n)
    edges = _panel_edges(spec, budget)
    nodes, weights = _gl_panels(edges)
    scale = _PHASE_BUDGET / budget
    # finer panels than needed raise the resolvable window proportionally
    return KGrid(spec, nodes, weights, bandwidth=band * scale, omega_cap=cap * scale)


def _budget_for(spec: KGridSpec, n: int) -> float:
    """Phase budget whose panel layout gives about ``n`` nodes."""
    target = max(1, round(n / _PANEL_NODES))
    lo, hi = 1e-3, 1e4
    for _ in range(80):
        mid = math.sqrt(lo * hi)
        if len(_panel_edges(spec, mid)) - 1 > target:
            lo = mid
        else:
            hi = mid
    return hi


@dataclass(frozen=True)
class PhaseGridSpec:
    n_a: int = 185
    n_b: int = 241
    a_min: float = 1e-6
    a_max: float = 1e2
    b_max: float = 12.0
    a_scheme: str = "log-uniform"
    b_scaling: str = "row"

    def __post_init__(self):
        if self.a_scheme != "log-uniform":
            raise ValueError("only the log-uniform a-scheme is supported")
        if self.b_scaling not in ("row", "fixed"):
            raise ValueError("b_scaling must be 'row' or 'fixed'")
        if not (0 < self.a_min < 1 < self.a_max):
            raise ValueError("need 0 < a_min < 1 < a_max")
        if self.n_a < 3 or self.n_b < 3:
            raise ValueError("need at least 3 nodes per direction")
        if not self.b_max > 0:
            raise ValueError("b_max must be positive")


@dataclass(frozen=True, eq=False)
class PhaseGrid:
    spec: PhaseGridSpec
    u: np.ndarray
    t: np.ndarray

    @property
    def hu(self) -> float:
        return float(self.u[1] - self.u[0])

    @property
    def ht(self) -> float:
        return float(self.t[1] - self.t[0])

    @property
    def t_max(self) -> float:
        return float(self.t[-1])

    @cached_property
    def a(self) -> np.ndarray:
        return np.exp(self.u)

    @cached_property
    def sigma(self) -> np.ndarray:
        """b per unit t on each row."""
        if self.spec.b_scaling == "row":
            return (1.0 + self.a) / (2.0 * np.pi)
        return np.full_like(self.a, self.spec.b_max / self.t_max)

    @cached_property
    def b(self) -> np.ndarray:
        return self.sigma[:, None] * self.t[None, :]

    @property
    def shape(self):
        return (len(self.u), len(self.t))

    @cached_property
    def row_jacobian(self) -> np.ndarray:
        """a^{-2} da db = (sigma / a) du dt."""
        return self.sigma / self.a

    @cached_property
    def haar_weights(self) -> np.ndarray:
        """Trapezoid cell weights for a^{-2} da db (half weight on the window edge)."""
        wu = np.full(len(self.u), self.hu)
        wu[[0, -1]] *= 0.5
        wt = np.full(len(self.t), self.ht)
        wt[[0, -1]] *= 0.5
        return (wu * self.row_jacobian)[:, None] * wt[None, :]

    @property
    def window_mass(self) -> float:
        """Haar mass of the lattice window itself."""
        return float(np.sum(self.haar_weights))

    def index_of(self, a: float, b: float) -> tuple[int, int]:
        i = int(np.argmin(np.abs(self.u - math.log(a))))
        j = int(np.argmin(np.abs(self.t - b / self.sigma[i])))
        return i, j


def build_phase_grid(spec: PhaseGridSpec = PhaseGridSpec()) -> PhaseGrid:
    """Lattice in (ln a, t); shifted by under half a step so that a = 1 is a node."""
    u = np.linspace(math.log(spec.a_min), math.log(spec.a_max), spec.n_a)
    u = u - u[np.argmin(np.abs(u))]
    u[np.argmin(np.abs(u))] = 0.0
    n_b = spec.n_b if spec.n_b % 2 == 1 else spec.n_b + 1
    t = np.linspace(-spec.b_max, spec.b_max, n_b)
    t[n_b // 2] = 0.0
    return PhaseGrid(spec, u, t)


# window growth per refinement level: log-extent of a and the t half-width
REFINE_WINDOW = 1.25


def refine(spec):
    """Double the resolution of a grid spec; phase windows also grow by REFINE_WINDOW."""
    if isinstance(spec, KGridSpec):
        n = spec.n if spec.n is not None else build_kgrid(spec).n
        return replace(spec, n=2 * n)
    if isinstance(spec, PhaseGridSpec):
        return replace(
            spec,
            n_a=2 * spec.n_a,
            n_b=2 * spec.n_b - 1 if spec.n_b % 2 else 2 * spec.n_b + 1,
            a_min=spec.a_min**REFINE_WINDOW,
            a_max=spec.a_max**REFINE_WINDOW,
            b_max=spec.b_max * REFINE_WINDOW,
        )
    raise TypeError(f"cannot refine {type(spec).__name__}")


def kgrid_for(phase: PhaseGridSpec, levels: int = 2, **overrides) -> KGridSpec:
    """k-grid spec resolving ``phase`` and ``levels`` refinements of it."""
    # margin: snapping a = 1 onto the lattice moves the window by < one step
    a_max = 2.0 * phase.a_max ** (REFINE_WINDOW**levels)
    t_max = 1.02 * phase.b_max * REFINE_WINDOW**levels
    if phase.b_scaling == "fixed":
        # |2 pi b| <= 2 pi b_max on every row; the a -> 0 row is the binding one
        t_max = 2 * math.pi * phase.b_max * REFINE_WINDOW**levels
    kw = dict(t_max=t_max, a_max=a_max)
    kw.update(overrides)
    return KGridSpec(**kw)


@dataclass(frozen=True)
class TailExponents:
    """Power laws of an integrand v(a, b) outside the lattice window.

    ``lo``: v ~ a^lo as a -> 0; ``hi``: v ~ a^-hi as a -> infinity along
    row-scaled t; ``t``: v ~ |t|^-t as |t| -> infinity.
    For |h_f|^{2s} with generic f all three follow from p = s (2 alpha + 1):
    lo = hi = p, t = 2p.
    """

    lo: float
    hi: float
    t: float

    @classmethod
    def for_power(cls, p: float) -> "TailExponents":
        return cls(lo=p, hi=p, t=2.0 * p)


# power-law tails are fitted with this many terms
TAIL_TERMS = 3


def _tail_rule(x, edge: float, q: float) -> np.ndarray:
    """Weights r with sum(r * v(x)) = int_edge^inf v dx for v = x^-q sum_j c_j x^-j.

    ``x`` holds one abscissa per coefficient c_j, at or inside the edge; the
    j >= 1 terms absorb the leading deviations from a pure power law.
    """
    x = np.asarray(x, dtype=float)
    j = np.arange(len(x), dtype=float)
    M = x[:, None] ** -q * x[:, None] ** -j
    g = edge ** (1.0 - q - j) / (q - 1.0 + j)
    return np.linalg.solve(M.T, g)


def _fit_stride(n: int, h: float, span: float) -> int:
    """Index stride between fit nodes: about ``span``, all nodes within the first half."""
    return max(1, min(int(round(span / h)), (n - 1) // (2 * TAIL_TERMS)))


def lattice_weights(grid: PhaseGrid, tails: TailExponents | None) -> np.ndarray:
    """Weights W with sum(W * v) = window trapezoid + power-law tails.

    Tails are power laws with two correction terms, fitted to three nodes
    near each edge. That is linear in v, so it folds into the weights.
    """
    w = grid.haar_weights.copy()
    if tails is None:
        return w
    wu = np.full(len(grid.u), grid.hu)
    wu[[0, -1]] *= 0.5
    jac = grid.row_jacobian
    T = grid.t_max
    n_t = len(grid.t)
    # row integrals R(u) = jac * int v dt, t tails included
    row = np.full(n_t, grid.ht)
    row[[0, -1]] *= 0.5
    if tails.t > 1:
        m = _fit_stride(n_t, grid.ht, 0.15 * T)
        idx = m * np.arange(TAIL_TERMS)
        r = _tail_rule(-grid.t[idx], T, tails.t)
        for j, rj in zip(idx, r):
            w[:, j] += (wu * jac) * rj
            w[:, n_t - 1 - j] += (wu * jac) * rj
            row[j] += rj
            row[n_t - 1 - j] += rj
    if tails.lo > 1:
        # R(u) ~ e^{(lo - 1) u} below the window
        w[0, :] += jac[0] * row / (tails.lo - 1.0)
    if tails.hi > 0:
        # R ~ a^-hi (1 + O(1/a)) above the window; du = da / a
        n_u = len(grid.u)
        m = _fit_stride(n_u, grid.hu, math.log(2.0))
        idx = n_u - 1 - m * np.arange(TAIL_TERMS)
        r = _tail_rule(grid.a[idx], grid.a[-1], tails.hi + 1.0)
        for i, ri in zip(idx, r):
            w[i, :] += jac[i] * row * (ri / grid.a[i])
    return w


def lattice_integral(grid: PhaseGrid, values: np.ndarray, tails: TailExponents | None):
    """Haar integral of lattice ``values``; returns (value, tail_part)."""
    base = float(np.sum(grid.haar_weights * values))
    if tails is None:
        return base, 0.0
    total = float(np.sum(lattice_weights(grid, tails) * values))
    return total, total - base


def _xlogx(v):
    with np.errstate(divide="ignore", invalid="ignore"):
        out = v * np.log(v)
    return np.where(v > 0, out, 0.0)


def lattice_entropy(grid: PhaseGrid, values: np.ndarray, p: float):
    """-int v ln v a^{-2} da db with logarithmic tails; returns (value, tail_part).

    ``values`` ~ a^p near a = 0, ~ a^-p for large a and ~ |t|^{-2p} in the
    scaled b-variable.
    """
    v = np.asarray(values, dtype=float)
    g = _xlogx(v)
    base = float(np.sum(grid.haar_weights * g))
    T = grid.t_max
    q = 2.0 * p
    wt = np.full(len(grid.t), grid.ht)
    wt[[0, -1]] *= 0.5

    def t_tail(vt):
        # int_T^inf v ln v dt for v = vT (T/t)^q
        with np.errstate(divide="ignore", invalid="ignore"):
            lv = np.where(vt > 0, np.log(vt), 0.0)
        return vt * T * (lv / (q - 1.0) - q / (q - 1.0) ** 2)

    tails_t = t_tail(v[:, 0]) + t_tail(v[:, -1])
    mass_t = (v[:, 0] + v[:, -1]) * T / (q - 1.0)
    E = grid.row_jacobian * (g @ wt + tails_t)
    M = grid.row_jacobian * (v @ wt + mass_t)
    wu = np.full(len(grid.u), grid.hu)
    wu[[0, -1]] *= 0.5
    total = float(np.sum(wu * E))
    lam = p - 1.0
    if lam > 0:
        total += E[0] / lam - p * M[0] / lam**2
    total += E[-1] / p - M[-1] / p
    return -total, -(total - base)
