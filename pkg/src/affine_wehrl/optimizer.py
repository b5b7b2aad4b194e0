"""Maximization of the Renyi functional over unit vectors of a Laguerre subspace.

The search runs on the real 2*dim-dimensional sphere of (Re c, Im c). The
global phase is a flat direction and is gauge-fixed after every step.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize

from .affine_core import SampledFunction
from .basis import (
    BasisSpec,
    basis_matrix,
    combination_transform,
    random_coefficients,
    synthesize,
)
from .closed_forms import conjectured_max
from .cst_engine import husimi_tails, transform_field, transform_rows
from .functionals import RenyiReport, is_violation, renyi_functional
from .grids import (
    KGrid,
    PhaseGrid,
    PhaseGridSpec,
    build_kgrid,
    build_phase_grid,
    kgrid_for,
    lattice_weights,
    refine,
)

__all__ = [
    "SearchResult",
    "RenyiObjective",
    "objective",
    "maximize",
    "orbit_fidelity",
    "exp_fit_residual",
    "probe",
    "ProbeOutcome",
    "OPTIMIZER_GRID",
    "default_kgrid",
]

# coarser lattice for the ascent itself; the final value is re-evaluated on the default lattice
OPTIMIZER_GRID = PhaseGridSpec(n_a=93, n_b=121)
FD_STEP = 1e-5
ARMIJO = 1e-4


@lru_cache(maxsize=8)
def default_kgrid(phase: PhaseGridSpec = PhaseGridSpec()) -> KGrid:
    return build_kgrid(kgrid_for(phase))


def gauge_fix(c: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the first nonzero coefficient is real and >= 0."""
    nz = np.flatnonzero(np.abs(c) > 1e-300)
    if len(nz) == 0:
        return c
    lead = c[nz[0]]
    return c * (abs(lead) / lead)


def _tangent(c, g):
    """Project a complex gradient onto the sphere's tangent space, minus the phase direction."""
    g = g - np.real(np.vdot(c, g)) * c
    ic = 1j * c
    return g - np.real(np.vdot(ic, g)) * ic


class RenyiObjective:
    """J(c) = int |h_{sum c_n phi_n}|^{2s} a^{-2} da db on a fixed lattice.

    The basis transforms are computed once; by linearity h = H c.
    """

    def __init__(
        self,
        spec: BasisSpec,
        s: float,
        grid: PhaseGrid | PhaseGridSpec = OPTIMIZER_GRID,
        kgrid: KGrid | None = None,
    ):
        if isinstance(grid, PhaseGridSpec):
            grid = build_phase_grid(grid)
        self.spec = spec
        self.s = float(s)
        self.grid = grid
        self.kgrid = kgrid or default_kgrid()
        phi = basis_matrix(spec, self.kgrid)
        cols = [
            transform_rows(SampledFunction(self.kgrid, phi[:, n]), spec.alpha, grid).ravel()
            for n in range(spec.dim)
        ]
        self.H = np.stack(cols, axis=1)
        self.W = lattice_weights(grid, husimi_tails(spec.alpha, s)).ravel()

    def value(self, c) -> float:
        h = self.H @ np.asarray(c, dtype=complex)
        return float(np.sum(self.W * (np.abs(h) ** 2) ** self.s))

    def analytic_gradient(self, c) -> np.ndarray:
        """dJ/dRe c + i dJ/dIm c."""
        c = np.asarray(c, dtype=complex)
        h = self.H @ c
        m = np.abs(h) ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            pw = np.where(m > 0, m ** (self.s - 1.0), 0.0)
        g = self.W * self.s * pw * h
        return 2.0 * (self.H.conj().T @ g)

    def fd_gradient(self, c, step: float = FD_STEP) -> np.ndarray:
        c = np.asarray(c, dtype=complex)
        out = np.zeros(len(c), dtype=complex)
        for n in range(len(c)):
            for unit in (1.0, 1j):
                e = np.zeros(len(c), dtype=complex)
                e[n] = unit * step
                d = (self.value(c + e) - self.value(c - e)) / (2 * step)
                out[n] += unit * d
        return out

    def __call__(self, c, method: str = "fd"):
        """(value, gradient projected onto the tangent space of the unit sphere)."""
        c = np.asarray(c, dtype=complex)
        if method == "fd":
            g = self.fd_gradient(c)
        elif method == "analytic":
            g = self.analytic_gradient(c)
        else:
            raise ValueError(f"unknown gradient method {method!r}")
        return self.value(c), _tangent(c, g)


def objective(coefficients, s, alpha, grid=OPTIMIZER_GRID, method="fd"):
    c = np.asarray(coefficients, dtype=complex)
    return RenyiObjective(BasisSpec(alpha, len(c)), s, grid)(c, method)


@dataclass
class _Ascent:
    coefficients: np.ndarray
    value: float
    iterations: int
    converged: bool
    grad_norm: float


def _ascend(obj: RenyiObjective, c0, method, max_iter, tol) -> _Ascent:
    x = gauge_fix(c0 / np.linalg.norm(c0))
    J, g = obj(x, method)
    step = 1.0
    it = 0
    gn = float(np.linalg.norm(g))
    converged = gn < tol
    while not converged and it < max_iter:
        it += 1
        while True:
            y = x + step * g
            y = y / np.linalg.norm(y)
            Jy = obj.value(y)
            if Jy >= J + ARMIJO * step * gn**2:
                break
            step *= 0.5
            if step < 1e-14:
                break
        if step < 1e-14:
            # no ascent direction left at working precision
            converged = gn < 1e3 * tol
            break
        x = gauge_fix(y)
        J, g = obj(x, method)
        gn = float(np.linalg.norm(g))
        converged = gn < tol
        step = min(step * 2.0, 1e3)
    return _Ascent(x, J, it, converged, gn)


@dataclass(frozen=True)
class SearchResult:
    coefficients: tuple
    value: float
    gap: float
    fidelityToOrbit: float
    expFitResidual: float
    iterations: int
    converged: bool
    s: float = 0.0
    alpha: float = 0.0
    errorEstimate: float = 0.0
    conjecturedMax: float = 0.0
    orbitA: float = 1.0
    orbitB: float = 0.0
    startValues: tuple = field(default_factory=tuple)

    @property
    def coefficient_array(self) -> np.ndarray:
        return np.array([complex(re, im) for re, im in self.coefficients])

    @property
    def violates(self) -> bool:
        return is_violation(self.gap, self.errorEstimate)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["coefficients"] = [list(p) for p in self.coefficients]
        d["startValues"] = list(self.startValues)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _start_points(dim: int, restarts: int, seed: int):
    e0 = np.zeros(dim, dtype=complex)
    e0[0] = 1.0
    starts = [e0]
    for i in range(restarts):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(i,)))
        starts.append(random_coefficients(rng, dim))
    return starts


def _sort_key(run: _Ascent):
    c = run.coefficients
    return (-run.value, tuple(np.round(np.real(c), 15)), tuple(np.round(np.imag(c), 15)))


def maximize(
    spec: BasisSpec,
    s: float,
    restarts: int = 8,
    seed: int = 0,
    grid: PhaseGridSpec = OPTIMIZER_GRID,
    eval_grid: PhaseGridSpec = PhaseGridSpec(),
    method: str = "fd",
    max_iter: int = 500,
    tol: float = 1e-6,
    workers: int = 1,
) -> SearchResult:
    """Projected-gradient ascent from the fiducial and ``restarts`` random starts."""
    if not s >= 1:
        raise ValueError("s must be >= 1")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    kgrid = default_kgrid(eval_grid)
    obj = RenyiObjective(spec, s, grid, kgrid)
    starts = _start_points(spec.dim, restarts, seed)

    def run(c0):
        return _ascend(obj, c0, method, max_iter, tol)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(run, starts))
    else:
        runs = [run(c0) for c0 in starts]
    best = min(runs, key=_sort_key)
    return _finalize(best, runs, spec, s, eval_grid, kgrid)


def _finalize(best: _Ascent, runs, spec, s, eval_grid, kgrid) -> SearchResult:
    c = best.coefficients
    f = synthesize(c, spec.alpha, kgrid)
    report: RenyiReport = renyi_functional(transform_field(f, spec.alpha, eval_grid, check=False), s)
    fid, a_best, b_best = orbit_fidelity(c, spec.alpha)
    try:
        resid = exp_fit_residual(c, spec.alpha, kgrid)
    except ValueError:
        resid = float("inf")
    return SearchResult(
        coefficients=tuple((float(z.real), float(z.imag)) for z in c),
        value=report.value,
        gap=report.gap,
        fidelityToOrbit=fid,
        expFitResidual=resid,
        iterations=best.iterations,
        converged=best.converged,
        s=float(s),
        alpha=float(spec.alpha),
        errorEstimate=report.errorEstimate,
        conjecturedMax=report.conjecturedMax,
        orbitA=a_best,
        orbitB=b_best,
        startValues=tuple(float(r.value) for r in runs),
    )


def orbit_fidelity(coefficients, alpha: float) -> tuple[float, float, float]:
    """max over (a, b) of |<U(a, b) f0, f>|^2 for f = sum c_n phi_n.

    Since <U(a, b) f0, f> = alpha^{-1/2} h_f(a, b), this is the sup of the
    Husimi density divided by alpha. Coarse lattice, then Nelder-Mead.
    """
    c = np.asarray(coefficients, dtype=complex)
    c = c / np.linalg.norm(c)
    u = np.linspace(-6, 6, 61)
    t = np.linspace(-4, 4, 81)
    a = np.exp(u)[:, None]
    b = (1 + a) * t[None, :] / (2 * np.pi)
    vals = np.abs(combination_transform(c, alpha, a, b)) ** 2
    i, j = np.unravel_index(int(np.argmax(vals)), vals.shape)

    def neg(x):
        a_, b_ = math.exp(x[0]), x[1]
        return -abs(complex(combination_transform(c, alpha, a_, b_))) ** 2

    x0 = np.array([u[i], b[i, j]])
    res = minimize(neg, x0, method="Nelder-Mead", options=dict(xatol=1e-10, fatol=1e-15, maxiter=4000))
    x = res.x if -res.fun >= vals[i, j] else x0
    fid = min(1.0, -neg(x) / alpha)
    return float(fid), float(math.exp(x[0])), float(x[1])


def exp_fit_residual(coefficients, alpha: float, kgrid: KGrid | None = None, rel_floor: float = 1e-6) -> float:
    """Weighted least-squares residual of ln(k^-alpha f(k)) against A' - B k.

    The fit uses the nodes where |f| > rel_floor * max|f|, weighted by
    w_k |f(k)|^2 so the result measures the deviation in L^2 sense. Zero
    exactly for members of the family A k^alpha e^{-Bk}.
    """
    kgrid = kgrid or default_kgrid()
    if isinstance(coefficients, SampledFunction):
        f = coefficients
    else:
        f = synthesize(coefficients, alpha, kgrid)
    k, vals = f.k, f.values
    mag = np.abs(vals)
    mask = mag > rel_floor * mag.max()
    if mask.sum() < 8:
        raise ValueError(f"degenerate fit window: {int(mask.sum())} usable nodes")
    k = k[mask]
    g = vals[mask] * np.exp(-alpha * np.log(k))
    y_re = np.log(np.abs(g))
    y_im = np.unwrap(np.angle(g))
    w = f.weights[mask] * mag[mask] ** 2
    sw = np.sqrt(w)
    X = np.stack([np.ones_like(k), k], axis=1) * sw[:, None]
    r2 = 0.0
    for y in (y_re, y_im):
        coef, *_ = np.linalg.lstsq(X, y * sw, rcond=None)
        r2 += float(np.sum((y * sw - X @ coef) ** 2))
    return math.sqrt(r2 / float(np.sum(w)))


@dataclass(frozen=True)
class ProbeOutcome:
    result: SearchResult
    escalated: SearchResult | None
    persistent: bool

    def to_dict(self) -> dict:
        return {
            "result": self.result.to_dict(),
            "escalated": None if self.escalated is None else self.escalated.to_dict(),
            "persistent": self.persistent,
        }


def probe(spec: BasisSpec, s: float, restarts: int = 8, seed: int = 0, **kw) -> ProbeOutcome:
    """maximize, and if the result beats the conjectured bound, retry at double resolution and dimension."""
    res = maximize(spec, s, restarts, seed, **kw)
    if not res.violates:
        return ProbeOutcome(res, None, False)
    kw2 = dict(kw)
    kw2["grid"] = refine(kw.get("grid", OPTIMIZER_GRID))
    kw2["eval_grid"] = refine(kw.get("eval_grid", PhaseGridSpec()))
    esc = maximize(BasisSpec(spec.alpha, 2 * spec.dim), s, restarts, seed, **kw2)
    return ProbeOutcome(res, esc, esc.violates)
