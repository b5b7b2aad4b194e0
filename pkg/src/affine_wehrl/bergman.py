"""Upper half-plane picture at alpha = 1/2.

    F(z) = pi^{-1/2} int_0^inf e^{ikz} k^{1/2} f(k) dk,   Im z > 0,
    h_f(a, b) = sqrt(2 pi) Im z F(z)   with z = 2 pi b + i a.

Area integrals use Lebesgue measure d^2z = dx dy. They run on the same
phase lattice as the Husimi functionals, via dx dy = 2 pi da db:

    int |F|^{2s} y^{2s-2} dx dy = 2 pi int |F(z)|^{2s} a^{2s} a^{-2} da db.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .affine_core import AffineElement, SampledFunction
from .closed_forms import (
    extremal_bergman_ratio,
    paper_bergman_constant,
    transported_bergman_constant,
)
from .cst_engine import check_resolution, fourier_rows, transform_at
from .grids import (
    PhaseGrid,
    PhaseGridSpec,
    TailExponents,
    build_phase_grid,
    lattice_integral,
    kgrid_for,
    refine,
)
from .grids import KGrid, build_kgrid

__all__ = [
    "BergmanFunction",
    "BoundaryDataFunction",
    "RationalExtremal",
    "paley_wiener",
    "husimi_relation_check",
    "WeightedNorm",
    "weighted_norm",
    "weighted_norms",
    "SharpConstantRecord",
    "sharp_constant_probe",
    "ALPHA",
    "BERGMAN_WINDOW",
    "bergman_kgrid",
    "ratio_error",
]

ALPHA = 0.5
TAIL_MODEL_FRACTION = 1e-2
# wider than the Husimi default: the l2 part (s = 1) has the slowest tails
BERGMAN_WINDOW = PhaseGridSpec(n_a=208, a_min=1e-6, a_max=1e3, n_b=481, b_max=24.0)


def _as_z(z):
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag <= 0):
        raise ValueError("Bergman functions are only evaluated for Im z > 0")
    return z


class BergmanFunction:
    def __call__(self, z):
        raise NotImplementedError

    def on_lattice(self, grid: PhaseGrid) -> np.ndarray:
        """F(2 pi b + i a) on every lattice node."""
        return self(2 * np.pi * grid.b + 1j * grid.a[:, None])


@dataclass(frozen=True, eq=False)
class BoundaryDataFunction(BergmanFunction):
    f: SampledFunction

    @property
    def kernel(self):
        return self.f.weights * np.sqrt(self.f.k) * self.f.values / math.sqrt(math.pi)

    def __call__(self, z):
        z = _as_z(z)
        flat = z.ravel()
        out = np.exp(1j * np.outer(flat, self.f.k)) @ self.kernel
        return out.reshape(z.shape)[()]

    def on_lattice(self, grid: PhaseGrid) -> np.ndarray:
        check_resolution(self.f, grid)
        return fourier_rows(self.f.k, self.kernel, grid, "fast")

    def __add__(self, other: "BoundaryDataFunction") -> "BoundaryDataFunction":
        return BoundaryDataFunction(self.f + other.f)


@dataclass(frozen=True, eq=False)
class RationalExtremal(BergmanFunction):
    """scale * (z - z0)^{-2} with z0 in the lower half-plane."""

    z0: complex = -1j
    scale: complex = 1.0

    def __post_init__(self):
        if not complex(self.z0).imag < 0:
            raise ValueError("z0 must lie in the lower half-plane")

    def __call__(self, z):
        z = _as_z(z)
        return (self.scale * (z - self.z0) ** -2)[()]


def bergman_kgrid(window: PhaseGridSpec = BERGMAN_WINDOW, levels: int = 1) -> KGrid:
    """k-grid resolving ``window`` and ``levels`` refinements of it."""
    return build_kgrid(kgrid_for(window, levels=levels))


def paley_wiener(f: SampledFunction) -> BoundaryDataFunction:
    return BoundaryDataFunction(f)


def husimi_relation_check(f: SampledFunction, points) -> float:
    """max |h_f(a, b) - sqrt(2 pi) a F(2 pi b + i a)| over (a, b) points (alpha = 1/2)."""
    F = paley_wiener(f)
    dev = 0.0
    for a, b in points:
        h = transform_at(f, ALPHA, AffineElement(a, b))
        rhs = math.sqrt(2 * math.pi) * a * complex(F(2 * math.pi * b + 1j * a))
        dev = max(dev, abs(h - rhs))
    return dev


@dataclass(frozen=True)
class WeightedNorm:
    s: float
    lhs: float
    l2norm: float
    lhsError: float
    l2Error: float
    # tail parts and refined-lattice values, kept for the ratio error
    lhsTail: float = 0.0
    l2Tail: float = 0.0
    lhsRefined: float = math.nan
    l2Refined: float = math.nan

    @property
    def ratio(self) -> float:
        return self.lhs / self.l2norm**self.s


def _weighted(F_lat, grid: PhaseGrid, s: float):
    v = np.abs(F_lat) ** (2 * s) * grid.a[:, None] ** (2 * s)
    val, tail = lattice_integral(grid, v, TailExponents.for_power(2 * s))
    return 2 * math.pi * val, 2 * math.pi * tail


def weighted_norms(
    F: BergmanFunction,
    s_values,
    window: PhaseGridSpec | PhaseGrid | None = None,
    estimate_error: bool = True,
) -> list[WeightedNorm]:
    """(int |F|^{2s} y^{2s-2} d^2z, int |F|^2 d^2z) over the half-plane, per s.

    Window: y = a on a log-uniform lattice, x = 2 pi b on row-scaled uniform
    nodes, with power-law tails outside. Errors are the change under one
    refinement plus a fraction of the tail model. F is evaluated once per
    lattice and shared by all s.
    """
    s_values = [float(s) for s in s_values]
    if not all(s >= 1 for s in s_values):
        raise ValueError("s must be >= 1")
    window = window or BERGMAN_WINDOW
    grid = window if isinstance(window, PhaseGrid) else build_phase_grid(window)
    lat = F.on_lattice(grid)
    if estimate_error:
        fine = build_phase_grid(refine(grid.spec))
        lat_f = F.on_lattice(fine)
    l2, l2_tail = _weighted(lat, grid, 1.0)
    l2_fine = _weighted(lat_f, fine, 1.0)[0] if estimate_error else math.nan
    l2_err = TAIL_MODEL_FRACTION * abs(l2_tail)
    if estimate_error:
        l2_err += abs(l2 - l2_fine)
    out = []
    for s in s_values:
        lhs, lhs_tail = _weighted(lat, grid, s)
        lhs_fine = _weighted(lat_f, fine, s)[0] if estimate_error else math.nan
        lhs_err = TAIL_MODEL_FRACTION * abs(lhs_tail)
        if estimate_error:
            lhs_err += abs(lhs - lhs_fine)
        out.append(WeightedNorm(s, lhs, l2, lhs_err, l2_err, lhs_tail, l2_tail, lhs_fine, l2_fine))
    return out


def weighted_norm(
    F: BergmanFunction,
    s: float,
    window: PhaseGridSpec | PhaseGrid | None = None,
    estimate_error: bool = True,
) -> WeightedNorm:
    """Single-s form of :func:`weighted_norms`."""
    return weighted_norms(F, [s], window, estimate_error)[0]


def ratio_error(w: WeightedNorm) -> float:
    """Error of lhs / l2norm^s: change under refinement plus a fraction of its tail part.

    Taken on the ratio itself, so errors shared by numerator and denominator
    cancel (at s = 1 the ratio is exactly 1).
    """
    r = w.ratio
    untailed = (w.lhs - w.lhsTail) / (w.l2norm - w.l2Tail) ** w.s
    err = TAIL_MODEL_FRACTION * abs(r - untailed)
    if math.isnan(w.lhsRefined):
        return err + r * (w.lhsError / w.lhs + w.s * w.l2Error / w.l2norm)
    return err + abs(r - w.lhsRefined / w.l2Refined**w.s)


@dataclass(frozen=True)
class SharpConstantRecord:
    s: float
    ratioExtremal: float
    paperConstant: float
    conjectureConstant: float
    closedFormRatio: float
    error: float
    measure: str = "dx dy"

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def sharp_constant_probe(s: float, window: PhaseGridSpec | None = None, z0: complex = -1j) -> SharpConstantRecord:
    """Measured lhs / l2norm^s for (z - z0)^{-2}, next to the two candidate constants."""
    w = weighted_norm(RationalExtremal(z0), s, window)
    return SharpConstantRecord(
        s=float(s),
        ratioExtremal=w.ratio,
        paperConstant=paper_bergman_constant(s),
        conjectureConstant=transported_bergman_constant(s),
        closedFormRatio=extremal_bergman_ratio(s),
        error=ratio_error(w),
    )
