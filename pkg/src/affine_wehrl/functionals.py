"""Haar-measure functionals of a Husimi field."""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .affine_core import AffineElement, SampledFunction
from .closed_forms import conjectured_max
from .cst_engine import HusimiField, husimi_tails, transform_field
from .grids import PhaseGrid, PhaseGridSpec, lattice_entropy, lattice_integral

__all__ = [
    "RenyiReport",
    "renyi_functional",
    "renyi_value",
    "wehrl_entropy",
    "entropy_from_renyi_derivative",
    "check_isometry",
    "sup_bound_check",
    "is_violation",
    "TAIL_MODEL_FRACTION",
    "VIOLATION_FACTOR",
]

# the leading-order tail model is trusted to this fraction of its own size
TAIL_MODEL_FRACTION = 1e-2
# gap < -VIOLATION_FACTOR * errorEstimate counts as a counterexample candidate
VIOLATION_FACTOR = 3.0


@dataclass(frozen=True)
class RenyiReport:
    s: float
    alpha: float
    value: float
    errorEstimate: float
    conjecturedMax: float
    gap: float

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "RenyiReport":
        return cls(**{k: d[k] for k in cls.__dataclass_fields__})

    @property
    def violates(self) -> bool:
        return is_violation(self.gap, self.errorEstimate)


def is_violation(gap: float, error: float) -> bool:
    return gap < -VIOLATION_FACTOR * error


def renyi_value(field: HusimiField, s: float) -> tuple[float, float]:
    """(int |h|^{2s} a^{-2} da db, tail part). No range check on s."""
    v = field.values**s
    return lattice_integral(field.grid, v, husimi_tails(field.alpha, s))


def renyi_functional(field: HusimiField, s: float, estimate_error: bool = True) -> RenyiReport:
    if not s >= 1:
        raise ValueError(f"the Renyi functional needs s >= 1, got {s}")
    value, tail = renyi_value(field, s)
    error = TAIL_MODEL_FRACTION * abs(tail)
    if estimate_error:
        refined, _ = renyi_value(field.refined, s)
        error += abs(value - refined)
    cmax = conjectured_max(s, field.alpha)
    return RenyiReport(
        s=float(s),
        alpha=float(field.alpha),
        value=value,
        errorEstimate=error,
        conjecturedMax=cmax,
        gap=cmax - value,
    )


def wehrl_entropy(field: HusimiField, mass_tol: float = 1e-3) -> float:
    """-int |h|^2 ln |h|^2 a^{-2} da db, with 0 ln 0 = 0."""
    mass = field.mass()
    if abs(mass - 1.0) > mass_tol:
        warnings.warn(
            f"Husimi mass {mass:.6g} is not 1; the entropy assumes a normalized field",
            RuntimeWarning,
            stacklevel=2,
        )
    return lattice_entropy(field.grid, field.values, 2 * field.alpha + 1)[0]


def entropy_from_renyi_derivative(field: HusimiField, ds: float = 1e-3) -> float:
    """-d/ds of the Renyi integral at s = 1 by a central difference."""
    up, _ = renyi_value(field, 1.0 + ds)
    down, _ = renyi_value(field, 1.0 - ds)
    return -(up - down) / (2 * ds)


def check_isometry(
    f: SampledFunction, alpha: float, grid: PhaseGrid | PhaseGridSpec | None = None
) -> tuple[float, float]:
    """(Haar mass of |h_f|^2, |mass - ||f||^2|)."""
    field = transform_field(f, alpha, grid, check=False)
    mass = field.mass()
    return mass, abs(mass - f.norm_squared())


def sup_bound_check(field: HusimiField) -> tuple[float, AffineElement]:
    """Largest lattice value of |h_f|^2 and the group element where it sits."""
    i, j = np.unravel_index(int(np.argmax(field.values)), field.values.shape)
    g = AffineElement(float(field.grid.a[i]), float(field.grid.b[i, j]))
    return float(field.values[i, j]), g
