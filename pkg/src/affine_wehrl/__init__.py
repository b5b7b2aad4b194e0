"""Wehrl and Renyi entropies of coherent states on the affine group.

Coherent-state transform for U(a, b) f(k) = e^{-2 pi i b k} a^{1/2} f(a k)
on L^2(R_+), Haar-measure functionals of the Husimi density, closed forms
for the fiducial orbit, a Renyi maximizer over Laguerre truncations, and
the upper half-plane picture at alpha = 1/2.
"""
from .affine_core import (
    AffineElement,
    FiducialSpec,
    IDENTITY,
    SampledFunction,
    TailMassError,
    apply_rep,
    compose,
    fiducial,
    haar_weight,
    inverse,
    normalized_fiducial,
)
from .basis import BasisSpec, combination_transform, synthesize
from .bergman import (
    BoundaryDataFunction,
    RationalExtremal,
    SharpConstantRecord,
    husimi_relation_check,
    paley_wiener,
    sharp_constant_probe,
    weighted_norm,
)
from .closed_forms import (
    TheoremBoundInputs,
    conjectured_max,
    dirichlet_integral,
    fiducial_renyi,
    fiducial_transform,
    maximizer_family,
    minimal_entropy,
    normalization_c,
    theorem_upper_bound,
)
from .cst_engine import HusimiField, ResolutionError, WindowError, transform_at, transform_field
from .functionals import (
    RenyiReport,
    check_isometry,
    entropy_from_renyi_derivative,
    renyi_functional,
    sup_bound_check,
    wehrl_entropy,
)
from .grids import (
    GridError,
    KGrid,
    KGridSpec,
    PhaseGrid,
    PhaseGridSpec,
    build_kgrid,
    build_phase_grid,
    kgrid_for,
    refine,
)
from .optimizer import SearchResult, exp_fit_residual, maximize, orbit_fidelity, probe

__version__ = "0.1.0"
