import csv

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from affine_wehrl.affine_core import AffineElement, SampledFunction, apply_rep, inverse, normalized_fiducial
from affine_wehrl.basis import combination_transform, random_coefficients, synthesize
from affine_wehrl.closed_forms import fiducial_transform
from affine_wehrl.cst_engine import (
    ResolutionError,
    WindowError,
    transform_at,
    transform_field,
    transform_rows,
)
from affine_wehrl.grids import KGridSpec, PhaseGridSpec, build_kgrid, build_phase_grid

SMALL = PhaseGridSpec(n_a=61, a_min=1e-2, a_max=20.0, n_b=81, b_max=6.0)


@pytest.mark.parametrize("alpha", [0.25, 0.5, 1.0, 2.0, 3.5])
def test_fiducial_saturates_at_identity(kgrid, alpha):
    h = transform_at(normalized_fiducial(alpha, kgrid), alpha, AffineElement(1.0, 0.0))
    assert abs(h) ** 2 == pytest.approx(alpha, rel=1e-10)


def test_fiducial_at_a_two(kgrid):
    h = transform_at(normalized_fiducial(0.5, kgrid), 0.5, AffineElement(2.0, 0.0))
    assert abs(h) ** 2 == pytest.approx(32 / 81, rel=1e-10)


@given(a=st.floats(0.05, 20.0), b=st.floats(-2.0, 2.0), alpha=st.sampled_from([0.5, 1.0, 2.0]))
def test_transform_at_matches_closed_form(kgrid, a, b, alpha):
    h = transform_at(normalized_fiducial(alpha, kgrid), alpha, AffineElement(a, b))
    assert abs(h - fiducial_transform(alpha, a, b)) < 1e-8


def test_transform_at_rejects_unresolved_frequency():
    coarse = build_kgrid(KGridSpec(n=64, k_max=60.0))
    f = normalized_fiducial(0.5, coarse)
    with pytest.raises(ResolutionError):
        transform_at(f, 0.5, AffineElement(1e-3, 50.0))


@given(
    seed=st.integers(0, 2**31),
    a0=st.floats(0.6, 1.6),
    b0=st.floats(-0.5, 0.5),
    a=st.floats(0.2, 5.0),
    b=st.floats(-1.0, 1.0),
)
@settings(max_examples=40)
def test_covariance_in_modulus(kgrid, seed, a0, b0, a, b):
    f = synthesize(random_coefficients(np.random.default_rng(seed), 5), 1.0, kgrid)
    g0, g = AffineElement(a0, b0), AffineElement(a, b)
    lhs = abs(transform_at(apply_rep(g0, f), 1.0, g))
    rhs = abs(transform_at(f, 1.0, inverse(g0) @ g))
    assert lhs == pytest.approx(rhs, abs=1e-6)


@given(seed=st.integers(0, 2**31), a=st.floats(0.1, 5.0), b=st.floats(-1.0, 1.0))
@settings(max_examples=30)
def test_opposite_sign_representation_is_conjugation(kgrid, seed, a, b):
    # the e^{+2 pi i b k} representation: its transform of f is h_f(a, -b),
    # whose modulus equals |h_{conj f}(a, b)|
    f = synthesize(random_coefficients(np.random.default_rng(seed), 4), 0.5, kgrid)
    fbar = SampledFunction(kgrid, np.conj(f.values))
    lhs = abs(transform_at(f, 0.5, AffineElement(a, -b)))
    rhs = abs(transform_at(fbar, 0.5, AffineElement(a, b)))
    assert lhs == pytest.approx(rhs, abs=1e-12)


def test_fast_and_direct_rows_agree(kgrid):
    grid = build_phase_grid(SMALL)
    rng = np.random.default_rng(11)
    for _ in range(3):
        f = synthesize(random_coefficients(rng, 6), 0.5, kgrid)
        fast = transform_rows(f, 0.5, grid, "fast")
        direct = transform_rows(f, 0.5, grid, "direct")
        assert np.max(np.abs(fast - direct)) < 1e-8


def test_unknown_method_rejected(kgrid):
    with pytest.raises(ValueError):
        transform_rows(normalized_fiducial(0.5, kgrid), 0.5, build_phase_grid(SMALL), "fft")


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
def test_fiducial_field_matches_closed_form(kgrid, phase, alpha):
    field = transform_field(normalized_fiducial(alpha, kgrid), alpha, phase)
    exact = np.abs(fiducial_transform(alpha, phase.a[:, None], phase.b)) ** 2
    assert np.max(np.abs(field.values - exact)) < 1e-8
    assert np.all(field.values >= 0)


def test_laguerre_field_matches_closed_form(kgrid, phase):
    c = random_coefficients(np.random.default_rng(5), 6)
    h = transform_rows(synthesize(c, 1.0, kgrid), 1.0, phase)
    exact = combination_transform(c, 1.0, phase.a[:, None], phase.b)
    assert np.max(np.abs(h - exact)) < 1e-8


def test_random_fields_are_isometric(kgrid, phase):
    rng = np.random.default_rng(20)
    for alpha in (0.5, 1.0):
        for _ in range(10):
            f = synthesize(random_coefficients(rng, 6), alpha, kgrid)
            field = transform_field(f, alpha, phase)
            assert abs(field.mass() - 1) < 1e-4
            assert field.values.max() <= alpha + 1e-6


def test_isometry_improves_under_refinement(kgrid):
    f = synthesize(random_coefficients(np.random.default_rng(2), 6), 0.5, kgrid)
    field = transform_field(f, 0.5, SMALL, check=False)
    assert field.refined.isometry_defect() < field.isometry_defect()


def test_window_error_on_tiny_window(kgrid):
    tiny = PhaseGridSpec(n_a=21, a_min=0.5, a_max=2.0, n_b=21, b_max=0.3)
    with pytest.raises(WindowError):
        transform_field(normalized_fiducial(0.5, kgrid), 0.5, tiny)


def test_field_csv_dump(kgrid, tmp_path):
    field = transform_field(normalized_fiducial(1.0, kgrid), 1.0, SMALL, check=False)
    path = field.to_csv(tmp_path / "field.csv")
    with path.open() as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["a", "b", "husimi", "haarWeight"]
    assert len(rows) == 1 + field.values.size
    body = np.array(rows[1:], dtype=float)
    assert np.sum(body[:, 2] * body[:, 3]) == pytest.approx(field.window_mass(), rel=1e-12)
