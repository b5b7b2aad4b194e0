import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from affine_wehrl import basis
from affine_wehrl.affine_core import (
    IDENTITY,
    AffineElement,
    FiducialSpec,
    SampledFunction,
    TailMassError,
    apply_rep,
    compose,
    fiducial,
    haar_weight,
    inverse,
    normalized_fiducial,
)
from affine_wehrl.closed_forms import normalization_c

finite = dict(allow_nan=False, allow_infinity=False)
dilations = st.floats(1e-3, 1e3, **finite)
shifts = st.floats(-1e3, 1e3, **finite)
elements = st.builds(AffineElement, dilations, shifts)
# products of two stay above a = 0.49, where no mass leaves the k-grid
mild = st.builds(AffineElement, st.floats(0.7, 2.0), st.floats(-1.0, 1.0))


def close(g, h, tol):
    return abs(g.a - h.a) <= tol * max(1, abs(h.a)) and abs(g.b - h.b) <= tol * max(1, abs(h.b))


def test_compose_examples():
    assert tuple(compose(AffineElement(2, 1), AffineElement(3, 4))) == (6.0, 9.0)
    g = AffineElement(2.5, -0.3)
    assert compose(IDENTITY, g) == g
    assert compose(AffineElement(2, 1), inverse(AffineElement(2, 1))) == IDENTITY


def test_inverse_examples():
    assert tuple(inverse(AffineElement(2, 1))) == (0.5, -0.5)
    assert inverse(IDENTITY) == IDENTITY
    assert tuple(inverse(AffineElement(4.0))) == (0.25, 0.0)


def test_identity_is_exact():
    assert IDENTITY.a == 1.0 and IDENTITY.b == 0.0


@pytest.mark.parametrize("a", [0.0, -1.0, math.inf, math.nan])
def test_rejects_nonpositive_dilation(a):
    with pytest.raises(ValueError):
        AffineElement(a, 0.0)


def test_haar_weight_examples():
    assert haar_weight(AffineElement(1, 7.0)) == 1.0
    assert haar_weight(AffineElement(2, 0)) == 0.25
    assert haar_weight(AffineElement(0.5, 3)) == 4.0


@settings(max_examples=1000)
@given(elements, elements, elements)
def test_associativity(g, h, j):
    lhs = compose(compose(g, h), j)
    rhs = compose(g, compose(h, j))
    assert close(lhs, rhs, 1e-12)


@given(elements)
def test_inverse_is_two_sided(g):
    # b-components cancel terms of size |b|, so the tolerance scales with it
    scale = max(1.0, abs(g.b), abs(g.b / g.a))
    for e in (compose(g, inverse(g)), compose(inverse(g), g)):
        assert abs(e.a - 1.0) <= 1e-14
        assert abs(e.b) <= 1e-14 * scale


@settings(max_examples=50)
@given(
    elements,
    st.floats(0.05, 5.0),
    st.floats(1.1, 4.0),
    st.floats(-3.0, 3.0),
    st.floats(0.1, 3.0),
)
def test_haar_measure_left_invariant(g, a1, ratio, b1, width):
    def mass(a_lo, a_hi, b_lo, b_hi):
        val, _ = integrate.dblquad(
            lambda b, a: haar_weight(AffineElement(a, b)), a_lo, a_hi, b_lo, b_hi, epsrel=1e-12
        )
        return val

    a2, b2 = a1 * ratio, b1 + width
    lo, hi = g @ AffineElement(a1, b1), g @ AffineElement(a2, b2)
    assert mass(lo.a, hi.a, lo.b, hi.b) == pytest.approx(mass(a1, a2, b1, b2), rel=1e-6)


def test_fiducial_normalizations(kgrid):
    for alpha in (0.25, 0.5, 1.0, 2.0):
        eta = fiducial(FiducialSpec(alpha), kgrid)
        assert eta.norm_squared() == pytest.approx(alpha, rel=1e-12)
        # the grid starts at k_min, missing C^2 k_min^{2 alpha} / (2 alpha) of this integral
        k_min = kgrid.nodes[0]
        sliver = normalization_c(alpha) ** 2 * k_min ** (2 * alpha) / (2 * alpha)
        dk_over_k = float(np.sum(kgrid.weights * np.abs(eta.values) ** 2 / kgrid.nodes))
        assert dk_over_k + sliver == pytest.approx(1.0, rel=1e-9)
        assert normalized_fiducial(alpha, kgrid).norm_squared() == pytest.approx(1.0, rel=1e-12)
    with pytest.raises(ValueError):
        FiducialSpec(0.0)


def test_sampled_function_shape_checked(kgrid):
    with pytest.raises(ValueError):
        SampledFunction(kgrid, np.ones(3))


def test_apply_rep_identity(kgrid):
    f = normalized_fiducial(0.5, kgrid)
    assert np.array_equal(apply_rep(IDENTITY, f).values, f.values)


@pytest.mark.parametrize("g", [AffineElement(2.0, 0.3), AffineElement(0.6, -0.8), AffineElement(1.7, 1.5)])
@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
def test_apply_rep_on_fiducial_matches_closed_form(kgrid, g, alpha):
    k = kgrid.nodes
    got = apply_rep(g, fiducial(FiducialSpec(alpha), kgrid)).values
    want = normalization_c(alpha) * math.sqrt(g.a) * (g.a * k) ** alpha * np.exp(-g.a * k - 2j * math.pi * g.b * k)
    assert np.max(np.abs(got - want)) < 1e-8


def _random_f(seed, kgrid, alpha=0.5, dim=6):
    c = basis.random_coefficients(np.random.default_rng(seed), dim)
    return basis.synthesize(c, alpha, kgrid)


@settings(max_examples=100)
@given(mild, st.integers(0, 2**32 - 1))
def test_apply_rep_unitary(kgrid, g, seed):
    f = _random_f(seed, kgrid)
    assert apply_rep(g, f).norm_squared() == pytest.approx(f.norm_squared(), rel=1e-6)


@settings(max_examples=30)
@given(mild, mild, st.integers(0, 2**32 - 1))
def test_apply_rep_homomorphism(kgrid, g, h, seed):
    f = _random_f(seed, kgrid)
    lhs = apply_rep(g, apply_rep(h, f))
    rhs = apply_rep(g @ h, f)
    assert math.sqrt((lhs - rhs).norm_squared()) < 1e-6


def test_apply_rep_rejects_mass_loss(kgrid):
    f = normalized_fiducial(1.0, kgrid)
    with pytest.raises(TailMassError):
        apply_rep(AffineElement(1e-2, 0.0), f)
