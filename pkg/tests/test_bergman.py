import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from affine_wehrl.affine_core import AffineElement, normalized_fiducial
from affine_wehrl.basis import random_coefficients, synthesize
from affine_wehrl.bergman import (
    BERGMAN_WINDOW,
    RationalExtremal,
    bergman_kgrid,
    husimi_relation_check,
    paley_wiener,
    ratio_error,
    sharp_constant_probe,
    weighted_norm,
    weighted_norms,
)
from affine_wehrl.closed_forms import extremal_bergman_ratio
from affine_wehrl.cst_engine import transform_field
from affine_wehrl.functionals import renyi_functional


@pytest.fixture(scope="module")
def bkg():
    return bergman_kgrid()


def test_fiducial_maps_to_rational_extremal(kgrid):
    F = paley_wiener(normalized_fiducial(0.5, kgrid))
    ref = RationalExtremal(-1j, -2 / math.sqrt(math.pi))
    z = np.array([0.1j, 1j, 2 + 0.5j, -3 + 4j, 0.3 + 0.01j])
    assert np.max(np.abs(F(z) - ref(z))) < 1e-10


def test_rejects_lower_half_plane(kgrid):
    F = paley_wiener(normalized_fiducial(0.5, kgrid))
    for z in (0.0, -1j, 2 - 0.1j):
        with pytest.raises(ValueError):
            F(z)
    with pytest.raises(ValueError):
        RationalExtremal(1j)
    with pytest.raises(ValueError):
        RationalExtremal(2.0 + 0j)


def test_linearity(kgrid):
    rng = np.random.default_rng(0)
    f = synthesize(random_coefficients(rng, 5), 0.5, kgrid)
    g = synthesize(random_coefficients(rng, 5), 0.5, kgrid)
    z = np.array([0.2j, 1 + 1j, -2 + 0.3j])
    lhs = paley_wiener(f + g)(z)
    assert np.max(np.abs(lhs - paley_wiener(f)(z) - paley_wiener(g)(z))) < 1e-10
    assert np.max(np.abs((paley_wiener(f) + paley_wiener(g))(z) - lhs)) < 1e-12


def test_fiducial_unit_l2_norm(bkg):
    w = weighted_norm(paley_wiener(normalized_fiducial(0.5, bkg)), 1.0)
    assert w.l2norm == pytest.approx(1.0, abs=1e-6)


def test_random_unitarity(bkg):
    rng = np.random.default_rng(7)
    for _ in range(4):
        f = synthesize(random_coefficients(rng, 6), 0.5, bkg)
        w = weighted_norm(paley_wiener(f), 1.0, estimate_error=False)
        assert w.l2norm == pytest.approx(f.norm_squared(), abs=1e-5)


def test_relation_on_fiducial(kgrid):
    pts = [(a, b) for a in (0.3, 0.7, 1.0, 2.0, 5.0) for b in (-1.0, -0.2, 0.0, 0.4, 1.5)]
    assert husimi_relation_check(normalized_fiducial(0.5, kgrid), pts) < 1e-8


def test_relation_on_random_combination_and_scaling(kgrid):
    f = synthesize(random_coefficients(np.random.default_rng(3), 6), 0.5, kgrid)
    pts = [(0.5, 0.1), (1.0, -0.3), (3.0, 0.8), (0.1, 2.0)]
    assert husimi_relation_check(f, pts) < 1e-7
    assert husimi_relation_check(2 * f, pts) < 2e-7
    F1, F2 = paley_wiener(f), paley_wiener(2 * f)
    assert complex(F2(1 + 1j)) == pytest.approx(2 * complex(F1(1 + 1j)), rel=1e-13)


def test_extremal_s1_integrals():
    w = weighted_norm(RationalExtremal(-1j), 1.0)
    assert w.l2norm == pytest.approx(math.pi / 4, abs=1e-8)
    assert w.lhs == pytest.approx(math.pi / 4, abs=1e-8)
    assert w.ratio == pytest.approx(1.0, abs=1e-12)


def test_extremal_s2_integral():
    w = weighted_norm(RationalExtremal(-1j), 2.0)
    assert w.lhs == pytest.approx(math.pi / 192, rel=1e-7)
    assert w.ratio == pytest.approx(1 / (12 * math.pi), rel=1e-7)


@pytest.mark.parametrize("s", [1.5, 2.0, 3.0])
def test_ratio_invariant_under_z0(s):
    ratios = [
        weighted_norm(RationalExtremal(z0), s).ratio
        for z0 in (-1j, -2j, 1 - 1j, -0.5 - 3j)
    ]
    assert max(ratios) - min(ratios) < 1e-8


def test_weighted_norms_reject_small_s():
    with pytest.raises(ValueError):
        weighted_norms(RationalExtremal(), [2.0, 0.5])


@pytest.mark.parametrize("s", [1.0, 2.0, 3.0])
def test_sharp_constant_probe(s):
    rec = sharp_constant_probe(s)
    assert rec.ratioExtremal == pytest.approx(extremal_bergman_ratio(s), abs=max(3 * rec.error, 1e-12))
    assert rec.error < 1e-6
    d = json.loads(rec.to_json())
    assert {"s", "ratioExtremal", "paperConstant", "conjectureConstant", "error"} <= set(d)
    assert d["measure"] == "dx dy"
    if s == 1.0:
        assert rec.paperConstant == rec.conjectureConstant == 1.0
    if s == 2.0:
        assert rec.paperConstant == pytest.approx(1 / (3 * math.pi))
        assert rec.ratioExtremal == pytest.approx(1 / (12 * math.pi), rel=1e-7)


def test_dictionary_consistency(bkg):
    rng = np.random.default_rng(11)
    for _ in range(3):
        f = synthesize(random_coefficients(rng, 6), 0.5, bkg)
        field = transform_field(f, 0.5, BERGMAN_WINDOW)
        norms = weighted_norms(paley_wiener(f), [1.0, 2.0, 2.5])
        for w in norms:
            rep = renyi_functional(field, w.s)
            lhs = (2 * math.pi) ** (w.s - 1) * w.lhs
            err = (2 * math.pi) ** (w.s - 1) * w.lhsError + rep.errorEstimate
            assert abs(lhs - rep.value) <= err + 1e-12


@pytest.mark.slow
def test_random_functions_stay_below_extremal_ratio(bkg):
    rng = np.random.default_rng(100)
    for i in range(100):
        f = synthesize(random_coefficients(rng, 1 + i % 8), 0.5, bkg)
        for w in weighted_norms(paley_wiener(f), [2.0, 3.0]):
            assert w.ratio <= extremal_bergman_ratio(w.s) + 3 * ratio_error(w), (i, w)
