import json
import math

import numpy as np
import pytest

from affine_wehrl.affine_core import AffineElement, SampledFunction, apply_rep, normalized_fiducial
from affine_wehrl.basis import BasisSpec, project, random_coefficients
from affine_wehrl.closed_forms import maximizer_family
from affine_wehrl.optimizer import (
    RenyiObjective,
    default_kgrid,
    exp_fit_residual,
    maximize,
    orbit_fidelity,
    probe,
)


@pytest.fixture(scope="module")
def obj_half():
    return RenyiObjective(BasisSpec(0.5, 6), 2.0)


def e(n, dim=6):
    c = np.zeros(dim, dtype=complex)
    c[n] = 1.0
    return c


def test_fiducial_is_critical_point(obj_half):
    value, grad = obj_half(e(0))
    assert value == pytest.approx(1 / 6, rel=1e-4)
    assert np.linalg.norm(grad) < 1e-4


def test_objective_phase_invariant(obj_half):
    c = random_coefficients(np.random.default_rng(1), 6)
    assert obj_half.value(np.exp(0.7j) * c) == pytest.approx(obj_half.value(c), rel=1e-13)


def test_gradient_step_consistency(obj_half):
    c = random_coefficients(np.random.default_rng(2), 6)
    g5 = obj_half.fd_gradient(c, 1e-5)
    g4 = obj_half.fd_gradient(c, 1e-4)
    assert np.linalg.norm(g4 - g5) / np.linalg.norm(g5) < 1e-2


def test_analytic_gradient_matches_fd(obj_half):
    c = random_coefficients(np.random.default_rng(3), 6)
    ga, gf = obj_half(c, "analytic")[1], obj_half(c, "fd")[1]
    assert np.linalg.norm(ga - gf) / np.linalg.norm(gf) < 1e-6
    with pytest.raises(ValueError):
        obj_half(c, "adjoint")


def test_projected_gradient_is_tangent(obj_half):
    c = random_coefficients(np.random.default_rng(4), 6)
    _, g = obj_half(c)
    assert abs(np.vdot(c, g).real) < 1e-12
    assert abs(np.vdot(1j * c, g).real) < 1e-12


def test_maximize_rejects_bad_args():
    with pytest.raises(ValueError):
        maximize(BasisSpec(0.5, 3), 0.5)
    with pytest.raises(ValueError):
        maximize(BasisSpec(0.5, 3), 2.0, restarts=0)


def test_s_three_alpha_one():
    res = maximize(BasisSpec(1.0, 6), 3.0, restarts=3, seed=5)
    assert res.value == pytest.approx(0.25, abs=1e-3)
    assert res.gap >= -3 * res.errorEstimate
    assert np.linalg.norm(res.coefficient_array) == pytest.approx(1.0, abs=1e-12)
    assert res.fidelityToOrbit >= 0.999 and res.expFitResidual < 1e-2


def test_s_one_is_flat():
    res = maximize(BasisSpec(0.5, 4), 1.0, restarts=3, seed=1)
    assert all(v == pytest.approx(1.0, abs=1e-4) for v in res.startValues)
    assert len(res.startValues) == 4


def test_maximize_deterministic():
    a = maximize(BasisSpec(0.5, 3), 2.0, restarts=2, seed=9)
    b = maximize(BasisSpec(0.5, 3), 2.0, restarts=2, seed=9)
    assert a.to_json() == b.to_json()
    c = maximize(BasisSpec(0.5, 3), 2.0, restarts=2, seed=9, workers=3)
    assert c.to_json() == a.to_json()
    d = json.loads(a.to_json())
    assert {"coefficients", "value", "gap", "fidelityToOrbit", "expFitResidual", "iterations", "converged"} <= set(d)


def test_probe_without_violation_skips_escalation():
    out = probe(BasisSpec(1.0, 3), 1.5, restarts=1, seed=0)
    assert not out.persistent and out.escalated is None
    assert out.to_dict()["escalated"] is None


def test_fidelity_of_fiducial():
    fid, a, b = orbit_fidelity(e(0), 0.5)
    assert fid == pytest.approx(1.0, abs=1e-12)
    assert a == pytest.approx(1.0, abs=1e-5) and b == pytest.approx(0.0, abs=1e-5)


def test_fidelity_locates_orbit_point():
    kg = default_kgrid()
    f = apply_rep(AffineElement(2.0, 0.3), normalized_fiducial(1.0, kg))
    c = project(f, 1.0, 40)
    fid, a, b = orbit_fidelity(c, 1.0)
    assert fid == pytest.approx(1.0, abs=1e-6)
    assert a == pytest.approx(2.0, abs=1e-3) and b == pytest.approx(0.3, abs=1e-3)


def test_fidelity_of_excited_state_below_one():
    fid, _, _ = orbit_fidelity(e(1), 1.0)
    assert fid < 0.99


def test_exp_fit_of_family_members():
    kg = default_kgrid()
    assert exp_fit_residual(e(0), 0.5, kg) < 1e-10
    fam = maximizer_family(0.4 - 1j, 2 - math.pi * 1j, kg, 0.5)
    assert exp_fit_residual(fam, 0.5, kg) < 1e-10


def test_exp_fit_detects_non_member():
    c = e(0) + 0.3 * e(1)
    assert exp_fit_residual(c / np.linalg.norm(c), 1.0) > 1e-3


def test_exp_fit_degenerate_window():
    kg = default_kgrid()
    spike = np.zeros(kg.n, dtype=complex)
    spike[kg.n // 2] = 1.0
    with pytest.raises(ValueError):
        exp_fit_residual(SampledFunction(kg, spike), 0.5, kg)
