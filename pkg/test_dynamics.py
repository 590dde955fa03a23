"""Tests for the propagator, Bogoliubov matrices and closed-form sources."""

import math

import numpy as np
import pytest

from modules.core.dynamics import (
    BogoliubovPair,
    ProcessParams,
    closed_form_shg,
    closed_form_twin,
    compose,
    coupling_matrix,
    covariance_from_bogoliubov,
    evolve_coherent,
    gt_from_b_p,
    gt_from_b_sq,
    process_state,
    propagate,
    shg_state,
    source_arrays,
    twin_state,
)
from modules.core.errors import InvalidParameterError, PropagatorOverflowError
from modules.core.state import CoherentVector, add_noise
from modules.core.transforms import displace


def _scaled_deviation(got: BogoliubovPair, want: BogoliubovPair) -> float:
    scale = max(1.0, float(np.max(np.abs(want.U))))
    return max(float(np.max(np.abs(got.U - want.U))), float(np.max(np.abs(got.V - want.V)))) / scale


def test_coupling_matrix_entries():
    M = coupling_matrix(ProcessParams(g1=1.0, g3=0.5))
    assert M[0, 1] == pytest.approx(2j)
    assert M[1, 0] == pytest.approx(-2j)
    assert M[0, 3] == pytest.approx(0.5j)
    assert M[3, 0] == pytest.approx(-0.5j)
    assert M[2, 3] == 0


def test_zero_time_is_identity():
    bg = propagate(ProcessParams(g1=1.0, g2=0.3, g3=0.2, t=0.0))
    assert np.allclose(bg.U, np.eye(2))
    assert np.allclose(bg.V, 0)


@pytest.mark.parametrize("gt", np.linspace(0.0, 3.0, 31))
def test_propagator_matches_closed_forms(gt):
    """exp(M t) reproduces cosh/sinh for SHG and twin-beam couplings"""
    shg = propagate(ProcessParams(g1=1.0, t=gt))
    twin = propagate(ProcessParams(g3=1.0, t=gt))
    assert _scaled_deviation(shg, closed_form_shg(math.sinh(2 * gt) ** 2)) < 1e-12
    assert _scaled_deviation(twin, closed_form_twin(math.sinh(gt) ** 2)) < 1e-12


@pytest.mark.parametrize("params", [
    ProcessParams(g1=0.3 + 0.2j, g2=0.1j, g3=0.4, t=1.5),
    ProcessParams(g1=1.0, t=2.0, alpha=0.7),
    ProcessParams(g2=0.5, g3=0.25 - 0.1j, t=1.0),
])
def test_propagator_is_bosonic(params):
    """U U+ - V V+ = 1 and U V^T symmetric for any lossless coupling"""
    assert propagate(params).is_bosonic()


def test_compose_adds_times():
    params = dict(g1=0.4, g2=0.2, g3=0.3 + 0.1j)
    first = propagate(ProcessParams(t=0.7, **params))
    second = propagate(ProcessParams(t=0.5, **params))
    both = propagate(ProcessParams(t=1.2, **params))
    composed = compose(first, second)
    assert np.allclose(composed.U, both.U, atol=1e-10)
    assert np.allclose(composed.V, both.V, atol=1e-10)


def test_pump_phase_enters_closed_form():
    b = 0.6
    bg = propagate(ProcessParams(g1=1.0, t=gt_from_b_sq(b), alpha=0.4))
    assert _scaled_deviation(bg, closed_form_shg(b, alpha=0.4)) < 1e-12


def test_gt_inverts_vacuum_fluctuations():
    assert math.sinh(2 * gt_from_b_sq(0.3)) ** 2 == pytest.approx(0.3)
    assert math.sinh(gt_from_b_p(1.7)) ** 2 == pytest.approx(1.7)


def test_squeezed_covariance_from_closed_form():
    cov = covariance_from_bogoliubov(closed_form_shg(0.5))
    assert cov.B1 == pytest.approx(0.5)
    assert cov.C1 == pytest.approx(1j * math.sqrt(0.5 * 1.5))
    assert abs(cov.C1) ** 2 == pytest.approx(cov.B1 * (cov.B1 + 1))
    assert cov.B2 == 0


def test_twin_covariance_from_closed_form():
    cov = covariance_from_bogoliubov(closed_form_twin(1.0))
    assert cov.B1 == pytest.approx(1.0)
    assert cov.B2 == pytest.approx(1.0)
    assert cov.D12 == pytest.approx(1j * math.sqrt(2.0))
    assert cov.C1 == 0
    assert cov.D12_bar == 0


def test_evolve_coherent_uses_u_and_v():
    bg = closed_form_shg(1.0)
    xi0 = 3.0 * np.exp(-0.25j * math.pi)
    evolved = evolve_coherent(bg, CoherentVector(xi0))
    assert evolved.xi1 == pytest.approx(math.sqrt(2.0) * xi0 + 1j * np.conj(xi0))
    assert evolved.xi2 == 0


def test_shg_state_matches_full_propagation():
    xi0 = 1.0 - 0.5j
    expected = shg_state(0.3, xi1_0=xi0)
    got = process_state(ProcessParams(g1=1.0, t=gt_from_b_sq(0.3), xi1_0=xi0))
    assert expected.modes == 1
    assert got.isclose(expected, atol=1e-10)


def test_twin_state_matches_full_propagation():
    expected = twin_state(0.7, bs=0.2, bi=0.1, xi1_0=1 + 1j, alpha=0.3)
    got = process_state(ProcessParams(g3=2.0, t=0.5 * gt_from_b_p(0.7), alpha=0.3, bn1=0.2, bn2=0.1, xi1_0=1 + 1j))
    assert got.isclose(expected, atol=1e-10)


def test_source_arrays_match_shg_state():
    xi1, xi2 = 2.0 * np.exp(0.3j), 0.5j
    cov, xi = source_arrays("shg", 0.3, 0.2, 0.1, xi1, xi2, alpha=0.4)
    state = displace(add_noise(shg_state(0.3, 0.2, xi1, 0.4), 0.0, 0.1), 0j, xi2)
    assert np.allclose(cov, state.cov.entries, atol=1e-14)
    assert np.allclose(xi, state.coh.vector, atol=1e-14)


def test_source_arrays_match_twin_state():
    xi1, xi2 = 1.0 - 1j, 0.25
    cov, xi = source_arrays("dc", 1.2, 0.3, 0.4, xi1, xi2, alpha=0.1)
    state = twin_state(1.2, 0.3, 0.4, xi1, xi2, 0.1)
    assert np.allclose(cov, state.cov.entries, atol=1e-14)
    assert np.allclose(xi, state.coh.vector, atol=1e-14)


def test_source_arrays_broadcast():
    cov, xi = source_arrays("dc", np.array([0.5, 1.0, 2.0]), bn1=np.array([[0.0], [0.1]]))
    assert cov.shape == (2, 3, 4, 4)
    assert xi.shape == (2, 3, 4)
    assert cov[1, 2, 0, 0].real == pytest.approx(2.1)


def test_source_arrays_reject_unknown_process():
    with pytest.raises(InvalidParameterError):
        source_arrays("opo", 1.0)


def test_negative_inputs_are_rejected():
    with pytest.raises(InvalidParameterError):
        ProcessParams(g1=1.0, t=-1.0)
    with pytest.raises(InvalidParameterError):
        shg_state(0.5, bn=-0.1)
    with pytest.raises(InvalidParameterError):
        closed_form_twin(-1.0)


def test_overflowing_propagator_raises():
    with pytest.raises(PropagatorOverflowError):
        propagate(ProcessParams(g1=1.0, t=1e3))
