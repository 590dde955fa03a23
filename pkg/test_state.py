"""Tests for the Gaussian state data model."""

import cmath
import math

import numpy as np
import pytest

from modules.core.dynamics import ProcessParams, covariance_from_bogoliubov, propagate, shg_state, twin_state
from modules.core.errors import InvalidParameterError, InvalidStateError
from modules.core.state import (
    CoherentVector,
    GaussianState,
    NormalCovariance,
    add_noise,
    amplitude,
    characteristic_fn,
    make_vacuum,
    mean_photons,
    require_valid,
    validate,
)


def test_vacuum_is_all_zero():
    """Vacuum has zero covariance, zero coherent vector and no photons"""
    state = make_vacuum()
    assert state.modes == 2
    assert np.all(state.cov.entries == 0)
    assert np.all(state.coh.vector == 0)
    assert mean_photons(state) == (0.0, 0.0)
    assert validate(state) == []


def test_single_mode_vacuum():
    state = make_vacuum(1)
    assert state.modes == 1
    assert validate(state) == []


def test_vacuum_rejects_mode_count():
    with pytest.raises(InvalidParameterError):
        make_vacuum(3)


def test_from_blocks_layout():
    """Block parameters land at the documented entries"""
    cov = NormalCovariance.from_blocks(b1=1.5, b2=0.5, c1=0.2j, c2=0.1, d12=0.3 + 0.1j, d12_bar=0.05j)
    assert cov.B1 == 1.5
    assert cov.B2 == 0.5
    assert cov.C1 == 0.2j
    assert cov.C2 == 0.1
    assert cov.D12 == 0.3 + 0.1j
    assert cov.D12_bar == 0.05j
    a = cov.entries
    assert a[1, 0] == np.conj(a[0, 1])
    assert a[3, 2] == np.conj(a[2, 3])
    assert np.allclose(a[2:, :2], a[:2, 2:].conj().T)
    assert validate(GaussianState(cov, CoherentVector(1.0, 1j))) == []


def test_entries_are_read_only():
    cov = NormalCovariance.from_blocks(b1=1.0)
    with pytest.raises(ValueError):
        cov.entries[0, 0] = 2.0


def test_negative_photon_number_is_a_violation():
    state = GaussianState(NormalCovariance.from_blocks(b1=-0.1))
    violations = validate(state)
    assert len(violations) == 1
    assert "B1" in violations[0]
    with pytest.raises(InvalidStateError):
        require_valid(state)


def test_broken_off_diagonal_pairing_is_a_violation():
    entries = np.zeros((4, 4), dtype=complex)
    entries[2, 0] = 0.5
    violations = validate(GaussianState(NormalCovariance(entries)))
    assert any("lower-left" in v for v in violations)


def test_single_mode_state_with_second_mode_content_is_a_violation():
    state = GaussianState(NormalCovariance.from_blocks(b2=0.3), CoherentVector(), modes=1)
    assert any("second mode" in v for v in validate(state))


def test_replace_promotes_single_mode_state():
    state = make_vacuum(1).replace(coh=CoherentVector(0j, 1.0))
    assert state.modes == 2


def test_add_noise_changes_only_photon_numbers(squeezed):
    noisy = add_noise(squeezed, 0.5, 0.25)
    assert noisy.cov.B1 == pytest.approx(0.6)
    assert noisy.cov.B2 == pytest.approx(0.25)
    assert noisy.cov.C1 == squeezed.cov.C1
    assert noisy.coh.xi1 == squeezed.coh.xi1


def test_add_noise_on_twin_beam(twin):
    noisy = add_noise(twin, 0.2, 0.0)
    assert noisy.cov.B1 == pytest.approx(1.2)
    assert noisy.cov.B2 == pytest.approx(1.0)
    assert noisy.cov.D12 == twin.cov.D12


def test_add_noise_rejects_negative_noise(squeezed):
    with pytest.raises(InvalidParameterError):
        add_noise(squeezed, -0.1)


def test_mean_photons_adds_coherent_intensity():
    """A stimulated mode with B1 = 1.25 and |xi1|^2 = 4 carries 5.25 photons"""
    state = GaussianState(NormalCovariance.from_blocks(b1=1.25), CoherentVector(2.0))
    assert mean_photons(state) == pytest.approx((5.25, 0.0))


def test_amplitude_uses_phase_in_units_of_pi():
    assert amplitude(4.0, 0.5) == pytest.approx(2j)
    assert amplitude(1.0, -0.25) == pytest.approx(cmath.exp(-0.25j * math.pi))
    with pytest.raises(InvalidParameterError):
        amplitude(-1.0)


def test_characteristic_function_at_origin(twin, squeezed):
    assert characteristic_fn(twin, 0j, 0j) == pytest.approx(1.0)
    assert characteristic_fn(squeezed, 0j) == pytest.approx(1.0)


def test_characteristic_function_of_coherent_state(coherent):
    """Coherent states give a pure phase exp(beta xi* - beta* xi) per mode"""
    beta1, beta2 = 0.3 - 0.2j, -0.1 + 0.4j
    value = characteristic_fn(coherent, beta1, beta2)
    xi1, xi2 = coherent.coh.xi1, coherent.coh.xi2
    expected = cmath.exp(beta1 * xi1.conjugate() - beta1.conjugate() * xi1
                         + beta2 * xi2.conjugate() - beta2.conjugate() * xi2)
    assert abs(value) == pytest.approx(1.0)
    assert value == pytest.approx(expected)


def test_characteristic_function_of_thermal_state(thermal):
    beta = 0.7 + 0.2j
    assert characteristic_fn(thermal, beta) == pytest.approx(math.exp(-abs(beta) ** 2))


def test_characteristic_function_of_squeezed_state(squeezed):
    """ln C_N = -B |beta|^2 + (C beta*^2 + C* beta^2) / 2"""
    beta = 0.4 - 0.3j
    B, C = squeezed.cov.B1, squeezed.cov.C1
    log_c = -B * abs(beta) ** 2 + 0.5 * (C * beta.conjugate() ** 2 + C.conjugate() * beta ** 2)
    assert characteristic_fn(squeezed, beta) == pytest.approx(cmath.exp(log_c))


def test_isclose_compares_entries(squeezed):
    assert squeezed.isclose(add_noise(squeezed, 1e-14))
    assert not squeezed.isclose(add_noise(squeezed, 1e-6))


@pytest.mark.parametrize("first,second", [(0.1, 0.2), (0.0, 1.5), (2.0, 0.25)])
def test_add_noise_is_additive(twin, first, second):
    stepwise = add_noise(add_noise(twin, first, 0.0), second, 0.0)
    assert stepwise.isclose(add_noise(twin, first + second, 0.0), atol=1e-14)
    stepwise = add_noise(add_noise(twin, 0.0, first), 0.0, second)
    assert stepwise.isclose(add_noise(twin, 0.0, first + second), atol=1e-14)


@pytest.mark.parametrize("phase", [0.3, -1.1, math.pi, 2.5])
def test_mean_photons_ignore_coherent_phase(twin, phase):
    xi = CoherentVector(1.5 - 0.5j, 0.25j)
    rotation = cmath.exp(1j * phase)
    rotated = CoherentVector(xi.xi1 * rotation, xi.xi2 * rotation)
    assert mean_photons(twin.replace(coh=rotated)) == pytest.approx(mean_photons(twin.replace(coh=xi)))


@pytest.mark.parametrize(
    "state",
    [
        shg_state(0.0),
        shg_state(0.3, bn=0.1, xi1_0=amplitude(4.0, -0.25), alpha=0.7),
        twin_state(0.5),
        twin_state(1.0, bs=0.2, bi=0.05, xi1_0=amplitude(10.0, 0.75), xi2_0=1j, alpha=-0.4),
    ],
)
def test_source_states_are_valid(state):
    assert validate(state) == []


@pytest.mark.parametrize(
    "params",
    [
        ProcessParams(g1=0.4, t=1.0),
        ProcessParams(g3=0.8, alpha=0.3, t=1.5),
        ProcessParams(g1=0.2 + 0.1j, g2=-0.3, g3=0.5j, t=2.0),
    ],
)
def test_propagated_covariance_is_valid(params):
    state = GaussianState(covariance_from_bogoliubov(propagate(params)), CoherentVector())
    assert validate(state) == []
