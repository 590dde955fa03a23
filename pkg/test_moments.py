"""Tests for normally ordered intensity moments: jets, Wick oracle and P sampling."""

import math

import numpy as np
import pytest

from modules.core.dynamics import shg_state, twin_state
from modules.core.errors import InvalidParameterError, NonClassicalStateError
from modules.core.moments import (
    MomentTable,
    moments_from_arrays,
    moments_of,
    moments_of_many,
    monte_carlo_moments,
    wick_moment,
)
from modules.core.pipeline import random_scenario
from modules.core.state import CoherentVector, GaussianState, NormalCovariance, make_vacuum


def test_vacuum_moments():
    m = moments_of(make_vacuum())
    assert m[0, 0] == pytest.approx(1.0)
    for a in range(4):
        for b in range(4 - a):
            if a + b:
                assert m[a, b] == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("B", [0.5, 1.0, 2.0])
def test_thermal_moments(B):
    """<:W^n:> = n! B^n"""
    state = GaussianState(NormalCovariance.from_blocks(b1=B), CoherentVector(), modes=1)
    m = moments_of(state, order=4)
    for n in range(5):
        assert m[n, 0] == pytest.approx(math.factorial(n) * B ** n, rel=1e-12)


def test_coherent_moments_factorize(coherent):
    m = moments_of(coherent)
    for a in range(4):
        for b in range(4 - a):
            assert m[a, b] == pytest.approx(2.0 ** a * 0.5 ** b, rel=1e-12)


def test_squeezed_vacuum_moments(squeezed):
    B = 0.1
    m = moments_of(squeezed)
    assert m[1, 0] == pytest.approx(B, rel=1e-12)
    assert m[2, 0] == pytest.approx(3 * B ** 2 + B, rel=1e-12)
    assert m[3, 0] == pytest.approx(15 * B ** 3 + 9 * B ** 2, rel=1e-12)


def test_twin_beam_moments(twin):
    m = moments_of(twin)
    assert m[1, 0] == pytest.approx(1.0)
    assert m[0, 1] == pytest.approx(1.0)
    assert m[2, 0] == pytest.approx(2.0)
    assert m[1, 1] == pytest.approx(3.0)


@pytest.mark.parametrize("seed", range(20))
def test_jets_agree_with_wick_expansion(seed):
    """Generating-function moments equal the combinatorial expansion"""
    state = random_scenario(np.random.default_rng(seed)).build_state()
    m = moments_of(state)
    for a in range(4):
        for b in range(4 - a):
            exact = wick_moment(state, a, b)
            assert m[a, b] == pytest.approx(exact, rel=1e-8, abs=1e-12)


def test_sixth_order_against_wick():
    state = twin_state(0.8, 0.1, 0.2, 1.0 + 0.5j, -0.3j, alpha=0.2)
    m = moments_of(state, order=6)
    for a, b in [(3, 3), (6, 0), (2, 4)]:
        assert m[a, b] == pytest.approx(wick_moment(state, a, b), rel=1e-8)


def test_wick_order_guard(twin):
    with pytest.raises(InvalidParameterError):
        wick_moment(twin, 4, 3)
    with pytest.raises(InvalidParameterError):
        wick_moment(twin, -1, 0)


def test_moment_table_indexing():
    m = moments_of(make_vacuum(), order=2)
    with pytest.raises(InvalidParameterError):
        m[2, 1]
    assert isinstance(m[1, 1], float)


def test_batched_moments_match_single_states():
    states = [shg_state(0.3, 0.1, 1.0), twin_state(1.0, xi1_0=2j), make_vacuum()]
    batch = moments_of_many(states)
    assert batch.batch_shape == (3,)
    for k, state in enumerate(states):
        assert np.allclose(batch.take(k).values, moments_of(state).values, rtol=1e-12, atol=1e-14)
    assert np.allclose(batch[1, 1], [moments_of(s)[1, 1] for s in states])


def test_moments_from_stacked_arrays(squeezed, twin):
    cov = np.stack([squeezed.cov.entries, twin.cov.entries])
    xi = np.stack([squeezed.coh.vector, twin.coh.vector])
    m = moments_from_arrays(cov, xi)
    assert isinstance(m, MomentTable)
    assert m[1, 0] == pytest.approx([0.1, 1.0])


def test_empty_batch():
    m = moments_of_many([])
    assert m.values.shape == (0, 4, 4)


def test_monte_carlo_agrees_for_classical_state():
    state = GaussianState(
        NormalCovariance.from_blocks(b1=1.0, b2=0.5, d12_bar=0.3),
        CoherentVector(1.0 + 0.5j, 0.5j),
    )
    exact = moments_of(state)
    means, errors = monte_carlo_moments(state, samples=200_000, seed=11)
    for a in range(4):
        for b in range(4 - a):
            if a + b:
                assert abs(means[a, b] - exact[a, b]) < 6 * errors[a, b]


def test_monte_carlo_thermal_mean(thermal):
    means, errors = monte_carlo_moments(thermal, order=2, samples=100_000, seed=5)
    assert abs(means[1, 0] - 1.0) < 6 * errors[1, 0]
    assert abs(means[2, 0] - 2.0) < 6 * errors[2, 0]
    assert means[0, 1] == pytest.approx(0.0, abs=1e-12)


def test_monte_carlo_is_reproducible(thermal):
    first, _ = monte_carlo_moments(thermal, order=2, samples=1000, seed=42)
    second, _ = monte_carlo_moments(thermal, order=2, samples=1000, seed=42)
    assert np.array_equal(first.values, second.values)


def test_monte_carlo_rejects_nonclassical_states(squeezed, twin):
    with pytest.raises(NonClassicalStateError):
        monte_carlo_moments(squeezed, samples=100)
    with pytest.raises(NonClassicalStateError):
        monte_carlo_moments(twin, samples=100)
