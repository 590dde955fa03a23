"""
Normally ordered intensity moments <:W1^a W2^b:> of Gaussian states.

The moments are the Taylor coefficients of the generating function

    G(l1, l2) = exp(-1/2 Xi+ (Lambda A_N + 1)^-1 Lambda Xi) / sqrt(det(Lambda A_N + 1)),
    Lambda = diag(l1, l1, l2, l2),

    <:W1^a W2^b:> = (-1)^(a+b) a! b! [l1^a l2^b] G,

evaluated with bivariate jets. ``wick_moment`` is an independent combinatorial
oracle and ``monte_carlo_moments`` samples the Glauber P distribution.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Tuple

import numpy as np
from scipy.special import factorial

from .errors import InvalidParameterError, NonClassicalStateError
from .jets import DEFAULT_ORDER, Jet2, jet_det, jet_linear_solve
from .state import GaussianState

WICK_MAX_ORDER = 6

# mode of each doubled-basis component (a1+, a1, a2+, a2)
_MODE_OF = (1, 1, 2, 2)


@dataclass(frozen=True, eq=False)
class MomentTable:
    """
    Moments m[a, b] = <:W1^a W2^b:> for a + b <= order.

    ``values`` has shape (..., order+1, order+1); leading dimensions index a
    batch of states. Entries outside a + b <= order are zero.
    """

    values: np.ndarray
    order: int = DEFAULT_ORDER

    def __getitem__(self, index: Tuple[int, int]):
        a, b = index
        if a < 0 or b < 0 or a + b > self.order:
            raise InvalidParameterError(f"Moment ({a}, {b}) exceeds order {self.order}")
        value = self.values[..., a, b]
        return float(value) if np.ndim(value) == 0 else value

    @property
    def batch_shape(self) -> Tuple[int, ...]:
        return self.values.shape[:-2]

    def take(self, index) -> "MomentTable":
        """Table for one element (or a slice) of the batch"""
        return MomentTable(self.values[index], self.order)


def generating_jet(cov: np.ndarray, xi: np.ndarray, order: int = DEFAULT_ORDER) -> Jet2:
    """
    Jet of G for a batch of states.

    ``cov`` has shape (..., 4, 4) and ``xi`` shape (..., 4) in the doubled basis.
    """
    cov = np.asarray(cov, dtype=complex)
    xi = np.asarray(xi, dtype=complex)
    lam = [Jet2.variable(_MODE_OF[p], order) for p in range(4)]

    matrix = [
        [lam[p] * cov[..., p, q] + (1.0 if p == q else 0.0) for q in range(4)]
        for p in range(4)
    ]
    rhs = [lam[p] * xi[..., p] for p in range(4)]
    solution = jet_linear_solve(matrix, rhs)

    quadratic = solution[0] * np.conj(xi[..., 0])
    for p in range(1, 4):
        quadratic = quadratic + solution[p] * np.conj(xi[..., p])
    return (quadratic * -0.5).exp() / jet_det(matrix).sqrt()


def _moments_from_jet(jet: Jet2) -> np.ndarray:
    order = jet.order
    a, b = np.indices((order + 1, order + 1))
    scale = (-1.0) ** (a + b) * factorial(a) * factorial(b)
    return (jet.coeffs * scale).real


def moments_from_arrays(cov: np.ndarray, xi: np.ndarray, order: int = DEFAULT_ORDER) -> MomentTable:
    """Moments of states given as stacked covariances (..., 4, 4) and coherent vectors (..., 4)"""
    if order < 0:
        raise InvalidParameterError(f"Moment order must be nonnegative, got {order}")
    return MomentTable(_moments_from_jet(generating_jet(cov, xi, order)), order)


def moments_of(state: GaussianState, order: int = DEFAULT_ORDER) -> MomentTable:
    """All normally ordered moments with a + b <= order of one state"""
    return moments_from_arrays(state.cov.entries, state.coh.vector, order)


def moments_of_many(states: Sequence[GaussianState], order: int = DEFAULT_ORDER) -> MomentTable:
    """Batched ``moments_of``; the result is indexed along the first axis"""
    if not states:
        return MomentTable(np.zeros((0, order + 1, order + 1)), order)
    cov = np.stack([s.cov.entries for s in states])
    xi = np.stack([s.coh.vector for s in states])
    return moments_from_arrays(cov, xi, order)


def wick_moment(state: GaussianState, k1: int, k2: int) -> float:
    """
    <:W1^k1 W2^k2:> by Gaussian (Isserlis) expansion with nonzero means.

    W1 = A_0 A_1 and W2 = A_2 A_3 in the doubled basis; the contraction of
    components p and q is A_N[p^1, q] and the mean of component p is Xi[p^1].
    """
    if k1 < 0 or k2 < 0:
        raise InvalidParameterError(f"Moment orders must be nonnegative, got ({k1}, {k2})")
    if k1 + k2 > WICK_MAX_ORDER:
        raise InvalidParameterError(
            f"Wick expansion supports k1 + k2 <= {WICK_MAX_ORDER}, got {k1 + k2}"
        )
    cov = state.cov.entries
    xi = state.coh.vector
    mean = [complex(xi[p ^ 1]) for p in range(4)]
    contraction = [[complex(cov[p ^ 1, q]) for q in range(4)] for p in range(4)]

    @lru_cache(maxsize=None)
    def expectation(counts: Tuple[int, int, int, int]) -> complex:
        if not any(counts):
            return 1.0 + 0j
        p = next(i for i, n in enumerate(counts) if n)
        rest = list(counts)
        rest[p] -= 1
        total = mean[p] * expectation(tuple(rest))
        for q in range(4):
            if rest[q]:
                reduced = list(rest)
                reduced[q] -= 1
                total += rest[q] * contraction[p][q] * expectation(tuple(reduced))
        return total

    return float(expectation((k1, k1, k2, k2)).real)


def _sampling_transform() -> np.ndarray:
    """Maps real quadratures (x1, y1, x2, y2) to (alpha1*, alpha1, alpha2*, alpha2)"""
    block = np.array([[1.0, -1j], [1.0, 1j]])
    return np.kron(np.eye(2), block)


def monte_carlo_moments(
    state: GaussianState,
    order: int = DEFAULT_ORDER,
    samples: int = 1_000_000,
    seed: int = None,
    tol: float = 1e-12,
) -> Tuple[MomentTable, MomentTable]:
    """
    Sample the P distribution and average products of intensities.

    Returns (means, standard errors). Raises NonClassicalStateError if the state
    has no positive P distribution (squeezed or entangled states).
    """
    if samples < 2:
        raise InvalidParameterError(f"Monte Carlo needs at least 2 samples, got {samples}")
    cov = state.cov.entries
    swap = [1, 0, 3, 2]
    pairing = cov[swap, :]
    transform = _sampling_transform()
    inverse = np.linalg.inv(transform)
    real_cov = inverse @ pairing @ inverse.T
    real_cov = 0.5 * (real_cov + real_cov.T).real

    eigenvalues = np.linalg.eigvalsh(real_cov)
    scale = max(1.0, float(np.max(np.abs(eigenvalues))))
    if eigenvalues.min() < -tol * scale:
        raise NonClassicalStateError(
            f"P distribution is not positive: covariance eigenvalue {eigenvalues.min():.6g}"
        )

    xi = state.coh.vector
    real_mean = np.array([xi[0].real, xi[0].imag, xi[2].real, xi[2].imag])
    rng = np.random.default_rng(seed)
    draws = rng.multivariate_normal(real_mean, real_cov, size=samples, method="eigh", check_valid="ignore")
    w1 = draws[:, 0] ** 2 + draws[:, 1] ** 2
    w2 = draws[:, 2] ** 2 + draws[:, 3] ** 2
    logging.debug(f"Monte Carlo: {samples} samples, seed {seed}")

    means = np.zeros((order + 1, order + 1))
    errors = np.zeros((order + 1, order + 1))
    for a in range(order + 1):
        for b in range(order + 1 - a):
            product = w1 ** a * w2 ** b
            means[a, b] = product.mean()
            errors[a, b] = product.std(ddof=1) / math.sqrt(samples)
    return MomentTable(means, order), MomentTable(errors, order)
