"""
Parametric dynamics: coupling matrix, propagator, Bogoliubov matrices and the
closed-form second-subharmonic (SHG) and down-conversion (twin beam) states.

Operators evolve as a(t) = exp(M t) a(0) with a = (a1, a1+, a2, a2+), so

    a_j(t) = sum_l U_jl a_l(0) + V_jl a_l+(0).

Damping and Langevin forces are not propagated; noise enters through
``state.add_noise`` (superposition of signal and thermal noise).
"""

import math
from dataclasses import dataclass, field
from typing import Dict

import numpy as np
from scipy.linalg import expm

from .errors import InvalidParameterError, PropagatorOverflowError
from .state import (
    CoherentVector,
    ComplexAmplitude,
    GaussianState,
    NormalCovariance,
    add_noise,
    covariance_entries,
)

BOGOLIUBOV_TOLERANCE = 1e-10


@dataclass(frozen=True)
class ProcessParams:
    """Couplings (1/time), pump phase (radians), interaction time, noise and seeds"""

    g1: complex = 0j
    g2: complex = 0j
    g3: complex = 0j
    alpha: float = 0.0
    t: float = 0.0
    bn1: float = 0.0
    bn2: float = 0.0
    xi1_0: ComplexAmplitude = 0j
    xi2_0: ComplexAmplitude = 0j

    def __post_init__(self):
        if self.t < 0:
            raise InvalidParameterError(f"Interaction time must be nonnegative, got {self.t}")
        if self.bn1 < 0 or self.bn2 < 0:
            raise InvalidParameterError(
                f"Noise photon numbers must be nonnegative, got ({self.bn1}, {self.bn2})"
            )


@dataclass(frozen=True, eq=False)
class BogoliubovPair:
    """Input-output matrices U, V of a lossless parametric evolution"""

    U: np.ndarray = field(default_factory=lambda: np.eye(2, dtype=complex))
    V: np.ndarray = field(default_factory=lambda: np.zeros((2, 2), dtype=complex))

    def __post_init__(self):
        for name in ("U", "V"):
            matrix = np.array(getattr(self, name), dtype=complex).reshape(2, 2)
            matrix.setflags(write=False)
            object.__setattr__(self, name, matrix)

    def check(self) -> Dict[str, float]:
        """Residuals of U U+ - V V+ = 1 and of the symmetry of U V^T"""
        commutator = self.U @ self.U.conj().T - self.V @ self.V.conj().T - np.eye(2)
        symmetric = self.U @ self.V.T
        return {
            "commutator": float(np.max(np.abs(commutator))),
            "symmetry": float(np.max(np.abs(symmetric - symmetric.T))),
        }

    def is_bosonic(self, tol: float = BOGOLIUBOV_TOLERANCE) -> bool:
        return all(value <= tol for value in self.check().values())


def coupling_matrix(params: ProcessParams) -> np.ndarray:
    """
    Drift matrix M of the Heisenberg equations, rows/columns (a1, a1+, a2, a2+).

    The pump phase is folded into the couplings as g -> g exp(i alpha). Rows for
    the creation operators carry the conjugated couplings (-2i g2*, -i g3*).
    """
    phase = np.exp(1j * params.alpha)
    g1, g2, g3 = (complex(g) * phase for g in (params.g1, params.g2, params.g3))
    cc = np.conj
    return np.array([
        [0, 2j * g1, 0, 1j * g3],
        [-2j * cc(g1), 0, -1j * cc(g3), 0],
        [0, 1j * g3, 0, 2j * g2],
        [-1j * cc(g3), 0, -2j * cc(g2), 0],
    ], dtype=complex)


def propagate(params: ProcessParams) -> BogoliubovPair:
    """U, V from exp(M t) (scaling-and-squaring Pade)"""
    if not math.isfinite(params.t):
        raise InvalidParameterError(f"Interaction time must be finite, got {params.t}")
    with np.errstate(over="ignore", invalid="ignore"):
        propagator = expm(coupling_matrix(params) * params.t)
    if not np.all(np.isfinite(propagator)):
        raise PropagatorOverflowError(
            f"exp(M t) overflowed for couplings ({params.g1}, {params.g2}, {params.g3}) and t={params.t}"
        )
    return BogoliubovPair(U=propagator[0::2, 0::2], V=propagator[0::2, 1::2])


def compose(first: BogoliubovPair, second: BogoliubovPair) -> BogoliubovPair:
    """Evolution by ``first`` followed by ``second``"""
    return BogoliubovPair(
        U=second.U @ first.U + second.V @ first.V.conj(),
        V=second.U @ first.V + second.V @ first.U.conj(),
    )


def evolve_coherent(bg: BogoliubovPair, xi0: CoherentVector) -> CoherentVector:
    """xi_j(t) = sum_l U_jl xi_l(0) + V_jl xi_l(0)*"""
    initial = np.array([xi0.xi1, xi0.xi2])
    evolved = bg.U @ initial + bg.V @ initial.conj()
    return CoherentVector(complex(evolved[0]), complex(evolved[1]))


def covariance_from_bogoliubov(bg: BogoliubovPair) -> NormalCovariance:
    """Normal covariance of vacuum evolved by (U, V); only <a a+> = 1 contributes"""
    U, V = bg.U, bg.V
    photons = np.einsum("jl,jl->j", V.conj(), V).real
    anomalous = np.einsum("jl,jl->j", U, V)
    return NormalCovariance.from_blocks(
        b1=photons[0],
        b2=photons[1],
        c1=anomalous[0],
        c2=anomalous[1],
        d12=U[0] @ V[1],
        d12_bar=V[0].conj() @ V[1],
    )


def gt_from_b_sq(b_sq: float) -> float:
    """g1 t giving vacuum fluctuations B_sq = sinh^2(2 g1 t)"""
    return 0.5 * math.asinh(math.sqrt(b_sq))


def gt_from_b_p(b_p: float) -> float:
    """g3 t giving vacuum fluctuations B_p = sinh^2(g3 t)"""
    return math.asinh(math.sqrt(b_p))


def closed_form_shg(b_sq: float, alpha: float = 0.0) -> BogoliubovPair:
    """U11 = cosh(2 g1 t), V11 = i exp(i alpha) sinh(2 g1 t), parametrized by B_sq"""
    if b_sq < 0:
        raise InvalidParameterError(f"B_sq must be nonnegative, got {b_sq}")
    U = np.diag([math.sqrt(1.0 + b_sq), 1.0]).astype(complex)
    V = np.zeros((2, 2), dtype=complex)
    V[0, 0] = 1j * np.exp(1j * alpha) * math.sqrt(b_sq)
    return BogoliubovPair(U, V)


def closed_form_twin(b_p: float, alpha: float = 0.0) -> BogoliubovPair:
    """U11 = U22 = cosh(g3 t), V12 = V21 = i exp(i alpha) sinh(g3 t), parametrized by B_p"""
    if b_p < 0:
        raise InvalidParameterError(f"B_p must be nonnegative, got {b_p}")
    U = math.sqrt(1.0 + b_p) * np.eye(2, dtype=complex)
    V = 1j * np.exp(1j * alpha) * math.sqrt(b_p) * np.array([[0, 1], [1, 0]], dtype=complex)
    return BogoliubovPair(U, V)


def _stimulated_state(
    bg: BogoliubovPair, xi1_0: ComplexAmplitude, xi2_0: ComplexAmplitude, modes: int
) -> GaussianState:
    coh = evolve_coherent(bg, CoherentVector(xi1_0, xi2_0))
    return GaussianState(covariance_from_bogoliubov(bg), coh, modes)


def shg_state(
    b_sq: float, bn: float = 0.0, xi1_0: ComplexAmplitude = 0j, alpha: float = 0.0
) -> GaussianState:
    """Single-mode (stimulated) noisy squeezed vacuum with B1 = B_sq + B_n"""
    if bn < 0:
        raise InvalidParameterError(f"Noise photon number must be nonnegative, got {bn}")
    state = _stimulated_state(closed_form_shg(b_sq, alpha), xi1_0, 0j, modes=1)
    return add_noise(state, bn, 0.0)


def twin_state(
    b_p: float,
    bs: float = 0.0,
    bi: float = 0.0,
    xi1_0: ComplexAmplitude = 0j,
    xi2_0: ComplexAmplitude = 0j,
    alpha: float = 0.0,
) -> GaussianState:
    """Two-mode (stimulated) twin beam with B1 = B_p + B_s and B2 = B_p + B_i"""
    if bs < 0 or bi < 0:
        raise InvalidParameterError(f"Noise photon numbers must be nonnegative, got ({bs}, {bi})")
    state = _stimulated_state(closed_form_twin(b_p, alpha), xi1_0, xi2_0, modes=2)
    return add_noise(state, bs, bi)


def source_arrays(process: str, b_vac, bn1=0.0, bn2=0.0, xi1_0=0j, xi2_0=0j, alpha=0.0):
    """
    Covariance (..., 4, 4) and doubled coherent vector (..., 4) of SHG ("shg")
    or twin-beam ("dc") sources for arrays of parameters.

    Elementwise equal to ``shg_state`` / ``twin_state``; for SHG the second
    mode carries only noise ``bn2`` and the coherent field ``xi2_0``.
    """
    b_vac, bn1, bn2, alpha = (np.asarray(v, dtype=float) for v in (b_vac, bn1, bn2, alpha))
    xi1_0, xi2_0 = (np.asarray(v, dtype=complex) for v in (xi1_0, xi2_0))
    b_vac, bn1, bn2, alpha, xi1_0, xi2_0 = np.broadcast_arrays(b_vac, bn1, bn2, alpha, xi1_0, xi2_0)
    if np.any(b_vac < 0) or np.any(bn1 < 0) or np.any(bn2 < 0):
        raise InvalidParameterError("Vacuum fluctuations and noise photon numbers must be nonnegative")
    u = np.sqrt(1.0 + b_vac)
    v = 1j * np.exp(1j * alpha) * np.sqrt(b_vac)
    zero = np.zeros_like(u, dtype=complex)
    if process == "shg":
        cov = covariance_entries(b_vac + bn1, bn2, u * v, zero, zero, zero)
        xi1 = u * xi1_0 + v * np.conj(xi1_0)
        xi2 = xi2_0 + zero
    elif process == "dc":
        cov = covariance_entries(b_vac + bn1, b_vac + bn2, zero, zero, u * v, zero)
        xi1 = u * xi1_0 + v * np.conj(xi2_0)
        xi2 = u * xi2_0 + v * np.conj(xi1_0)
    else:
        raise InvalidParameterError(f"Unknown process '{process}'")
    xi = np.stack([xi1, np.conj(xi1), xi2, np.conj(xi2)], axis=-1)
    return cov, xi


def process_state(params: ProcessParams) -> GaussianState:
    """State generated from vacuum plus seeds by the full coupling matrix"""
    bg = propagate(params)
    state = _stimulated_state(bg, params.xi1_0, params.xi2_0, modes=2)
    return add_noise(state, params.bn1, params.bn2)
