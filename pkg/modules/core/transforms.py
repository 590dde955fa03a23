"""
Passive linear optics acting on Gaussian states.

A unitary S in the doubled basis transforms the state as
A_N -> S+ A_N S and Xi -> S+ Xi; photon numbers are conserved.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError
from .state import CoherentVector, ComplexAmplitude, GaussianState, NormalCovariance


@dataclass(frozen=True)
class BeamSplitterParams:
    """Transmissivity T in [0, 1] and phase theta (radians); R = 1 - T"""

    T: float = 1.0
    theta: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.T <= 1.0:
            raise InvalidParameterError(f"Transmissivity must lie in [0, 1], got {self.T}")

    @property
    def R(self) -> float:
        return 1.0 - self.T


@dataclass(frozen=True, eq=False)
class SymplecticMatrix:
    """4x4 unitary acting on the doubled basis"""

    entries: np.ndarray = field(default_factory=lambda: np.eye(4, dtype=complex))

    def __post_init__(self):
        matrix = np.array(self.entries, dtype=complex).reshape(4, 4)
        matrix.setflags(write=False)
        object.__setattr__(self, "entries", matrix)

    def inverse(self) -> "SymplecticMatrix":
        return SymplecticMatrix(self.entries.conj().T)

    def unitarity_residual(self) -> float:
        return float(np.max(np.abs(self.entries.conj().T @ self.entries - np.eye(4))))


def beam_splitter_entries(T, theta) -> np.ndarray:
    """Beam-splitter matrices with shape (..., 4, 4); T and theta may be arrays"""
    T, theta = np.broadcast_arrays(np.asarray(T, dtype=float), np.asarray(theta, dtype=float))
    t = np.sqrt(T).astype(complex)
    r = np.sqrt(1.0 - T).astype(complex)
    e = np.exp(1j * theta)
    zero = np.zeros_like(t)
    rows = [
        [t, zero, -r * e, zero],
        [zero, t, zero, -r * np.conj(e)],
        [r * np.conj(e), zero, t, zero],
        [zero, r * e, zero, t],
    ]
    return np.stack([np.stack(row, axis=-1) for row in rows], axis=-2)


def beam_splitter(p: BeamSplitterParams) -> SymplecticMatrix:
    """Beam splitter with transmissivity T and phase theta"""
    return SymplecticMatrix(beam_splitter_entries(p.T, p.theta))


def phase_shift(phi1: float = 0.0, phi2: float = 0.0) -> SymplecticMatrix:
    """Phase shifter taking xi_j -> xi_j exp(i phi_j) (and C_j -> C_j exp(2 i phi_j))"""
    return SymplecticMatrix(np.diag([
        np.exp(-1j * phi1), np.exp(1j * phi1), np.exp(-1j * phi2), np.exp(1j * phi2),
    ]))


def transform_arrays(cov: np.ndarray, xi: np.ndarray, s: np.ndarray):
    """S+ A_N S and S+ Xi for stacks of covariances, coherent vectors and matrices"""
    s_dag = np.conj(np.swapaxes(s, -1, -2))
    cov = s_dag @ cov @ s
    cov = 0.5 * (cov + np.conj(np.swapaxes(cov, -1, -2)))  # A_N stays exactly Hermitian
    xi = (s_dag @ xi[..., None])[..., 0]
    return cov, xi


def apply(state: GaussianState, S: SymplecticMatrix) -> GaussianState:
    """Transform the covariance and the coherent vector by S"""
    cov, xi = transform_arrays(state.cov.entries, state.coh.vector, S.entries)
    return state.replace(cov=NormalCovariance(cov), coh=CoherentVector.from_vector(xi))


def displace(state: GaussianState, d1: ComplexAmplitude = 0j, d2: ComplexAmplitude = 0j) -> GaussianState:
    """Add coherent displacements to xi1 and xi2; the covariance is untouched"""
    coh = CoherentVector(state.coh.xi1 + d1, state.coh.xi2 + d2)
    return state.replace(coh=coh)
