"""
Gaussian state data model.

A state of one or two optical modes is described completely by its normal
covariance matrix A_N and its coherent vector Xi. Both live in the doubled
basis (a1+, a1, a2+, a2); entry [j, k] of A_N is <:dA_j+ dA_k:>, so

    A_N = | B1      C1      conj(Db)  D     |
          | conj(C1) B1     conj(D)   Db    |
          | Db      D       B2        C2    |
          | conj(D) conj(Db) conj(C2) B2    |

with D = <a1 a2> and Db = <a1+ a2>. Xi_j = <A_j+>, i.e. (xi1, xi1*, xi2, xi2*).
Single-mode states use the same layout with mode 2 in vacuum.
"""

import cmath
import math
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from .errors import InvalidParameterError, InvalidStateError

# complex field amplitude (xi_j, beta_j); real part and imaginary part are the
# two dimensionless quadrature components
ComplexAmplitude = complex

STRUCTURAL_TOLERANCE = 1e-12


def amplitude(mag2: float, phase: float = 0.0) -> ComplexAmplitude:
    """Amplitude with intensity ``mag2`` and phase given in units of pi"""
    if mag2 < 0:
        raise InvalidParameterError(f"Coherent intensity must be nonnegative, got {mag2}")
    return math.sqrt(mag2) * cmath.exp(1j * math.pi * phase)


def _frozen(values, shape) -> np.ndarray:
    array = np.array(values, dtype=complex).reshape(shape)
    array.setflags(write=False)
    return array


def covariance_entries(b1, b2, c1, c2, d12, d12_bar) -> np.ndarray:
    """A_N entries with shape (..., 4, 4); block parameters may be arrays"""
    b1, b2, c1, c2, d12, d12_bar = np.broadcast_arrays(
        *(np.asarray(v, dtype=complex) for v in (b1, b2, c1, c2, d12, d12_bar))
    )
    cc = np.conj
    rows = [
        [b1, c1, cc(d12_bar), d12],
        [cc(c1), b1, cc(d12), d12_bar],
        [d12_bar, d12, b2, c2],
        [cc(d12), cc(d12_bar), cc(c2), b2],
    ]
    return np.stack([np.stack(row, axis=-1) for row in rows], axis=-2)


@dataclass(frozen=True, eq=False)
class NormalCovariance:
    """Normal covariance matrix A_N in the doubled basis (a1+, a1, a2+, a2)"""

    entries: np.ndarray = field(default_factory=lambda: np.zeros((4, 4), dtype=complex))

    def __post_init__(self):
        object.__setattr__(self, "entries", _frozen(self.entries, (4, 4)))

    @classmethod
    def from_blocks(
        cls,
        b1: float = 0.0,
        b2: float = 0.0,
        c1: complex = 0j,
        c2: complex = 0j,
        d12: complex = 0j,
        d12_bar: complex = 0j,
    ) -> "NormalCovariance":
        """Assemble A_N from the block parameters"""
        return cls(covariance_entries(b1, b2, c1, c2, d12, d12_bar))

    @property
    def B1(self) -> float:
        return float(self.entries[0, 0].real)

    @property
    def B2(self) -> float:
        return float(self.entries[2, 2].real)

    @property
    def C1(self) -> complex:
        return complex(self.entries[0, 1])

    @property
    def C2(self) -> complex:
        return complex(self.entries[2, 3])

    @property
    def D12(self) -> complex:
        return complex(self.entries[0, 3])

    @property
    def D12_bar(self) -> complex:
        return complex(self.entries[1, 3])


@dataclass(frozen=True)
class CoherentVector:
    """Coherent amplitudes xi1, xi2; the doubled vector pairs each with its conjugate"""

    xi1: ComplexAmplitude = 0j
    xi2: ComplexAmplitude = 0j

    def __post_init__(self):
        object.__setattr__(self, "xi1", complex(self.xi1))
        object.__setattr__(self, "xi2", complex(self.xi2))

    @property
    def vector(self) -> np.ndarray:
        """Xi = (xi1, xi1*, xi2, xi2*)"""
        return np.array([self.xi1, self.xi1.conjugate(), self.xi2, self.xi2.conjugate()])

    @classmethod
    def from_vector(cls, vector: np.ndarray) -> "CoherentVector":
        """Rebuild from a doubled vector; conjugate entries are regenerated"""
        return cls(complex(vector[0]), complex(vector[2]))


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Complete description of a one- or two-mode Gaussian state"""

    cov: NormalCovariance = field(default_factory=NormalCovariance)
    coh: CoherentVector = field(default_factory=CoherentVector)
    modes: int = 2

    def replace(self, cov: NormalCovariance = None, coh: CoherentVector = None) -> "GaussianState":
        """Copy with a new covariance and/or coherent part; mode count follows the content"""
        new_cov = self.cov if cov is None else cov
        new_coh = self.coh if coh is None else coh
        modes = self.modes
        if modes == 1 and not _second_mode_vacuum(new_cov, new_coh):
            modes = 2
        return GaussianState(new_cov, new_coh, modes)

    def isclose(self, other: "GaussianState", atol: float = STRUCTURAL_TOLERANCE) -> bool:
        """Entrywise comparison of covariance and coherent vector"""
        return bool(
            np.allclose(self.cov.entries, other.cov.entries, rtol=0.0, atol=atol)
            and np.allclose(self.coh.vector, other.coh.vector, rtol=0.0, atol=atol)
        )


def _second_mode_vacuum(cov: NormalCovariance, coh: CoherentVector, tol: float = 0.0) -> bool:
    block = np.concatenate([cov.entries[2:, :].ravel(), cov.entries[:2, 2:].ravel()])
    return bool(np.all(np.abs(block) <= tol) and abs(coh.xi2) <= tol)


def make_vacuum(modes: int = 2) -> GaussianState:
    """Vacuum state of one or two modes"""
    if modes not in (1, 2):
        raise InvalidParameterError(f"Mode count must be 1 or 2, got {modes}")
    return GaussianState(NormalCovariance(), CoherentVector(), modes)


def validate(state: GaussianState, tol: float = STRUCTURAL_TOLERANCE) -> List[str]:
    """
    Check the block structure of A_N and the coherent vector.

    Returns a list of violation descriptions; an empty list means the state is
    structurally valid. Physicality beyond the block layout is not checked.
    """
    violations = []
    a = state.cov.entries

    if state.modes not in (1, 2):
        violations.append(f"mode count {state.modes} is not 1 or 2")

    if a.shape != (4, 4):
        return violations + [f"covariance shape {a.shape} is not (4, 4)"]

    if not np.all(np.isfinite(a)):
        bad = [tuple(int(i) for i in idx) for idx in np.argwhere(~np.isfinite(a))]
        violations.append(f"non-finite covariance entries at {bad}")
        return violations

    for mode, k in ((1, 0), (2, 2)):
        for idx in ((k, k), (k + 1, k + 1)):
            if abs(a[idx].imag) > tol:
                violations.append(f"B{mode} has imaginary part {a[idx].imag:.3e} at entry {idx}")
        if abs(a[k, k] - a[k + 1, k + 1]) > tol:
            violations.append(f"B{mode} differs between entries ({k}, {k}) and ({k + 1}, {k + 1})")
        if abs(a[k + 1, k] - np.conj(a[k, k + 1])) > tol:
            violations.append(f"C{mode} pairing broken: entry ({k + 1}, {k}) is not conj of ({k}, {k + 1})")
        if a[k, k].real < -tol:
            violations.append(f"B{mode} = {a[k, k].real:.6g} is negative at entry ({k}, {k})")

    upper = a[:2, 2:]
    lower = a[2:, :2]
    residual = np.abs(lower - upper.conj().T)
    if np.any(residual > tol):
        bad = [(int(i) + 2, int(j)) for i, j in np.argwhere(residual > tol)]
        violations.append(f"lower-left block is not the conjugate transpose of upper-right block at {bad}")
    if abs(upper[1, 1] - np.conj(upper[0, 0])) > tol:
        violations.append("D12_bar pairing broken: entry (1, 3) is not conj of (0, 2)")
    if abs(upper[1, 0] - np.conj(upper[0, 1])) > tol:
        violations.append("D12 pairing broken: entry (1, 2) is not conj of (0, 3)")

    if not (cmath.isfinite(state.coh.xi1) and cmath.isfinite(state.coh.xi2)):
        violations.append("coherent amplitudes are not finite")

    if state.modes == 1 and not _second_mode_vacuum(state.cov, state.coh, tol):
        violations.append("single-mode state has a non-vacuum second mode")

    return violations


def require_valid(state: GaussianState) -> GaussianState:
    """Raise InvalidStateError listing every violation, otherwise return the state"""
    violations = validate(state)
    if violations:
        raise InvalidStateError("; ".join(violations))
    return state


def add_noise(state: GaussianState, bn1: float = 0.0, bn2: float = 0.0) -> GaussianState:
    """Superpose thermal noise photons on each mode; only B1 and B2 change"""
    if bn1 < 0 or bn2 < 0:
        raise InvalidParameterError(f"Noise photon numbers must be nonnegative, got ({bn1}, {bn2})")
    entries = np.array(state.cov.entries)
    entries[0, 0] += bn1
    entries[1, 1] += bn1
    entries[2, 2] += bn2
    entries[3, 3] += bn2
    return state.replace(cov=NormalCovariance(entries))


def mean_photons(state: GaussianState) -> Tuple[float, float]:
    """Mean photon numbers (B1 + |xi1|^2, B2 + |xi2|^2)"""
    return (
        state.cov.B1 + abs(state.coh.xi1) ** 2,
        state.cov.B2 + abs(state.coh.xi2) ** 2,
    )


def characteristic_fn(
    state: GaussianState, beta1: ComplexAmplitude, beta2: ComplexAmplitude = 0j
) -> complex:
    """
    Normal characteristic function C_N(beta1, beta2).

    The doubled beta vector follows the A_N basis, (beta1*, beta1, beta2*, beta2),
    which gives C_N = exp(beta xi* - beta* xi) for coherent states.
    """
    omega = np.kron(np.eye(2), np.array([[0.0, 1.0], [-1.0, 0.0]]))
    beta = np.array([np.conj(beta1), beta1, np.conj(beta2), beta2], dtype=complex)
    quadratic = beta.conj() @ omega @ state.cov.entries @ omega.T @ beta
    linear = beta.conj() @ omega @ state.coh.vector
    return complex(np.exp(-0.5 * quadratic + linear))
