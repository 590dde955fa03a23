"""
Truncated bivariate Taylor series ("jets") in (lambda1, lambda2).

A jet of order D stores the coefficients c[i, j] of lambda1^i lambda2^j for
i + j <= D. Coefficient arrays carry leading batch dimensions, so one jet can
hold the series of many states at once; every operation broadcasts over them.
"""

import math
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np
from scipy.special import binom

from .errors import InvalidParameterError, JetDomainError, SingularJetMatrixError

DEFAULT_ORDER = 3
PIVOT_THRESHOLD = 1e-14


def _mask(order: int) -> np.ndarray:
    i, j = np.indices((order + 1, order + 1))
    return (i + j <= order).astype(float)


def _simplex(order: int) -> List[Tuple[int, int]]:
    return [(p, q) for p in range(order + 1) for q in range(order + 1 - p)]


class Jet2:
    """Bivariate jet with batched complex coefficients of shape (..., D+1, D+1)"""

    __slots__ = ("coeffs", "order")
    __array_priority__ = 1000

    def __init__(self, coeffs, order: int = None):
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.ndim < 2 or coeffs.shape[-1] != coeffs.shape[-2]:
            raise InvalidParameterError(f"Jet coefficients need shape (..., D+1, D+1), got {coeffs.shape}")
        if order is None:
            order = coeffs.shape[-1] - 1
        if order < 0 or coeffs.shape[-1] != order + 1:
            raise InvalidParameterError(f"Jet order {order} does not match coefficient shape {coeffs.shape}")
        self.order = order
        self.coeffs = coeffs * _mask(order)

    @classmethod
    def constant(cls, value, order: int = DEFAULT_ORDER) -> "Jet2":
        value = np.asarray(value, dtype=complex)
        coeffs = np.zeros(value.shape + (order + 1, order + 1), dtype=complex)
        coeffs[..., 0, 0] = value
        return cls(coeffs, order)

    @classmethod
    def variable(cls, index: int, order: int = DEFAULT_ORDER, scale=1.0) -> "Jet2":
        """scale * lambda_index (index 1 or 2)"""
        if index not in (1, 2):
            raise InvalidParameterError(f"Jet variable index must be 1 or 2, got {index}")
        scale = np.asarray(scale, dtype=complex)
        coeffs = np.zeros(scale.shape + (order + 1, order + 1), dtype=complex)
        if order >= 1:
            if index == 1:
                coeffs[..., 1, 0] = scale
            else:
                coeffs[..., 0, 1] = scale
        return cls(coeffs, order)

    @property
    def batch_shape(self) -> Tuple[int, ...]:
        return self.coeffs.shape[:-2]

    @property
    def constant_term(self) -> np.ndarray:
        return self.coeffs[..., 0, 0]

    def coefficient(self, i: int, j: int) -> np.ndarray:
        """Coefficient of lambda1^i lambda2^j (zero outside the simplex)"""
        if i < 0 or j < 0 or i + j > self.order:
            return np.zeros(self.batch_shape, dtype=complex)
        return self.coeffs[..., i, j]

    def _coerce(self, other) -> "Jet2":
        if isinstance(other, Jet2):
            if other.order != self.order:
                raise InvalidParameterError(f"Jet orders differ: {self.order} vs {other.order}")
            return other
        return Jet2.constant(other, self.order)

    def __add__(self, other):
        return Jet2(self.coeffs + self._coerce(other).coeffs, self.order)

    __radd__ = __add__

    def __neg__(self):
        return Jet2(-self.coeffs, self.order)

    def __sub__(self, other):
        return Jet2(self.coeffs - self._coerce(other).coeffs, self.order)

    def __rsub__(self, other):
        return Jet2(self._coerce(other).coeffs - self.coeffs, self.order)

    def __mul__(self, other):
        if not isinstance(other, Jet2):
            scale = np.asarray(other, dtype=complex)[..., None, None]
            return Jet2(self.coeffs * scale, self.order)
        return Jet2(_mul(self.coeffs, self._coerce(other).coeffs, self.order), self.order)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet2):
            other = np.asarray(other, dtype=complex)
            if np.any(other == 0):
                raise JetDomainError("Division of a jet by zero")
            return self * (1.0 / other)
        return self * other.recip()

    def __rtruediv__(self, other):
        return self.recip() * other

    def exp(self) -> "Jet2":
        c = self.constant_term
        return self._compose([np.exp(c) / math.factorial(k) for k in range(self.order + 1)])

    def recip(self) -> "Jet2":
        c = self.constant_term
        if np.any(c == 0):
            raise JetDomainError("Reciprocal of a jet with zero constant term")
        return self._compose([(-1.0) ** k / c ** (k + 1) for k in range(self.order + 1)])

    def sqrt(self) -> "Jet2":
        """Principal square root around the constant term"""
        c = self.constant_term
        if np.any(c == 0):
            raise JetDomainError("Square root of a jet with zero constant term")
        root = np.sqrt(c)
        return self._compose([binom(0.5, k) * root / c ** k for k in range(self.order + 1)])

    def _compose(self, series: Sequence[np.ndarray]) -> "Jet2":
        """sum_k series[k] h^k with h = self - constant_term, by Horner"""
        h = Jet2(self.coeffs.copy(), self.order)
        h.coeffs[..., 0, 0] = 0
        result = Jet2.constant(series[-1], self.order)
        for a_k in reversed(series[:-1]):
            result = result * h + Jet2.constant(a_k, self.order)
        return result

    def __repr__(self):
        return f"Jet2(order={self.order}, batch_shape={self.batch_shape})"


def _mul(a: np.ndarray, b: np.ndarray, order: int) -> np.ndarray:
    n = order + 1
    batch = np.broadcast_shapes(a.shape[:-2], b.shape[:-2])
    out = np.zeros(batch + (n, n), dtype=complex)
    for p, q in _simplex(order):
        out[..., p:, q:] += a[..., p, q, None, None] * b[..., : n - p, : n - q]
    return out * _mask(order)


def jet_exp(x: Jet2) -> Jet2:
    return x.exp()


def jet_sqrt(x: Jet2) -> Jet2:
    return x.sqrt()


def jet_recip(x: Jet2) -> Jet2:
    return x.recip()


_OPERATIONS: Dict[str, Callable] = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: a / b,
    "neg": lambda a: -a,
    "exp": jet_exp,
    "sqrt": jet_sqrt,
    "recip": jet_recip,
}


def jet_arith(op: str, *operands) -> Jet2:
    """Apply a named jet operation: add, sub, mul, div, neg, exp, sqrt, recip"""
    if op not in _OPERATIONS:
        raise InvalidParameterError(f"Unknown jet operation '{op}'")
    return _OPERATIONS[op](*operands)


def _eliminate(matrix: Sequence[Sequence[Jet2]], rhs: Sequence[Jet2] = None):
    """Forward elimination with row exchanges chosen on the constant terms"""
    n = len(matrix)
    rows = [list(row) for row in matrix]
    if any(len(row) != n for row in rows):
        raise InvalidParameterError("Jet matrix must be square")
    vec = list(rhs) if rhs is not None else None
    sign = 1.0
    pivots = []
    inverses = []
    for k in range(n):
        # a row is usable only if its pivot is nonzero for every batch element
        scores = [float(np.min(np.abs(rows[i][k].constant_term))) for i in range(k, n)]
        best = k + int(np.argmax(scores))
        if scores[best - k] <= PIVOT_THRESHOLD:
            raise SingularJetMatrixError(f"Constant-term matrix is singular at column {k}")
        if best != k:
            rows[k], rows[best] = rows[best], rows[k]
            if vec is not None:
                vec[k], vec[best] = vec[best], vec[k]
            sign = -sign
        pivot = rows[k][k]
        inverse = pivot.recip()
        pivots.append(pivot)
        inverses.append(inverse)
        for i in range(k + 1, n):
            factor = rows[i][k] * inverse
            for j in range(k + 1, n):
                rows[i][j] = rows[i][j] - factor * rows[k][j]
            if vec is not None:
                vec[i] = vec[i] - factor * vec[k]
    return rows, vec, pivots, inverses, sign


def jet_linear_solve(matrix: Sequence[Sequence[Jet2]], rhs: Sequence[Jet2]) -> List[Jet2]:
    """Solve matrix x = rhs over jets; the constant-term matrix must be nonsingular"""
    rows, vec, _, inverses, _ = _eliminate(matrix, rhs)
    n = len(rows)
    solution: List[Jet2] = [None] * n
    for i in reversed(range(n)):
        acc = vec[i]
        for j in range(i + 1, n):
            acc = acc - rows[i][j] * solution[j]
        solution[i] = acc * inverses[i]
    return solution


def jet_det(matrix: Sequence[Sequence[Jet2]]) -> Jet2:
    _, _, pivots, _, sign = _eliminate(matrix)
    det = pivots[0] * sign
    for pivot in pivots[1:]:
        det = det * pivot
    return det
