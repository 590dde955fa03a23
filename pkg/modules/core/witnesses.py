"""
Nonclassicality witnesses built from intensity moments.

    R_k = <W_k><W_k^3> - <W_k^2>^2
    M   = <W1^2><W2^2> - <W1 W2>^2

A negative value certifies a nonclassical state. All witness functions accept
batched MomentTables and return arrays of the batch shape.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .dynamics import shg_state
from .errors import DegenerateScenarioError, FactorizationError, InvalidParameterError
from .moments import MomentTable, moments_of
from .state import ComplexAmplitude
from .transforms import BeamSplitterParams, apply, beam_splitter

FACTORIZATION_TOLERANCE = 1e-9
PHASE_TOLERANCE = 1e-4
PHASE_GRID_POINTS = 181

WITNESS_NAMES = ("R1", "R2", "M", "f", "ent")


def witness_R(m: MomentTable, mode: int = 1):
    if mode == 1:
        return m[1, 0] * m[3, 0] - m[2, 0] ** 2
    if mode == 2:
        return m[0, 1] * m[0, 3] - m[0, 2] ** 2
    raise InvalidParameterError(f"Mode must be 1 or 2, got {mode}")


def witness_M(m: MomentTable):
    return m[2, 0] * m[0, 2] - m[1, 1] ** 2


def _witness_scale(m: MomentTable, mode: int):
    """Magnitude of the terms that cancel in R_mode"""
    if mode == 1:
        return np.abs(m[1, 0] * m[3, 0]) + m[2, 0] ** 2
    return np.abs(m[0, 1] * m[0, 3]) + m[0, 2] ** 2


def entanglement_indicator(R1_T, R2_T, R1_1):
    """R1[T] + R2[T] - R1[1]; meaningful when all three R values are negative"""
    return R1_T + R2_T - R1_1


def entanglement_valid(R1_T, R2_T, R1_1):
    """True where the negativity assumption behind the indicator holds"""
    return np.logical_and.reduce([np.less(R1_T, 0), np.less(R2_T, 0), np.less(R1_1, 0)])


@dataclass
class WitnessReport:
    """Witness values of one scenario; ``flags`` marks negative (nonclassical) values"""

    R1: float
    R2: float
    M: float
    f: Optional[float] = None
    ent_indicator: Optional[float] = None
    ent_valid: Optional[bool] = None
    moments: Optional[MomentTable] = None
    scenario: Dict[str, Any] = field(default_factory=dict)

    @property
    def flags(self) -> Dict[str, bool]:
        values = {"R1": self.R1, "R2": self.R2, "M": self.M, "f": self.f}
        return {name: bool(value < 0) for name, value in values.items() if value is not None}

    def value(self, name: str) -> Optional[float]:
        if name == "ent":
            return self.ent_indicator
        if name not in WITNESS_NAMES:
            raise InvalidParameterError(f"Unknown witness '{name}'")
        return getattr(self, name)


def build_report(
    m: MomentTable,
    transmissivity: Optional[float] = None,
    m_unit: Optional[MomentTable] = None,
    shg_through_bs: bool = False,
    scenario: Dict[str, Any] = None,
) -> WitnessReport:
    """
    Collect witnesses for a single (unbatched) moment table.

    ``m_unit`` holds the moments of the same source at T = 1 and enables the
    entanglement indicator; ``f`` is reported for SHG-through-BS scenarios.
    """
    R1 = float(witness_R(m, 1))
    R2 = float(witness_R(m, 2))
    report = WitnessReport(R1=R1, R2=R2, M=float(witness_M(m)), moments=m, scenario=dict(scenario or {}))
    if shg_through_bs and transmissivity is not None and transmissivity > 0:
        report.f = R1 / transmissivity ** 4
    if m_unit is not None:
        R1_1 = float(witness_R(m_unit, 1))
        report.ent_indicator = float(entanglement_indicator(R1, R2, R1_1))
        report.ent_valid = bool(entanglement_valid(R1, R2, R1_1))
    return report


def shape_factor(
    b_sq: float,
    bn: float = 0.0,
    xi1_0: ComplexAmplitude = 0j,
    transmissivity: float = 1.0,
    theta: float = 0.0,
    alpha: float = 0.0,
    order: int = 3,
    tol: float = FACTORIZATION_TOLERANCE,
) -> float:
    """
    f = R1 / T^4 for an SHG state mixed with vacuum on a beam splitter.

    When T < 1 the mode-2 value R2 / (1 - T)^4 must agree to relative ``tol``;
    otherwise FactorizationError is raised.
    """
    if not 0.0 < transmissivity <= 1.0:
        raise InvalidParameterError(f"Shape factor needs 0 < T <= 1, got {transmissivity}")
    state = shg_state(b_sq, bn, xi1_0, alpha)
    state = apply(state, beam_splitter(BeamSplitterParams(transmissivity, theta)))
    m = moments_of(state, order)

    f1 = witness_R(m, 1) / transmissivity ** 4
    if transmissivity < 1.0:
        reflect = 1.0 - transmissivity
        f2 = witness_R(m, 2) / reflect ** 4
        scale = max(_witness_scale(m, 1) / transmissivity ** 4, _witness_scale(m, 2) / reflect ** 4)
        if not np.isclose(f1, f2, rtol=tol, atol=tol * scale):
            raise FactorizationError(
                f"R1/T^4 = {f1:.12g} and R2/(1-T)^4 = {f2:.12g} differ at T = {transmissivity}"
            )
    return float(f1)


def wrap_phase(phase: float) -> float:
    """Reduce a phase of period pi to (-pi/2, pi/2]"""
    reduced = math.remainder(phase, math.pi)
    return math.pi / 2 if reduced <= -math.pi / 2 else reduced


def optimal_phase(
    objective: Callable[[np.ndarray], np.ndarray],
    grid_points: int = PHASE_GRID_POINTS,
    tol: float = PHASE_TOLERANCE,
) -> float:
    """
    Phase (radians, in (-pi/2, pi/2]) minimizing a witness of period pi.

    ``objective`` maps an array of stimulating phases to witness values. The
    minimum is located on a grid over one period and refined by golden-section
    search to ``tol``.
    """
    grid = np.linspace(0.5 * math.pi, 1.5 * math.pi, grid_points, endpoint=False)
    values = np.asarray(objective(grid), dtype=float)
    if not np.all(np.isfinite(values)):
        raise DegenerateScenarioError("Witness is not finite on the phase grid")
    spread = float(np.ptp(values))
    if spread <= 1e-12 * max(1.0, float(np.max(np.abs(values)))):
        raise DegenerateScenarioError("Witness does not depend on the stimulating phase")

    best = int(np.argmin(values))
    step = grid[1] - grid[0]
    centre = float(grid[best])
    bracket = (centre - step, centre, centre + step)

    def scalar(phi: float) -> float:
        return float(np.asarray(objective(np.array([phi])), dtype=float)[0])

    try:
        result = minimize_scalar(scalar, bracket=bracket, method="golden", options={"xtol": tol / (2 * abs(centre))})
        phase = float(result.x) if scalar(result.x) <= values[best] else centre
    except ValueError as e:
        logging.debug(f"Golden-section bracket rejected ({e}); keeping grid minimum")
        phase = centre
    return wrap_phase(phase)
