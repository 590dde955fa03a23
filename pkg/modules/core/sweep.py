"""
Scenario evaluation over parameter grids and zero-contour location.

A Scenario fixes the source (SHG or twin beam), noise, seeds and beam
splitter. Sweeps override one to three of its parameters with grid columns and
evaluate every point through the vectorized state assembly, in fixed-size
chunks written to preallocated slots, so results do not depend on ``jobs``.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.optimize import bisect

from .config_manager import ConfigManager
from .dynamics import shg_state, source_arrays, twin_state
from .errors import ConfigurationError, InvalidParameterError, NoSignChangeError, NumericalError
from .moments import moments_from_arrays
from .state import GaussianState, add_noise, amplitude
from .transforms import BeamSplitterParams, apply, beam_splitter, beam_splitter_entries, displace, transform_arrays
from .witnesses import (
    WITNESS_NAMES,
    entanglement_indicator,
    optimal_phase,
    witness_M,
    witness_R,
)

TOOL_VERSION = "1.0.0"

PROCESSES = ("shg", "dc")

# scenario fields that a sweep axis may override
SWEEP_PARAMETERS = (
    "b_vac", "bn1", "bn2",
    "xi1_mag2", "xi1_phase", "xi2_mag2", "xi2_phase",
    "d2_mag2", "d2_phase",
    "transmissivity", "theta", "alpha",
)

AXIS_ALIASES = {
    "b_sq": "b_vac",
    "b_p": "b_vac",
    "bn": "bn1",
    "b_n": "bn1",
    "b_s": "bn1",
    "b_i": "bn2",
    "T": "transmissivity",
}


def resolve_axis(name: str) -> str:
    """Canonical scenario field for an axis name or alias"""
    canonical = AXIS_ALIASES.get(name, name)
    if canonical not in SWEEP_PARAMETERS:
        raise ConfigurationError(f"Unknown sweep parameter '{name}'", key=name)
    return canonical


@dataclass(frozen=True)
class Scenario:
    """
    One evaluation setup. Phases (xi phases, theta, alpha) are in units of pi;
    ``b_vac`` is B_sq for SHG and B_p for the twin beam.
    """

    process: str = "shg"
    b_vac: float = 0.0
    bn1: float = 0.0
    bn2: float = 0.0
    xi1_mag2: float = 0.0
    xi1_phase: float = 0.0
    xi2_mag2: float = 0.0
    xi2_phase: float = 0.0
    d2_mag2: float = 0.0
    d2_phase: float = 0.0
    transmissivity: float = 1.0
    theta: float = 0.0
    alpha: float = 0.0
    balanced_noise: bool = False
    witnesses: Tuple[str, ...] = ("R1",)

    def __post_init__(self):
        object.__setattr__(self, "witnesses", tuple(self.witnesses))
        if self.process not in PROCESSES:
            raise InvalidParameterError(f"Process must be one of {PROCESSES}, got '{self.process}'")
        for name in ("b_vac", "bn1", "bn2", "xi1_mag2", "xi2_mag2", "d2_mag2"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise InvalidParameterError(f"{name} must be finite and nonnegative, got {value}")
        if not 0.0 <= self.transmissivity <= 1.0:
            raise InvalidParameterError(f"Transmissivity must lie in [0, 1], got {self.transmissivity}")
        if not self.witnesses:
            raise InvalidParameterError("At least one witness must be selected")
        for witness in self.witnesses:
            if witness not in WITNESS_NAMES:
                raise InvalidParameterError(f"Unknown witness '{witness}'")
        if "f" in self.witnesses and self.process != "shg":
            raise InvalidParameterError("Shape factor f is defined for SHG scenarios only")

    @property
    def effective_bn2(self) -> float:
        return self.bn1 if self.balanced_noise else self.bn2

    @property
    def shg_through_vacuum(self) -> bool:
        """SHG source mixed with an empty second port"""
        return (
            self.process == "shg"
            and self.effective_bn2 == 0
            and self.xi2_mag2 == 0
            and self.d2_mag2 == 0
        )

    def build_state(self, unit_transmissivity: bool = False) -> GaussianState:
        """Output state after the beam splitter, built from the dynamics and transforms objects"""
        xi1 = amplitude(self.xi1_mag2, self.xi1_phase)
        xi2 = amplitude(self.xi2_mag2, self.xi2_phase)
        alpha = math.pi * self.alpha
        if self.process == "shg":
            state = shg_state(self.b_vac, self.bn1, xi1, alpha)
            state = displace(add_noise(state, 0.0, self.effective_bn2), 0j, xi2)
        else:
            state = twin_state(self.b_vac, self.bn1, self.effective_bn2, xi1, xi2, alpha)
        state = displace(state, 0j, amplitude(self.d2_mag2, self.d2_phase))
        T = 1.0 if unit_transmissivity else self.transmissivity
        return apply(state, beam_splitter(BeamSplitterParams(T, math.pi * self.theta)))

    def parameter_arrays(self, overrides: Dict[str, np.ndarray] = None) -> Dict[str, np.ndarray]:
        """Scenario fields as broadcast arrays, with sweep columns substituted"""
        values = {name: np.asarray(getattr(self, name), dtype=float) for name in SWEEP_PARAMETERS}
        for name, column in (overrides or {}).items():
            values[resolve_axis(name)] = np.asarray(column, dtype=float)
        if self.balanced_noise:
            values["bn2"] = values["bn1"]
        shape = np.broadcast_shapes(*(v.shape for v in values.values()))
        return {name: np.broadcast_to(v, shape) for name, v in values.items()}

    def to_dict(self) -> Dict[str, Any]:
        """ScenarioFile representation (phases in units of pi)"""
        vacuum_key = "b_sq" if self.process == "shg" else "b_p"
        return {
            "process": self.process,
            vacuum_key: self.b_vac,
            "bn1": self.bn1,
            "bn2": self.bn2,
            "xi1": {"mag2": self.xi1_mag2, "phase": self.xi1_phase},
            "xi2": {"mag2": self.xi2_mag2, "phase": self.xi2_phase},
            "displace2": {"mag2": self.d2_mag2, "phase": self.d2_phase},
            "bs": {"T": self.transmissivity, "theta": self.theta},
            "alpha": self.alpha,
            "balanced_noise": self.balanced_noise,
            "witness": list(self.witnesses),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Scenario":
        """Build from ScenarioFile keys; ``sweep`` is read separately by ``axes_from_dict``"""
        kwargs: Dict[str, Any] = {"process": data.get("process", "shg")}
        for key in ("b_sq", "b_p"):
            if key in data:
                kwargs["b_vac"] = float(data[key])
        for key, target in (("bn1", "bn1"), ("bn", "bn1"), ("b_s", "bn1"), ("bn2", "bn2"), ("b_i", "bn2")):
            if key in data:
                kwargs[target] = float(data[key])
        for key, prefix in (("xi1", "xi1"), ("xi2", "xi2"), ("displace2", "d2")):
            if key in data:
                kwargs[f"{prefix}_mag2"] = float(data[key].get("mag2", 0.0))
                kwargs[f"{prefix}_phase"] = float(data[key].get("phase", 0.0))
        if "bs" in data:
            kwargs["transmissivity"] = float(data["bs"].get("T", 1.0))
            kwargs["theta"] = float(data["bs"].get("theta", 0.0))
        if "alpha" in data:
            kwargs["alpha"] = float(data["alpha"])
        if "balanced_noise" in data:
            kwargs["balanced_noise"] = bool(data["balanced_noise"])
        if "witness" in data:
            witness = data["witness"]
            kwargs["witnesses"] = (witness,) if isinstance(witness, str) else tuple(witness)
        return cls(**kwargs)


@dataclass(frozen=True)
class Axis:
    """Ranged sweep parameter; ``label`` names the output column"""

    param: str
    min: float
    max: float
    steps: int
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "param", resolve_axis(self.param))
        if int(self.steps) != self.steps or self.steps < 1:
            raise ConfigurationError(f"Axis '{self.param}' needs a positive integer step count", key="steps")
        object.__setattr__(self, "steps", int(self.steps))
        if not (math.isfinite(self.min) and math.isfinite(self.max)):
            raise ConfigurationError(f"Axis '{self.param}' has a non-finite range", key=self.param)
        if not self.label:
            object.__setattr__(self, "label", self.param)

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.steps)

    def to_dict(self) -> Dict[str, Any]:
        return {"param": self.param, "min": self.min, "max": self.max, "steps": self.steps, "label": self.label}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Axis":
        try:
            return cls(
                param=data["param"],
                min=float(data["min"]),
                max=float(data["max"]),
                steps=data["steps"],
                label=data.get("label", data["param"]),
            )
        except KeyError as e:
            raise ConfigurationError(f"Sweep axis is missing '{e.args[0]}'", key=e.args[0]) from e


def axes_from_dict(data: Dict[str, Any]) -> List[Axis]:
    return [Axis.from_dict(entry) for entry in data.get("sweep", [])]


@dataclass
class SweepResult:
    """Grid points (row-major over the axes) with one column per witness"""

    frame: pd.DataFrame
    axes: List[Axis]
    witnesses: Tuple[str, ...]
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def flags(self) -> pd.DataFrame:
        """Negativity flags per witness column"""
        return self.frame[list(self.witnesses)] < 0

    def __len__(self):
        return len(self.frame)


def _scenario_arrays(scenario: Scenario, params: Dict[str, np.ndarray], unit_transmissivity: bool = False):
    if np.any(params["xi1_mag2"] < 0) or np.any(params["xi2_mag2"] < 0) or np.any(params["d2_mag2"] < 0):
        raise InvalidParameterError("Coherent intensities must be nonnegative")
    T = np.ones_like(params["transmissivity"]) if unit_transmissivity else params["transmissivity"]
    if np.any(T < 0) or np.any(T > 1):
        raise InvalidParameterError("Transmissivity must lie in [0, 1]")

    def field_amplitude(prefix: str) -> np.ndarray:
        return np.sqrt(params[f"{prefix}_mag2"]) * np.exp(1j * np.pi * params[f"{prefix}_phase"])

    cov, xi = source_arrays(
        scenario.process,
        params["b_vac"],
        params["bn1"],
        params["bn2"],
        field_amplitude("xi1"),
        field_amplitude("xi2"),
        np.pi * params["alpha"],
    )
    d2 = field_amplitude("d2")
    xi = xi + np.stack([np.zeros_like(d2), np.zeros_like(d2), d2, np.conj(d2)], axis=-1)
    return transform_arrays(cov, xi, beam_splitter_entries(T, np.pi * params["theta"]))


def evaluate_points(
    scenario: Scenario,
    overrides: Dict[str, np.ndarray] = None,
    order: int = 3,
    witnesses: Sequence[str] = None,
) -> Dict[str, np.ndarray]:
    """Witness arrays for the scenario with ``overrides`` substituted elementwise"""
    witnesses = tuple(witnesses or scenario.witnesses)
    params = scenario.parameter_arrays(overrides)
    m = moments_from_arrays(*_scenario_arrays(scenario, params), order)

    R1 = np.asarray(witness_R(m, 1))
    results: Dict[str, np.ndarray] = {}
    for witness in witnesses:
        if witness == "R1":
            results[witness] = R1
        elif witness == "R2":
            results[witness] = np.asarray(witness_R(m, 2))
        elif witness == "M":
            results[witness] = np.asarray(witness_M(m))
        elif witness == "f":
            T = params["transmissivity"]
            # f is only defined for an SHG source mixed with an empty second port
            defined = (T > 0) & (params["bn2"] == 0) & (params["xi2_mag2"] == 0) & (params["d2_mag2"] == 0)
            with np.errstate(divide="ignore", invalid="ignore"):
                results[witness] = np.where(defined, R1 / np.where(T > 0, T, 1.0) ** 4, np.nan)
        elif witness == "ent":
            m_unit = moments_from_arrays(*_scenario_arrays(scenario, params, unit_transmissivity=True), order)
            results[witness] = np.asarray(entanglement_indicator(R1, witness_R(m, 2), witness_R(m_unit, 1)))
    return results


def grid_sweep(
    scenario: Scenario,
    axes: Sequence[Axis],
    order: int = 3,
    jobs: int = 1,
    chunk_size: int = None,
    max_points: int = None,
) -> SweepResult:
    """Evaluate the scenario's witnesses on the row-major product grid of ``axes``"""
    axes = list(axes)
    chunk_size = int(chunk_size or ConfigManager.setting("sweep", "chunk_size", 4096))
    max_points = int(max_points or ConfigManager.setting("sweep", "max_points", 10_000_000))
    if not 1 <= len(axes) <= 3:
        raise ConfigurationError(f"Sweeps take 1 to 3 axes, got {len(axes)}", key="sweep")
    params = [a.param for a in axes]
    labels = [a.label for a in axes]
    if len(set(params)) != len(params) or len(set(labels)) != len(labels):
        raise ConfigurationError("Sweep axes must name distinct parameters and labels", key="sweep")
    total = int(np.prod([a.steps for a in axes]))
    if total > max_points:
        raise ConfigurationError(f"Sweep has {total} points, cap is {max_points}", key="sweep")

    mesh = np.meshgrid(*[a.values for a in axes], indexing="ij")
    columns = {a.param: grid.ravel() for a, grid in zip(axes, mesh)}
    outputs = {w: np.empty(total) for w in scenario.witnesses}
    chunks = [(start, min(start + chunk_size, total)) for start in range(0, total, chunk_size)]

    def evaluate_chunk(bounds: Tuple[int, int]):
        start, stop = bounds
        values = evaluate_points(scenario, {p: c[start:stop] for p, c in columns.items()}, order)
        for witness, array in values.items():
            outputs[witness][start:stop] = array
        logging.debug(f"Evaluated grid points {start}..{stop - 1}")

    logging.info(f"Sweep over {', '.join(labels)}: {total} points in {len(chunks)} chunks, jobs={jobs}")
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            list(executor.map(evaluate_chunk, chunks))
    else:
        for bounds in chunks:
            evaluate_chunk(bounds)

    frame = pd.DataFrame({label: columns[a.param] for label, a in zip(labels, axes)})
    for witness in scenario.witnesses:
        frame[witness] = outputs[witness]
    metadata = {
        "scenario": scenario.to_dict(),
        "axes": [a.to_dict() for a in axes],
        "order": order,
        "version": TOOL_VERSION,
    }
    logging.info(f"Sweep finished: {total} rows")
    return SweepResult(frame=frame, axes=axes, witnesses=scenario.witnesses, metadata=metadata)


def zero_contour(
    scenario: Scenario,
    free_axis: str,
    bracket: Tuple[float, float],
    witness: Optional[str] = None,
    order: int = 3,
    xtol: float = None,
) -> float:
    """Value of ``free_axis`` inside ``bracket`` where the witness changes sign"""
    param = resolve_axis(free_axis)
    witness = witness or scenario.witnesses[0]
    xtol = float(xtol or ConfigManager.setting("tolerances", "bisection", 1e-9))
    lo, hi = (float(v) for v in bracket)

    def value(x: float) -> float:
        return float(evaluate_points(scenario, {param: np.array([x])}, order, (witness,))[witness][0])

    f_lo, f_hi = value(lo), value(hi)
    if not (math.isfinite(f_lo) and math.isfinite(f_hi)):
        raise NumericalError(f"Witness {witness} is not finite at the bracket ends [{lo}, {hi}]")
    if f_lo == 0:
        return lo
    if f_hi == 0:
        return hi
    if (f_lo > 0) == (f_hi > 0):
        raise NoSignChangeError(
            f"{witness} keeps its sign over {free_axis} in [{lo}, {hi}] ({f_lo:.6g}, {f_hi:.6g})"
        )
    root = bisect(value, lo, hi, xtol=xtol)
    logging.info(f"Zero contour of {witness} at {free_axis} = {root:.12g}")
    return float(root)


def phase_objective(scenario: Scenario, witness: str = None, order: int = 3) -> Callable[[np.ndarray], np.ndarray]:
    """Witness as a function of the xi1 phase in radians"""
    witness = witness or scenario.witnesses[0]

    def objective(phases: np.ndarray) -> np.ndarray:
        overrides = {"xi1_phase": np.asarray(phases, dtype=float) / np.pi}
        return evaluate_points(scenario, overrides, order, (witness,))[witness]

    return objective


def scenario_optimal_phase(
    scenario: Scenario,
    witness: str = None,
    order: int = 3,
    grid_points: int = None,
    tol: float = None,
) -> float:
    """Stimulating phase (radians, mod pi) minimizing the witness"""
    grid_points = int(grid_points or ConfigManager.setting("phase_search", "grid_points", 181))
    tol = float(tol or ConfigManager.setting("tolerances", "phase", 1e-4))
    return optimal_phase(phase_objective(scenario, witness, order), grid_points, tol)


def load_preset(name: str, config_dir: str = None) -> Tuple[Scenario, List[Axis], Dict[str, Any]]:
    """Scenario, axes and raw entry of a figure preset"""
    presets = ConfigManager.get_figure_presets(config_dir)
    if name not in presets:
        raise ConfigurationError(f"Unknown figure preset '{name}' (known: {', '.join(sorted(presets))})", key=name)
    entry = presets[name]
    scenario = Scenario.from_dict(entry["scenario"])
    axes = [Axis.from_dict(axis) for axis in entry["axes"]]
    return scenario, axes, entry

