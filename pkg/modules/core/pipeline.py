"""Pipeline orchestrator used by the CLI and tests."""

import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config_manager import ConfigManager
from .dynamics import ProcessParams, closed_form_shg, closed_form_twin, propagate
from .errors import InvalidParameterError
from .moments import moments_of, monte_carlo_moments, wick_moment
from .state import CoherentVector, GaussianState, NormalCovariance
from .sweep import (
    Axis,
    Scenario,
    SweepResult,
    grid_sweep,
    load_preset,
    scenario_optimal_phase,
    zero_contour,
)
from .witnesses import WitnessReport, build_report, witness_M, witness_R


class WitnessPipeline:
    """Runs single scenarios, sweeps, contours, figure presets and the self-test"""

    def __init__(
        self,
        output_dir: Optional[str] = None,
        config_dir: Optional[str] = None,
        order: Optional[int] = None,
        jobs: Optional[int] = None,
        tolerance: Optional[float] = None,
        seed: Optional[int] = None,
    ):
        self.config_dir = config_dir
        self.engine_config = ConfigManager.get_engine_config(config_dir)
        self.order = int(order if order is not None else self.engine_config["jets"]["order"])
        self.jobs = int(jobs if jobs is not None else self.engine_config["sweep"]["jobs"])
        if self.order < 1:
            raise InvalidParameterError(f"Jet order must be at least 1, got {self.order}")
        if self.jobs < 1:
            raise InvalidParameterError(f"Number of jobs must be at least 1, got {self.jobs}")
        self.tolerance = tolerance
        self.seed = seed if seed is not None else self.engine_config["monte_carlo"]["seed"]

        if output_dir:
            self.output_dir = Path(output_dir)
        else:
            self.output_dir = Path(self.engine_config.get("output", {}).get("output_dir", "output"))

    def run_scenario(self, scenario: Scenario) -> WitnessReport:
        """Moments and every witness of one scenario"""
        try:
            m = moments_of(scenario.build_state(), self.order)
            m_unit = moments_of(scenario.build_state(unit_transmissivity=True), self.order)
            report = build_report(
                m,
                transmissivity=scenario.transmissivity,
                m_unit=m_unit,
                shg_through_bs=scenario.shg_through_vacuum,
                scenario=scenario.to_dict(),
            )
            logging.info(f"Evaluated scenario: R1={report.R1:.6g}, R2={report.R2:.6g}, M={report.M:.6g}")
            return report
        except Exception as e:
            logging.error(f"Scenario evaluation failed: {str(e)}")
            raise

    def sweep(self, scenario: Scenario, axes: Sequence[Axis]) -> SweepResult:
        try:
            return grid_sweep(scenario, axes, order=self.order, jobs=self.jobs)
        except Exception as e:
            logging.error(f"Sweep failed: {str(e)}")
            raise

    def contour(
        self, scenario: Scenario, axis: str, bracket: Tuple[float, float], witness: Optional[str] = None
    ) -> float:
        try:
            return zero_contour(scenario, axis, bracket, witness, order=self.order, xtol=self.tolerance)
        except Exception as e:
            logging.error(f"Contour search over '{axis}' failed: {str(e)}")
            raise

    def critical_intensity(
        self, scenario: Scenario, bracket: Tuple[float, float], witness: Optional[str] = None
    ) -> float:
        """Seed intensity |xi1|^2 at which the witness changes sign"""
        return self.contour(scenario, "xi1_mag2", bracket, witness)

    def optimal_phase(self, scenario: Scenario, witness: Optional[str] = None) -> float:
        try:
            return scenario_optimal_phase(scenario, witness, order=self.order)
        except Exception as e:
            logging.error(f"Optimal phase search failed: {str(e)}")
            raise

    def figure_dataset(self, preset: str) -> SweepResult:
        scenario, axes, entry = load_preset(preset, self.config_dir)
        logging.info(f"Figure preset {preset}: {entry.get('description', '')}")
        result = self.sweep(scenario, axes)
        result.metadata["preset"] = preset
        return result

    def selftest(self, random_states: Optional[int] = None) -> Dict[str, Any]:
        """
        Oracle-equivalence suite.

        Returns a summary with one entry per check; ``passed`` is True only if
        every check passed.
        """
        settings = self.engine_config["selftest"]
        count = int(random_states or settings["random_states"])
        rtol = float(self.tolerance or settings["relative_tolerance"])
        checks: List[Dict[str, Any]] = [
            self._check_oracle(count, rtol, int(settings["seed"])),
            self._check_closed_forms(),
            self._check_propagator(),
            self._check_monte_carlo(),
        ]
        summary = {"checks": checks, "passed": all(c["passed"] for c in checks)}
        logging.info(f"Self-test {'passed' if summary['passed'] else 'FAILED'}")
        return summary

    def _check_oracle(self, count: int, rtol: float, seed: int) -> Dict[str, Any]:
        rng = np.random.default_rng(seed)
        worst = 0.0
        for _ in range(count):
            state = random_scenario(rng).build_state()
            m = moments_of(state, 3)
            for a in range(4):
                for b in range(4 - a):
                    exact = wick_moment(state, a, b)
                    error = abs(m[a, b] - exact) / max(abs(exact), 1e-300)
                    worst = max(worst, error)
        return {
            "name": "jets vs Wick oracle",
            "passed": worst < rtol,
            "detail": f"{count} states, worst relative error {worst:.3e}",
        }

    def _check_closed_forms(self) -> Dict[str, Any]:
        thermal = GaussianState(NormalCovariance.from_blocks(b1=1.0), CoherentVector(), modes=1)
        twin = Scenario(process="dc", b_vac=1.0, witnesses=("M",)).build_state()
        squeezed = Scenario(process="shg", b_vac=0.1).build_state()
        values = {
            "thermal R": (witness_R(moments_of(thermal), 1), 2.0),
            "twin M": (witness_M(moments_of(twin)), -5.0),
            "squeezed R": (witness_R(moments_of(squeezed), 1), 6e-4 + 3e-3 - 1e-2),
        }
        bad = [name for name, (got, want) in values.items() if not math.isclose(got, want, abs_tol=1e-10)]
        return {
            "name": "closed-form witnesses",
            "passed": not bad,
            "detail": "all match" if not bad else f"mismatch: {', '.join(bad)}",
        }

    def _check_propagator(self) -> Dict[str, Any]:
        worst = 0.0
        for gt in np.linspace(0.0, 3.0, 31):
            shg = propagate(ProcessParams(g1=1.0, t=gt))
            twin = propagate(ProcessParams(g3=1.0, t=gt))
            references = (
                (shg, closed_form_shg(math.sinh(2 * gt) ** 2)),
                (twin, closed_form_twin(math.sinh(gt) ** 2)),
            )
            for got, want in references:
                scale = max(1.0, float(np.max(np.abs(want.U))))
                worst = max(
                    worst,
                    float(np.max(np.abs(got.U - want.U))) / scale,
                    float(np.max(np.abs(got.V - want.V))) / scale,
                )
        return {
            "name": "propagator vs closed forms",
            "passed": worst < 1e-12,
            "detail": f"worst scaled deviation {worst:.3e}",
        }

    def _check_monte_carlo(self) -> Dict[str, Any]:
        settings = self.engine_config["monte_carlo"]
        state = GaussianState(
            NormalCovariance.from_blocks(b1=1.0, b2=0.5, d12_bar=0.3),
            CoherentVector(1.0 + 0.5j, 0.5j),
        )
        exact = moments_of(state, 3)
        means, errors = monte_carlo_moments(state, 3, int(settings["samples"]), self.seed)
        bound = float(settings["sigma_bound"])
        deviations = [
            abs(means[a, b] - exact[a, b]) / max(errors[a, b], 1e-300)
            for a in range(4)
            for b in range(4 - a)
            if a + b > 0
        ]
        worst = max(deviations)
        return {
            "name": "Monte Carlo P sampling",
            "passed": worst < bound,
            "detail": f"worst deviation {worst:.2f} standard errors (seed {self.seed})",
        }


def random_scenario(rng: np.random.Generator) -> Scenario:
    """Random SHG or twin-beam scenario covering noise, seeds and beam splitter"""
    process = "shg" if rng.random() < 0.5 else "dc"
    return Scenario(
        process=process,
        b_vac=float(rng.uniform(0.0, 2.0)),
        bn1=float(rng.uniform(0.0, 1.0)),
        bn2=float(rng.uniform(0.0, 1.0)),
        xi1_mag2=float(rng.uniform(0.0, 10.0)),
        xi1_phase=float(rng.uniform(-1.0, 1.0)),
        xi2_mag2=float(rng.uniform(0.0, 10.0)),
        xi2_phase=float(rng.uniform(-1.0, 1.0)),
        transmissivity=float(rng.uniform(0.0, 1.0)),
        theta=float(rng.uniform(0.0, 2.0)),
        alpha=float(rng.uniform(0.0, 2.0)),
    )
