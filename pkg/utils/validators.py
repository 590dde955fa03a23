"""
Validators Module
Contains validation functions for scenario files of the witness toolkit.
"""

import math
from numbers import Real
from typing import Any, Dict, List, Optional, Tuple

from modules.core.sweep import AXIS_ALIASES, PROCESSES, SWEEP_PARAMETERS
from modules.core.witnesses import WITNESS_NAMES

TOP_LEVEL_KEYS = {
    "process", "b_sq", "b_p", "bn1", "bn", "b_s", "bn2", "b_i",
    "xi1", "xi2", "displace2", "bs", "alpha", "balanced_noise", "witness", "sweep",
}
FIELD_KEYS = {"mag2", "phase"}
BS_KEYS = {"T", "theta"}
AXIS_KEYS = {"param", "min", "max", "steps", "label"}
NOISE_ALIASES = {"bn1": ("bn1", "bn", "b_s"), "bn2": ("bn2", "b_i")}


class ScenarioValidator:
    """Handles validation of scenario documents before they become Scenarios"""

    def __init__(self):
        """Initialize the scenario validator"""
        self.max_axes = 3
        self.last_key: Optional[str] = None

    def validate_scenario(self, data: Any) -> Tuple[bool, str]:
        """
        Comprehensive validation of a scenario document

        Args:
            data: Parsed JSON document

        Returns:
            Tuple of (is_valid, message); ``last_key`` names the offending key
        """
        self.last_key = None
        if not isinstance(data, dict):
            return False, "Scenario file must contain a JSON object"

        for check in (
            self.validate_keys,
            self.validate_process,
            self.validate_numbers,
            self.validate_fields,
            self.validate_witness,
            self.validate_sweep,
        ):
            is_valid, message = check(data)
            if not is_valid:
                return False, message

        return True, "Scenario validation successful"

    def _fail(self, key: str, message: str) -> Tuple[bool, str]:
        self.last_key = key
        return False, message

    def validate_keys(self, data: Dict[str, Any]) -> Tuple[bool, str]:
        """Reject unknown and conflicting keys"""
        for key in data:
            if key not in TOP_LEVEL_KEYS:
                return self._fail(key, f"Unknown key '{key}'")
        for canonical, aliases in NOISE_ALIASES.items():
            present = [key for key in aliases if key in data]
            if len(present) > 1:
                return self._fail(present[1], f"Keys {present} all set {canonical}; use one of them")
        if "b_sq" in data and "b_p" in data:
            return self._fail("b_p", "Keys 'b_sq' and 'b_p' cannot be combined")
        return True, "Keys OK"

    def validate_process(self, data: Dict[str, Any]) -> Tuple[bool, str]:
        process = data.get("process", "shg")
        if process not in PROCESSES:
            return self._fail("process", f"Key 'process' must be one of {list(PROCESSES)}, got {process!r}")
        if process == "shg" and "b_p" in data:
            return self._fail("b_p", "Key 'b_p' applies to process 'dc' only; use 'b_sq'")
        if process == "dc" and "b_sq" in data:
            return self._fail("b_sq", "Key 'b_sq' applies to process 'shg' only; use 'b_p'")
        return True, f"Process OK ({process})"

    def validate_numbers(self, data: Dict[str, Any]) -> Tuple[bool, str]:
        """Scalar keys: finite numbers, nonnegative photon numbers"""
        for key in ("b_sq", "b_p", "bn1", "bn", "b_s", "bn2", "b_i"):
            if key in data:
                is_valid, message = self._check_number(key, data[key], minimum=0.0)
                if not is_valid:
                    return is_valid, message
        if "alpha" in data:
            is_valid, message = self._check_number("alpha", data["alpha"])
            if not is_valid:
                return is_valid, message
        if "balanced_noise" in data and not isinstance(data["balanced_noise"], bool):
            return self._fail("balanced_noise", "Key 'balanced_noise' must be true or false")
        return True, "Numbers OK"

    def validate_fields(self, data: Dict[str, Any]) -> Tuple[bool, str]:
        """Coherent fields {mag2, phase} and the beam splitter {T, theta}"""
        for key in ("xi1", "xi2", "displace2"):
            if key not in data:
                continue
            entry = data[key]
            if not isinstance(entry, dict):
                return self._fail(key, f"Key '{key}' must be an object with 'mag2' and 'phase'")
            for sub in entry:
                if sub not in FIELD_KEYS:
                    return self._fail(f"{key}.{sub}", f"Unknown key '{key}.{sub}'")
            if "mag2" in entry:
                is_valid, message = self._check_number(f"{key}.mag2", entry["mag2"], minimum=0.0)
                if not is_valid:
                    return is_valid, message
            if "phase" in entry:
                is_valid, message = self._check_number(f"{key}.phase", entry["phase"])
                if not is_valid:
                    return is_valid, message

        if "bs" in data:
            entry = data["bs"]
            if not isinstance(entry, dict):
                return self._fail("bs", "Key 'bs' must be an object with 'T' and 'theta'")
            for sub in entry:
                if sub not in BS_KEYS:
                    return self._fail(f"bs.{sub}", f"Unknown key 'bs.{sub}'")
            if "T" in entry:
                is_valid, message = self._check_number("bs.T", entry["T"], minimum=0.0, maximum=1.0)
                if not is_valid:
                    return is_valid, message
            if "theta" in entry:
                is_valid, message = self._check_number("bs.theta", entry["theta"])
                if not is_valid:
                    return is_valid, message
        return True, "Fields OK"

    def validate_witness(self, data: Dict[str, Any]) -> Tuple[bool, str]:
        if "witness" not in data:
            return True, "Default witness"
        witness = data["witness"]
        names: List[Any] = [witness] if isinstance(witness, str) else witness
        if not isinstance(names, list) or not names:
            return self._fail("witness", "Key 'witness' must be a name or a non-empty list of names")
        for name in names:
            if name not in WITNESS_NAMES:
                return self._fail("witness", f"Key 'witness' has unknown value {name!r}; known: {list(WITNESS_NAMES)}")
        if "f" in names and data.get("process", "shg") != "shg":
            return self._fail("witness", "Witness 'f' is defined for process 'shg' only")
        return True, f"Witness OK ({names})"

    def validate_sweep(self, data: Dict[str, Any]) -> Tuple[bool, str]:
        """Sweep axes: 1 to 3 entries of {param, min, max, steps, label?}"""
        if "sweep" not in data:
            return True, "No sweep"
        axes = data["sweep"]
        if not isinstance(axes, list) or not 1 <= len(axes) <= self.max_axes:
            return self._fail("sweep", f"Key 'sweep' must list 1 to {self.max_axes} axes")
        seen = set()
        for index, axis in enumerate(axes):
            prefix = f"sweep[{index}]"
            if not isinstance(axis, dict):
                return self._fail(prefix, f"Axis {prefix} must be an object")
            for sub in axis:
                if sub not in AXIS_KEYS:
                    return self._fail(f"{prefix}.{sub}", f"Unknown key '{prefix}.{sub}'")
            for sub in ("param", "min", "max", "steps"):
                if sub not in axis:
                    return self._fail(f"{prefix}.{sub}", f"Axis {prefix} is missing '{sub}'")
            param = AXIS_ALIASES.get(axis["param"], axis["param"])
            if param not in SWEEP_PARAMETERS:
                return self._fail(f"{prefix}.param", f"Unknown sweep parameter {axis['param']!r}")
            if param in seen:
                return self._fail(f"{prefix}.param", f"Parameter {axis['param']!r} is swept twice")
            seen.add(param)
            for sub in ("min", "max"):
                is_valid, message = self._check_number(f"{prefix}.{sub}", axis[sub])
                if not is_valid:
                    return is_valid, message
            steps = axis["steps"]
            if isinstance(steps, bool) or not isinstance(steps, int) or steps < 1:
                return self._fail(f"{prefix}.steps", f"Key '{prefix}.steps' must be a positive integer")
        return True, f"Sweep OK ({len(axes)} axes)"

    def _check_number(
        self, key: str, value: Any, minimum: float = None, maximum: float = None
    ) -> Tuple[bool, str]:
        if isinstance(value, bool) or not isinstance(value, Real) or not math.isfinite(value):
            return self._fail(key, f"Key '{key}' must be a finite number, got {value!r}")
        if minimum is not None and value < minimum:
            return self._fail(key, f"Key '{key}' must be >= {minimum}, got {value}")
        if maximum is not None and value > maximum:
            return self._fail(key, f"Key '{key}' must be <= {maximum}, got {value}")
        return True, f"{key} OK"
