"""
Scenario File Handler Module
Reads, validates and writes scenario files (JSON) for the witness toolkit.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from modules.core.errors import ConfigurationError
from modules.core.sweep import Axis, Scenario, axes_from_dict
from utils.validators import ScenarioValidator


class ScenarioHandler:
    """Handles scenario file operations for the CLI"""

    def __init__(self):
        self.validator = ScenarioValidator()

    def read_document(self, path: str) -> Dict[str, Any]:
        """
        Read the raw JSON document of a scenario file

        Args:
            path: Scenario file path

        Returns:
            Parsed JSON document
        """
        file_path = Path(path)
        try:
            with open(file_path, "r", encoding="utf-8") as f:
                return json.load(f)
        except FileNotFoundError as e:
            raise ConfigurationError(f"Scenario file not found: {file_path}", key="path") from e
        except json.JSONDecodeError as e:
            logging.error(f"Error parsing scenario file {file_path}: {str(e)}")
            raise ConfigurationError(f"Scenario file {file_path} is not valid JSON: {e}", key="path") from e

    def load_document(self, data: Dict[str, Any]) -> Tuple[Scenario, List[Axis]]:
        """Validate a scenario document and build the Scenario and its sweep axes"""
        is_valid, message = self.validator.validate_scenario(data)
        if not is_valid:
            raise ConfigurationError(message, key=self.validator.last_key)
        return Scenario.from_dict(data), axes_from_dict(data)

    def load(self, path: str) -> Tuple[Scenario, List[Axis]]:
        scenario, axes = self.load_document(self.read_document(path))
        logging.info(f"Loaded scenario {path}: process={scenario.process}, witnesses={list(scenario.witnesses)}")
        return scenario, axes

    def to_document(self, scenario: Scenario, axes: Optional[List[Axis]] = None) -> Dict[str, Any]:
        """Normalized ScenarioFile document; reloads to an identical Scenario"""
        document = scenario.to_dict()
        if axes:
            document["sweep"] = [axis.to_dict() for axis in axes]
        return document

    def echo(self, scenario: Scenario, axes: Optional[List[Axis]] = None) -> str:
        return json.dumps(self.to_document(scenario, axes), indent=2, sort_keys=True)

    def save(self, scenario: Scenario, path: str, axes: Optional[List[Axis]] = None) -> Path:
        output_path = Path(path)
        try:
            output_path.parent.mkdir(parents=True, exist_ok=True)
            output_path.write_text(self.echo(scenario, axes) + "\n", encoding="utf-8")
            logging.info(f"Created scenario file: {output_path}")
            return output_path
        except OSError as e:
            logging.error(f"Error writing scenario file {output_path}: {str(e)}")
            raise ConfigurationError(f"Cannot write {output_path}: {e}", key="out") from e
