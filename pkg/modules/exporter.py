"""
Dataset Exporter Module
Writes sweep results as CSV or styled XLSX and formats single-scenario reports.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np
import openpyxl
from openpyxl.styles import Alignment, Font, PatternFill
from openpyxl.utils import get_column_letter

from modules.core.config_manager import ConfigManager
from modules.core.errors import ConfigurationError
from modules.core.sweep import SweepResult
from modules.core.witnesses import WitnessReport


class DatasetExporter:
    """Handles dataset and report output"""

    def __init__(self, config_dir: Optional[str] = None):
        """Initialize the exporter from the ``output`` section of the engine config"""
        self.output_config = ConfigManager.get_engine_config(config_dir).get("output", {})
        self.csv_digits = int(self.output_config.get("csv_significant_digits", 9))
        self.report_digits = int(self.output_config.get("report_significant_digits", 12))

    def write(self, result: SweepResult, path: str) -> Path:
        """Write ``result`` as XLSX when the path ends in .xlsx, CSV otherwise"""
        output_path = Path(path)
        if output_path.suffix.lower() == ".xlsx":
            return self.write_xlsx(result, output_path)
        return self.write_csv(result, output_path)

    def write_csv(self, result: SweepResult, path: str) -> Path:
        """
        Write a CSV with a header row (axis labels, then witness columns)

        Args:
            result: Sweep result to write
            path: Destination file

        Returns:
            Path of the written file
        """
        output_path = Path(path)
        try:
            output_path.parent.mkdir(parents=True, exist_ok=True)
            result.frame.to_csv(
                output_path,
                index=False,
                float_format=f"%.{self.csv_digits}g",
                na_rep="nan",
                lineterminator="\n",
            )
            logging.info(f"Created dataset: {output_path} ({len(result)} rows)")
            return output_path
        except OSError as e:
            logging.error(f"Error writing dataset {output_path}: {str(e)}")
            raise ConfigurationError(f"Cannot write {output_path}: {e}", key="out") from e

    def write_xlsx(self, result: SweepResult, path: str) -> Path:
        """Write the dataset to a styled worksheet plus a metadata worksheet"""
        output_path = Path(path)
        style = self.output_config.get("header_style", {})
        try:
            output_path.parent.mkdir(parents=True, exist_ok=True)
            wb = openpyxl.Workbook()
            ws = wb.active
            ws.title = self.output_config.get("worksheet_title", "Dataset")

            header_alignment = Alignment(
                horizontal=style.get("horizontal", "center"),
                vertical=style.get("vertical", "center"),
            )
            for col_idx, name in enumerate(result.frame.columns, 1):
                cell = ws.cell(1, col_idx, str(name))
                cell.font = Font(bold=True, color=style.get("font_color", "00FFFFFF"))
                cell.fill = PatternFill(
                    start_color=style.get("bg_color", "004F81BD"),
                    end_color=style.get("bg_color", "004F81BD"),
                    fill_type="solid",
                )
                cell.alignment = header_alignment
                ws.column_dimensions[get_column_letter(col_idx)].width = style.get("width", 16)
            ws.freeze_panes = "A2"

            for row in result.frame.itertuples(index=False):
                ws.append([self._rounded(value) for value in row])

            meta = wb.create_sheet(self.output_config.get("metadata_title", "Metadata"))
            for key, value in result.metadata.items():
                meta.append([key, json.dumps(value, sort_keys=True)])

            wb.save(str(output_path))
            logging.info(f"Created workbook: {output_path} ({len(result)} rows)")
            return output_path
        except OSError as e:
            logging.error(f"Error writing workbook {output_path}: {str(e)}")
            raise ConfigurationError(f"Cannot write {output_path}: {e}", key="out") from e

    def _rounded(self, value: Any) -> Any:
        value = float(value)
        if not np.isfinite(value):
            return None
        return float(f"{value:.{self.csv_digits}g}")

    def format_number(self, value: float) -> str:
        """Fixed-point with ``report_digits`` decimals; scientific for very small or large values"""
        if value is None:
            return "n/a"
        magnitude = abs(value)
        if value == 0 or 1e-4 <= magnitude < 1e12:
            return f"{value:.{self.report_digits}f}"
        return f"{value:.{self.report_digits}e}"

    def format_report(self, report: WitnessReport) -> str:
        """Structured text: moments table, then one line per witness with its flag"""
        lines = []
        if report.scenario:
            lines.append("scenario: " + json.dumps(report.scenario, sort_keys=True))
        if report.moments is not None:
            lines.append("moments <:W1^a W2^b:>")
            m = report.moments
            for a in range(m.order + 1):
                for b in range(m.order + 1 - a):
                    lines.append(f"  m[{a},{b}] = {self.format_number(m[a, b])}")
        values: Dict[str, Optional[float]] = {
            "R1": report.R1,
            "R2": report.R2,
            "M": report.M,
            "f": report.f,
            "ent": report.ent_indicator,
        }
        flags = report.flags
        for name, value in values.items():
            if value is None:
                continue
            line = f"{name} = {self.format_number(value)}"
            if name in flags:
                line += "  (nonclassical)" if flags[name] else "  (classical)"
            elif name == "ent" and report.ent_valid is not None:
                line += "  (valid)" if report.ent_valid else "  (R values not all negative)"
            lines.append(line)
        return "\n".join(lines)
