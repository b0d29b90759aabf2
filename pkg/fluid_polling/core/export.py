"""
Result export in CSV and JSON for Fluid Polling
"""

import csv
import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np

from fluid_polling.utils.config import Config


def _plain(value: Any) -> Any:
    """Convert numpy scalars and arrays to JSON-native values"""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    return value


def _cell(value: Any) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


class ResultExporter:
    """Writes command results to an output directory"""

    def __init__(self, output_dir: Optional[Path] = None):
        """Initialize the exporter

        Args:
            output_dir: Target directory (default: Config.OUTPUT_DIR)
        """
        self.export_dir = Config.ensure_output_dir(output_dir)

    def export_json(self, filename: str, command: str, parameters: Dict[str, Any],
                    seed: Optional[int], results: Dict[str, Any]) -> str:
        """Write one JSON document with the schema header

        Args:
            filename: File name inside the output directory
            command: Command that produced the results
            parameters: Model and run parameters
            seed: Seed of the run, if any
            results: Result payload

        Returns:
            Path to the written file
        """
        document = {
            "schema_version": Config.SCHEMA_VERSION,
            "command": command,
            "parameters": _plain(parameters),
            "seed": seed,
            "results": _plain(results),
        }
        filepath = self.export_dir / filename
        with open(filepath, "w", encoding="utf-8") as f:
            json.dump(document, f, indent=2, default=str)
        return str(filepath)

    def export_csv(self, filename: str, fieldnames: Sequence[str], rows: Iterable[Sequence[Any]],
                   header: Dict[str, Any]) -> str:
        """Write a CSV file preceded by a single '# key=value; ...' comment line

        Returns:
            Path to the written file
        """
        filepath = self.export_dir / filename
        comment = "; ".join(f"{key}={_cell(value)}" for key, value in header.items())
        with open(filepath, "w", newline="", encoding="utf-8") as csvfile:
            csvfile.write(f"# {comment}\n")
            writer = csv.writer(csvfile)
            writer.writerow(list(fieldnames))
            for row in rows:
                writer.writerow([_cell(v) for v in row])
        return str(filepath)

    def export_ecdf(self, filename: str, curve: List[Any], header: Dict[str, Any]) -> str:
        return self.export_csv(filename, ["value", "cumulative_probability"], curve, header)

    def export_lst_grid(self, filename: str, s: Any, values: Any, header: Dict[str, Any]) -> str:
        values = np.asarray(values, dtype=complex)
        rows = [(float(si), float(v.real), float(v.imag)) for si, v in zip(np.asarray(s, dtype=float), values)]
        return self.export_csv(filename, ["s", "re", "im"], rows, header)

    def export_grid(self, filename: str, xs: Any, values: Any, header: Dict[str, Any]) -> str:
        rows = zip(np.asarray(xs, dtype=float).tolist(), np.asarray(values, dtype=float).tolist())
        return self.export_csv(filename, ["x", "value"], rows, header)

    def export_path(self, filename: str, path: np.ndarray, header: Dict[str, Any]) -> str:
        return self.export_csv(filename, ["t", "v1", "v2"], np.asarray(path).tolist(), header)

    def export_comparison(self, filename: str, xs: Any, ecdf: Any, model: Any,
                          header: Dict[str, Any]) -> str:
        rows = zip(*(np.asarray(col, dtype=float).tolist() for col in (xs, ecdf, model)))
        return self.export_csv(filename, ["x", "ecdf", "model_cdf"], rows, header)
