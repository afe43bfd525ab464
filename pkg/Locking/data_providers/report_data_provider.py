"""
Report Data Provider Module
Shared base for the report providers: JSON conversion, error dictionaries
and report files.
"""

import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Optional

import pandas as pd

from errors import LockingError

logger = logging.getLogger(__name__)


class ReportDataProvider:
    """Base class turning library results into JSON-ready dicts and report files."""

    def __init__(self, provenance: Optional[dict] = None):
        self.provenance = provenance or {}

    def _convert_to_json_serializable(self, obj):
        """Convert numpy/pandas scalars, fractions, sets and tuples to JSON types."""
        if isinstance(obj, Fraction):
            return str(obj)
        if hasattr(obj, 'item'):  # numpy/pandas scalar
            return obj.item()
        if isinstance(obj, dict):
            return {str(k): self._convert_to_json_serializable(v) for k, v in obj.items()}
        if isinstance(obj, (list, tuple)):
            return [self._convert_to_json_serializable(v) for v in obj]
        if isinstance(obj, (set, frozenset)):
            return sorted(self._convert_to_json_serializable(v) for v in obj)
        return obj

    @staticmethod
    def _error(action: str, exc: Exception) -> dict:
        kind = type(exc).__name__ if isinstance(exc, (LockingError, OSError)) else "LockingError"
        return {"error": f"{action} failed: {exc}", "error_type": kind}

    def write_report(self, output_dir, name: str, payload: dict, frame: Optional[pd.DataFrame] = None,
                     output_format: str = "json") -> Path:
        """
        Write ``payload`` (with provenance) as JSON, or ``frame`` as CSV.

        Returns:
            Path of the written file
        """
        directory = Path(output_dir)
        directory.mkdir(parents=True, exist_ok=True)
        if output_format == "csv" and frame is not None:
            path = directory / f"{name}.csv"
            frame.to_csv(path, index=False)
        else:
            path = directory / f"{name}.json"
            document = {"provenance": self.provenance, **self._convert_to_json_serializable(payload)}
            path.write_text(json.dumps(document, indent=2) + "\n", encoding="utf-8")
        logger.info("Wrote %s", path)
        return path

    def write_text(self, output_dir, filename: str, text: str) -> Path:
        """Write a non-report artifact such as a bench or DIMACS file."""
        directory = Path(output_dir)
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / filename
        path.write_text(text, encoding="utf-8")
        logger.info("Wrote %s", path)
        return path
