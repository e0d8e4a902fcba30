"""
Artifact service for the Semiannulus Regularity Toolkit.
Serializes task outputs to deterministic JSON and CSV.
"""

import csv
import io
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from app.models.scenario import OutputFormat

logger = logging.getLogger(__name__)

ARTIFACT_SCHEMA_VERSION = 1


def to_plain(value: Any) -> Any:
    """
    Convert a value to JSON-ready data.

    Non-finite floats become None, complex numbers [re, im], numpy scalars
    Python scalars and tuples lists.
    """
    if isinstance(value, dict):
        return {str(key): to_plain(val) for key, val in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(item) for item in value]
    if isinstance(value, np.ndarray):
        return [to_plain(item) for item in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, (complex, np.complexfloating)):
        return [to_plain(value.real), to_plain(value.imag)]
    if hasattr(value, "value") and isinstance(getattr(value, "value"), str):
        return value.value
    return value


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, list):
        return json.dumps(value)
    return str(value)


class ArtifactService:
    """
    Service class for run artifacts.
    Provides the JSON and CSV renderings and the file writer.
    """

    @staticmethod
    def render_json(header: Dict[str, Any], body: Dict[str, Any], warnings: Sequence[str],
                    error: Optional[Dict[str, Any]] = None) -> str:
        """
        JSON artifact {schema, tool, version, config, result, warnings, error}.

        Keys are sorted and there are no timestamps, so equal runs render equal text.
        """
        document = dict(header)
        document["schema"] = ARTIFACT_SCHEMA_VERSION
        document["result"] = body
        document["warnings"] = list(warnings)
        document["error"] = error
        return json.dumps(to_plain(document), indent=2, sort_keys=True, allow_nan=False) + "\n"

    @staticmethod
    def render_csv(header: Dict[str, Any], rows: List[Dict[str, Any]], warnings: Sequence[str],
                   error: Optional[Dict[str, Any]] = None) -> str:
        """
        CSV artifact: comment lines carrying the header, warnings and error, then the rows.

        Columns are the union of the row keys in first-seen order.
        """
        buffer = io.StringIO()
        meta = dict(header)
        meta["schema"] = ARTIFACT_SCHEMA_VERSION
        buffer.write("# " + json.dumps(to_plain(meta), sort_keys=True, allow_nan=False) + "\n")
        for message in warnings:
            buffer.write(f"# warning: {message}\n")
        if error is not None:
            buffer.write("# error: " + json.dumps(to_plain(error), sort_keys=True) + "\n")
        plain_rows = [to_plain(row) for row in rows]
        columns = list(dict.fromkeys(key for row in plain_rows for key in row))
        if columns:
            writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n")
            writer.writeheader()
            for row in plain_rows:
                writer.writerow({key: _cell(row.get(key)) for key in columns})
        return buffer.getvalue()

    @staticmethod
    def render(fmt: OutputFormat, header: Dict[str, Any], body: Dict[str, Any], rows: List[Dict[str, Any]],
               warnings: Sequence[str], error: Optional[Dict[str, Any]] = None) -> str:
        if fmt is OutputFormat.CSV:
            return ArtifactService.render_csv(header, rows, warnings, error)
        return ArtifactService.render_json(header, body, warnings, error)

    @staticmethod
    def write(text: str, path: Optional[str]) -> None:
        """Write an artifact to a file, or to stdout when path is None."""
        if path is None:
            print(text, end="")
            return
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text)
        logger.info("wrote %s", target)
