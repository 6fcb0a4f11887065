"""
Atomic CSV and JSON writers for result records.

Complex numbers are split into paired <name>_re / <name>_im columns before a record is
built; files are written to a temporary sibling and renamed into place.
"""

import csv
import io
import json
import logging
import math
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional

import numpy as np

from j1j2bench.models.schemas import CheckResult, ResultRecord

logger = logging.getLogger(__name__)


def split_complex(name: str, values: Iterable[complex]) -> Dict[str, List[float]]:
    """Paired real and imaginary columns."""
    values = [complex(v) for v in values]
    return {f"{name}_re": [v.real for v in values], f"{name}_im": [v.imag for v in values]}


def to_plain(value: Any) -> Any:
    """numpy scalars and arrays to JSON-compatible Python values; NaN and inf to None."""
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [to_plain(v) for v in value]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, (complex, np.complexfloating)):
        return [to_plain(value.real), to_plain(value.imag)]
    return value


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def atomic_write(path: Path, text: str) -> None:
    """Write text to path via a temporary file in the same directory."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with tempfile.NamedTemporaryFile(
        "w", dir=path.parent, prefix=f".{path.name}.", suffix=".tmp", delete=False, encoding="utf-8", newline=""
    ) as handle:
        handle.write(text)
        tmp = handle.name
    try:
        os.replace(tmp, path)
    except OSError:
        os.unlink(tmp)
        raise


def csv_text(columns: Dict[str, List[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    names = list(columns)
    writer.writerow(names)
    length = len(next(iter(columns.values()))) if columns else 0
    for i in range(length):
        writer.writerow([_cell(to_plain(columns[name][i])) for name in names])
    return buffer.getvalue()


def json_text(record: ResultRecord) -> str:
    payload = to_plain(record.model_dump(mode="python"))
    return json.dumps(payload, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_record(record: ResultRecord, output_dir: str, fmt: str = "both") -> List[Path]:
    """
    Write a record as <stem>.csv (columns, when present) and <stem>.json.

    The stem is the reproduce target or the command name.

    Returns:
        Paths written, CSV first
    """
    stem = record.target or record.command
    base = Path(output_dir)
    written: List[Path] = []
    if fmt in ("csv", "both") and record.columns:
        path = base / f"{stem}.csv"
        atomic_write(path, csv_text(record.columns))
        written.append(path)
    if fmt in ("json", "both"):
        path = base / f"{stem}.json"
        atomic_write(path, json_text(record))
        written.append(path)
    logger.info(f"Wrote {', '.join(str(p) for p in written)}")
    return written


class RecordBuilder:
    """Collects labeled columns, scalars and checks into a ResultRecord."""

    def __init__(self, command: str, inputs: Dict[str, Any], target: Optional[str] = None):
        self.command = command
        self.target = target
        self.inputs = to_plain(inputs)
        self.columns: Dict[str, List[Any]] = {}
        self.scalars: Dict[str, Any] = {}
        self.provenance: Dict[str, str] = {}
        self.checks: Dict[str, CheckResult] = {}

    def column(self, name: str, values: Iterable[Any], source: str) -> "RecordBuilder":
        values = list(values)
        if values and isinstance(values[0], (complex, np.complexfloating)):
            for key, part in split_complex(name, values).items():
                self.columns[key] = part
                self.provenance[key] = source
        else:
            self.columns[name] = to_plain(values)
            self.provenance[name] = source
        return self

    def scalar(self, name: str, value: Any, source: str) -> "RecordBuilder":
        self.scalars[name] = to_plain(value)
        self.provenance[name] = source
        return self

    def check(self, name: str, value: float, tolerance: float, passed: bool) -> "RecordBuilder":
        value = float(value)
        self.checks[name] = CheckResult(
            value=value if math.isfinite(value) else float("nan"),
            tolerance=float(tolerance),
            passed=bool(passed) and math.isfinite(value),
        )
        return self

    def build(self) -> ResultRecord:
        return ResultRecord(
            command=self.command,
            target=self.target,
            inputs=self.inputs,
            columns=self.columns,
            scalars=self.scalars,
            provenance=self.provenance,
            checks=self.checks,
        )
