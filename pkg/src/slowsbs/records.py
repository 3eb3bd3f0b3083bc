"""CSV tables and JSON run manifests."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from . import __version__

MANIFEST_SUFFIX = ".manifest.json"


def format_value(value, digits: int = 17) -> str:
    """Scientific notation with ``digits`` significant digits; strings pass through."""
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    x = float(value)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.{digits - 1}e}"


def render_csv(rows: Sequence[Mapping], columns: Sequence[str] | None = None, digits: int = 17) -> bytes:
    """Header plus one LF-terminated line per row; independent of the locale."""
    if not rows:
        raise ValueError("cannot write an empty table")
    columns = list(columns or rows[0].keys())
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row[c], digits) for c in columns])
    return buf.getvalue().encode("ascii")


def write_csv(rows: Sequence[Mapping], destination, columns: Sequence[str] | None = None, digits: int = 17) -> int:
    data = render_csv(rows, columns, digits)
    Path(destination).write_bytes(data)
    return len(data)


def file_sha256(path) -> str:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"missing output file at hash time: {path}")
    return hashlib.sha256(path.read_bytes()).hexdigest()


@dataclass
class RunManifest:
    command: str
    config: dict
    seed: int | None = None
    grid: dict | None = None
    mode: str | None = None
    version: str = __version__
    started: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds"))
    outputs: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def record_outputs(self, paths: Iterable) -> None:
        for path in paths:
            self.outputs[Path(path).name] = file_sha256(path)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2, allow_nan=True) + "\n"


def manifest_path(output) -> Path:
    output = Path(output)
    return output.with_name(output.name + MANIFEST_SUFFIX)


def write_manifest(manifest: RunManifest, destination, outputs: Iterable = ()) -> Path:
    """Hash ``outputs`` into ``manifest`` and write it as sorted-key JSON."""
    manifest.record_outputs(outputs)
    destination = Path(destination)
    tmp = destination.with_name(destination.name + ".tmp")
    tmp.write_text(manifest.to_json(), encoding="ascii")
    os.replace(tmp, destination)
    return destination


def read_csv(source) -> list[dict]:
    """Parse a table written by :func:`write_csv` back into strings (for checks)."""
    with open(source, newline="", encoding="ascii") as fh:
        return list(csv.DictReader(fh))
