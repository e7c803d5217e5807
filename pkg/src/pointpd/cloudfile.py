"""Plain-text point cloud files.

One point per line, whitespace-separated decimal coordinates; `#` starts
a comment line; blank lines ignored. The dimension is inferred from the
first data line and every row must match it.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .geometry import PointCloud


class CloudFormatError(ValueError):
    """Malformed cloud file; the message carries the offending line number."""


def parse_cloud(text: str, name: str = "<cloud>") -> PointCloud:
    rows: list[list[float]] = []
    dim: int | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            values = [float(p) for p in parts]
        except ValueError:
            raise CloudFormatError(
                f"{name}:{lineno}: not a number in row {line!r}"
            ) from None
        if any(not math.isfinite(v) for v in values):
            raise CloudFormatError(f"{name}:{lineno}: non-finite coordinate")
        if dim is None:
            dim = len(values)
            if dim == 0:
                raise CloudFormatError(f"{name}:{lineno}: empty coordinate row")
        elif len(values) != dim:
            raise CloudFormatError(
                f"{name}:{lineno}: expected {dim} coordinates, got {len(values)}"
            )
        rows.append(values)
    if not rows:
        raise CloudFormatError(f"{name}: no points found")
    return PointCloud(np.asarray(rows, dtype=np.float64))


def read_cloud(path: str | Path) -> PointCloud:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise CloudFormatError(f"{path}: cannot read file: {exc}") from None
    return parse_cloud(text, name=str(path))


def cloud_to_text(cloud: PointCloud) -> str:
    lines = [" ".join(repr(float(x)) for x in p) for p in cloud.points]
    return "\n".join(lines) + "\n"


def write_cloud(cloud: PointCloud, path: str | Path) -> None:
    Path(path).write_text(cloud_to_text(cloud), newline="\n")
