"""Matrix CSV format.

The first line is ``# rows cols``; each following line holds one row of
comma-separated decimals written with ``repr`` so values round-trip exactly.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .errors import InputError
from .linalg import as_matrix


def format_matrix(m) -> str:
    m = as_matrix(m)
    lines = [f"# {m.shape[0]} {m.shape[1]}"]
    lines.extend(",".join(repr(float(v)) for v in row) for row in m)
    return "\n".join(lines) + "\n"


def parse_matrix(text: str, source: str = "<string>") -> np.ndarray:
    lines = [ln.strip() for ln in text.splitlines()]
    while lines and not lines[-1]:
        lines.pop()
    if not lines or not lines[0].startswith("#"):
        raise InputError(f"{source}: missing '# rows cols' header")
    header = lines[0][1:].split()
    try:
        rows, cols = (int(v) for v in header)
    except ValueError:
        raise InputError(f"{source}: malformed header {lines[0]!r}") from None
    if rows < 1 or cols < 1:
        raise InputError(f"{source}: shape must be positive, got {rows}x{cols}")
    body = lines[1:]
    if len(body) != rows:
        raise InputError(f"{source}: header declares {rows} rows, found {len(body)}")
    out = np.empty((rows, cols))
    for i, line in enumerate(body):
        fields = line.split(",")
        if len(fields) != cols:
            raise InputError(f"{source}: row {i + 1} has {len(fields)} values, expected {cols}")
        try:
            out[i] = [float(v) for v in fields]
        except ValueError:
            raise InputError(f"{source}: row {i + 1} has a non-numeric value") from None
        if not all(math.isfinite(v) for v in out[i]):
            raise InputError(f"{source}: row {i + 1} has a non-finite value")
    return out


def read_matrix(path) -> np.ndarray:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None
    return parse_matrix(text, str(path))


def write_matrix(path, m) -> None:
    Path(path).write_text(format_matrix(m))
