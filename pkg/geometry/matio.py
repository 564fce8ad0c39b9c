# geometry/matio.py
"""
Matrix text format:

    rows cols
    a11 a12 ... a1c
    ...
    ar1 ar2 ... arc

Entries are written with 17 significant digits so a write/read cycle is exact.
"""
from __future__ import annotations

from pathlib import Path
from typing import Union

import numpy as np

from .errors import ShapeError
from .matcore import Mat, as_mat

_DIGITS = 17


def format_matrix(m) -> str:
    a = as_mat(m)
    rows, cols = a.shape
    lines = [f"{rows} {cols}"]
    for row in a:
        lines.append(" ".join(format(float(v), f".{_DIGITS}g") for v in row))
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> Mat:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ShapeError("matrix text is empty")
    head = lines[0].split()
    if len(head) != 2:
        raise ShapeError(f"matrix header must be 'rows cols', got {lines[0]!r}")
    try:
        rows, cols = int(head[0]), int(head[1])
    except ValueError as exc:
        raise ShapeError(f"matrix header must hold two integers, got {lines[0]!r}") from exc
    body = lines[1:]
    if len(body) != rows:
        raise ShapeError(f"expected {rows} rows, found {len(body)}")
    data = []
    for i, ln in enumerate(body):
        vals = ln.split()
        if len(vals) != cols:
            raise ShapeError(f"row {i + 1}: expected {cols} entries, found {len(vals)}")
        try:
            data.append([float(v) for v in vals])
        except ValueError as exc:
            raise ShapeError(f"row {i + 1}: non-numeric entry in {ln!r}") from exc
    return as_mat(np.array(data, dtype=np.float64))


def read_matrix(path: Union[str, Path]) -> Mat:
    return parse_matrix(Path(path).read_text(encoding="utf-8"))


def write_matrix(path: Union[str, Path], m) -> Path:
    p = Path(path)
    p.write_text(format_matrix(m), encoding="utf-8")
    return p
