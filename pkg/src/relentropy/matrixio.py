"""Matrix exchange formats: JSON ``{"dim", "re", "im"}`` and interleaved CSV.

Square matrices carry ``dim``; rectangular ones (contractions) carry
``shape: [rows, cols]`` instead.

Floats are written with 17 significant digits so every float64 value
round-trips bit-exactly.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .errors import ValidationError


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def matrix_to_dict(M) -> dict:
    M = np.asarray(M, dtype=complex)
    head = {"dim": int(M.shape[0])} if M.shape[0] == M.shape[1] else {"shape": [int(d) for d in M.shape]}
    return {
        **head,
        "re": [[float(fmt_float(v)) for v in row] for row in M.real],
        "im": [[float(fmt_float(v)) for v in row] for row in M.imag],
    }


def matrix_from_dict(obj) -> np.ndarray:
    if not isinstance(obj, dict):
        raise ValidationError("matrix JSON must be an object")
    for key in ("re", "im"):
        if key not in obj:
            raise ValidationError(f"matrix JSON is missing field '{key}'")
    if "shape" in obj:
        shape = obj["shape"]
        if not (isinstance(shape, list) and len(shape) == 2
                and all(isinstance(d, int) and d >= 1 for d in shape)):
            raise ValidationError("field 'shape' must be two positive integers")
        shape = tuple(shape)
    elif "dim" in obj:
        n = obj["dim"]
        if not isinstance(n, int) or n < 1:
            raise ValidationError("field 'dim' must be a positive integer")
        shape = (n, n)
    else:
        raise ValidationError("matrix JSON is missing field 'dim'")
    try:
        re = np.array(obj["re"], dtype=float)
        im = np.array(obj["im"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"fields 're'/'im' must be numeric matrices: {exc}") from None
    for name, part in (("re", re), ("im", im)):
        if part.shape != shape:
            raise ValidationError(f"field '{name}' has shape {part.shape}, expected {shape}")
    return re + 1j * im


def dumps_matrix(M) -> str:
    return json.dumps(matrix_to_dict(M))


def loads_matrix(text: str) -> np.ndarray:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON: {exc}") from None
    return matrix_from_dict(obj)


def matrix_to_csv(M) -> str:
    """One line per row: ``re_00, im_00, re_01, im_01, ...``."""
    M = np.asarray(M, dtype=complex)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in M:
        cells = []
        for z in row:
            cells += [fmt_float(z.real), fmt_float(z.imag)]
        w.writerow(cells)
    return buf.getvalue()


def matrix_from_csv(text: str) -> np.ndarray:
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    n = len(rows)
    if n == 0:
        raise ValidationError("empty CSV matrix")
    try:
        vals = np.array([[float(c) for c in r] for r in rows], dtype=float)
    except ValueError as exc:
        raise ValidationError(f"non-numeric CSV cell: {exc}") from None
    if vals.shape != (n, 2 * n):
        raise ValidationError(f"CSV matrix needs {2 * n} interleaved columns per row, got shape {vals.shape}")
    return vals[:, 0::2] + 1j * vals[:, 1::2]


def read_matrix(path) -> np.ndarray:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from None
    if path.suffix.lower() == ".csv":
        return matrix_from_csv(text)
    return loads_matrix(text)


def write_matrix(path, M) -> None:
    path = Path(path)
    if path.suffix.lower() == ".csv":
        path.write_text(matrix_to_csv(M))
    else:
        path.write_text(dumps_matrix(M) + "\n")
