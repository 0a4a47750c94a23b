"""Matrix / state JSON format.

A matrix is ``{"rows": r, "cols": c, "data": [[re, im], ...]}`` in row-major
order. A state adds ``"dim_a"`` and ``"dim_b"``; any other keys (``metadata``)
are carried through untouched.
"""

from __future__ import annotations

import json
import math
from typing import Any

import numpy as np

from .tensor import BipartiteState, ToleranceConfig, DEFAULT_TOL


class MatrixFormatError(ValueError):
    pass


def matrix_to_json(m: np.ndarray) -> dict[str, Any]:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise ValueError("expected a 2-d array")
    flat = m.ravel()
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in flat],
    }


def matrix_from_json(obj: dict[str, Any]) -> np.ndarray:
    try:
        rows, cols, data = obj["rows"], obj["cols"], obj["data"]
    except (KeyError, TypeError) as exc:
        raise MatrixFormatError(f"matrix object missing field: {exc}") from None
    if not (isinstance(rows, int) and isinstance(cols, int)) or rows < 1 or cols < 1:
        raise MatrixFormatError("rows and cols must be positive integers")
    if not isinstance(data, list) or len(data) != rows * cols:
        n = len(data) if isinstance(data, list) else "non-list"
        raise MatrixFormatError(f"data has {n} entries, expected rows*cols = {rows * cols}")
    out = np.empty(rows * cols, dtype=complex)
    for idx, entry in enumerate(data):
        r, c = divmod(idx, cols)
        ok = (
            isinstance(entry, (list, tuple))
            and len(entry) == 2
            and all(isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v) for v in entry)
        )
        if not ok:
            raise MatrixFormatError(f"bad entry at row {r}, col {c}: {entry!r}")
        out[idx] = complex(entry[0], entry[1])
    return out.reshape(rows, cols)


def state_to_json(state: BipartiteState, metadata: dict[str, Any] | None = None) -> dict[str, Any]:
    obj = matrix_to_json(state.rho)
    obj["dim_a"] = state.dim_a
    obj["dim_b"] = state.dim_b
    if metadata:
        obj["metadata"] = metadata
    return obj


def state_from_json(obj: dict[str, Any], tol: ToleranceConfig = DEFAULT_TOL) -> BipartiteState:
    rho = matrix_from_json(obj)
    try:
        dim_a, dim_b = int(obj["dim_a"]), int(obj["dim_b"])
    except (KeyError, TypeError, ValueError):
        raise MatrixFormatError("state object needs integer dim_a and dim_b") from None
    return BipartiteState(rho, dim_a, dim_b, tol=tol)


def dumps(obj: Any) -> str:
    """Deterministic serialization used by every CLI command."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False)


def load_state(path: str, tol: ToleranceConfig = DEFAULT_TOL) -> BipartiteState:
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise MatrixFormatError(f"{path}: invalid JSON ({exc})") from None
    return state_from_json(obj, tol)
