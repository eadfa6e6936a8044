"""Bit-exact tabular serialization for the command-line pipelines.

CSV files carry a mandatory header row, '.'-decimal floats printed with 17
significant digits (lossless float64 round-trip), LF line endings, and no
timestamps.  JSON summaries are UTF-8 with keys in the documented order.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import InvalidInputError
from .geometry import MongePatch

_REL_SPACING_TOL = 1e-9


def fmt(value) -> str:
    """Shortest exact decimal form of a float (17 significant digits)."""
    return format(float(value), ".17g")


def write_csv(path, header: list[str], columns: list[np.ndarray]) -> None:
    """Write named columns as CSV; all columns must share one length."""
    lengths = {len(c) for c in columns}
    if len(columns) != len(header) or (columns and len(lengths) != 1):
        raise InvalidInputError("CSV columns must match the header and share one length")
    lines = [",".join(header)]
    if columns:
        for row in zip(*columns):
            lines.append(",".join(fmt(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_csv_columns(path, required: list[str]) -> dict[str, np.ndarray]:
    """Parse a headered CSV into float columns.

    Raises
    ------
    InvalidInputError
        Naming the missing column, or the line number of the first
        malformed row.
    """
    path = Path(path)
    if not path.is_file():
        raise InvalidInputError(f"input file not found: {path}")
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise InvalidInputError(f"{path}: empty file")
    header = [name.strip() for name in lines[0].split(",")]
    for name in required:
        if name not in header:
            raise InvalidInputError(f"{path}: missing column '{name}'")
    data = {name: [] for name in header}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != len(header):
            raise InvalidInputError(
                f"{path}: line {lineno}: expected {len(header)} fields, got {len(parts)}")
        for name, part in zip(header, parts):
            try:
                data[name].append(float(part))
            except ValueError as exc:
                raise InvalidInputError(
                    f"{path}: line {lineno}: cannot parse '{part.strip()}' in column '{name}'"
                ) from exc
    return {name: np.asarray(vals, dtype=float) for name, vals in data.items()}


def write_patch_csv(path, patch: MongePatch) -> None:
    """Write a patch as (x, y, z) rows over the complete lattice."""
    X, Y = patch.meshgrid()
    write_csv(path, ["x", "y", "z"], [X.ravel(), Y.ravel(), patch.z.ravel()])


def _axis_from_values(values: np.ndarray, name: str, path) -> tuple[np.ndarray, float]:
    axis = np.unique(values)
    if axis.size < 2:
        raise InvalidInputError(f"{path}: {name} axis needs at least 2 distinct values")
    steps = np.diff(axis)
    h = (axis[-1] - axis[0]) / (axis.size - 1)
    if np.max(np.abs(steps - h)) > _REL_SPACING_TOL * max(abs(h), 1.0):
        raise InvalidInputError(f"{path}: {name} axis is not uniformly spaced")
    return axis, float(h)


def read_patch_csv(path) -> MongePatch:
    """Parse (x, y, z) rows into a patch, validating lattice completeness."""
    cols = read_csv_columns(path, ["x", "y", "z"])
    x, y, z = cols["x"], cols["y"], cols["z"]
    xs, hx = _axis_from_values(x, "x", path)
    ys, hy = _axis_from_values(y, "y", path)
    if x.size != xs.size * ys.size:
        raise InvalidInputError(
            f"{path}: expected a complete {xs.size}x{ys.size} lattice "
            f"({xs.size * ys.size} rows), got {x.size} rows")
    zgrid = np.full((xs.size, ys.size), np.nan)
    i = np.searchsorted(xs, x)
    j = np.searchsorted(ys, y)
    zgrid[i, j] = z
    if not np.all(np.isfinite(zgrid)):
        raise InvalidInputError(f"{path}: lattice has missing or non-finite (x, y) nodes")
    return MongePatch(x0=float(xs[0]), hx=hx, y0=float(ys[0]), hy=hy, z=zgrid)


def write_json(path, payload: dict) -> None:
    """Write a JSON summary; insertion order of keys is preserved."""
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def json_ready(value):
    """Recursively convert numpy scalars/arrays for JSON output."""
    if isinstance(value, dict):
        return {k: json_ready(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_ready(v) for v in value]
    if isinstance(value, np.ndarray):
        return [json_ready(v) for v in value.tolist()]
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    return value
