"""Flat key=value configuration files and deterministic CSV output.

CSV cells use '.' decimals, minimal RFC-4180 quoting, CRLF rows, and
exponent notation for magnitudes below 1e-4, with fixed precision so
identical runs produce byte-identical files.
"""
from __future__ import annotations

import csv
import math
from pathlib import Path

from .core import Grid, ParamSet

GRID_KEYS = ("grid_kind", "grid_n", "grid_length", "grid_left", "grid_right")


def format_number(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        if x == 0.0:
            return "0"
        if not math.isfinite(x):
            return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
        if abs(x) < 1e-4:
            return f"{x:.12e}"
        return f"{x:.12g}"
    return str(x)


def write_csv(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)  # csv defaults: RFC-4180 quoting, CRLF rows
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_number(c) for c in row])
    return path


def _coerce(raw: str):
    raw = raw.strip()
    if "," in raw:
        return tuple(_coerce(part) for part in raw.split(","))
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        pass
    if raw.lower() in ("true", "false"):
        return raw.lower() == "true"
    return raw


def read_config(path) -> dict:
    """Parse `key = value` lines; '#' starts a comment; commas make tuples."""
    cfg = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = stripped.partition("=")
        cfg[key.strip()] = _coerce(value)
    return cfg


DEFAULTS = dict(
    epsilon=0.1, alpha=1.0, gamma=2.0, mass_level=1.0,
    rho_lower=0.25, rho_upper=2.0, dt_cfl=0.4, t_end=1.0,
    grid_kind="torus", grid_n=128, grid_length=2.0 * math.pi,
    grid_left=0.0, grid_right=1.0,
)


def build_params(cfg: dict) -> ParamSet:
    merged = {**DEFAULTS, **cfg}
    if merged["grid_kind"] == "torus":
        grid = Grid.torus(int(merged["grid_n"]),
                          float(merged["grid_length"]),
                          float(merged["grid_left"]))
    else:
        grid = Grid.line(float(merged["grid_left"]),
                         float(merged["grid_right"]),
                         int(merged["grid_n"]))
    return ParamSet(
        epsilon=float(merged["epsilon"]),
        alpha=float(merged["alpha"]),
        gamma=float(merged["gamma"]),
        mass_level=float(merged["mass_level"]),
        rho_lower=float(merged["rho_lower"]),
        rho_upper=float(merged["rho_upper"]),
        grid=grid,
        dt_cfl=float(merged["dt_cfl"]),
        t_end=float(merged["t_end"]),
    )


def profile_args_from(cfg: dict) -> tuple[str, dict]:
    """Extract the profile name and its profile_* parameters."""
    name = cfg.get("profile", "cosine")
    args = {}
    for key, value in cfg.items():
        if key.startswith("profile_"):
            args[key[len("profile_"):]] = value
    return name, args


def read_initial_csv(path, grid):
    """Two-column (x, value) CSV, interpolated onto the grid nodes.

    A non-numeric first row is treated as a header and skipped.
    """
    import numpy as np

    xs, vals = [], []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if len(row) < 2:
                continue
            try:
                x, v = float(row[0]), float(row[1])
            except ValueError:
                continue  # header or comment row
            xs.append(x)
            vals.append(v)
    if len(xs) < 2:
        raise ValueError(f"{path}: need at least two (x, value) rows")
    order = np.argsort(xs)
    xs = np.asarray(xs)[order]
    vals = np.asarray(vals)[order]
    return np.interp(grid.x, xs, vals)
