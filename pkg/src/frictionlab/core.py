"""Core containers: grids, fields, parameter sets, and initial-data checks.

All types are plain frozen dataclasses holding numpy arrays; they are
immutable after construction and safe to share between threads.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import MeanDefect, NonFinite, RangeViolation

TWO_PI = 2.0 * math.pi


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Uniform 1D mesh, either periodic ('torus') or truncated line ('line').

    Torus grids exclude the right endpoint (periodic identification):
    x_j = left + j*h, h = length/n.  Line grids include both endpoints:
    x_j = left + j*h, h = (right-left)/(n-1).
    """

    kind: str            # 'torus' | 'line'
    n: int
    left: float
    length: float        # torus period, or right-left for a line

    def __post_init__(self):
        if self.kind not in ("torus", "line"):
            raise ValueError(f"unknown grid kind {self.kind!r}")
        if self.n < 8:
            raise ValueError("grid needs at least 8 points")
        if not self.length > 0.0:
            raise ValueError("grid length must be positive")

    @classmethod
    def torus(cls, n: int, length: float = TWO_PI, left: float = 0.0) -> "Grid":
        return cls("torus", n, left, length)

    @classmethod
    def line(cls, left: float, right: float, n: int) -> "Grid":
        return cls("line", n, left, right - left)

    @property
    def right(self) -> float:
        return self.left + self.length

    @property
    def h(self) -> float:
        if self.kind == "torus":
            return self.length / self.n
        return self.length / (self.n - 1)

    @property
    def x(self) -> np.ndarray:
        return self.left + self.h * np.arange(self.n)

    @property
    def is_torus(self) -> bool:
        return self.kind == "torus"

    @property
    def measure(self) -> float:
        """|Omega| of the discretized domain."""
        return self.length

    def quad_weights(self) -> np.ndarray:
        """Quadrature weights: midpoint rule on the torus, trapezoid on a line."""
        if self.kind == "torus":
            return np.full(self.n, self.h)
        w = np.full(self.n, self.h)
        w[0] *= 0.5
        w[-1] *= 0.5
        return w

    def integrate(self, values: np.ndarray) -> float:
        return float(np.dot(self.quad_weights(), values))


@dataclass(frozen=True)
class Field:
    """Real grid function. A field tagged 'density' must be nonnegative."""

    grid: Grid
    values: np.ndarray
    tag: str = ""

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if vals.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} samples, got {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise NonFinite(f"field {self.tag or '<unnamed>'} has non-finite samples")
        if self.tag == "density" and vals.min() < 0.0:
            raise RangeViolation("density field has negative samples")

    def with_values(self, values: np.ndarray) -> "Field":
        return replace(self, values=np.asarray(values, dtype=float))


def mean(f: Field) -> float:
    """Arithmetic sample mean (= midpoint-rule average on a uniform torus)."""
    return float(np.mean(f.values))


@dataclass(frozen=True)
class ParamSet:
    """Physical and numerical parameters shared by the solvers."""

    epsilon: float
    alpha: float
    gamma: float
    mass_level: float
    rho_lower: float
    rho_upper: float
    grid: Grid
    dt_cfl: float = 0.4
    t_end: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must lie in (0,1)")
        if not 0.0 < self.alpha < 2.0:
            raise ValueError("alpha must lie in (0,2)")
        if not self.gamma > 1.0:
            raise ValueError("gamma must exceed 1")
        if not 0.0 < self.rho_lower < self.mass_level < self.rho_upper:
            raise ValueError("need 0 < rho_lower < mass_level < rho_upper")
        if not 0.0 < self.dt_cfl <= 1.0:
            raise ValueError("dt_cfl must lie in (0,1]")
        if self.t_end < 0.0:
            raise ValueError("t_end must be nonnegative")
        if not _is_power_of_two(self.grid.n):
            raise ValueError("grid size must be a power of two")

    def replace(self, **kw) -> "ParamSet":
        return replace(self, **kw)


@dataclass(frozen=True)
class EPState:
    """State of the perturbation system: density rho and velocity component w."""

    rho: Field
    w: Field
    time: float = 0.0


@dataclass(frozen=True)
class KSState:
    """State of the limit system: bacteria/charge density sigma."""

    sigma: Field
    time: float = 0.0


MEAN_DEFECT_TOL = 1e-10  # relative to |Omega|


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of the initial-data checks, with the measured quantities."""

    ok: bool
    rho_min: float
    rho_max: float
    mean_defect: float
    violations: tuple = field(default_factory=tuple)

    def raise_if_failed(self):
        for tag, msg in self.violations:
            if tag == "nonfinite":
                raise NonFinite(msg)
        for tag, msg in self.violations:
            if tag == "range":
                raise RangeViolation(msg)
        for tag, msg in self.violations:
            if tag == "mean":
                raise MeanDefect(msg)


def validate_initial_data(rho0: Field, w0: Field, p: ParamSet) -> ValidationReport:
    """Check the admissibility of (rho0, w0): pointwise band, zero-mean
    perturbation, finiteness.  Returns a report; use raise_if_failed() to
    convert failures into typed errors.
    """
    if rho0.grid != p.grid or w0.grid != p.grid:
        raise ValueError("initial fields must live on the parameter grid")

    violations = []
    finite = np.all(np.isfinite(rho0.values)) and np.all(np.isfinite(w0.values))
    if not finite:
        violations.append(("nonfinite", "initial data has non-finite samples"))

    rho_min = float(rho0.values.min())
    rho_max = float(rho0.values.max())
    if finite and not (p.rho_lower < rho_min and rho_max < p.rho_upper):
        violations.append((
            "range",
            f"rho0 range [{rho_min:.6g}, {rho_max:.6g}] not inside "
            f"({p.rho_lower:.6g}, {p.rho_upper:.6g})",
        ))

    defect = p.grid.integrate(rho0.values - p.mass_level) if finite else math.inf
    if abs(defect) > MEAN_DEFECT_TOL * p.grid.measure:
        violations.append((
            "mean",
            f"perturbation mass defect {defect:.3e} exceeds "
            f"{MEAN_DEFECT_TOL * p.grid.measure:.3e}",
        ))

    return ValidationReport(
        ok=not violations,
        rho_min=rho_min,
        rho_max=rho_max,
        mean_defect=float(defect),
        violations=tuple(violations),
    )
