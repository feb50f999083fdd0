"""Monitored quantities: energies, dissipations, norms, and rate fits.

The energy splits into a zeroth-order part (kinetic + relative pressure)
and a higher-order part built from spatial derivatives up to a cap
(default 2 in 1D).  The relative pressure bracket
rho^gamma - M^gamma - gamma M^(gamma-1) (rho - M) is a Bregman divergence
of the convex function rho^gamma, hence nonnegative for rho > 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import EPState, Field, KSState, ParamSet
from .errors import InsufficientSamples, NonPositiveSample
from .spectral import deriv

DERIV_CAP = 2  # 1D default derivative cap for the high-order functionals


def _grad(values: np.ndarray, grid) -> np.ndarray:
    if grid.is_torus:
        return deriv(values, grid)
    return np.gradient(values, grid.h)


def pressure_bracket(rho: np.ndarray, gamma: float, M: float) -> np.ndarray:
    return rho**gamma - M**gamma - gamma * M ** (gamma - 1.0) * (rho - M)


def energy_e0(state: EPState, p: ParamSet) -> float:
    """Zeroth-order energy: (eps^alpha/2) ∫ rho w^2 + (1/(gamma-1)) ∫ bracket."""
    grid = p.grid
    rho, w = state.rho.values, state.w.values
    kinetic = 0.5 * p.epsilon**p.alpha * grid.integrate(rho * w * w)
    internal = grid.integrate(pressure_bracket(rho, p.gamma, p.mass_level)) / (p.gamma - 1.0)
    return float(kinetic + internal)


def energy_e1(state: EPState, p: ParamSet, max_order: int = DERIV_CAP) -> float:
    """Higher-order energy: sum over 1 <= j <= max_order of
    (eps^alpha/2) ∫ rho (d^j w)^2 + (gamma/2) ∫ rho^(gamma-2) (d^j rho)^2.
    """
    grid = p.grid
    rho, w = state.rho.values, state.w.values
    weight = rho ** (p.gamma - 2.0)
    total = 0.0
    for j in range(1, max_order + 1):
        dw = deriv(w, grid, j)
        dr = deriv(rho, grid, j)
        total += 0.5 * p.epsilon**p.alpha * grid.integrate(rho * dw * dw)
        total += 0.5 * p.gamma * grid.integrate(weight * dr * dr)
    return float(total)


def dissipation_d0(state: EPState, p: ParamSet) -> float:
    grid = p.grid
    dev = state.rho.values - p.mass_level
    w = state.w.values
    return float(p.epsilon ** (p.alpha - 2.0) * grid.integrate(w * w)
                 + grid.integrate(dev * dev))


def dissipation_d1(state: EPState, p: ParamSet, max_order: int = DERIV_CAP) -> float:
    grid = p.grid
    rho, w = state.rho.values, state.w.values
    weight = rho ** (p.gamma - 1.0)
    total = 0.0
    for j in range(1, max_order + 1):
        dw = deriv(w, grid, j)
        dr = deriv(rho, grid, j)
        total += p.epsilon ** (p.alpha - 2.0) * grid.integrate(rho * dw * dw)
        total += p.gamma * grid.integrate(weight * dr * dr)
    return float(total)


def dissipation_total(state: EPState, p: ParamSet, max_order: int = DERIV_CAP) -> float:
    return dissipation_d0(state, p) + dissipation_d1(state, p, max_order)


def coercivity_constant(p: ParamSet, rho_min: float, rho_max: float) -> float:
    """Lower-bound constant c with e0 >= c (eps^alpha ||w||^2 + ||rho-M||^2),
    computed from the measured density range of a run.
    """
    c_w = 0.5 * rho_min
    m = min(rho_min, p.mass_level) if p.gamma >= 2.0 else max(rho_max, p.mass_level)
    c_rho = 0.5 * p.gamma * m ** (p.gamma - 2.0)
    return float(min(c_w, c_rho))


def norms(f: Field) -> dict:
    """l2, sup, l4 of the gradient, and h1/h2/h3 (squared-sum convention)."""
    grid = f.grid
    vals = f.values
    out = {
        "l2": math.sqrt(max(grid.integrate(vals * vals), 0.0)),
        "sup": float(np.max(np.abs(vals))),
    }
    g = _grad(vals, grid)
    out["l4_of_gradient"] = grid.integrate(g**4) ** 0.25
    if grid.is_torus:
        sq = grid.integrate(vals * vals)
        for j in range(1, 4):
            d = deriv(vals, grid, j)
            sq += grid.integrate(d * d)
            out[f"h{j}"] = math.sqrt(max(sq, 0.0))
    else:
        # line fields only need the low-order entries; higher derivatives
        # by repeated second-order differencing
        sq = grid.integrate(vals * vals)
        d = vals
        for j in range(1, 4):
            d = np.gradient(d, grid.h)
            sq += grid.integrate(d * d)
            out[f"h{j}"] = math.sqrt(max(sq, 0.0))
    return out


def fit_exponential_rate(series, window) -> tuple[float, float]:
    """Least-squares fit of log(y) vs tau on the window; returns (rate, r2)
    with rate = -slope.  Requires >= 5 strictly positive samples inside.
    """
    t1, t2 = window
    pts = [(t, y) for (t, y) in series if t1 <= t <= t2]
    if len(pts) < 5:
        raise InsufficientSamples(
            f"need >= 5 samples in [{t1}, {t2}], found {len(pts)}")
    taus = np.array([t for t, _ in pts])
    ys = np.array([y for _, y in pts])
    if np.any(ys <= 0.0):
        raise NonPositiveSample("rate fit requires y > 0 on the window")
    logy = np.log(ys)
    slope, intercept = np.polyfit(taus, logy, 1)
    fitted = slope * taus + intercept
    ss_res = float(np.sum((logy - fitted) ** 2))
    ss_tot = float(np.sum((logy - logy.mean()) ** 2))
    r2 = 1.0 if ss_tot < 1e-300 else 1.0 - ss_res / ss_tot
    return float(-slope), float(r2)


@dataclass(frozen=True)
class DiagnosticsRecord:
    """One sampled row of the monitored quantities."""

    tau: float
    e0: float
    e1: float
    e_total: float
    d0: float
    d1: float
    d_total: float
    sup_dev: float
    l2_dev: float
    h2_dev: float
    grad_l4: float
    w_l2: float
    mass: float
    rho_min: float
    rho_max: float

    CSV_COLUMNS = ("tau", "sup_dev", "l2_dev", "grad_l4", "w_l2",
                   "e_total", "d_total", "mass_defect", "rho_min", "rho_max")

    def csv_row(self, mass0: float) -> list:
        return [self.tau, self.sup_dev, self.l2_dev, self.grad_l4, self.w_l2,
                self.e_total, self.d_total, self.mass - mass0,
                self.rho_min, self.rho_max]


def record_ep(state: EPState, p: ParamSet, max_order: int = DERIV_CAP) -> DiagnosticsRecord:
    grid = p.grid
    dev = Field(grid, state.rho.values - p.mass_level)
    nrm = norms(dev)
    e0 = energy_e0(state, p)
    e1 = energy_e1(state, p, max_order)
    d0 = dissipation_d0(state, p)
    d1 = dissipation_d1(state, p, max_order)
    w_sc = p.epsilon ** (0.5 * p.alpha) * state.w.values
    w_l2 = math.sqrt(max(grid.integrate(w_sc * w_sc), 0.0))
    return DiagnosticsRecord(
        tau=state.time, e0=e0, e1=e1, e_total=e0 + e1,
        d0=d0, d1=d1, d_total=d0 + d1,
        sup_dev=nrm["sup"], l2_dev=nrm["l2"], h2_dev=nrm["h2"],
        grad_l4=norms(state.rho)["l4_of_gradient"],
        w_l2=w_l2,
        mass=grid.integrate(state.rho.values),
        rho_min=float(state.rho.values.min()),
        rho_max=float(state.rho.values.max()),
    )


def record_ks(state: KSState, p: ParamSet, max_order: int = DERIV_CAP) -> DiagnosticsRecord:
    zero_w = Field(state.sigma.grid, np.zeros(state.sigma.grid.n))
    ep_view = EPState(rho=state.sigma, w=zero_w, time=state.time)
    rec = record_ep(ep_view, p, max_order)
    return rec
