"""Time integration of the relaxation system in (rho, w) variables.

The system advanced here (torus, conservative continuity + symmetric
momentum form, velocity u = eps*v + eps^alpha*w with v the nonlocal map):

    d(rho)/dtau = -d/dx( rho*w/eps^(1-alpha) + rho*v )
    d(w)/dtau   = -(u/eps) dw/dx - (gamma/eps) rho^(gamma-2) d(rho)/dx
                  - w/eps^2 - eps^(1-alpha) dv/dtau - eps^(-alpha) u dv/dx

The friction term -w/eps^2 is linear and pointwise, so it is applied
exactly through an integrating factor inside a Lawson-transformed
three-stage third-order Runge-Kutta step (stage times 0, 1/3, 2/3): every
exponential factor that appears decays, so the stiff part never limits
the step size.  The transport/pressure terms set the CFL bound.

dv/dtau comes from pushing the continuity flux through the inverse
gradient: on the torus this collapses to -(flux - mean(flux)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import EPState, Field, ParamSet, validate_initial_data
from .diagnostics import DiagnosticsRecord, record_ep
from .errors import CflViolation, NonFinite, RangeBreach, SolverBreakdown
from .ksmap import ks_map_torus
from .spectral import dealias, deriv, inverse_gradient

BLOWUP_THRESHOLD = 1e12


@dataclass(frozen=True)
class EPStepReport:
    dt_used: float
    max_cfl_speed: float
    friction_factor: float   # the exact integrating-factor multiplier e^{-dt/eps^2}
    mass_defect: float


def reconstruct_u(state: EPState, p: ParamSet) -> Field:
    """Physical velocity u = eps*v + eps^alpha * w."""
    v = ks_map_torus(state.rho, p.mass_level).v
    u = p.epsilon * v.values + p.epsilon**p.alpha * state.w.values
    return Field(p.grid, u)


def _rhs(rho: np.ndarray, w: np.ndarray, p: ParamSet):
    """Right side (G_rho, G_w) without the stiff friction term, plus the
    maximum advective and sound speeds for the CFL bound."""
    grid = p.grid
    eps, alpha, gamma, M = p.epsilon, p.alpha, p.gamma, p.mass_level

    source = rho - M
    grad_inv, removed = inverse_gradient(source, grid)
    v = -grad_inv
    dxv = source - removed          # exact spectral derivative of v

    flux = dealias(rho * (w / eps ** (1.0 - alpha) + v), grid)
    g_rho = -deriv(flux, grid)
    dtau_v = -(flux - np.mean(flux))

    u = eps * v + eps**alpha * w
    dxw = deriv(w, grid)
    dxrho = deriv(rho, grid)
    g_w = (-u * dxw / eps
           - (gamma / eps) * rho ** (gamma - 2.0) * dxrho
           - eps ** (1.0 - alpha) * dtau_v
           - eps ** (-alpha) * u * dxv)
    g_w = dealias(g_w, grid)

    adv = float(np.max(np.abs(w))) / eps ** (1.0 - alpha) + float(np.max(np.abs(v)))
    rho_max = float(np.max(rho))
    sound = math.sqrt(gamma * max(rho_max, 0.0) ** (gamma - 1.0)) \
        * eps ** (0.5 * (alpha - 2.0))
    return g_rho, g_w, adv, sound


def stable_dt(state: EPState, p: ParamSet) -> float:
    """CFL-limited step: dt_cfl * h / (advective + sound speed)."""
    eps, alpha = p.epsilon, p.alpha
    v = -inverse_gradient(state.rho.values - p.mass_level, p.grid)[0]
    adv = float(np.max(np.abs(state.w.values))) / eps ** (1.0 - alpha) \
        + float(np.max(np.abs(v)))
    rho_max = float(np.max(state.rho.values))
    sound = math.sqrt(p.gamma * rho_max ** (p.gamma - 1.0)) \
        * eps ** (0.5 * (alpha - 2.0))
    return p.dt_cfl * p.grid.h / (adv + sound)


def step_ep(state: EPState, p: ParamSet, dt: float) -> tuple[EPState, EPStepReport]:
    """One integrating-factor RK3 step of size dt."""
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    grid = p.grid
    eps = p.epsilon
    rho_n, w_n = state.rho.values, state.w.values

    g_rho1, g_w1, adv, sound = _rhs(rho_n, w_n, p)
    speed = max(adv, sound)
    bound = p.dt_cfl * grid.h / speed if speed > 0.0 else math.inf
    if dt > bound * (1.0 + 1e-9):
        raise CflViolation(f"dt = {dt:.3e} exceeds the stability bound {bound:.3e}")

    lam = -1.0 / eps**2
    e1 = math.exp(lam * dt / 3.0)
    e2 = math.exp(2.0 * lam * dt / 3.0)
    e3 = math.exp(lam * dt)

    # stage b at time t + dt/3
    rho_b = rho_n + (dt / 3.0) * g_rho1
    w_b = e1 * (w_n + (dt / 3.0) * g_w1)
    g_rho2, g_w2, _, _ = _rhs(rho_b, w_b, p)

    # stage c at time t + 2dt/3
    rho_c = rho_n + (2.0 * dt / 3.0) * g_rho2
    w_c = e2 * w_n + (2.0 * dt / 3.0) * e1 * g_w2
    g_rho3, g_w3, _, _ = _rhs(rho_c, w_c, p)

    rho_new = rho_n + (dt / 4.0) * (g_rho1 + 3.0 * g_rho3)
    w_new = e3 * w_n + (dt / 4.0) * (e3 * g_w1 + 3.0 * e1 * g_w3)

    if not (np.all(np.isfinite(rho_new)) and np.all(np.isfinite(w_new))) \
            or np.max(np.abs(rho_new)) > BLOWUP_THRESHOLD \
            or np.max(np.abs(w_new)) > BLOWUP_THRESHOLD:
        raise NonFinite(f"solution blew up at tau = {state.time + dt:.6g}")
    lo, hi = 0.5 * p.rho_lower, 2.0 * p.rho_upper
    rmin, rmax = float(rho_new.min()), float(rho_new.max())
    if rmin < lo or rmax > hi:
        raise RangeBreach(
            f"rho range [{rmin:.6g}, {rmax:.6g}] left [{lo:.6g}, {hi:.6g}] "
            f"at tau = {state.time + dt:.6g}")

    mass_defect = grid.h * float(np.sum(rho_new) - np.sum(rho_n))
    new_state = EPState(
        rho=Field(grid, rho_new, tag="density"),
        w=Field(grid, w_new),
        time=state.time + dt,
    )
    report = EPStepReport(dt_used=dt, max_cfl_speed=speed,
                          friction_factor=e3, mass_defect=mass_defect)
    return new_state, report


@dataclass
class SimulationResult:
    """Trajectory samples plus a status flag; errors surface here rather
    than escaping mid-run (the partial trajectory is kept on breakdown)."""

    samples: list                      # [(state, DiagnosticsRecord), ...]
    status: str                        # 'ok' | 'cfl' | 'range_breach' | 'nonfinite' | 'vacuum'
    error: Optional[Exception] = None
    n_steps: int = 0

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def raise_if_failed(self):
        if self.error is not None:
            raise self.error


def _status_of(err: SolverBreakdown) -> str:
    from .errors import VacuumApproach
    if isinstance(err, CflViolation):
        return "cfl"
    if isinstance(err, RangeBreach):
        return "range_breach"
    if isinstance(err, VacuumApproach):
        return "vacuum"
    return "nonfinite"


def simulate_ep(rho0: Field, w0: Field, p: ParamSet,
                sample_times) -> SimulationResult:
    """Drive step_ep with adaptive dt, landing exactly on each sample time."""
    report = validate_initial_data(rho0, w0, p)
    report.raise_if_failed()

    state = EPState(rho=Field(p.grid, rho0.values, tag="density"),
                    w=Field(p.grid, w0.values), time=0.0)
    samples = []
    n_steps = 0
    for target in sorted(sample_times):
        while state.time < target - 1e-12:
            dt = min(stable_dt(state, p), target - state.time)
            try:
                state, _rep = step_ep(state, p, dt)
            except (SolverBreakdown, NonFinite) as err:
                return SimulationResult(samples, _status_of(err) if
                                        isinstance(err, SolverBreakdown)
                                        else "nonfinite", err, n_steps)
            n_steps += 1
        samples.append((state, record_ep(state, p)))
    return SimulationResult(samples, "ok", None, n_steps)
