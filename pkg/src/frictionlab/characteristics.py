"""Closed-form characteristic dynamics of the limit system on the line.

Along the trajectory eta(x, tau) starting from label x the density obeys
the logistic law d(sigma)/dtau = -sigma(sigma - M), whose exact solution
and derived quantities drive everything here:

    sigma(eta(x,tau), tau) = M sigma0 / D,   D = sigma0 + (M - sigma0) e^{-M tau}
    v(eta(x,tau), tau)     = e^{-M tau} F(x)
    eta(x, tau)            = x + (1 - e^{-M tau}) F(x) / M
    d(eta)/dx              = D / M
    d(sigma)/dx at eta     = sigma0'(x) M^3 e^{-M tau} / D^3

A vacuum interval [a0, b0] shrinks to length (b0-a0) e^{-M tau}; the
first nontrivial one-sided edge derivative of order k grows like
e^{(k+1) M tau}.  This module doubles as the oracle for the Eulerian
solvers (reconstruction + semi-Lagrangian comparison).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Field, Grid, KSState, ParamSet
from .errors import (InversionFailure, MultipleVacuumIntervals, NoVacuum,
                     PreconditionViolation, UnsupportedOrder)
from .profiles import InitialProfile
from .spectral import trig_interp

TRAJECTORY_HORIZON = 50.0  # beyond tau = 50/M, e^{-M tau} underflows; report limits


def _decay(tau: float, M: float) -> float:
    if math.isinf(tau) or tau > TRAJECTORY_HORIZON / M:
        return 0.0
    return math.exp(-M * tau)


def _match_input(x, result):
    """Return a float for scalar labels, an array otherwise."""
    if np.ndim(x) == 0:
        return float(np.asarray(result))
    return np.asarray(result, dtype=float)


def velocity_along(x, tau: float, prof: InitialProfile, M: float):
    """Flow velocity along the trajectory from label x: e^{-M tau} F(x)."""
    return _match_input(x, _decay(tau, M) * prof.cumulative(x))


def trajectory_position(x, tau: float, prof: InitialProfile, M: float):
    """eta(x, tau) = x + (1 - e^{-M tau}) F(x)/M; tends to x + F(x)/M."""
    e = _decay(tau, M)
    pos = np.asarray(x, dtype=float) + (1.0 - e) * np.asarray(prof.cumulative(x)) / M
    return _match_input(x, pos)


def _denominator(sigma0, tau: float, M: float):
    e = _decay(tau, M)
    return sigma0 + (M - sigma0) * e


def sigma_along(x, tau: float, prof: InitialProfile, M: float):
    """Exact logistic density along the trajectory; identically 0 on vacuum labels."""
    s0 = np.asarray(prof.sigma0(x), dtype=float)
    e = _decay(tau, M)
    if e == 0.0:
        return _match_input(x, np.where(s0 > 0.0, float(M), 0.0))
    return _match_input(x, M * s0 / (s0 + (M - s0) * e))


def dxeta(x, tau: float, prof: InitialProfile, M: float):
    """Trajectory Jacobian d(eta)/dx = D/M > 0 (trajectories never cross)."""
    s0 = np.asarray(prof.sigma0(x), dtype=float)
    return _match_input(x, _denominator(s0, tau, M) / M)


def _vacuum_membership(x: float, prof: InitialProfile):
    """(inside, at_edge) for a scalar label."""
    for (a, b) in prof.vacuum_set:
        if a <= x <= b:
            at_edge = math.isclose(x, a, abs_tol=1e-13) or \
                math.isclose(x, b, abs_tol=1e-13)
            return True, at_edge
    return False, False


def derivative_along(x: float, k: int, tau: float, prof: InitialProfile,
                     M: float) -> float:
    """Spatial derivative of the density observed at eta(x, tau).

    Non-vacuum labels support k = 1 only (closed form sigma0' M^3 e / D^3).
    Vacuum labels obey the growth law e^{(k+1) M tau} d^k(sigma0), valid
    when all lower-order one-sided derivatives vanish at the label.
    """
    if k < 1:
        raise ValueError("derivative order must be >= 1")
    inside, _at_edge = _vacuum_membership(float(x), prof)
    if not inside:
        if k != 1:
            raise UnsupportedOrder(
                "only first derivatives are tracked along non-vacuum trajectories")
        s0 = float(prof.sigma0(np.asarray([x]))[0])
        d1 = float(np.atleast_1d(prof.deriv(x, 1))[0])
        e = _decay(tau, M)
        D = _denominator(s0, tau, M)
        return d1 * M**3 * e / D**3
    # vacuum label
    for j in range(1, k):
        dj = float(np.atleast_1d(prof.deriv(x, j))[0])
        if dj != 0.0:
            raise PreconditionViolation(
                f"order-{j} derivative of the profile is {dj:.3e} != 0 at "
                f"label {x}; the order-{k} law needs all lower orders to vanish")
    dk = float(np.atleast_1d(prof.deriv(x, k))[0])
    if math.isinf(tau):
        return math.inf if dk != 0.0 else 0.0
    return math.exp((k + 1.0) * M * tau) * dk


@dataclass(frozen=True)
class VacuumReport:
    a: float
    b: float
    length: float
    limit_point: float


def vacuum_interval(tau: float, prof: InitialProfile, M: float,
                    which: int | None = None) -> VacuumReport:
    """Edges, exact length (b0-a0) e^{-M tau}, and the common limit point
    a0 + F(a0)/M of a vacuum interval under the flow."""
    if not prof.vacuum_set:
        raise NoVacuum(f"profile {prof.label!r} has no vacuum interval")
    if len(prof.vacuum_set) > 1 and which is None:
        raise MultipleVacuumIntervals(
            f"profile has {len(prof.vacuum_set)} vacuum intervals; pass `which`")
    a0, b0 = prof.vacuum_set[which or 0]
    a = float(trajectory_position(np.asarray([a0]), tau, prof, M)[0])
    b = float(trajectory_position(np.asarray([b0]), tau, prof, M)[0])
    length = (b0 - a0) * _decay(tau, M)
    f_a = float(prof.cumulative(np.asarray([a0]))[0])
    return VacuumReport(a=a, b=b, length=length, limit_point=a0 + f_a / M)


def reconstruct_eulerian(tau: float, prof: InitialProfile, M: float,
                         grid: Grid) -> KSState:
    """Eulerian density at time tau by monotone inversion of the
    trajectory map (vectorized bisection in label space)."""
    y = grid.x
    c = prof.max_abs_F / M + 1.0
    lo = y - c
    hi = y + c
    eta_lo = trajectory_position(lo, tau, prof, M)
    eta_hi = trajectory_position(hi, tau, prof, M)
    if np.any(eta_lo > y) or np.any(eta_hi < y):
        raise InversionFailure("bracket does not contain the target positions")
    for _ in range(90):
        mid = 0.5 * (lo + hi)
        above = trajectory_position(mid, tau, prof, M) > y
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
        if np.max(hi - lo) < 1e-14:
            break
    labels = 0.5 * (lo + hi)
    if np.any(np.diff(labels) < -1e-9):
        raise InversionFailure("sampled trajectory map is not monotone")
    sig = np.maximum(sigma_along(labels, tau, prof, M), 0.0)
    return KSState(sigma=Field(grid, sig, tag="density"), time=tau)


@dataclass(frozen=True)
class TrajectoryBundle:
    """A set of Lagrangian labels with the closed-form trajectory maps."""

    labels: np.ndarray
    prof: InitialProfile
    M: float

    def __post_init__(self):
        lab = np.sort(np.asarray(self.labels, dtype=float))
        object.__setattr__(self, "labels", lab)

    def eta(self, tau: float) -> np.ndarray:
        return trajectory_position(self.labels, tau, self.prof, self.M)

    def sigma_along(self, tau: float) -> np.ndarray:
        return sigma_along(self.labels, tau, self.prof, self.M)

    def dxeta(self, tau: float) -> np.ndarray:
        return dxeta(self.labels, tau, self.prof, self.M)

    def velocity(self, tau: float) -> np.ndarray:
        return velocity_along(self.labels, tau, self.prof, self.M)

    def csv_rows(self, taus) -> list:
        rows = []
        for tau in taus:
            eta = self.eta(tau)
            sig = self.sigma_along(tau)
            jac = self.dxeta(tau)
            vel = self.velocity(tau)
            for i, x in enumerate(self.labels):
                rows.append([x, tau, eta[i], sig[i], jac[i], vel[i]])
        return rows


@dataclass(frozen=True)
class OracleComparison:
    """Pointwise gaps between an Eulerian run and the exact logistic values
    carried along numerically integrated marker trajectories."""

    max_gap: float
    gaps: np.ndarray
    positions: np.ndarray
    sigma_markers: np.ndarray
    final_state: KSState
    dt: float


def semi_lagrangian_oracle(state: KSState, p: ParamSet, tau_end: float,
                           n_steps: int | None = None) -> OracleComparison:
    """Advect markers with RK4 through the velocity fields of an Eulerian
    run while advancing their densities by the exact logistic map, then
    compare against the Eulerian field at the marker positions.

    Marker steps span two Eulerian steps so the RK4 midpoint velocity is
    available without interpolation in time.
    """
    from .keller_segel import step_ks  # deferred to avoid an import cycle
    from .ksmap import ks_map_torus

    grid = state.sigma.grid
    M = p.mass_level
    if n_steps is None:
        vmax = float(np.max(np.abs(ks_map_torus(state.sigma, M).v.values)))
        bound = 0.9 * p.dt_cfl * grid.h / vmax if vmax > 0.0 else math.inf
        dt = min(bound, 0.1 / M)
        n_steps = max(2, 2 * math.ceil(tau_end / (2.0 * dt)))
    if n_steps % 2:
        n_steps += 1
    dt = tau_end / n_steps

    markers = grid.x.copy()
    sigma_m = state.sigma.values.copy()
    current = state
    length = grid.length

    def vel(field_vals, pos):
        return trig_interp(field_vals, grid, pos)

    for _ in range(n_steps // 2):
        v0 = ks_map_torus(current.sigma, M).v.values
        mid, _ = step_ks(current, p, dt)
        v1 = ks_map_torus(mid.sigma, M).v.values
        nxt, _ = step_ks(mid, p, dt)
        v2 = ks_map_torus(nxt.sigma, M).v.values
        h = 2.0 * dt
        k1 = vel(v0, markers)
        k2 = vel(v1, markers + 0.5 * h * k1)
        k3 = vel(v1, markers + 0.5 * h * k2)
        k4 = vel(v2, markers + h * k3)
        markers = markers + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        # exact logistic update over the pair of steps
        e = math.exp(-M * h)
        sigma_m = M * sigma_m / (sigma_m + (M - sigma_m) * e)
        current = nxt

    # fold marker positions back into the periodic cell for interpolation
    folded = grid.left + np.mod(markers - grid.left, length)
    eulerian_at_markers = trig_interp(current.sigma.values, grid, folded)
    gaps = eulerian_at_markers - sigma_m
    return OracleComparison(
        max_gap=float(np.max(np.abs(gaps))),
        gaps=gaps,
        positions=folded,
        sigma_markers=sigma_m,
        final_state=current,
        dt=dt,
    )
