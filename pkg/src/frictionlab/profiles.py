"""Named analytic initial profiles.

Exact definitions (x is the spatial coordinate, M the background level):

* ``equilibrium``: sigma0(x) = M.

* ``cosine(amp, k)``: sigma0(x) = M + amp*cos(k*x) on the torus.

* ``bump(amp, radius, center)``: sigma0 = M + G'(x) with
  G(x) = amp*radius * u*(1-u^2)^3, u = (x-center)/radius, supported on
  |u| <= 1.  G is odd about the center, so the deviation has zero mean
  and the cumulative integral F(x) = G(x) in closed form.  Works on the
  torus and on the line (deviation compactly supported).

* ``vacuum-ramp(width, F0, touch)``: vacuum on [0,1]; on each side the
  density climbs to M over a ramp of the given width using
  s_k(t) = (k+1)t^k - k t^(k+1) (touch order k at the vacuum edge,
  C^1 at the plateau end); quartic bumps h*(1-u^2)^2 on the outer
  plateaus tune the cumulative integral so that F(0) = F0 and
  F(+inf) = 0.  One-sided edge derivatives are
  d^j sigma0(0-) = M*(+-1/width)^j * s_k^(j)(0), with s_k^(j)(0) = 0 for
  j < k and s_k^(k)(0) = (k+1)!.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional

import numpy as np

from .core import Field, Grid
from .errors import NonzeroTotalMass, RangeViolation


# --------------------------------------------------------------------------
# small closed-form pieces

def _quartic_bump(x, c, r, h):
    u = np.clip((np.asarray(x, dtype=float) - c) / r, -1.0, 1.0)
    return h * (1.0 - u * u) ** 2


def _quartic_bump_cum(x, c, r, h):
    """Integral of the quartic bump from -inf to x (closed form)."""
    u = np.clip((np.asarray(x, dtype=float) - c) / r, -1.0, 1.0)
    prim = u - 2.0 * u**3 / 3.0 + u**5 / 5.0
    return h * r * (prim + 8.0 / 15.0)


def _quartic_bump_deriv(x, c, r, h):
    u = np.asarray(x, dtype=float)
    u = (u - c) / r
    out = -4.0 * h * u * (1.0 - u * u) / r
    return np.where(np.abs(u) <= 1.0, out, 0.0)


def _ramp(t, k):
    """s_k(t) = (k+1)t^k - k t^(k+1) on [0,1]; 0 below, 1 above."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    return (k + 1.0) * t**k - k * t ** (k + 1.0)


def _ramp_cum(t, k):
    """S_k(t) = integral of s_k from 0 to t (t clipped to [0,1])."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    return t ** (k + 1.0) - k * t ** (k + 2.0) / (k + 2.0)


def _ramp_deriv(t, k):
    t = np.asarray(t, dtype=float)
    inside = (t >= 0.0) & (t <= 1.0)
    tt = np.clip(t, 0.0, 1.0)
    return np.where(inside, k * (k + 1.0) * tt ** (k - 1.0) * (1.0 - tt), 0.0)


def _ramp_deriv_at_zero(j: int, k: int) -> float:
    """j-th derivative of s_k at t = 0+ (from (k+1)t^k - k t^(k+1))."""
    if j < k:
        return 0.0
    if j == k:
        return float(math.factorial(k + 1))
    if j == k + 1:
        return -float(k * math.factorial(k + 1))
    return 0.0


# --------------------------------------------------------------------------

@dataclass(frozen=True)
class InitialProfile:
    """Line profile for the characteristic machinery.

    sigma0 and cumulative are vectorized callables; cumulative is
    F(x) = integral of (sigma0 - M) from the left.  vacuum_set lists the
    maximal closed intervals where sigma0 vanishes.  deriv(x, j) returns
    the j-th derivative of sigma0, one-sided from the fluid side at
    vacuum edges.
    """

    M: float
    sigma0: Callable
    cumulative: Callable
    deriv: Callable
    vacuum_set: tuple = ()
    domain: tuple = (0.0, 1.0)
    max_abs_F: float = 0.0
    label: str = ""

    def check(self, samples: int = 4001, tol: float = 1e-8):
        xs = np.linspace(self.domain[0], self.domain[1], samples)
        vals = self.sigma0(xs)
        if np.min(vals) < -1e-12:
            raise RangeViolation(f"profile {self.label!r} goes negative")
        f_end = float(self.cumulative(np.array([self.domain[1]]))[0])
        if abs(f_end) > tol * max(1.0, self.M * (self.domain[1] - self.domain[0])):
            raise NonzeroTotalMass(
                f"profile {self.label!r}: F at the right end is {f_end:.3e}")
        return self


def equilibrium_profile(M: float, domain=(0.0, 2.0 * math.pi)) -> InitialProfile:
    return InitialProfile(
        M=M,
        sigma0=lambda x: np.full_like(np.asarray(x, dtype=float), M),
        cumulative=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        deriv=lambda x, j=1: np.zeros_like(np.asarray(x, dtype=float)),
        vacuum_set=(),
        domain=domain,
        max_abs_F=0.0,
        label="equilibrium",
    )


def bump_profile(M: float, amp: float = 0.45, radius: float = 1.2,
                 center: float = math.pi,
                 domain=(0.0, 2.0 * math.pi)) -> InitialProfile:
    """sigma0 = M + G' with G = amp*radius*u*(1-u^2)^3; F = G exactly."""
    if amp * 0.66 >= M:
        raise RangeViolation("bump amplitude drives the profile into vacuum")
    A = amp * radius

    def g(x):
        u = np.clip((np.asarray(x, dtype=float) - center) / radius, -1.0, 1.0)
        return A * u * (1.0 - u * u) ** 3

    def sigma0(x):
        u = np.asarray(x, dtype=float)
        u = (u - center) / radius
        inside = np.abs(u) <= 1.0
        uu = np.clip(u, -1.0, 1.0)
        dg = amp * (1.0 - uu * uu) ** 2 * (1.0 - 7.0 * uu * uu)
        return M + np.where(inside, dg, 0.0)

    def deriv(x, j=1):
        if j != 1:
            raise NotImplementedError("bump profile tracks first derivatives only")
        u = np.asarray(x, dtype=float)
        u = (u - center) / radius
        inside = np.abs(u) <= 1.0
        uu = np.clip(u, -1.0, 1.0)
        # d/dx of G' = (amp/radius) * d/du[(1-u^2)^2 (1-7u^2)]
        dd = (amp / radius) * (-2.0 * uu) * (1.0 - uu * uu) * (9.0 - 21.0 * uu * uu)
        return np.where(inside, dd, 0.0)

    return InitialProfile(
        M=M, sigma0=sigma0, cumulative=g, deriv=deriv,
        vacuum_set=(), domain=domain,
        max_abs_F=float(abs(A) * 0.3932),  # max |u(1-u^2)^3| = 0.39309... at u=1/sqrt(7)
        label="bump",
    )


def vacuum_ramp_profile(M: float, width: float = 0.5, F0: Optional[float] = None,
                        touch: int = 1, bump_radius: float = 0.5,
                        gap: float = 0.25, margin: float = 0.5) -> InitialProfile:
    """Vacuum interval [0,1] with touch-order ramps and compensating bumps."""
    if not (0 < width <= 1.0):
        raise ValueError("ramp width must lie in (0,1]")
    if touch < 1:
        raise ValueError("touch order must be >= 1")
    k = int(touch)
    w = float(width)
    ramp_deficit = M * w * k / (k + 2.0)  # mass deficit of one ramp
    if F0 is None:
        F0 = -ramp_deficit  # no left bump needed
    A_left = F0 + ramp_deficit
    A_right = M + ramp_deficit - F0
    r = float(bump_radius)
    h_left = 15.0 * A_left / (16.0 * r)
    h_right = 15.0 * A_right / (16.0 * r)
    if h_left <= -M:
        raise RangeViolation(
            f"F0 = {F0} needs a negative bump deeper than the background")
    c_left = -w - gap - r
    c_right = 1.0 + w + gap + r
    domain = (c_left - r - margin, c_right + r + margin)

    def sigma0(x):
        x = np.asarray(x, dtype=float)
        out = np.full_like(x, M)
        out = out + _quartic_bump(x, c_left, r, h_left)
        out = out + _quartic_bump(x, c_right, r, h_right)
        # ramps and vacuum replace the plateau on [-w, 1+w]
        left_zone = (x >= -w) & (x < 0.0)
        right_zone = (x > 1.0) & (x <= 1.0 + w)
        vac = (x >= 0.0) & (x <= 1.0)
        out = np.where(left_zone, M * _ramp(-x / w, k), out)
        out = np.where(right_zone, M * _ramp((x - 1.0) / w, k), out)
        out = np.where(vac, 0.0, out)
        return out

    s_full = 2.0 / (k + 2.0)  # S_k(1)

    def cumulative(x):
        x = np.asarray(x, dtype=float)
        out = _quartic_bump_cum(x, c_left, r, h_left)
        out = out + _quartic_bump_cum(x, c_right, r, h_right)
        # left ramp contribution: zero before -w, closed form inside,
        # constant -ramp_deficit after
        t_left = np.clip(-x / w, 0.0, 1.0)
        out = out + M * w * ((s_full - _ramp_cum(t_left, k)) - (1.0 - t_left))
        # vacuum contribution
        out = out - M * np.clip(x, 0.0, 1.0)
        # right ramp
        t_right = np.clip((x - 1.0) / w, 0.0, 1.0)
        out = out + M * w * (_ramp_cum(t_right, k) - t_right)
        return out

    def deriv(x, j=1):
        xs = np.asarray(x, dtype=float)
        scalar = xs.ndim == 0
        xs = np.atleast_1d(xs)
        if j == 1:
            out = _quartic_bump_deriv(xs, c_left, r, h_left)
            out = out + _quartic_bump_deriv(xs, c_right, r, h_right)
            left_zone = (xs >= -w) & (xs <= 0.0)
            right_zone = (xs >= 1.0) & (xs <= 1.0 + w)
            dl = -(M / w) * _ramp_deriv(-xs / w, k)
            dr = (M / w) * _ramp_deriv((xs - 1.0) / w, k)
            out = np.where(left_zone, dl, out)
            out = np.where(right_zone, dr, out)
            interior = (xs > 0.0) & (xs < 1.0)
            out = np.where(interior, 0.0, out)
        else:
            # one-sided higher derivatives, nonzero only at the vacuum edges
            out = np.zeros_like(xs)
            at_left = np.isclose(xs, 0.0, rtol=0.0, atol=1e-13)
            at_right = np.isclose(xs, 1.0, rtol=0.0, atol=1e-13)
            dj = _ramp_deriv_at_zero(j, k)
            out = np.where(at_left, M * (-1.0 / w) ** j * dj, out)
            out = np.where(at_right, M * (1.0 / w) ** j * dj, out)
        return float(out[0]) if scalar else out

    prof = InitialProfile(
        M=M, sigma0=sigma0, cumulative=cumulative, deriv=deriv,
        vacuum_set=((0.0, 1.0),), domain=domain,
        max_abs_F=float(abs(F0) + M + abs(A_right) + abs(A_left)),
        label=f"vacuum-ramp(width={w}, F0={F0}, touch={k})",
    )
    return prof.check()


# --------------------------------------------------------------------------
# registry for the CLI / experiment harness

@dataclass(frozen=True)
class NamedProfile:
    name: str
    field_builder: Callable            # (grid, M, args) -> Field
    profile_builder: Optional[Callable]  # (M, args) -> InitialProfile, if line-capable
    defaults: dict = dc_field(default_factory=dict)


def _cosine_field(grid: Grid, M: float, args: dict) -> Field:
    amp = args.get("amp", 0.3)
    k = int(args.get("k", 1))
    return Field(grid, M + amp * np.cos(k * grid.x), tag="density")


def _equilibrium_field(grid: Grid, M: float, args: dict) -> Field:
    return Field(grid, np.full(grid.n, M), tag="density")


def _bump_field(grid: Grid, M: float, args: dict) -> Field:
    prof = bump_profile(M, amp=args.get("amp", 0.45),
                        radius=args.get("radius", 1.2),
                        center=args.get("center", math.pi))
    return Field(grid, prof.sigma0(grid.x), tag="density")


def _vacuum_field(grid: Grid, M: float, args: dict) -> Field:
    prof = _vacuum_profile(M, args)
    return Field(grid, prof.sigma0(grid.x), tag="density")


def _bump_prof(M: float, args: dict) -> InitialProfile:
    return bump_profile(M, amp=args.get("amp", 0.45),
                        radius=args.get("radius", 1.2),
                        center=args.get("center", math.pi))


def _vacuum_profile(M: float, args: dict) -> InitialProfile:
    return vacuum_ramp_profile(
        M, width=args.get("width", 0.5), F0=args.get("f0"),
        touch=int(args.get("touch", 1)))


PROFILES = {
    "equilibrium": NamedProfile("equilibrium", _equilibrium_field,
                                lambda M, args: equilibrium_profile(M)),
    "cosine": NamedProfile("cosine", _cosine_field, None,
                           {"amp": 0.3, "k": 1}),
    "bump": NamedProfile("bump", _bump_field, _bump_prof,
                         {"amp": 0.45, "radius": 1.2, "center": math.pi}),
    "vacuum-ramp": NamedProfile("vacuum-ramp", _vacuum_field, _vacuum_profile,
                                {"width": 0.5, "touch": 1}),
}


def profile_field(name: str, grid: Grid, M: float, **args) -> Field:
    if name not in PROFILES:
        raise KeyError(f"unknown profile {name!r}; choose from {sorted(PROFILES)}")
    return PROFILES[name].field_builder(grid, M, args)


def profile_line(name: str, M: float, **args) -> InitialProfile:
    if name not in PROFILES:
        raise KeyError(f"unknown profile {name!r}; choose from {sorted(PROFILES)}")
    builder = PROFILES[name].profile_builder
    if builder is None:
        raise ValueError(f"profile {name!r} is torus-only")
    return builder(M, args)
