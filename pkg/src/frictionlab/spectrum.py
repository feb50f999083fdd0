"""Linear spectrum of the relaxation system about the equilibrium (M, 0).

For a Fourier mode e^{ikx} the two eigenvalues solve

    eps^2 lambda^2 + lambda + M + gamma M^(gamma-1) eps^alpha k^2 = 0.

The 'slow' root continues -M as eps -> 0; the 'fast' root scales like
-1/eps^2 (friction).  For large k*eps the discriminant goes negative and
the pair becomes complex (damped oscillation) -- still stable.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import Field, ParamSet
from .errors import DegenerateEpsilon, ResonantDenominator


@dataclass(frozen=True)
class DispersionQuery:
    epsilon: float
    alpha: float
    gamma: float
    M: float
    k: float

    def __post_init__(self):
        if self.k < 0.0:
            raise ValueError("wavenumber must be nonnegative")
        if self.epsilon < 0.0 or self.epsilon >= 1.0:
            raise ValueError("epsilon must lie in [0,1)")
        if not 0.0 < self.alpha < 2.0:
            raise ValueError("alpha must lie in (0,2)")
        if not self.gamma > 1.0:
            raise ValueError("gamma must exceed 1")
        if not self.M > 0.0:
            raise ValueError("M must be positive")

    @property
    def stiffness(self) -> float:
        """The constant term M + gamma M^(gamma-1) eps^alpha k^2."""
        return self.M + self.gamma * self.M ** (self.gamma - 1.0) \
            * self.epsilon**self.alpha * self.k**2


@dataclass(frozen=True)
class ModePair:
    lambda_slow: complex
    lambda_fast: Optional[complex]
    amplitude_ratio: complex

    @property
    def stable(self) -> bool:
        ok = self.lambda_slow.real < 0.0
        if self.lambda_fast is not None:
            ok = ok and self.lambda_fast.real < 0.0
        return ok


def dispersion_roots(q: DispersionQuery) -> ModePair:
    """Both roots by the cancellation-free quadratic formula, labeled by
    eps -> 0 continuation (slow = the branch continuing -M).

    At eps = 0 the quadratic degenerates to the single root
    lambda = -stiffness = -M (the eps^alpha factor vanishes for alpha > 0);
    lambda_fast is None there.
    """
    c = q.stiffness
    if q.epsilon == 0.0:
        slow = complex(-q.M, 0.0)
        return ModePair(lambda_slow=slow, lambda_fast=None,
                        amplitude_ratio=amplitude_ratio(q, slow))
    e2 = q.epsilon**2
    disc = 1.0 - 4.0 * e2 * c
    if disc >= 0.0:
        # q_ = -(1 + sqrt(disc))/2 never cancels; the other root via c/q_
        q_ = -0.5 * (1.0 + math.sqrt(disc))
        fast = complex(q_ / e2, 0.0)
        slow = complex(c / q_, 0.0)
    else:
        im = math.sqrt(-disc)
        slow = complex(-1.0, im) / (2.0 * e2)
        fast = complex(-1.0, -im) / (2.0 * e2)
    return ModePair(lambda_slow=slow, lambda_fast=fast,
                    amplitude_ratio=amplitude_ratio(q, slow))


def amplitude_ratio(q: DispersionQuery, lam: complex) -> complex:
    """Velocity-to-density eigencomponent ratio U/zeta for the mode e^{ikx}.

    Evaluated from the linearized momentum balance with the substitutions
    grad(-Delta)^{-1} -> i/k and grad -> ik:

        U/zeta = -(eps*(i/k) + gamma eps^(alpha+1) M^(gamma-2) (ik)) / (1 + eps^2 lam)

    At any dispersion root this equals i*eps*lam/(k*M) identically.
    k = 0 carries no velocity mode (the map has no zero mode): returns 0.
    """
    if q.k == 0.0:
        return 0.0 + 0.0j
    denom = 1.0 + q.epsilon**2 * lam
    if abs(denom) < 1e-14:
        raise ResonantDenominator(f"1 + eps^2*lambda = {denom:.3e}")
    electric = q.epsilon * (1j / q.k)
    pressure = q.gamma * q.epsilon ** (q.alpha + 1.0) \
        * q.M ** (q.gamma - 2.0) * (1j * q.k)
    return -(electric + pressure) / denom


def quadratic_residual(q: DispersionQuery, lam: complex) -> float:
    """Scaled residual |eps^2 lam^2 + lam + stiffness| / max(1, |lam|^2 eps^2)."""
    if q.epsilon == 0.0:
        raise DegenerateEpsilon("residual undefined at eps = 0")
    r = q.epsilon**2 * lam * lam + lam + q.stiffness
    scale = max(1.0, abs(lam) ** 2 * q.epsilon**2)
    return abs(r) / scale


def slow_mode_fields(p: ParamSet, k: int, amplitude: float):
    """Initial (rho0, w0) on p.grid lying on the slow eigenvector:
    rho0 = M + a cos(kx), w0 = -(lam_slow + M) a eps^(1-alpha)/(kM) sin(kx).
    Only real (non-oscillatory) slow roots are supported here.
    """
    q = DispersionQuery(p.epsilon, p.alpha, p.gamma, p.mass_level, float(k))
    pair = dispersion_roots(q)
    lam = pair.lambda_slow
    if abs(lam.imag) > 0.0:
        raise ValueError("slow root is oscillatory at these parameters")
    x = p.grid.x
    coef = -(lam.real + p.mass_level) * amplitude \
        * p.epsilon ** (1.0 - p.alpha) / (k * p.mass_level)
    rho0 = Field(p.grid, p.mass_level + amplitude * np.cos(k * x), tag="density")
    w0 = Field(p.grid, coef * np.sin(k * x))
    return rho0, w0, lam.real


def validate_linear_mode(p: ParamSet, k: int, amplitude: float = 1e-6,
                         t_fit: float = 1.0):
    """Run the nonlinear solver from a slow-eigenvector perturbation and
    compare the fitted modal decay rate against Re(lambda_slow).

    Returns (measured_rate, predicted_rate, relative_gap).
    """
    from .euler_poisson import simulate_ep  # local import to avoid a cycle
    from .diagnostics import fit_exponential_rate

    rho0, w0, lam = slow_mode_fields(p, k, amplitude)
    sample_times = [t_fit * j / 10.0 for j in range(11)]
    run = p.replace(t_end=t_fit)
    result = simulate_ep(rho0, w0, run, sample_times)
    result.raise_if_failed()
    series = []
    for state, _rec in result.samples:
        amp = np.abs(np.fft.rfft(state.rho.values))[k] * 2.0 / p.grid.n
        series.append((state.time, amp))
    rate, _r2 = fit_exponential_rate(series, (0.0, t_fit))
    measured = -rate
    gap = abs(measured - lam) / abs(lam)
    return measured, lam, gap
