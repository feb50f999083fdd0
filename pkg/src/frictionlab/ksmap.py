"""The nonlocal velocity map rho -> v = -grad(-Delta)^{-1}(rho - M).

Two realizations: spectral inversion on the torus (zero mode projected
and reported) and a running trapezoid integral on the truncated line,
where v(x) = integral of (sigma - M) from the left end.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Field, Grid
from .errors import NonFinite, NonzeroTotalMass, NotLine, NotTorus
from .spectral import inverse_gradient

LINE_MASS_TOL = 1e-8  # relative to |Omega|


@dataclass(frozen=True)
class KSVelocity:
    """Transport velocity induced by the density deviation."""

    v: Field
    source_mean_defect: float


def ks_map_torus(rho: Field, M: float) -> KSVelocity:
    """Spectral inversion: v_hat(k) = (rho - M)_hat(k) / (ik) for k != 0,
    zero mode dropped, so that dv/dx = rho - M - <rho - M>.
    """
    if not rho.grid.is_torus:
        raise NotTorus("ks_map_torus needs a torus grid")
    if not np.all(np.isfinite(rho.values)):
        raise NonFinite("ks_map_torus: source has non-finite samples")
    source = rho.values - M
    grad_inv, removed = inverse_gradient(source, rho.grid)
    return KSVelocity(v=Field(rho.grid, -grad_inv), source_mean_defect=removed)


def ks_map_line(sigma: Field, M: float) -> KSVelocity:
    """Running trapezoid integral of sigma - M with v(left end) = 0.

    Requires the deviation to vanish at the ends and integrate to zero,
    so v returns to zero at the right end.
    """
    grid = sigma.grid
    if grid.is_torus:
        raise NotLine("ks_map_line needs a line grid")
    if not np.all(np.isfinite(sigma.values)):
        raise NonFinite("ks_map_line: source has non-finite samples")
    dev = sigma.values - M
    total = grid.integrate(dev)
    if abs(total) > LINE_MASS_TOL * grid.measure:
        raise NonzeroTotalMass(
            f"total deviation mass {total:.3e} exceeds "
            f"{LINE_MASS_TOL * grid.measure:.3e}")
    h = grid.h
    v = np.empty(grid.n)
    v[0] = 0.0
    np.cumsum(0.5 * h * (dev[1:] + dev[:-1]), out=v[1:])
    return KSVelocity(v=Field(grid, v), source_mean_defect=float(total / grid.measure))
