"""Fourier helpers on the uniform torus: derivatives, dealiasing,
zero-mode-projected inverse gradients, and trigonometric interpolation.

All routines work on raw sample arrays; the real FFT is used throughout
(fields are real).
"""
from __future__ import annotations

import math

import numpy as np

from .core import Grid
from .errors import NotTorus


def _check_torus(grid: Grid):
    if not grid.is_torus:
        raise NotTorus("spectral operations require a torus grid")


def wavenumbers(grid: Grid) -> np.ndarray:
    """Physical wavenumbers for the rfft layout: 2*pi*j/L, j=0..n/2."""
    _check_torus(grid)
    return (2.0 * math.pi / grid.length) * np.arange(grid.n // 2 + 1)


def deriv(values: np.ndarray, grid: Grid, order: int = 1) -> np.ndarray:
    """Spectral derivative of given order."""
    _check_torus(grid)
    k = wavenumbers(grid)
    fh = np.fft.rfft(values)
    fh *= (1j * k) ** order
    if order % 2 == 1 and grid.n % 2 == 0:
        fh[-1] = 0.0  # odd derivative of the unpaired Nyquist mode
    return np.fft.irfft(fh, n=grid.n)


def dealias(values: np.ndarray, grid: Grid) -> np.ndarray:
    """Standard 2/3-rule truncation of the top third of the spectrum."""
    _check_torus(grid)
    fh = np.fft.rfft(values)
    cutoff = grid.n // 3  # keep |j| <= n/3
    fh[cutoff + 1:] = 0.0
    return np.fft.irfft(fh, n=grid.n)


def inverse_gradient(source: np.ndarray, grid: Grid) -> tuple[np.ndarray, float]:
    """Apply grad(-Delta)^{-1} to `source` with the zero mode projected out.

    Returns (result, removed_mean): result solves d/dx(result) =
    -(source - removed_mean) ... more precisely result_hat(k) =
    (i/k) * source_hat(k) for k != 0 and 0 at k = 0, which is the
    Fourier symbol of grad(-Delta)^{-1}.  removed_mean is the projected
    k = 0 amplitude of the source.
    """
    _check_torus(grid)
    k = wavenumbers(grid)
    sh = np.fft.rfft(source)
    removed = sh[0].real / grid.n
    out = np.zeros_like(sh)
    out[1:] = sh[1:] * (1j / k[1:])
    if grid.n % 2 == 0:
        out[-1] = 0.0  # no signed Nyquist mode for an odd symbol
    return np.fft.irfft(out, n=grid.n), float(removed)


def trig_interp(values: np.ndarray, grid: Grid, points: np.ndarray) -> np.ndarray:
    """Evaluate the trigonometric interpolant of `values` at arbitrary points.

    Exact on band-limited data; used by the semi-Lagrangian oracle to read
    Eulerian fields at marker positions.
    """
    _check_torus(grid)
    n = grid.n
    fh = np.fft.rfft(values) / n
    k = wavenumbers(grid)
    theta = np.multiply.outer(np.asarray(points, dtype=float) - grid.left, k)
    cos_t, sin_t = np.cos(theta), np.sin(theta)
    out = cos_t @ fh.real - sin_t @ fh.imag
    out += cos_t[:, 1:-1] @ fh.real[1:-1] - sin_t[:, 1:-1] @ fh.imag[1:-1]
    if n % 2 == 1:
        out += cos_t[:, -1] * fh.real[-1] - sin_t[:, -1] * fh.imag[-1]
    return out
