"""Fourier and Hilbert transforms on uniform grids.

See :mod:`translate_lab.conventions` for the sign and normalization.  With
``x_j = -L + j h`` and ``z_k = -Z + k dz`` (``Z = pi/h``, ``dz = pi/L``) the
kernel factorises as ``exp(i x_j z_k) = c (-1)^(j+k) exp(2 pi i jk/n)`` with
``c = exp(i n pi/2)``, so both directions are one FFT plus sign flips.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import conventions
from .errors import ConfigurationError, RangeError
from .grid import SampledFunction, SpectralFunction, UniformGrid

MEAN_ZERO_FLAG = "nonzero-mean"


def _checkerboard(n):
    return np.where(np.arange(n) % 2 == 0, 1.0, -1.0)


def _offset_phase(n):
    return np.exp(1j * math.pi * n / 2)


def fourier_forward(f: SampledFunction) -> SpectralFunction:
    """``F(z) = integral f(x) exp(+i x z) dx`` on the dual grid."""
    grid = f.grid
    n = grid.points
    s = _checkerboard(n)
    values = grid.spacing * _offset_phase(n) * s * (n * np.fft.ifft(s * f.values))
    return SpectralFunction(grid.dual(), values)


def fourier_inverse(F: SpectralFunction) -> SampledFunction:
    """``f(x) = 1/(2 pi) integral F(z) exp(-i x z) dz`` on the dual grid."""
    fgrid = F.grid
    n = fgrid.points
    s = _checkerboard(n)
    scale = fgrid.spacing * conventions.INVERSE_NORMALIZATION
    values = scale * np.conj(_offset_phase(n)) * s * np.fft.fft(s * F.values)
    return SampledFunction(fgrid.dual(), values)


def reflect(F):
    """``F(-z)`` on the same grid (the grid is treated as periodic)."""
    return F.with_values(np.roll(F.values[::-1], 1))


def real_if_close(f, tol=1e-12):
    """Drop an imaginary part that is negligible relative to the values."""
    v = f.values
    if np.iscomplexobj(v):
        scale = max(np.max(np.abs(v)), 1e-300)
        if np.max(np.abs(v.imag)) <= tol * scale:
            return f.with_values(v.real, f.flags)
    return f


def hilbert_multiplier(grid: UniformGrid) -> np.ndarray:
    """``-i sign(z)`` on a frequency grid; zero bin and Nyquist bin set to 0.

    The Nyquist bin ``z = -Z`` has no mirror partner on the grid, so keeping
    it would make the transform of real input complex.
    """
    m = -1j * np.sign(grid.nodes)
    m[0] = 0.0
    return m


def hilbert_transform(f: SampledFunction, mean_tol: float = 1e-6, pad: int = 1) -> SampledFunction:
    """Hilbert transform as the Fourier multiplier ``-i sign(z)``.

    Parameters
    ----------
    f : SampledFunction
    mean_tol : float
        When the zero-frequency bin carries more than ``mean_tol`` of the
        peak spectral magnitude the result is flagged with
        :data:`MEAN_ZERO_FLAG`.  The bin is dropped either way.
    pad : int
        Zero-padding factor (power of two).  ``pad=1`` is the periodic
        transform, for which ``H(Hf) = -f`` holds to roundoff.  Larger
        values treat ``f`` as zero outside the grid and suppress the
        wrap-around of the slowly decaying kernel; the output is restricted
        back to the original grid.

    Notes
    -----
    Under the ``+i`` forward convention this multiplier sends the Poisson
    kernel ``1/(pi(1+x^2))`` to ``-x/(pi(1+x^2))``.
    """
    flags = ()
    F = fourier_forward(f)
    peak = np.max(np.abs(F.values))
    if peak > 0 and abs(F.values[F.grid.zero_index]) > mean_tol * peak:
        flags = (MEAN_ZERO_FLAG,)
    if pad != 1:
        big, offset = _padded(f, pad)
        Hbig = _apply_hilbert(big)
        values = Hbig.values[offset:offset + f.grid.points]
    else:
        values = _apply_hilbert(f).values
    if not np.iscomplexobj(f.values):
        values = values.real
    return SampledFunction(f.grid, values, flags)


def _apply_hilbert(f):
    F = fourier_forward(f)
    return fourier_inverse(F.with_values(F.values * hilbert_multiplier(F.grid)))


def _padded(f, pad):
    if pad < 1 or (pad & (pad - 1)) != 0:
        raise ConfigurationError(f"pad must be a power of two, got {pad}", field="pad")
    grid = f.grid
    big = UniformGrid(grid.half_extent * pad, grid.points * pad)
    offset = (big.points - grid.points) // 2
    values = np.zeros(big.points, dtype=f.values.dtype)
    values[offset:offset + grid.points] = f.values
    return SampledFunction(big, values), offset


def spectral_derivative(F: SpectralFunction) -> SpectralFunction:
    """Centered differences in the interior, one-sided at the two edges."""
    return F.with_values(np.gradient(F.values, F.grid.spacing))


def complex_shift(F: SpectralFunction, y: float) -> SampledFunction:
    """Restriction of ``f = F-check`` to the line ``Im z = y``.

    Computes ``x -> 1/(2 pi) integral F(t) exp(y t) exp(-i x t) dt``.

    Raises
    ------
    RangeError
        If ``F(t) exp(y t)`` overflows at some grid frequency.
    """
    t = F.grid.nodes
    with np.errstate(over="ignore", invalid="ignore"):
        weighted = F.values * np.exp(y * t)
    bad = ~np.isfinite(weighted) | (np.abs(weighted) > 1e300)
    if np.any(bad):
        z = t[np.argmax(bad)]
        raise RangeError(f"F(t)*exp({y}*t) overflows at t = {z:.6g}")
    return fourier_inverse(F.with_values(weighted))


@dataclass(frozen=True)
class FourierPair:
    """A spatial function together with its transform."""

    spatial: SampledFunction
    spectral: SpectralFunction
    convention_tag: str = conventions.CONVENTION_TAG

    @classmethod
    def from_spatial(cls, f):
        return cls(f, fourier_forward(f))

    @classmethod
    def from_spectral(cls, F):
        return cls(fourier_inverse(F), F)
