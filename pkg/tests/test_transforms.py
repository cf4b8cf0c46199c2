import math

import numpy as np
import pytest

from translate_lab import conventions
from translate_lab.errors import RangeError
from translate_lab.grid import SampledFunction, SpectralFunction, frequency_grid, make_grid
from translate_lab.norms import lp_norm
from translate_lab.transforms import (
    MEAN_ZERO_FLAG,
    FourierPair,
    complex_shift,
    fourier_forward,
    fourier_inverse,
    hilbert_transform,
    spectral_derivative,
)


def band_limited(grid, rng, bandwidth=4.0):
    """Real, mean-zero function with spectrum inside ``|z| < bandwidth``."""
    fg = grid.dual()
    z = fg.nodes
    half = sum((rng.normal() + 1j * rng.normal()) * np.exp(-((np.abs(z) - c) / 0.4) ** 2)
               for c in rng.uniform(0.8, 3.0, 3))
    vals = np.where(z > 0, half, np.conj(half))
    vals = np.where(np.abs(z) < bandwidth, vals, 0.0)
    vals[fg.zero_index] = 0.0
    vals[0] = 0.0
    return SampledFunction(grid, fourier_inverse(SpectralFunction(fg, vals)).values.real)


def test_indicator_transform():
    g = make_grid(32.0, 4096)
    x = g.nodes
    v = np.where(np.abs(x) < 1, 1.0, 0.0)
    v[np.isclose(np.abs(x), 1.0)] = 0.5
    F = fourier_forward(SampledFunction(g, v))
    z = F.grid.nodes
    with np.errstate(invalid="ignore", divide="ignore"):
        oracle = np.where(z == 0, 2.0, 2 * np.sin(z) / z)
    # the trapezoid sum of a jump carries a relative error near (h z)^2 / 12,
    # so the tolerance is met on the low band only
    band = np.abs(z) <= 16
    assert np.max(np.abs(F.values - oracle)[band]) < 1e-3


def test_gaussian_transform():
    g = make_grid(16.0, 1024)
    F = fourier_forward(SampledFunction.from_callable(lambda x: np.exp(-x ** 2 / 2), g))
    z = F.grid.nodes
    assert np.max(np.abs(F.values - math.sqrt(2 * math.pi) * np.exp(-z ** 2 / 2))) < 1e-8


def test_zero_maps_to_zero():
    g = make_grid(4.0, 64)
    assert not np.any(fourier_forward(SampledFunction(g, np.zeros(64))).values)
    assert not np.any(fourier_inverse(SpectralFunction(g, np.zeros(64))).values)


def test_round_trip(rng):
    g = make_grid(8.0, 256)
    f = SampledFunction(g, rng.normal(size=256) + 1j * rng.normal(size=256))
    back = fourier_inverse(fourier_forward(f))
    assert back.grid == g
    assert np.linalg.norm(back.values - f.values) / np.linalg.norm(f.values) < 1e-10


def test_tent_inverse_at_zero():
    fg = frequency_grid(1 / 256, 8)
    f = fourier_inverse(SpectralFunction(fg, np.maximum(0, 1 - np.abs(fg.nodes))))
    assert f.values[f.grid.zero_index] == pytest.approx(1 / (2 * math.pi), abs=1e-6)


def test_translation_phase():
    g = make_grid(16.0, 512)
    f = SampledFunction.from_callable(lambda x: np.exp(-x ** 2), g)
    s = 2.0
    shifted = SampledFunction.from_callable(lambda x: np.exp(-(x - s) ** 2), g)
    F, Fs = fourier_forward(f), fourier_forward(shifted)
    assert np.max(np.abs(Fs.values - np.exp(1j * s * F.grid.nodes) * F.values)) < 1e-12


def test_even_real_input_gives_real_even_spectrum():
    g = make_grid(16.0, 512)
    F = fourier_forward(SampledFunction.from_callable(lambda x: np.exp(-x ** 2) * np.cos(x), g))
    assert np.max(np.abs(F.values.imag)) < 1e-12
    inner = F.values[1:]
    assert np.max(np.abs(inner - inner[::-1])) < 1e-12


def test_parseval(rng):
    g = make_grid(16.0, 1024)
    for _ in range(5):
        f = band_limited(g, rng)
        F = fourier_forward(f)
        ratio = lp_norm(f, 2) ** 2 / (lp_norm(F, 2) ** 2 / (2 * math.pi))
        assert abs(ratio - 1) < 1e-8


def test_hilbert_positive_spectrum():
    g = make_grid(16.0, 512)
    fg = g.dual()
    z = fg.nodes
    F = SpectralFunction(fg, np.where(z > 0, np.exp(-(z - 3) ** 2), 0.0))
    f = fourier_inverse(F)
    Hf = hilbert_transform(f)
    assert np.max(np.abs(Hf.values + 1j * f.values)) < 1e-14


def test_hilbert_involution_and_isometry(rng):
    g = make_grid(16.0, 1024)
    for _ in range(10):
        f = band_limited(g, rng)
        Hf = hilbert_transform(f)
        assert MEAN_ZERO_FLAG not in Hf.flags
        assert np.linalg.norm(hilbert_transform(Hf).values + f.values) < 1e-10 * np.linalg.norm(f.values)
        assert lp_norm(Hf, 2) == pytest.approx(lp_norm(f, 2), rel=1e-10)


def test_hilbert_closed_form_convention_sign():
    # with the +i forward convention the multiplier -i sign(z) sends
    # 1/(1+x^2) to -x/(1+x^2)
    g = make_grid(64.0, 8192)
    f = SampledFunction.from_callable(lambda x: 1 / (1 + x ** 2), g)
    Hf = hilbert_transform(f, pad=4)
    x = g.nodes
    assert MEAN_ZERO_FLAG in Hf.flags
    assert np.max(np.abs(Hf.values.real + x / (1 + x ** 2))) < 2e-3


def test_spectral_derivative_examples():
    g = make_grid(4.0, 128)
    z = g.nodes
    assert not np.any(spectral_derivative(SpectralFunction(g, np.full(128, 2.5))).values)
    d = spectral_derivative(SpectralFunction(g, z)).values
    assert np.allclose(d, 1.0, atol=1e-12)
    fine = frequency_grid(1 / 1024, 4)
    t = fine.nodes
    d = spectral_derivative(SpectralFunction(fine, np.maximum(0, 1 - np.abs(t)))).values
    left = (t > -0.9) & (t < -0.1)
    right = (t > 0.1) & (t < 0.9)
    assert np.max(np.abs(d[left] - 1)) < 1e-6
    assert np.max(np.abs(d[right] + 1)) < 1e-6


def test_complex_shift_zero_is_inverse():
    fg = frequency_grid(1 / 32, 8)
    F = SpectralFunction(fg, np.exp(-fg.nodes ** 2))
    assert np.array_equal(complex_shift(F, 0.0).values, fourier_inverse(F).values)


def test_complex_shift_bump_scaling():
    fg = frequency_grid(1 / 256, 8)
    z0, y = 2.0, 0.05
    F = SpectralFunction(fg, np.exp(-((fg.nodes - z0) / 0.02) ** 2))
    a = np.max(np.abs(complex_shift(F, y).values))
    b = np.max(np.abs(fourier_inverse(F).values))
    assert a / b == pytest.approx(math.exp(y * z0), rel=0.01)


def test_complex_shift_overflow():
    fg = frequency_grid(1.0, 4096)
    F = SpectralFunction(fg, np.ones(fg.points))
    with pytest.raises(RangeError, match="overflows at t"):
        complex_shift(F, 1.0)


def test_fourier_pair_tag():
    g = make_grid(4.0, 64)
    pair = FourierPair.from_spatial(SampledFunction(g, np.zeros(64)))
    assert pair.convention_tag == conventions.CONVENTION_TAG
    assert pair.spectral.grid.spacing == pytest.approx(math.pi / 4)
