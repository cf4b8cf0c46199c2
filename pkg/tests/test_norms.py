import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from translate_lab.errors import ConfigurationError, DomainError
from translate_lab.generators.tent import tent_phi
from translate_lab.grid import SampledFunction, SpectralFunction, frequency_grid, make_grid
from translate_lab.norms import (
    IntervalSpec,
    bmo_pair,
    bmo_seminorm,
    bmo_truncate,
    h1_norm,
    lp_norm,
    sobolev_norm,
    star_norm,
)


def exact_bmo(values):
    """Exhaustive window scan in rational arithmetic."""
    v = [Fraction(x) for x in values]
    best = Fraction(0)
    for i in range(len(v) - 1):
        for j in range(i + 2, len(v) + 1):
            w = v[i:j]
            mean = sum(w) / len(w)
            best = max(best, sum(abs(x - mean) for x in w) / len(w))
    return best


def random_steps(rng, n):
    k = int(rng.integers(2, 10))
    edges = np.sort(rng.choice(np.arange(1, n), k - 1, replace=False))
    # dyadic rationals so that floating sums are exact
    vals = rng.integers(-64, 65, k) / 8.0
    return np.repeat(vals, np.diff(np.concatenate([[0], edges, [n]])))


def test_lp_examples():
    g = make_grid(2.0, 1024)
    one = SampledFunction(g, np.where(np.abs(g.nodes) <= 1, 1.0, 0.0))
    assert lp_norm(one, 1) == pytest.approx(2.0, abs=2 * g.spacing)
    fg = frequency_grid(1 / 64, 4)
    assert lp_norm(SpectralFunction(fg, tent_phi()(fg.nodes)), math.inf) == 1.0
    g = make_grid(16.0, 1024)
    gauss = SampledFunction.from_callable(lambda x: np.exp(-x ** 2 / 2), g)
    assert lp_norm(gauss, 2) == pytest.approx(math.pi ** 0.25, abs=1e-8)
    with pytest.raises(DomainError):
        lp_norm(gauss, 0.5)


def test_h1_zero_and_mean_flag():
    g = make_grid(16.0, 1024)
    assert h1_norm(SampledFunction(g, np.zeros(1024))).value == 0.0
    bump = SampledFunction.from_callable(lambda x: np.exp(-x ** 2), g)
    assert h1_norm(bump).low_confidence
    odd = SampledFunction.from_callable(lambda x: x * np.exp(-x ** 2), g)
    rep = h1_norm(odd)
    assert not rep.low_confidence
    assert "tail" in rep.discretization_note


def test_h1_triangle(rng):
    g = make_grid(16.0, 1024)
    x = g.nodes
    for _ in range(10):
        a, b = rng.uniform(-2, 2, 2)
        f = SampledFunction(g, (x - a) * np.exp(-(x - a) ** 2) * rng.normal())
        h = SampledFunction(g, (x - b) * np.exp(-2 * (x - b) ** 2) * rng.normal())
        assert h1_norm(f + h).value <= h1_norm(f).value + h1_norm(h).value + 1e-10


def test_bmo_constant_is_exactly_zero():
    g = make_grid(4.0, 256)
    for c in (0.0, 3.7, -1e6, math.pi):
        assert bmo_seminorm(SampledFunction(g, np.full(256, c))).value == 0.0


def test_bmo_sign():
    g = make_grid(1.0, 64)
    h = SampledFunction(g, np.where(g.nodes >= 0, 1.0, -1.0))
    assert bmo_seminorm(h, "all_windows").value == pytest.approx(1.0, abs=1e-15)
    assert exact_bmo(h.values) == 1


@pytest.mark.parametrize("seed", range(20))
def test_bmo_matches_rational_oracle(seed):
    rng = np.random.default_rng(seed)
    g = make_grid(1.0, 64)
    v = random_steps(rng, 64)
    got = bmo_seminorm(SampledFunction(g, v), "all_windows").value
    want = float(exact_bmo(v))
    assert abs(got - want) <= 1e-12 * max(want, 1.0)


def test_bmo_log_stable():
    vals = []
    for n in (256, 512):
        g = make_grid(4.0, n)
        x = g.nodes
        vals.append(bmo_seminorm(SampledFunction(g, np.log(np.maximum(np.abs(x), g.spacing / 2)))).value)
    assert abs(vals[1] / vals[0] - 1) < 0.1


def test_bmo_bad_policy():
    g = make_grid(1.0, 16)
    with pytest.raises(ConfigurationError):
        bmo_seminorm(SampledFunction(g, np.zeros(16)), "bogus")


@given(st.integers(0, 2 ** 31 - 1))
@settings(max_examples=30, deadline=None)
def test_bmo_bounded_by_twice_sup(seed):
    rng = np.random.default_rng(seed)
    g = make_grid(2.0, 128)
    h = SampledFunction(g, rng.normal(size=128))
    assert bmo_seminorm(h).value <= 2 * lp_norm(h, math.inf) + 1e-12


@given(st.integers(0, 2 ** 31 - 1), st.sampled_from([0.5, 1.0, 2.0, 5.0]))
@settings(max_examples=40, deadline=None)
def test_truncation_properties(seed, r):
    rng = np.random.default_rng(seed)
    g = make_grid(2.0, 128)
    h = SampledFunction(g, random_steps(rng, 128))
    hr = bmo_truncate(h, r)
    assert np.max(np.abs(hr.values)) <= r
    assert bmo_seminorm(hr).value <= bmo_seminorm(h).value + 1e-6
    assert np.array_equal(bmo_truncate(hr, 2 * r).values, hr.values)


def test_bmo_translation_interior():
    g = make_grid(8.0, 512)
    x = g.nodes
    h = SampledFunction(g, np.where(np.abs(x) < 2, np.sign(x) * np.abs(x) ** 0.5, 0.0))
    base = bmo_seminorm(h).value
    for k in (3, 17, 60):
        shifted = SampledFunction(g, np.roll(h.values, k))
        assert abs(bmo_seminorm(shifted).value / base - 1) < 0.05


def test_truncate_examples():
    g = make_grid(2.0, 64)
    assert np.all(bmo_truncate(SampledFunction(g, np.full(64, 5.0)), 2).values == 2.0)
    ramp = bmo_truncate(SampledFunction(g, g.nodes), 1.0).values
    assert np.allclose(ramp, np.sign(g.nodes) * np.minimum(np.abs(g.nodes), 1.0), atol=1e-15)
    with pytest.raises(DomainError):
        bmo_truncate(SampledFunction(g, g.nodes), 0.0)


def test_sobolev_and_star_of_tent():
    fg = frequency_grid(1 / 1024, 4)
    tent = SpectralFunction(fg, tent_phi()(fg.nodes))
    assert sobolev_norm(tent, IntervalSpec(-2, 2)) == pytest.approx(math.sqrt(2 / 3) + math.sqrt(2), abs=1e-3)
    assert star_norm(tent) == pytest.approx(2.0, abs=1e-9)
    assert sobolev_norm(SpectralFunction(fg, np.zeros(fg.points))) == 0.0
    assert star_norm(SpectralFunction(fg, np.full(fg.points, -2.5))) == 2.5
    with pytest.raises(DomainError):
        sobolev_norm(tent, IntervalSpec(-5, 1))


def test_pairing_examples():
    g = make_grid(8.0, 512)
    x = g.nodes
    f = SampledFunction(g, x * np.exp(-x ** 2))
    h = SampledFunction(g, np.cos(x))
    p = bmo_pair(f, h, [2.0, 4.0, 8.0])
    plain = g.spacing * np.sum(f.values * h.values)
    assert all(v == pytest.approx(plain, abs=1e-14) for v in p.sequence)
    const = bmo_pair(f, SampledFunction(g, np.full(512, 3.0)), [1.0, 10.0])
    assert abs(const.value) < 1e-12
    with pytest.raises(ConfigurationError):
        bmo_pair(f, h, [2.0, 1.0])
