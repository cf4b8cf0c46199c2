import math

import numpy as np
import pytest

from translate_lab.errors import DomainError, PreconditionError
from translate_lab.generators.tent import tent_phi
from translate_lab.grid import SampledFunction, SpectralFunction, frequency_grid, make_grid
from translate_lab.molecules import (
    assess_molecule,
    embedding_check,
    molecule_params,
    plancherel_gap,
    random_molecule,
    random_w0_element,
)
from translate_lab.norms import sobolev_parts


@pytest.mark.parametrize("q, a0, b0, exponent", [(2, 0.5, 1.0, 0.5), (math.inf, 1.0, 2.0, 0.5)])
def test_params(q, a0, b0, exponent):
    p = molecule_params(q, a0)
    assert p.b0 == b0
    assert p.exponent == exponent
    assert 0 < p.exponent < 1


@pytest.mark.parametrize("q, a0", [(1.0, 0.5), (0.5, 0.5), (2.0, 0.0)])
def test_bad_params(q, a0):
    with pytest.raises(DomainError):
        molecule_params(q, a0)


def test_odd_bump_is_molecule():
    g = make_grid(16.0, 1024)
    m = SampledFunction.from_callable(lambda x: x * np.exp(-x ** 2), g)
    rep = assess_molecule(m, molecule_params(2, 0.5))
    assert rep.is_molecule
    assert rep.molecular_norm > 0
    # ||x e^{-x^2}||_2^2 = sqrt(pi/2)/4 and ||x^2 e^{-x^2}||_2^2 = 3 sqrt(pi/2)/16
    assert rep.lq_norm == pytest.approx(math.sqrt(math.sqrt(math.pi / 2) / 4), rel=1e-10)
    assert rep.weighted_norm == pytest.approx(math.sqrt(3 * math.sqrt(math.pi / 2) / 16), rel=1e-10)


def test_gaussian_is_not_molecule():
    g = make_grid(16.0, 1024)
    rep = assess_molecule(SampledFunction.from_callable(lambda x: np.exp(-x ** 2), g),
                          molecule_params(2, 0.5))
    assert not rep.is_molecule
    assert rep.cancellation == pytest.approx(math.sqrt(math.pi), abs=1e-8)


def test_homogeneity(rng):
    g = make_grid(32.0, 2048)
    p = molecule_params(2, 0.5)
    for _ in range(20):
        m = random_molecule(g, rng)
        a = rng.uniform(-5, 5)
        n1 = assess_molecule(m * a, p).molecular_norm
        n0 = assess_molecule(m, p).molecular_norm
        assert n1 == pytest.approx(abs(a) * n0, rel=1e-10)


def test_embedding_examples():
    fg = frequency_grid(1 / 64, 16)
    phi = tent_phi()
    F = SpectralFunction(fg, phi(fg.nodes - 1) - phi(fg.nodes + 2))
    rec = embedding_check(F)
    assert math.isfinite(rec.ratio) and rec.ratio > 0
    zero = embedding_check(SpectralFunction(fg, np.zeros(fg.points)))
    assert (zero.x_norm, zero.w_norm, zero.ratio) == (0.0, 0.0, 0.0)
    with pytest.raises(PreconditionError, match="F\\(0\\)"):
        embedding_check(SpectralFunction(fg, phi(fg.nodes)))


def test_random_w0_ratio_bounded(rng):
    fg = frequency_grid(1 / 64, 16)
    ratios = [embedding_check(random_w0_element(fg, rng)).ratio for _ in range(20)]
    assert max(ratios) < 10 and min(ratios) > 0


def test_amgm(rng):
    fg = frequency_grid(1 / 64, 16)
    for _ in range(50):
        a, b = sobolev_parts(random_w0_element(fg, rng))
        assert math.sqrt(a * b) <= (a + b) / 2 + 1e-12


def test_plancherel_step():
    fg = frequency_grid(1 / 1024, 8)
    z = fg.nodes
    F = SpectralFunction(fg, z * np.exp(-z ** 2))
    spatial, spectral = plancherel_gap(F)
    assert spatial == pytest.approx(spectral, rel=1e-6)
