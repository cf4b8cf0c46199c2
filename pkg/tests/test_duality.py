import csv
import io
import math

import numpy as np
import pytest

from translate_lab import conventions
from translate_lab.duality import (
    CSV_COLUMNS,
    annihilation_scan,
    build_annihilator,
    integer_vanishing_closed_form,
    pairing_spatial,
    pairing_spectral,
    translate,
    vanishing_on_integers,
    wiener_predicate,
    wiener_spectrum_predicate,
)
from translate_lab.errors import DivisionHazardError, DomainError, PreconditionError
from translate_lab.generators.tent import tent_phi
from translate_lab.grid import SampledFunction, SpectralFunction, make_grid
from translate_lab.lambda_sets import DiscreteSet, integers
from translate_lab.transforms import fourier_forward, fourier_inverse, real_if_close

# the sinc factor of g decays like 1/x, so the periodic grid needs a wide window
GRID = make_grid(512.0, 65536)
DELTA = 0.5


def odd_gaussian(grid):
    return SampledFunction.from_callable(lambda x: x * np.exp(-x ** 2 / 2), grid)


@pytest.fixture(scope="module")
def witness():
    g = vanishing_on_integers(DELTA, GRID)
    return g, build_annihilator(odd_gaussian(GRID), g, integers(20))


def test_g_vanishes_on_integers(witness):
    g, _ = witness
    x = GRID.nodes
    on_int = np.isclose(x, np.round(x), atol=1e-12)
    assert np.max(np.abs(g.values[on_int])) < 1e-12


def test_g_matches_closed_form_at_half(witness):
    g, _ = witness
    i = np.argmin(np.abs(GRID.nodes - 0.5))
    oracle = math.sin(math.pi / 2) * math.sin(DELTA / 2) / (DELTA / 2)
    assert abs(g.values[i]) > 0.1
    assert g.values[i] == pytest.approx(oracle, rel=1e-2)


def test_g_spectrum_support(witness):
    g, _ = witness
    G = fourier_forward(g)
    z = np.abs(G.grid.nodes)
    dz = G.grid.spacing
    outside = (z < math.pi - DELTA - dz) | (z > math.pi + DELTA + dz)
    assert np.max(np.abs(G.values[outside])) < 1e-6 * np.max(np.abs(G.values))


def test_g_preconditions():
    with pytest.raises(DomainError):
        vanishing_on_integers(math.pi, GRID)
    with pytest.raises(PreconditionError):
        vanishing_on_integers(DELTA, make_grid(63.5, 8192))


def test_annihilator_on_integers(witness):
    _, w = witness
    assert not w.trivial
    assert w.gap_ok()
    assert len(w.residuals) == 41
    assert w.residuals.max_normalized() < 1e-6


def test_probe_at_half(witness):
    _, w = witness
    f = odd_gaussian(GRID)
    r = pairing_spectral(w.k, f, [0.5])[0]
    oracle = conventions.PAIRING_CONSTANT * abs(float(integer_vanishing_closed_form(0.5, DELTA)))
    assert abs(abs(r) / oracle - 1) < 0.05


def test_proportionality_constant(witness):
    _, w = witness
    f = odd_gaussian(GRID)
    lam = np.arange(-4, 4) + 0.5
    res = pairing_spectral(w.k, f, lam)
    g = integer_vanishing_closed_form(-lam, DELTA)
    const = np.vdot(g, res) / np.vdot(g, g)
    assert abs(const / conventions.PAIRING_CONSTANT - 1) < 1e-2


def test_trivial_g():
    f = odd_gaussian(GRID)
    w = build_annihilator(f, SampledFunction(GRID, np.zeros(GRID.points)), integers(5))
    assert w.trivial
    assert not np.any(w.k.values)
    assert not np.any(w.residuals.residuals)


def test_division_hazard():
    # f_hat is a narrow bump that vanishes on supp g_hat
    fg = GRID.dual()
    F = SpectralFunction(fg, tent_phi()(fg.nodes))
    f = real_if_close(fourier_inverse(F))
    g = vanishing_on_integers(DELTA, GRID)
    with pytest.raises(DivisionHazardError, match="frequency"):
        build_annihilator(f, g)


def test_parseval_spatial_vs_spectral(witness, rng):
    _, w = witness
    for _ in range(5):
        a, s = rng.uniform(-1, 1), rng.uniform(0.7, 1.5)
        f = SampledFunction.from_callable(lambda x: (x - a) * np.exp(-((x - a) / s) ** 2), GRID)
        lam = float(rng.uniform(-5, 5))
        spec = pairing_spectral(w.k, f, [lam])[0]
        spat = pairing_spatial(w.k, f, lam)
        assert abs(spat - spec) <= 1e-6 * abs(spec)


def test_residuals_linear_in_f(witness, rng):
    _, w = witness
    f1 = odd_gaussian(GRID)
    f2 = SampledFunction.from_callable(lambda x: np.exp(-(x - 1) ** 2), GRID)
    lam = rng.uniform(-8, 8, 6)
    a, b = 1.7, -0.4
    lhs = pairing_spectral(w.k, f1 * a + f2 * b, lam)
    rhs = a * pairing_spectral(w.k, f1, lam) + b * pairing_spectral(w.k, f2, lam)
    assert np.max(np.abs(lhs - rhs)) < 1e-12 * np.max(np.abs(rhs))


def test_shift_moves_residuals(witness):
    _, w = witness
    f = odd_gaussian(GRID)
    lam = np.array([0.5, 1.25, 3.7])
    s = 0.3
    # <k, tau_(lam + s) f> = <k, tau_lam (tau_s f)>
    a = np.abs(pairing_spectral(w.k, f, lam + s))
    b = np.abs(pairing_spectral(w.k, translate(f, s), lam))
    assert np.max(np.abs(a - b)) < 1e-8


def test_k_bounded(witness):
    _, w = witness
    sup, bound = w.bound_check()
    assert math.isfinite(sup) and sup <= bound * (1 + 1e-12)


def test_scan_window_and_csv(witness):
    _, w = witness
    f = odd_gaussian(GRID)
    empty = annihilation_scan(w.k, f, DiscreteSet(np.array([])))
    assert len(empty) == 0 and empty.max_normalized() == 0.0
    far = annihilation_scan(w.k, f, np.array([1.0, 400.0]))
    assert far.excluded.tolist() == [400.0]
    rows = list(csv.reader(io.StringIO(far.to_csv())))
    assert tuple(rows[0]) == CSV_COLUMNS and len(rows) == 2


def test_wiener_cases():
    fg = make_grid(64.0, 8192).dual()
    z = fg.nodes
    pos = SpectralFunction(fg, (1 + tent_phi()(z - 3)) / (1 + z ** 2))
    assert wiener_spectrum_predicate(pos, 0.1).nonvanishing
    notch = np.where(np.abs(np.abs(z) - 1.0) <= fg.spacing / 2, 0.0, 1.0) / (1 + z ** 2)
    rec = wiener_spectrum_predicate(SpectralFunction(fg, notch), 0.1)
    assert not rec.nonvanishing
    assert abs(abs(rec.witness_zero) - 1.0) <= fg.spacing
    zero = wiener_predicate(SampledFunction(make_grid(8.0, 64), np.zeros(64)), 0.5)
    assert not zero.nonvanishing and zero.witness_zero is not None
    with pytest.raises(DomainError):
        wiener_predicate(SampledFunction(make_grid(8.0, 64), np.zeros(64)), 0.0)
