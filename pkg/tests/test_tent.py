import math

import numpy as np
import pytest

from translate_lab.errors import ConfigurationError, ValidationError
from translate_lab.generators.tent import (
    TENT_W_NORM,
    TentCoefficients,
    epsilon_schedule,
    initial_coefficients,
    partial_sum_F,
    tent_phi,
    tent_properties,
)
from translate_lab.grid import frequency_grid
from translate_lab.norms import sobolev_norm, star_norm


@pytest.mark.parametrize("z, value", [(0.0, 1.0), (0.5, 0.5), (-0.25, 0.75), (2.0, 0.0), (-1.0, 0.0)])
def test_tent_values(z, value):
    assert tent_phi()(z) == value


def test_tent_w_norm_constant():
    fg = frequency_grid(1 / 1024, 4)
    assert sobolev_norm(tent_phi().sample(fg)) == pytest.approx(TENT_W_NORM, abs=1e-3)


def test_initial_coefficients():
    c = initial_coefficients(stages=4)
    eps = epsilon_schedule(5)
    assert c.delta(0) == 0.0
    assert c.delta(1) == c.delta(-1) == eps[0] - eps[1] == c.delta_tilde(1)
    with pytest.raises(ConfigurationError):
        c.delta(2)


def test_telescoping_identity():
    c = initial_coefficients(epsilon_schedule(64))
    for n in range(1, 20):
        assert abs(c.tail_sum(n) - c.epsilon_schedule[n]) < 1e-14


@pytest.mark.parametrize("deltas, eps", [
    ((0.1, 0.125), (0.25, 0.125, 0.0625)),     # delta_0 != 0
    ((0.0, 0.1), (0.25, 0.125, 0.0625)),       # delta_1 != eps_1 - eps_2
    ((0.0, 0.125, 0.05), (0.25, 0.125, 0.0625)),  # delta_2 > delta_tilde_2 / 4
    ((0.0, 0.5), (0.75, 0.25)),                # eps_1 > 1/2
])
def test_coefficient_validation(deltas, eps):
    with pytest.raises(ValidationError):
        TentCoefficients(deltas, eps)


def test_partial_sum_properties():
    fg = frequency_grid(1 / 512, 8)
    c = initial_coefficients(stages=4)
    for n in range(2, 5):
        c = c.extended(c.delta_tilde(n) / 4)
    for n in range(1, 5):
        p = tent_properties(c, n, fg)
        assert p.all_ok()
        Fn = partial_sum_F(c, n, fg)
        assert np.all(Fn.values[np.abs(fg.nodes) > n + 1] == 0)
        assert Fn.values[fg.zero_index] == 0.0
        assert np.all(Fn.values >= 0)
        assert star_norm(Fn) <= 2 * max(c.deltas[1:n + 1]) * (1 + 1e-12)
    # the largest delta is delta_1 whose inner neighbour delta_0 is zero, so equality holds
    assert tent_properties(c, 4, fg).star_equality
    ratios = [tent_properties(c, n, fg).w_ratio for n in range(1, 5)]
    assert max(ratios) / min(ratios) < 1.5
