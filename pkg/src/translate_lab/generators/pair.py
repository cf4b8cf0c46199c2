"""Two generators for perturbed integers from an interval pair covering ``[-pi, pi]``.

For an interval ``I`` with ``0 < |I| < 2 pi`` let ``J`` be the gap between
``I`` and ``I + 2 pi``.  A bump ``G`` on ``J`` is repeated with weights
``c_n``: ``F(t) = sum_{|n| <= N} c_n G(t - 2 pi n)``.  ``F`` vanishes on
``I + 2 pi Z``; when 0 falls inside a ``J`` cell that cell is multiplied by
``1 - exp(-t^2)`` so that ``F(0) = 0`` as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError, RangeError
from ..grid import SpectralFunction, UniformGrid
from ..norms import IntervalSpec, h1_norm
from ..transforms import complex_shift

TWO_PI = 2.0 * math.pi
#: positivity is only asserted for |u| <= this (the bump underflows near the ends)
POSITIVITY_BAND = 0.999
SCHEDULES = ("exponential", "gaussian")


def smooth_bump(u):
    """``e * exp(-1/(1 - u^2))`` on ``|u| < 1``, peak 1 at ``u = 0``."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    inside = np.abs(u) < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - u[inside] ** 2))
    return out


def zero_factor(t):
    """``1 - exp(-t^2)``: smooth, a double zero at 0 and positive elsewhere."""
    return -np.expm1(-np.asarray(t, dtype=float) ** 2)


def cell_weights(range_n: int, schedule: str = "exponential") -> tuple:
    """``c_n`` for ``n = -range_n..range_n``: ``exp(-|n|)`` or ``exp(-n^2)``."""
    if schedule not in SCHEDULES:
        raise ConfigurationError(f"schedule must be one of {SCHEDULES}", field="schedule")
    n = np.arange(-range_n, range_n + 1)
    c = np.exp(-np.abs(n)) if schedule == "exponential" else np.exp(-(n.astype(float) ** 2))
    return tuple(float(x) for x in c)


def _gap(I: IntervalSpec) -> IntervalSpec:
    return IntervalSpec(I.hi, I.lo + TWO_PI)


def _cell_of_zero(I: IntervalSpec, J: IntervalSpec):
    """``n0`` with ``0`` in ``J + 2 pi n0``, or ``None`` if ``0`` lies in ``I + 2 pi Z``."""
    k = math.floor(-J.lo / TWO_PI)
    for n0 in (k - 1, k, k + 1):
        if J.lo + TWO_PI * n0 < 0.0 < J.hi + TWO_PI * n0:
            return n0
    return None


@dataclass(frozen=True)
class PairRecipe:
    interval_I: IntervalSpec
    interval_J: IntervalSpec
    range_n: int
    coefficients: tuple
    zero_fix_index: int | None
    schedule: str = "exponential"

    def __post_init__(self):
        if not math.isclose(self.interval_I.length + self.interval_J.length, TWO_PI,
                            rel_tol=0, abs_tol=1e-12):
            raise ConfigurationError("|I| + |J| must equal 2 pi")
        for k in range(-self.range_n - 1, self.range_n + 2):
            lo, hi = self.interval_I.lo + TWO_PI * k, self.interval_I.hi + TWO_PI * k
            if lo < self.interval_J.hi and self.interval_J.lo < hi:
                raise ConfigurationError("J meets a translate of I")

    def cell(self, n: int) -> IntervalSpec:
        return self.interval_J.shifted(TWO_PI * n)

    def weight(self, n: int) -> float:
        return self.coefficients[n + self.range_n] if abs(n) <= self.range_n else 0.0

    def cell_coordinate(self, t, n: int):
        J = self.interval_J
        mid, half = 0.5 * (J.lo + J.hi), 0.5 * J.length
        return (np.asarray(t, dtype=float) - TWO_PI * n - mid) / half

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for n in range(-self.range_n, self.range_n + 1):
            term = self.weight(n) * smooth_bump(self.cell_coordinate(t, n))
            if n == self.zero_fix_index:
                term = term * zero_factor(t)
            out = out + term
        return out

    def sample(self, grid: UniformGrid) -> SpectralFunction:
        return SpectralFunction(grid, self(grid.nodes))

    def as_dict(self) -> dict:
        return {"interval_I": self.interval_I.as_list(), "interval_J": self.interval_J.as_list(),
                "range_n": self.range_n, "schedule": self.schedule,
                "coefficients": list(self.coefficients), "zero_fix_index": self.zero_fix_index}


def pair_recipe(I: IntervalSpec, range_n: int, schedule: str = "exponential") -> PairRecipe:
    if not 0 < I.length < TWO_PI:
        raise ConfigurationError(f"interval length must be in (0, 2 pi), got {I.length}",
                                 field="interval")
    if range_n < 1:
        raise ConfigurationError("range_n must be >= 1", field="range_n")
    J = _gap(I)
    return PairRecipe(I, J, int(range_n), cell_weights(range_n, schedule), _cell_of_zero(I, J),
                      schedule)


@dataclass(frozen=True)
class PairChecks:
    zero_set_max: float
    zero_at_origin: bool
    positive_on_cells: bool
    decay_constants: dict
    decay_rate: float
    periodicity_deviation: float
    shifted_h1: float | None
    notes: tuple = ()

    def zero_set_ok(self, tol: float = 1e-12) -> bool:
        return self.zero_set_max < tol and self.zero_at_origin

    def as_dict(self) -> dict:
        return {"zero_set_max": self.zero_set_max, "zero_at_origin": self.zero_at_origin,
                "positive_on_cells": self.positive_on_cells,
                "decay_constants": {str(b): c for b, c in self.decay_constants.items()},
                "decay_rate": self.decay_rate, "periodicity_deviation": self.periodicity_deviation,
                "shifted_h1": self.shifted_h1, "notes": list(self.notes)}


def decay_constant(F: SpectralFunction, b: float) -> float:
    """Smallest ``C`` with ``|F(t)| <= C exp(-b |t|)`` on the grid."""
    t = F.grid.nodes
    return float(np.max(np.abs(F.values) * np.exp(b * np.abs(t))))


def check_pair_spectrum(recipe: PairRecipe, F: SpectralFunction, decay_rates=(0.1, 0.3),
                        shift: float = 0.5) -> PairChecks:
    """Zero set, positivity, decay envelope, periodicity and the ``Im z = shift`` line."""
    t = F.grid.nodes
    v = F.values
    N = recipe.range_n
    in_I = np.zeros(t.size, dtype=bool)
    in_J = np.zeros(t.size, dtype=bool)
    for k in range(-N - 1, N + 2):
        in_I |= recipe.interval_I.shifted(TWO_PI * k).contains(t)
    for n in range(-N, N + 1):
        in_J |= np.abs(recipe.cell_coordinate(t, n)) <= POSITIVITY_BAND
    zero_max = float(np.max(np.abs(v[in_I]))) if np.any(in_I) else 0.0
    zi = F.grid.zero_index
    origin_ok = bool(v[zi] == 0.0)
    nonzero = in_J & (np.arange(t.size) != zi)
    positive = bool(np.all(v[nonzero] > 0))
    consts = {b: decay_constant(F, b) for b in decay_rates}
    # envelope slope from the per-cell peaks on the right
    peaks, centres = [], []
    for n in range(1, N + 1):
        if n == recipe.zero_fix_index:
            continue
        mask = recipe.cell(n).contains(t)
        if np.any(mask):
            peaks.append(np.max(v[mask]))
            centres.append(TWO_PI * n)
    rate = float(-np.polyfit(centres, np.log(peaks), 1)[0]) if len(peaks) >= 2 else math.nan
    dev = 0.0
    mid = 0.5 * (recipe.interval_J.lo + recipe.interval_J.hi)
    for n in range(1, N):
        if recipe.zero_fix_index in (n, n + 1):
            continue
        a = recipe(np.array([mid + TWO_PI * n]))[0]
        b = recipe(np.array([mid + TWO_PI * (n + 1)]))[0]
        expected = recipe.weight(n + 1) / recipe.weight(n)
        dev = max(dev, abs(b / a / expected - 1.0))
    notes = []
    try:
        shifted = float(h1_norm(complex_shift(F, shift)).value)
    except RangeError as exc:
        shifted = None
        notes.append(str(exc))
    return PairChecks(zero_max, origin_ok, positive, consts, rate, dev, shifted, tuple(notes))


@dataclass(frozen=True)
class PairResult:
    f1_spec: SpectralFunction
    f2_spec: SpectralFunction
    recipes: tuple
    checks: tuple = field(default=())
    covers: bool = True

    def as_dict(self) -> dict:
        return {"recipes": [r.as_dict() for r in self.recipes],
                "checks": [c.as_dict() for c in self.checks], "covers": self.covers}


def covers_symmetric(I1: IntervalSpec, I2: IntervalSpec, half: float = math.pi) -> bool:
    """Whether ``[-half, half]`` lies in ``I1 u I2`` (both closed)."""
    lo, hi = sorted([(I1.lo, I1.hi), (I2.lo, I2.hi)])
    if lo[0] > -half:
        return False
    reach = lo[1]
    if hi[0] <= reach:
        reach = max(reach, hi[1])
    return reach >= half


def pair_generators(I1: IntervalSpec, I2: IntervalSpec, grid: UniformGrid, range_n: int,
                    schedule: str = "exponential") -> PairResult:
    """Build both spectra on ``grid`` and check them.

    Raises
    ------
    ConfigurationError
        If an interval length is outside ``(0, 2 pi)``, the pair misses part of
        ``[-pi, pi]``, or the grid is too short for ``range_n`` cells.
    """
    if not covers_symmetric(I1, I2):
        raise ConfigurationError("intervals must cover [-pi, pi]", field="intervals")
    recipes = (pair_recipe(I1, range_n, schedule), pair_recipe(I2, range_n, schedule))
    for r in recipes:
        reach = max(abs(r.cell(-range_n).lo), abs(r.cell(range_n).hi))
        if not grid.contains(-reach, reach):
            raise ConfigurationError(
                f"grid half-extent {grid.half_extent:g} does not reach {reach:g}", field="grid")
    F1, F2 = (r.sample(grid) for r in recipes)
    checks = tuple(check_pair_spectrum(r, F) for r, F in zip(recipes, (F1, F2)))
    return PairResult(F1, F2, recipes, checks, True)
