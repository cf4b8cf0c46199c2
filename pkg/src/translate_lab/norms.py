"""Norms and seminorms: L^p, H^1, BMO, Sobolev W(I), star norm.

Also the BMO truncation ``h_r = h / max(1, |h|/r)`` and the pairing of an
H^1 function with a BMO function as the limit of ``integral f h_r``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import ConfigurationError, DomainError
from .grid import SampledFunction, SpectralFunction, UniformGrid, integrate, interval_weights
from .transforms import MEAN_ZERO_FLAG, hilbert_transform, spectral_derivative

#: all_windows is used up to this many nodes, dyadic beyond
ALL_WINDOWS_LIMIT = 2048


@dataclass(frozen=True)
class IntervalSpec:
    lo: float
    hi: float

    def __post_init__(self):
        if not (self.lo < self.hi):
            raise ConfigurationError(f"interval needs lo < hi, got [{self.lo}, {self.hi}]")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def dist_to_zero(self) -> float:
        """Distance from the nearest endpoint to 0 (0 if the interval straddles 0)."""
        if self.lo <= 0 <= self.hi:
            return 0.0
        return min(abs(self.lo), abs(self.hi))

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x)
        return (x >= self.lo) & (x <= self.hi)

    def shifted(self, s: float) -> "IntervalSpec":
        return IntervalSpec(self.lo + s, self.hi + s)

    def as_list(self):
        return [self.lo, self.hi]


@dataclass(frozen=True)
class NormReport:
    value: float
    discretization_note: str = ""
    low_confidence: bool = False
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (math.isfinite(self.value) and self.value >= 0):
            raise DomainError(f"norm value must be finite and nonnegative, got {self.value}")

    def __float__(self):
        return float(self.value)


def lp_norm(f, p: float) -> float:
    """``(integral |f|^p)^(1/p)``; ``p = inf`` gives the max modulus."""
    if p < 1:
        raise DomainError(f"p must be >= 1, got {p}")
    a = np.abs(f.values)
    if math.isinf(p):
        return float(np.max(a))
    return float(f.grid.spacing * np.sum(a ** p)) ** (1.0 / p)


def h1_norm(f: SampledFunction, pad: int = 2, horizon_factor: float = 10.0) -> NormReport:
    """``||f||_1 + ||Hf||_1`` with an analytic estimate of the Hilbert tail.

    The Hilbert transform is computed with ``pad``-fold zero padding.  Outside
    the grid ``|Hf(x)|`` is modelled as ``c/|x|`` with ``c`` fitted on each
    outer 10% of the grid, and ``c log(horizon/L)`` is added per side.
    """
    grid = f.grid
    Hf = hilbert_transform(f, pad=pad)
    l1 = lp_norm(f, 1)
    hl1 = lp_norm(Hf, 1)
    x = grid.nodes
    L = grid.half_extent
    a = np.abs(Hf.values)
    right = x >= 0.9 * L
    left = x <= -0.9 * L
    c_right = float(np.mean(a[right] * np.abs(x[right])))
    c_left = float(np.mean(a[left] * np.abs(x[left])))
    tail = (c_left + c_right) * math.log(horizon_factor)
    low = MEAN_ZERO_FLAG in Hf.flags
    note = (f"grid L={L:g} n={grid.points}; Hilbert pad={pad}; "
            f"tail c/|x| with c=({c_left:.3g},{c_right:.3g}) to horizon {horizon_factor:g}L "
            f"adds {tail:.3g}")
    return NormReport(l1 + hl1 + tail, note, low,
                      {"l1": l1, "hilbert_l1": hl1, "tail": tail})


def _window_oscillations(v, length):
    w = sliding_window_view(v, length)
    m = w.mean(axis=1, keepdims=True)
    return np.abs(w - m).mean(axis=1)


def bmo_seminorm(h: SampledFunction, window_policy: str = "auto") -> NormReport:
    """Sup over grid-aligned windows of the mean oscillation.

    Each node stands for a cell of width ``spacing``, so the window mean
    oscillation is the plain average of ``|h - h_I|`` over its nodes.

    Parameters
    ----------
    window_policy : {"all_windows", "dyadic", "auto"}
        ``all_windows`` scans every contiguous window of at least two nodes;
        ``dyadic`` only power-of-two lengths at every offset.  ``auto`` picks
        ``all_windows`` up to :data:`ALL_WINDOWS_LIMIT` nodes.
    """
    v = np.asarray(h.values)
    # the seminorm ignores constants; shifting by one sample keeps constants exact
    v = v - v[0]
    n = v.size
    if window_policy == "auto":
        window_policy = "all_windows" if n <= ALL_WINDOWS_LIMIT else "dyadic"
    if window_policy == "all_windows":
        lengths = range(2, n + 1)
    elif window_policy == "dyadic":
        lengths = [2 ** k for k in range(1, int(math.log2(n)) + 1)]
    else:
        raise ConfigurationError(f"unknown window policy {window_policy!r}", field="window_policy")
    best, where = 0.0, (0, n)
    for length in lengths:
        osc = _window_oscillations(v, length)
        j = int(np.argmax(osc))
        if osc[j] > best:
            best, where = float(osc[j]), (j, j + length)
    x = h.grid.nodes
    growth = float(h.grid.spacing * np.sum(np.abs(v) / (1 + np.abs(x)) ** 2))
    note = f"{window_policy} windows on n={n}; growth integral {growth:.4g}"
    return NormReport(best, note, False, {
        "window": [float(x[where[0]]), float(x[where[1] - 1])],
        "window_nodes": list(where),
        "growth_integral": growth,
        "policy": window_policy,
    })


def _interval_weights_for(F, I):
    if I is None:
        return np.full(F.grid.points, F.grid.spacing)
    lo, hi = (I.lo, I.hi) if isinstance(I, IntervalSpec) else I
    L = F.grid.half_extent
    tol = 1e-12 * L
    if lo < -L - tol or hi > L - F.grid.spacing + tol:
        raise DomainError(f"interval [{lo}, {hi}] is not inside the grid [-{L}, {L})")
    return interval_weights(F.grid, lo, hi)


def sobolev_norm(F: SpectralFunction, I=None) -> float:
    """``||F||_{L2(I)} + ||F'||_{L2(I)}``; ``I=None`` means the whole grid.

    The derivative is the finite-difference one of
    :func:`~translate_lab.transforms.spectral_derivative`, taken on the full
    grid before restriction to ``I``.
    """
    w = _interval_weights_for(F, I)
    d = spectral_derivative(F).values
    return float(math.sqrt(np.sum(w * np.abs(F.values) ** 2))
                 + math.sqrt(np.sum(w * np.abs(d) ** 2)))


def sobolev_parts(F: SpectralFunction, I=None) -> tuple:
    """``(||F||_{L2(I)}, ||F'||_{L2(I)})`` separately."""
    w = _interval_weights_for(F, I)
    d = spectral_derivative(F).values
    return (float(math.sqrt(np.sum(w * np.abs(F.values) ** 2))),
            float(math.sqrt(np.sum(w * np.abs(d) ** 2))))


def star_norm(K: SpectralFunction) -> float:
    """``||K||_inf + ||K'||_inf``."""
    return float(np.max(np.abs(K.values)) + np.max(np.abs(spectral_derivative(K).values)))


def bmo_truncate(h: SampledFunction, r: float) -> SampledFunction:
    """``h_r = h / max(1, |h|/r)``, so ``||h_r||_inf <= r``."""
    if not r > 0:
        raise DomainError(f"truncation level must be positive, got {r}")
    v = h.values
    return h.with_values(v / np.maximum(1.0, np.abs(v) / r))


@dataclass(frozen=True)
class Pairing:
    value: complex
    sequence: tuple
    schedule: tuple


def bmo_pair(f: SampledFunction, h: SampledFunction, r_schedule) -> Pairing:
    """``integral f h_r`` along an increasing schedule of truncation levels.

    ``value`` is the last entry; ``sequence`` keeps all of them so that
    convergence can be inspected.
    """
    schedule = tuple(float(r) for r in r_schedule)
    if not schedule or any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise ConfigurationError("r_schedule must be nonempty and strictly increasing",
                                 field="r_schedule")
    if f.grid != h.grid:
        raise ConfigurationError("f and h live on different grids")
    seq = tuple(integrate(f * bmo_truncate(h, r)) for r in schedule)
    return Pairing(seq[-1], seq, schedule)
