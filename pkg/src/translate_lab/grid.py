"""Uniform grids, sampled functions and trapezoidal quadrature.

A grid of ``points`` nodes covers ``[-L, L)`` with nodes ``x_j = -L + j*h``
and ``h = 2L/points``.  The node at ``-L`` doubles as the closing node at
``+L``: quadrature is the closed trapezoidal rule on ``[-L, L]`` where the two
half-weighted endpoints have been merged into node 0.  Consequently
``SampledFunction.from_callable`` stores ``(f(-L) + f(L))/2`` at node 0, which
makes ``integrate`` exact for piecewise linear integrands with kinks on nodes
and keeps the layout identical to the periodic one the FFT expects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DomainError


@dataclass(frozen=True, eq=False)
class UniformGrid:
    """Symmetric dyadic grid on ``[-half_extent, half_extent)``.

    Equality tolerates a relative extent mismatch of 1e-12 so that
    ``grid.dual().dual() == grid`` despite rounding.
    """

    half_extent: float
    points: int

    def __post_init__(self):
        if not (math.isfinite(self.half_extent) and self.half_extent > 0):
            raise ConfigurationError(
                f"half_extent must be positive, got {self.half_extent!r}", field="half_extent")
        p = self.points
        if int(p) != p or p < 8 or (int(p) & (int(p) - 1)) != 0:
            raise ConfigurationError(
                f"points must be a power of two >= 8, got {p!r}", field="points")
        object.__setattr__(self, "points", int(p))
        object.__setattr__(self, "half_extent", float(self.half_extent))

    def __eq__(self, other):
        if not isinstance(other, UniformGrid):
            return NotImplemented
        return self.points == other.points and math.isclose(
            self.half_extent, other.half_extent, rel_tol=1e-12)

    def __hash__(self):
        return hash((self.points, round(self.half_extent, 9)))

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_extent / self.points

    @property
    def nodes(self) -> np.ndarray:
        return -self.half_extent + self.spacing * np.arange(self.points)

    @property
    def zero_index(self) -> int:
        """Index of the node at 0."""
        return self.points // 2

    def dual(self) -> "UniformGrid":
        """Frequency grid paired with this grid by the FFT.

        Dual spacing is ``pi / half_extent``; the dual of the dual is the
        original grid.
        """
        return UniformGrid(math.pi * self.points / (2.0 * self.half_extent), self.points)

    def contains(self, lo: float, hi: float) -> bool:
        return lo >= -self.half_extent and hi <= self.half_extent

    def as_dict(self) -> dict:
        return {"half_extent": self.half_extent, "points": self.points}


def make_grid(half_extent: float, points: int) -> UniformGrid:
    """Build a :class:`UniformGrid`, validating extent and size."""
    return UniformGrid(half_extent, points)


def frequency_grid(spacing: float, half_extent: float) -> UniformGrid:
    """Frequency grid with the given node spacing covering at least ``half_extent``.

    Picks the smallest power-of-two size; the spatial dual then has
    half-extent ``pi/spacing``.
    """
    if spacing <= 0 or half_extent <= 0:
        raise ConfigurationError("spacing and half_extent must be positive")
    points = 8
    while points * spacing < 2.0 * half_extent:
        points *= 2
    return UniformGrid(points * spacing / 2.0, points)


@dataclass(frozen=True)
class _GridFunction:
    grid: UniformGrid
    values: np.ndarray
    flags: tuple = field(default=(), compare=False)

    def __post_init__(self):
        values = np.asarray(self.values)
        if not np.iscomplexobj(values):
            values = values.astype(float)
        if values.shape != (self.grid.points,):
            raise ConfigurationError(
                f"expected {self.grid.points} values, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise DomainError("sampled values must be finite")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "flags", tuple(self.flags))

    @property
    def nodes(self) -> np.ndarray:
        return self.grid.nodes

    @classmethod
    def from_callable(cls, func, grid: UniformGrid, **kwargs):
        """Sample ``func`` on ``grid``; node 0 receives ``(f(-L) + f(L))/2``."""
        x = grid.nodes
        values = np.asarray(func(x))
        if values.shape == ():
            values = np.full(x.shape, values)
        values = values.astype(complex if np.iscomplexobj(values) else float)
        closing = np.asarray(func(np.array([grid.half_extent])))
        values[0] = 0.5 * (values[0] + closing.reshape(-1)[0])
        return cls(grid, values, **kwargs)

    def with_values(self, values, flags=()):
        return type(self)(self.grid, values, flags)

    def __call__(self, x):
        """Linear interpolation at arbitrary points (zero outside the grid)."""
        return _interp(self.grid, self.values, np.asarray(x, dtype=float))

    def __add__(self, other):
        _check_same_grid(self, other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other):
        _check_same_grid(self, other)
        return self.with_values(self.values - other.values)

    def __mul__(self, other):
        if isinstance(other, _GridFunction):
            _check_same_grid(self, other)
            return self.with_values(self.values * other.values)
        return self.with_values(self.values * other)

    __rmul__ = __mul__

    def __neg__(self):
        return self.with_values(-self.values)


class SampledFunction(_GridFunction):
    """Function of the spatial variable sampled on a :class:`UniformGrid`."""


class SpectralFunction(_GridFunction):
    """Function of the frequency variable sampled on a frequency grid."""


def _check_same_grid(a, b):
    if a.grid != b.grid:
        raise ConfigurationError("functions live on different grids")


def _interp(grid, values, x):
    # periodic closing node at +L carries the node-0 value
    xp = np.append(grid.nodes, grid.half_extent)
    fp = np.append(values, values[0])
    inside = (x >= -grid.half_extent) & (x <= grid.half_extent)
    if np.iscomplexobj(fp):
        out = np.interp(x, xp, fp.real) + 1j * np.interp(x, xp, fp.imag)
    else:
        out = np.interp(x, xp, fp)
    return np.where(inside, out, 0.0)


def integrate(f: _GridFunction) -> complex:
    """Closed trapezoidal rule on ``[-L, L]``: ``spacing * sum(values)``.

    Returns a Python float for real input and complex otherwise.
    """
    total = f.grid.spacing * np.sum(f.values)
    if np.iscomplexobj(total):
        return complex(total)
    return float(total)


def resample(f: _GridFunction, target: UniformGrid) -> _GridFunction:
    """Linear interpolation of ``f`` onto ``target``.

    Raises
    ------
    DomainError
        If ``target`` extends beyond the source grid.
    """
    if target.half_extent > f.grid.half_extent * (1 + 1e-14):
        raise DomainError(
            f"target extent {target.half_extent} exceeds source extent {f.grid.half_extent}")
    if target == f.grid:
        return type(f)(target, f.values)
    return type(f)(target, _interp(f.grid, f.values, target.nodes))


def interval_weights(grid: UniformGrid, lo: float, hi: float) -> np.ndarray:
    """Quadrature weights for ``integral_lo^hi`` of the piecewise linear interpolant.

    The result integrates any function that is linear between nodes exactly.
    ``[lo, hi]`` is clipped to ``[-L, L - h]``.
    """
    x = grid.nodes
    h = grid.spacing
    lo = max(lo, x[0])
    hi = min(hi, x[-1])
    w = np.zeros(grid.points)
    if hi <= lo:
        return w
    j0 = int(np.clip(np.floor((lo - x[0]) / h), 0, grid.points - 2))
    j1 = int(np.clip(np.ceil((hi - x[0]) / h), 1, grid.points - 1))
    j = np.arange(j0, j1)
    left, right = x[j], x[j + 1]
    a = np.maximum(lo, left)
    b = np.minimum(hi, right)
    keep = b > a
    j, left, right, a, b = j[keep], left[keep], right[keep], a[keep], b[keep]
    # integrals of the two hat pieces over [a, b]
    np.add.at(w, j, ((right - a) ** 2 - (right - b) ** 2) / (2 * h))
    np.add.at(w, j + 1, ((b - left) ** 2 - (a - left) ** 2) / (2 * h))
    return w
