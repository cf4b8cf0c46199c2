"""Tent map, tent coefficients and the partial sums ``F_n = sum delta_i tau_i Phi``."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError, ValidationError
from ..grid import SpectralFunction, UniformGrid
from ..norms import sobolev_norm, star_norm

#: W norm of a single tent: sqrt(2/3) + sqrt(2)
TENT_W_NORM = math.sqrt(2.0 / 3.0) + math.sqrt(2.0)


class Tent:
    """``Phi(z) = max(0, 1 - |z|)``, evaluable at any array of frequencies."""

    def __call__(self, z):
        return np.maximum(0.0, 1.0 - np.abs(np.asarray(z, dtype=float)))

    def sample(self, grid: UniformGrid, shift: float = 0.0) -> SpectralFunction:
        """``tau_shift Phi`` on ``grid``."""
        return SpectralFunction(grid, self(grid.nodes - shift))


def tent_phi() -> Tent:
    return Tent()


def epsilon_schedule(count: int) -> tuple:
    """Default ``eps_n = 2^-(n+1)`` for ``n = 1..count``."""
    return tuple(2.0 ** -(n + 1) for n in range(1, count + 1))


@dataclass(frozen=True)
class TentCoefficients:
    """``delta_i`` (stored for ``i >= 0``, mirrored to ``-i``) and the eps schedule.

    ``epsilon_schedule[n-1]`` is ``eps_n``.  ``delta_tilde(n) = eps_n - eps_(n+1)``
    needs ``eps_(n+1)``, so ``len(epsilon_schedule)`` must exceed the largest
    stored index.
    """

    deltas: tuple
    epsilon_schedule: tuple
    stage_multipliers: tuple = field(default=())

    def __post_init__(self):
        d = tuple(float(x) for x in self.deltas)
        eps = tuple(float(x) for x in self.epsilon_schedule)
        object.__setattr__(self, "deltas", d)
        object.__setattr__(self, "epsilon_schedule", eps)
        if not d or d[0] != 0.0:
            raise ValidationError("delta_0 must be 0")
        if any(x < 0 for x in d):
            raise ValidationError("deltas must be nonnegative")
        if not eps or eps[0] > 0.5 or any(b >= a for a, b in zip(eps, eps[1:])) or eps[-1] <= 0:
            raise ValidationError("eps must be positive, strictly decreasing and <= 1/2")
        if len(d) - 1 >= len(eps):
            raise ValidationError("epsilon schedule too short for the stored deltas")
        if len(d) > 1 and not math.isclose(d[1], self.delta_tilde(1), rel_tol=1e-15, abs_tol=0):
            raise ValidationError("delta_1 must equal eps_1 - eps_2")
        for n in range(2, len(d)):
            if d[n] > self.delta_tilde(n) / 4 * (1 + 1e-15):
                raise ValidationError(f"delta_{n} exceeds delta_tilde_{n}/4")

    @property
    def top(self) -> int:
        return len(self.deltas) - 1

    def delta(self, i: int) -> float:
        i = abs(int(i))
        if i > self.top:
            raise ConfigurationError(f"delta_{i} is not defined (top index {self.top})")
        return self.deltas[i]

    def delta_tilde(self, n: int) -> float:
        return self.epsilon_schedule[n - 1] - self.epsilon_schedule[n]

    def tail_sum(self, n: int) -> float:
        """``sum_{k > n} delta_tilde_k`` over the schedule, equal to ``eps_(n+1)`` up to the last term."""
        return sum(self.delta_tilde(k) for k in range(n + 1, len(self.epsilon_schedule)))

    def extended(self, delta: float, multiplier: float = 1.0) -> "TentCoefficients":
        return TentCoefficients(self.deltas + (float(delta),), self.epsilon_schedule,
                                self.stage_multipliers + (float(multiplier),))

    def as_dict(self):
        return {"deltas": list(self.deltas), "epsilon_schedule": list(self.epsilon_schedule),
                "stage_multipliers": list(self.stage_multipliers)}

    def evaluate(self, z, n: int | None = None) -> np.ndarray:
        """``F_n(z)``; ``n`` defaults to the top stored index."""
        n = self.top if n is None else n
        if n > self.top:
            raise ConfigurationError(f"delta_{n} is not defined (top index {self.top})")
        phi = Tent()
        z = np.asarray(z, dtype=float)
        out = np.zeros_like(z)
        for i in range(1, n + 1):
            d = self.deltas[i]
            if d:
                out += d * (phi(z - i) + phi(z + i))
        return out


def initial_coefficients(epsilon=None, stages: int = 4) -> TentCoefficients:
    """``delta_0 = 0`` and ``delta_1 = eps_1 - eps_2``."""
    eps = tuple(epsilon) if epsilon is not None else epsilon_schedule(stages + 1)
    return TentCoefficients((0.0, eps[0] - eps[1]), eps)


def partial_sum_F(coeffs: TentCoefficients, n: int, grid: UniformGrid) -> SpectralFunction:
    """``F_n = sum_{|i| <= n} delta_i tau_i Phi`` sampled on ``grid``."""
    return SpectralFunction(grid, coeffs.evaluate(grid.nodes, n))


@dataclass(frozen=True)
class TentProperties:
    """Checks of the four listed properties of ``F_n`` at one stage."""

    n: int
    support_ok: bool
    increment_w: float
    increment_bound: float
    increment_ok: bool
    star: float
    star_bound: float
    star_ok: bool
    star_equality: bool
    w_norm: float
    delta_sum: float
    w_ratio: float

    def all_ok(self) -> bool:
        return self.support_ok and self.increment_ok and self.star_ok


def tent_properties(coeffs: TentCoefficients, n: int, grid: UniformGrid) -> TentProperties:
    """Support, increment, star-norm and W-norm checks for ``F_n``.

    The star-norm check asserts ``||F_n||_* <= 2 max delta_i`` and records
    whether equality holds (to 1e-12 relative).
    """
    z = grid.nodes
    Fn = partial_sum_F(coeffs, n, grid)
    prev = partial_sum_F(coeffs, n - 1, grid) if n >= 1 else Fn.with_values(np.zeros(grid.points))
    outside = np.abs(z) > n + 1 + 1e-12
    support_ok = bool(np.all(Fn.values[outside] == 0.0))
    if coeffs.delta(n) > 0:
        inside = np.abs(z) < n + 1 - grid.spacing
        support_ok = support_ok and bool(np.any(Fn.values[inside & (np.abs(z) > n)] > 0))
    inc = sobolev_norm(Fn - prev)
    dn = coeffs.delta(n)
    inc_ok = inc < 4 * dn if dn > 0 else inc == 0.0
    star = star_norm(Fn)
    top = 2 * max(coeffs.deltas[1:n + 1]) if n >= 1 else 0.0
    star_ok = star <= top * (1 + 1e-12)
    equality = math.isclose(star, top, rel_tol=1e-12)
    w = sobolev_norm(Fn)
    dsum = 2 * sum(coeffs.deltas[1:n + 1])
    ratio = w / dsum if dsum else 0.0
    return TentProperties(n, support_ok, inc, 4 * dn, bool(inc_ok), star, top, bool(star_ok),
                          bool(equality), w, dsum, ratio)
