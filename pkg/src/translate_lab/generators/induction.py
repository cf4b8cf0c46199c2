"""Inductive construction of a single generator ``f`` with ``f_hat = F = sum delta_i tau_i Phi``.

Stage ``n`` picks ``delta_n = delta_tilde_n / (4 max{1, ||p_1||_*, ..., ||p_(n-1)||_*})``
and fits ``p_n`` in ``E(Lambda)`` so that ``||G_n - p_n F_n||_W`` is below
``delta_tilde_n``.  The recorded stage error is ``||G_n - p_n F||_W`` for the
final ``F``, which the telescoping chain bounds by ``eps_n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import linalg

from ..errors import ConfigurationError
from ..grid import SampledFunction, SpectralFunction, UniformGrid, interval_weights
from ..lambda_sets import DiscreteSet
from ..norms import IntervalSpec, h1_norm, sobolev_norm
from ..transforms import fourier_inverse, real_if_close, spectral_derivative
from .tent import TentCoefficients, initial_coefficients, partial_sum_F, tent_properties

FORMAT_VERSION = 1


def cos4_bump(u):
    """``cos(pi u/2)^4`` on ``|u| < 1``: a C^3 bump with a fourth-order zero at the ends."""
    u = np.asarray(u, dtype=float)
    return np.where(np.abs(u) < 1.0, np.cos(0.5 * math.pi * u) ** 4, 0.0)


@dataclass(frozen=True)
class Bump:
    """``amplitude * (b((z - c)/w) + mirror * b((z + c)/w))`` with ``b = cos4_bump``."""

    center: float
    halfwidth: float
    amplitude: Fraction
    mirror: int = 1

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        a = float(self.amplitude)
        return a * (cos4_bump((z - self.center) / self.halfwidth)
                    + self.mirror * cos4_bump((z + self.center) / self.halfwidth))

    @property
    def support(self) -> IntervalSpec:
        return IntervalSpec(self.center - self.halfwidth, self.center + self.halfwidth)

    def as_dict(self):
        return {"center": self.center, "halfwidth": self.halfwidth,
                "amplitude": str(self.amplitude), "mirror": self.mirror}


@dataclass(frozen=True)
class FamilyMember:
    index: int
    bumps: tuple = ()

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        out = np.zeros_like(z)
        for b in self.bumps:
            out = out + b(z)
        return out

    def sample(self, grid: UniformGrid) -> SpectralFunction:
        return SpectralFunction(grid, self(grid.nodes))

    @property
    def allowed(self) -> IntervalSpec:
        """Positive half of ``I_n = [-n, -1/n] u [1/n, n]``."""
        return IntervalSpec(1.0 / self.index, float(self.index))

    def as_dict(self):
        return {"index": self.index, "bumps": [b.as_dict() for b in self.bumps]}


@dataclass(frozen=True)
class DenseFamily:
    """Finite stand-in for a dense family ``{G_n}`` in ``W0`` with ``supp G_n`` in ``I_n``."""

    members: tuple
    seed: int
    grid: UniformGrid

    def __len__(self):
        return len(self.members)

    def member(self, n: int) -> FamilyMember:
        return self.members[n - 1]

    def sample(self, n: int, grid: UniformGrid | None = None) -> SpectralFunction:
        return self.member(n).sample(grid or self.grid)

    @property
    def ref(self) -> str:
        return f"cos4-cells(seed={self.seed}, count={len(self.members)})"

    def as_dict(self):
        return {"ref": self.ref, "seed": self.seed, "members": [m.as_dict() for m in self.members]}


def _cells(n):
    cells = [(float(k), float(k + 1)) for k in range(1, n)]
    if n >= 3:
        cells.insert(0, (1.0 / n, 1.0))
    return cells


def build_dense_family(count: int, grid: UniformGrid, seed: int, bumps_per_member: int = 2,
                       target_norm=(0.5, 1.0)) -> DenseFamily:
    """``G_1 = 0``; ``G_n`` for ``n >= 2`` is a rational combination of cell bumps.

    Each bump fills one cell ``[k, k+1]`` (``1 <= k < n``) or, for ``n >= 3``,
    the cell ``[1/n, 1]``, mirrored to the negative axis with a random sign.
    Keeping every bump inside one cell makes ``G_n / F_n`` smooth because
    ``F_n`` is linear on cells.  Amplitudes are multiples of 1/16 chosen so
    that ``||G_n||_W`` lands near a random value in ``target_norm``.
    """
    if count < 1:
        raise ConfigurationError("count must be >= 1", field="count")
    rng = np.random.default_rng(seed)
    members = [FamilyMember(1, ())]
    for n in range(2, count + 1):
        cells = _cells(n)
        k = min(bumps_per_member, len(cells))
        chosen = sorted(rng.choice(len(cells), size=k, replace=False))
        raw = []
        for idx in chosen:
            lo, hi = cells[idx]
            sign = int(rng.choice([-1, 1]))
            mirror = int(rng.choice([-1, 1]))
            weight = rng.uniform(0.5, 1.0)
            raw.append(((lo + hi) / 2, (hi - lo) / 2, sign * weight, mirror))
        shape = FamilyMember(n, tuple(Bump(c, w, Fraction(a).limit_denominator(1 << 20), m)
                                      for c, w, a, m in raw))
        scale = rng.uniform(*target_norm) / sobolev_norm(shape.sample(grid))
        bumps = tuple(Bump(c, w, Fraction(round(16 * a * scale), 16) or Fraction(1, 16), m)
                      for c, w, a, m in raw)
        members.append(FamilyMember(n, bumps))
    return DenseFamily(tuple(members), seed, grid)


@dataclass(frozen=True)
class PolynomialFit:
    """``p(z) = sum_j c_j exp(i lambda_j z)`` and its achieved residual."""

    frequencies: np.ndarray
    coefficients: np.ndarray
    residual_W: float
    converged: bool
    bound: float | None = None
    penalty: float = 0.0
    notes: tuple = ()

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        if self.frequencies.size == 0:
            return np.zeros(z.shape, dtype=complex)
        return np.exp(1j * np.outer(z, self.frequencies)) @ self.coefficients

    def sample(self, grid: UniformGrid) -> SpectralFunction:
        return SpectralFunction(grid, self(grid.nodes))

    def star_on(self, grid: UniformGrid, window: IntervalSpec) -> float:
        """``sup |p| + sup |p'|`` over grid nodes in ``window`` (finite differences)."""
        P = self.sample(grid)
        inside = window.contains(grid.nodes)
        d = spectral_derivative(P).values
        return float(np.max(np.abs(P.values[inside])) + np.max(np.abs(d[inside])))

    def active(self, tol: float = 1e-8) -> int:
        return int(np.sum(np.abs(self.coefficients) > tol))


def _thin(lam, spacing):
    if spacing is None or lam.size == 0:
        return lam
    keep = [lam[0]]
    for x in lam[1:]:
        if x - keep[-1] >= spacing:
            keep.append(x)
    return np.array(keep)


def offered_frequencies(points: DiscreteSet, cap: float, max_terms: int | None = None,
                        min_spacing: float | None = None) -> np.ndarray:
    """``Lambda & [-cap, cap]``, optionally thinned to a minimum spacing and
    truncated to the ``max_terms`` frequencies of smallest modulus."""
    lam = points.points[np.abs(points.points) <= cap]
    lam = _thin(lam, min_spacing)
    if max_terms is not None and lam.size > max_terms:
        order = np.lexsort((lam, np.abs(lam)))[:max_terms]
        lam = np.sort(lam[order])
    return lam


def fit_polynomial(target: SpectralFunction, points: DiscreteSet, interval: IntervalSpec,
                   max_terms: int | None = None, *, weight: SpectralFunction | None = None,
                   bound: float | None = None, frequency_cap: float | None = None,
                   min_spacing: float | None = None, penalty_window: IntervalSpec | None = None,
                   accept_fraction: float = 0.5) -> PolynomialFit:
    """Least squares for ``target ~ weight * p`` in the Hilbert form of ``W(I)``.

    The objective is ``||target - weight p||_L2(I)^2 + ||(target - weight p)'||_L2(I)^2``
    with derivatives taken by the same finite differences as
    :func:`~translate_lab.norms.sobolev_norm`.  ``weight`` defaults to 1.

    When ``bound`` and ``penalty_window`` are given, a penalty
    ``alpha ||p||^2_W(window)`` is added and ``alpha`` is lowered in
    half-decade steps until the residual drops below
    ``accept_fraction * bound``; the largest such ``alpha`` keeps ``p`` (and
    hence ``||p||_*``) as small as the bound allows.  If no ``alpha`` reaches
    the bound the fit with the smallest residual is returned with
    ``converged=False``.

    Parameters
    ----------
    frequency_cap : float, optional
        Offer only ``|lambda| <= frequency_cap``; defaults to
        ``4 max(|lo|, |hi|)``.
    """
    grid = target.grid
    if weight is not None and weight.grid != grid:
        raise ConfigurationError("target and weight live on different grids")
    if len(points) == 0:
        raise ConfigurationError("empty frequency set", field="lambda")
    cap = frequency_cap if frequency_cap is not None else 4.0 * max(abs(interval.lo), abs(interval.hi))
    lam = offered_frequencies(points, cap, max_terms, min_spacing)
    h = grid.spacing
    w = interval_weights(grid, interval.lo, interval.hi)
    rows = w > 0
    z = grid.nodes
    if lam.size == 0 or not np.any(target.values):
        resid = sobolev_norm(target, interval)
        coeffs = np.zeros(lam.size, dtype=complex)
        return PolynomialFit(lam, coeffs, resid, bound is None or resid < bound, bound)
    wt = np.ones(grid.points) if weight is None else weight.values
    B = np.exp(1j * np.outer(z, lam))
    M = B * wt[:, None]
    dM = np.gradient(M, h, axis=0)
    sw = np.sqrt(w[rows])[:, None]
    A = np.vstack([sw * M[rows], sw * dM[rows]])
    dt = np.gradient(target.values, h)
    b = np.concatenate([sw[:, 0] * target.values[rows], sw[:, 0] * dt[rows]])

    def residual(c):
        return sobolev_norm(target.with_values(target.values - wt * (B @ c)), interval)

    if bound is None or penalty_window is None:
        c = linalg.lstsq(A, b, lapack_driver="gelsy")[0]
        r = residual(c)
        return PolynomialFit(lam, c, r, bound is None or r < bound, bound)

    win = penalty_window.contains(z)
    pw = math.sqrt(h)
    P = np.vstack([pw * B[win], pw * np.gradient(B, h, axis=0)[win]])
    scale = np.linalg.norm(A) / np.linalg.norm(P)
    zeros = np.zeros(P.shape[0], dtype=complex)
    best = None
    for k in range(0, 33):
        alpha = 10.0 ** (-k / 2)
        AA = np.vstack([A, math.sqrt(alpha) * scale * P])
        c = linalg.lstsq(AA, np.concatenate([b, zeros]), lapack_driver="gelsy")[0]
        r = residual(c)
        if best is None or r < best[1]:
            best = (c, r, alpha)
        if r < accept_fraction * bound:
            return PolynomialFit(lam, c, r, True, bound, alpha)
    c, r, alpha = best
    return PolynomialFit(lam, c, r, r < bound, bound, alpha,
                         ("no penalty level reached the requested bound",))


@dataclass(frozen=True)
class StageRecord:
    index: int
    delta: float
    delta_tilde: float
    epsilon: float
    fit: PolynomialFit
    fit_interval: IntervalSpec
    star: float
    lower_bound_ok: bool
    quotient_residual: float
    frequency_cap: float


@dataclass(frozen=True)
class GeneratorRecipe:
    coefficients: TentCoefficients
    stages: tuple
    stage_errors: tuple
    family: DenseFamily
    grid: UniformGrid
    chain_bounds: tuple = ()
    properties: tuple = ()
    warnings: tuple = ()

    @property
    def family_ref(self) -> str:
        return self.family.ref

    @property
    def stage_polynomials(self):
        return tuple(s.fit for s in self.stages)

    def spectrum(self, grid: UniformGrid | None = None) -> SpectralFunction:
        """The generator spectrum ``F`` (sum over all stored deltas)."""
        return partial_sum_F(self.coefficients, self.coefficients.top, grid or self.grid)

    def generator(self) -> SampledFunction:
        """``f = F-check`` on the spatial grid dual to :attr:`grid`."""
        return real_if_close(fourier_inverse(self.spectrum()))

    def stage_ok(self) -> tuple:
        return tuple(e < s.epsilon for e, s in zip(self.stage_errors, self.stages))

    def recompute_stage_errors(self, grid: UniformGrid) -> tuple:
        """``||G_n - p_n F||_W`` evaluated from the analytic pieces on another grid."""
        F = self.spectrum(grid)
        out = []
        for s in self.stages:
            G = self.family.sample(s.index, grid)
            out.append(sobolev_norm(G - F * s.fit.sample(grid)))
        return tuple(out)

    def frequencies_used(self) -> np.ndarray:
        parts = [s.fit.frequencies[np.abs(s.fit.coefficients) > 0] for s in self.stages]
        return np.unique(np.concatenate(parts)) if parts else np.array([])

    def as_dict(self) -> dict:
        return {
            "version": FORMAT_VERSION,
            "grid": self.grid.as_dict(),
            "family": self.family.as_dict(),
            **self.coefficients.as_dict(),
            "stages": [{
                "index": s.index, "delta": s.delta, "delta_tilde": s.delta_tilde,
                "epsilon": s.epsilon, "frequencies": s.fit.frequencies.tolist(),
                "coefficients": [[float(c.real), float(c.imag)] for c in s.fit.coefficients],
                "fit_residual": s.fit.residual_W, "penalty": s.fit.penalty, "star": s.star,
                "converged": s.fit.converged, "lower_bound_ok": s.lower_bound_ok,
                "quotient_residual": s.quotient_residual, "frequency_cap": s.frequency_cap,
            } for s in self.stages],
            "stage_errors": list(self.stage_errors),
            "chain_bounds": list(self.chain_bounds),
            "warnings": list(self.warnings),
        }


def _quotient_residual(G, Fn, fit, interval):
    q = np.zeros(G.grid.points)
    mask = (G.values != 0) & (Fn.values > 0)
    q[mask] = G.values[mask] / Fn.values[mask]
    return sobolev_norm(G.with_values(q - fit.sample(G.grid).values), interval)


def construct_generator(points: DiscreteSet, family: DenseFamily, stages: int, *,
                        epsilon=None, cap_factor: float = 8.0, thin: bool = True,
                        density_classification: str | None = None) -> GeneratorRecipe:
    """Run the stage induction on the family's grid.

    Parameters
    ----------
    points : DiscreteSet
        Frequencies available to the stage polynomials.
    family : DenseFamily
        Provides ``G_1, ..., G_stages`` and the frequency grid.
    stages : int
    epsilon : sequence, optional
        ``eps_1, ..., eps_(stages+1)``; default ``2^-(n+1)``.
    cap_factor : float
        Stage ``n`` offers ``|lambda| <= cap_factor (n + 1)``.
    thin : bool
        Thin the offered frequencies to spacing ``pi / (2 (n + 1))``; denser
        frequencies add conditioning trouble but no approximation power on
        ``[-(n+1), n+1]``.
    density_classification : str, optional
        Result of the density estimate for ``points``; anything other than
        ``"infinite-flagged"`` adds a warning.
    """
    if stages < 1 or stages > len(family):
        raise ConfigurationError(f"stages must be in 1..{len(family)}", field="stages")
    grid = family.grid
    warnings = []
    if density_classification is not None and density_classification != "infinite-flagged":
        warnings.append(f"Lambda classified {density_classification}; bounds may fail")
    coeffs = initial_coefficients(epsilon, stages)
    if len(coeffs.epsilon_schedule) < stages + 1:
        raise ConfigurationError("epsilon schedule needs stages + 1 entries", field="epsilon")
    window = IntervalSpec(-(stages + 1.0), stages + 1.0)
    if not grid.contains(window.lo, window.hi):
        raise ConfigurationError("frequency grid does not contain the final support", field="grid")
    records, props, stars = [], [], []
    for n in range(1, stages + 1):
        if n >= 2:
            m = max([1.0] + stars)
            coeffs = coeffs.extended(coeffs.delta_tilde(n) / (4.0 * m), m)
        Fn = partial_sum_F(coeffs, n, grid)
        z = grid.nodes
        in_In = (np.abs(z) >= 1.0 / n) & (np.abs(z) <= n)
        floor = min(coeffs.delta(n), coeffs.delta(1) / n)
        lower_ok = bool(np.all(Fn.values[in_In] >= floor * (1 - 1e-12)))
        G = family.sample(n)
        R = n + 1.0
        interval = IntervalSpec(-R, R)
        cap = cap_factor * R
        fit = fit_polynomial(G, points, interval, weight=Fn, bound=coeffs.delta_tilde(n),
                             frequency_cap=cap, min_spacing=(math.pi / (2 * R)) if thin else None,
                             penalty_window=window)
        if not fit.converged:
            warnings.append(f"stage {n}: fit residual {fit.residual_W:.3g} >= "
                            f"delta_tilde {coeffs.delta_tilde(n):.3g}")
        star = fit.star_on(grid, window)
        stars.append(star)
        records.append(StageRecord(n, coeffs.delta(n), coeffs.delta_tilde(n),
                                   coeffs.epsilon_schedule[n - 1], fit, interval, star, lower_ok,
                                   _quotient_residual(G, Fn, fit, interval), cap))
        props.append(tent_properties(coeffs, n, grid))
    F = partial_sum_F(coeffs, stages, grid)
    errors, chain = [], []
    for s in records:
        G = family.sample(s.index)
        errors.append(sobolev_norm(G - F * s.fit.sample(grid)))
        tail = sobolev_norm(F - partial_sum_F(coeffs, s.index, grid))
        chain.append(s.fit.residual_W + s.star * tail)
    return GeneratorRecipe(coeffs, tuple(records), tuple(errors), family, grid, tuple(chain),
                           tuple(props), tuple(warnings))


@dataclass(frozen=True)
class CompletenessReport:
    achieved_error_H1: float
    stage_used: int | None
    distance_H1: float
    chain_bound: float
    epsilon: float
    coverage_failure: bool
    frequencies: np.ndarray = field(default_factory=lambda: np.array([]))
    coefficients: np.ndarray = field(default_factory=lambda: np.array([], dtype=complex))

    @property
    def ok(self) -> bool:
        return not self.coverage_failure and self.achieved_error_H1 < self.epsilon


def completeness_experiment(recipe: GeneratorRecipe, target: SampledFunction, eps: float,
                            d0: float) -> CompletenessReport:
    """Approximate ``target`` in ``H^1`` by ``sum c_lambda tau_lambda f``.

    Among completed stages ``N`` with ``d0 eps_N < eps/2`` (or an exact stage
    error of 0) the family member nearest to ``target`` in ``H^1`` is chosen.
    If it is not within ``eps/2`` a coverage failure is reported.  Otherwise
    the combination is read off the stage polynomial ``p_N`` and its actual
    ``H^1`` error is measured.
    """
    if target.grid != recipe.grid.dual():
        raise ConfigurationError("target must live on the spatial grid dual to the recipe grid")
    if not np.any(target.values):
        return CompletenessReport(0.0, 1, 0.0, 0.0, eps, False)
    best = None
    for s, err in zip(recipe.stages, recipe.stage_errors):
        if not (d0 * s.epsilon < eps / 2 or err == 0.0):
            continue
        member = real_if_close(fourier_inverse(recipe.family.sample(s.index)))
        dist = h1_norm(target - member).value
        if best is None or dist < best[1]:
            best = (s, dist, err)
    if best is None or best[1] >= eps / 2:
        dist = math.inf if best is None else best[1]
        return CompletenessReport(math.inf, None if best is None else best[0].index, dist,
                                  math.inf, eps, True)
    s, dist, err = best
    F = recipe.spectrum()
    approx = real_if_close(fourier_inverse(F * s.fit.sample(recipe.grid)))
    achieved = h1_norm(target - approx).value
    keep = np.abs(s.fit.coefficients) > 0
    return CompletenessReport(achieved, s.index, dist, dist + d0 * err, eps, False,
                              s.fit.frequencies[keep], s.fit.coefficients[keep])
