"""Discrete frequency sets, Beurling-Malliavin density estimates and the
spectral-radius probe.

A :class:`DiscreteSet` is a finite, strictly increasing set of reals standing
for the part ``|lambda| <= T`` of an infinite set.  The density estimator
searches geometric interval families ``I_k = s * 2^k [1 + theta, 1 + theta + beta]``
and certifies the largest ``D`` on a grid for which the ``K`` largest
admissible intervals all satisfy ``#(Lambda & I_k) >= D |I_k|``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import linalg

from .errors import ConfigurationError, DomainError, ResourceError, ValidationError
from .grid import SpectralFunction
from .norms import IntervalSpec

GRAM_CAP = 400


@dataclass(frozen=True)
class DiscreteSet:
    """Finite sorted point set.

    Parameters
    ----------
    points : array_like
        Strictly increasing finite reals.
    provenance : str
        ``"integers"``, ``"lattice(spacing=...)"``,
        ``"perturbed_integers(gamma=..., seed=...)"``,
        ``"multiscale_cluster(...)"`` or ``"custom"``.
    truncation_extent : float
        The window ``|lambda| <= T`` the set represents.
    anchors : array_like, optional
        For perturbed integers, the integer ``n`` behind every point.
    gamma : float, optional
        Perturbation base for perturbed integers.
    """

    points: np.ndarray
    provenance: str = "custom"
    truncation_extent: float = math.inf
    anchors: np.ndarray | None = None
    gamma: float | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1)
        if not np.all(np.isfinite(pts)):
            raise ValidationError("points must be finite")
        if pts.size > 1 and not np.all(np.diff(pts) > 0):
            raise ValidationError("points must be strictly increasing (no repeats)")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if math.isinf(self.truncation_extent) and pts.size:
            object.__setattr__(self, "truncation_extent", float(np.max(np.abs(pts))))
        if self.anchors is not None:
            anchors = np.asarray(self.anchors, dtype=float)
            if anchors.shape != pts.shape:
                raise ValidationError("anchors must match points")
            if self.gamma is not None:
                r = np.abs(pts - anchors)
                bound = self.gamma ** np.abs(anchors)
                if np.any(r <= 0) or np.any(r > bound * (1 + 1e-12)):
                    raise ValidationError("perturbation outside 0 < |r_n| <= gamma^|n|")
            anchors = anchors.copy()
            anchors.setflags(write=False)
            object.__setattr__(self, "anchors", anchors)

    def __len__(self):
        return int(self.points.size)

    def within(self, extent: float) -> "DiscreteSet":
        """Sub-set with ``|lambda| <= extent``."""
        keep = np.abs(self.points) <= extent
        anchors = None if self.anchors is None else self.anchors[keep]
        return DiscreteSet(self.points[keep], self.provenance, min(extent, self.truncation_extent),
                           anchors, self.gamma)

    def to_text(self) -> str:
        lines = [f"# provenance: {self.provenance}",
                 f"# truncation_extent: {self.truncation_extent!r}"]
        lines += [repr(float(x)) for x in self.points]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "DiscreteSet":
        provenance, extent, pts = "custom", math.inf, []
        for raw in text.splitlines():
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("provenance:"):
                    provenance = body.split(":", 1)[1].strip()
                elif body.startswith("truncation_extent:"):
                    extent = float(body.split(":", 1)[1])
                continue
            try:
                pts.append(float(line))
            except ValueError:
                raise ConfigurationError(f"bad point line {line!r}", field="points") from None
        return cls(np.array(sorted(pts)), provenance, extent)


def lattice(extent: float, spacing: float = 1.0) -> DiscreteSet:
    """``spacing * Z`` restricted to ``[-extent, extent]``."""
    if spacing <= 0 or extent <= 0:
        raise DomainError("lattice needs positive spacing and extent")
    m = int(math.floor(extent / spacing + 1e-12))
    pts = spacing * np.arange(-m, m + 1)
    tag = "integers" if spacing == 1.0 else f"lattice(spacing={spacing!r})"
    return DiscreteSet(pts, tag, float(extent))


def integers(extent: float) -> DiscreteSet:
    return lattice(extent, 1.0)


def perturbed_integers(gamma: float, extent: float, seed: int) -> DiscreteSet:
    """Points ``n + r_n`` for ``|n| <= extent`` with ``gamma^|n|/2 <= |r_n| <= gamma^|n|``.

    The sign and magnitude of ``r_n`` are drawn from ``default_rng(seed)``.
    """
    if not (0 < gamma < 1):
        raise DomainError(f"gamma must lie in (0, 1), got {gamma}")
    if extent < 1:
        raise DomainError(f"extent must be >= 1, got {extent}")
    rng = np.random.default_rng(seed)
    m = int(math.floor(extent))
    n = np.arange(-m, m + 1)
    size = gamma ** np.abs(n)
    # n + r_n must stay distinct from n in floating point
    if gamma ** m / 2 <= 4 * np.spacing(float(m)):
        raise DomainError(f"gamma^{m} = {gamma ** m:.3g} is below float resolution at n = {m}; "
                          "use a larger gamma or a smaller extent")
    mag = rng.uniform(0.5, 1.0, n.size) * size
    sign = rng.choice([-1.0, 1.0], n.size)
    pts = n + sign * mag
    order = np.argsort(pts)
    return DiscreteSet(pts[order], f"perturbed_integers(gamma={gamma!r}, seed={seed})",
                       float(extent), n[order].astype(float), gamma)


def multiscale_cluster(levels: int, symmetric: bool = True,
                       include_integers: bool = True) -> DiscreteSet:
    """Blocks ``[2^k, 2^k + 2^(k-1)]`` sampled with spacing ``2^-k``, ``k = 1..levels``.

    Block ``k`` alone carries ``2^k`` points per unit length, so the
    density of the union is unbounded as ``levels`` grows.
    """
    if levels < 1:
        raise DomainError("levels must be >= 1")
    blocks = [2.0 ** k + 2.0 ** -k * np.arange(2 ** (2 * k - 1) + 1) for k in range(1, levels + 1)]
    pts = np.concatenate(blocks)
    extent = 1.5 * 2.0 ** levels
    if symmetric:
        pts = np.concatenate([pts, -pts])
    if include_integers:
        m = int(extent)
        pts = np.concatenate([pts, np.arange(-m if symmetric else 0, m + 1, dtype=float)])
    tag = f"multiscale_cluster(levels={levels}, symmetric={symmetric}, integers={include_integers})"
    return DiscreteSet(np.unique(pts), tag, extent)


@dataclass(frozen=True)
class Discreteness:
    answer: bool
    min_gap: float


def is_uniformly_discrete(points: DiscreteSet, threshold: float = 0.01) -> Discreteness:
    """Smallest consecutive gap and whether it reaches ``threshold``."""
    if len(points) < 2:
        raise DomainError("need at least two points")
    if threshold <= 0:
        raise ConfigurationError("threshold must be positive", field="threshold")
    gap = float(np.min(np.diff(points.points)))
    return Discreteness(gap >= threshold, gap)


def count_in_interval(points: DiscreteSet, interval: IntervalSpec) -> int:
    """``#(Lambda & [lo, hi])`` by binary search."""
    p = points.points
    return int(np.searchsorted(p, interval.hi, side="right") - np.searchsorted(p, interval.lo, side="left"))


@dataclass(frozen=True)
class SubstantialFamily:
    intervals: tuple
    terms: tuple
    divergent_partial: float
    extrapolation_flag: bool
    short_intervals: tuple = ()

    def as_dict(self):
        return {"intervals": [iv.as_list() for iv in self.intervals],
                "divergence_partial": self.divergent_partial,
                "extrapolation_flag": self.extrapolation_flag,
                "short_intervals": list(self.short_intervals)}


def _is_geometric(intervals, rel=1e-9):
    if len(intervals) < 2:
        return False
    near = np.array([min(abs(iv.lo), abs(iv.hi)) for iv in intervals])
    lengths = np.array([iv.length for iv in intervals])
    ratios = near[1:] / near[:-1]
    shape = lengths / near
    return bool(ratios[0] > 1 and np.allclose(ratios, ratios[0], rtol=rel, atol=0)
                and np.allclose(shape, shape[0], rtol=rel, atol=0))


def substantial_check(intervals) -> SubstantialFamily:
    """Validate an interval family and sum ``(|I_k| / dist(I_k, 0))^2``.

    ``dist`` is the distance from the nearest endpoint to 0.  The
    extrapolation flag is set for geometric families (anchors in geometric
    progression, length proportional to anchor), whose terms are constant
    and whose full series therefore diverges.  Intervals with ``|I| <= 1``
    are listed in ``short_intervals`` rather than rejected.

    Raises
    ------
    ValidationError
        Empty family, overlapping intervals, an interval touching 0, or
        intervals on both half-axes.
    """
    ivs = [iv if isinstance(iv, IntervalSpec) else IntervalSpec(*iv) for iv in intervals]
    if not ivs:
        raise ValidationError("empty interval family")
    for iv in ivs:
        if iv.lo <= 0 <= iv.hi:
            raise ValidationError(f"interval [{iv.lo}, {iv.hi}] touches 0")
    sides = {iv.lo > 0 for iv in ivs}
    if len(sides) > 1:
        raise ValidationError("intervals lie on both half-axes")
    ivs.sort(key=lambda iv: iv.dist_to_zero())
    by_position = sorted(ivs, key=lambda iv: iv.lo)
    for a, b in zip(by_position, by_position[1:]):
        if b.lo <= a.hi:
            raise ValidationError(f"intervals [{a.lo}, {a.hi}] and [{b.lo}, {b.hi}] overlap")
    terms = tuple((iv.length / iv.dist_to_zero()) ** 2 for iv in ivs)
    short = tuple(i for i, iv in enumerate(ivs) if iv.length <= 1)
    return SubstantialFamily(tuple(ivs), terms, float(sum(terms)), _is_geometric(ivs), short)


@dataclass(frozen=True)
class FamilySpec:
    """Geometric interval families ``I_k = side * 2^k [1 + theta, 1 + theta + beta]``.

    Combinations with ``theta + beta >= 1`` are skipped so that the
    intervals stay disjoint.  Only the ``scales`` largest admissible ``k`` (``|I_k| > min_length`` and
    ``I_k`` inside the truncation window) are tested.
    """

    offsets: tuple = (0.0, 0.125, 0.25, 0.375, 0.5, 0.625)
    widths: tuple = (0.125, 0.25, 0.375, 0.5)
    scales: int = 4
    min_length: float = 1.0

    def __post_init__(self):
        if self.scales < 1:
            raise ConfigurationError("scales must be >= 1", field="scales")
        if not all(t >= 0 for t in self.offsets) or not all(0 < b < 1 for b in self.widths):
            raise ConfigurationError("need offsets >= 0 and widths in (0, 1)", field="family")

    def families(self, extent: float):
        for side in (1.0, -1.0):
            for theta in self.offsets:
                for beta in self.widths:
                    if theta + beta >= 1:
                        continue
                    ks = []
                    k = 0
                    while 2.0 ** k * (1 + theta + beta) <= extent:
                        if beta * 2.0 ** k > self.min_length:
                            ks.append(k)
                        k += 1
                    if len(ks) < self.scales:
                        continue
                    ivs = []
                    for k in ks[-self.scales:]:
                        lo, hi = 2.0 ** k * (1 + theta), 2.0 ** k * (1 + theta + beta)
                        ivs.append(IntervalSpec(lo, hi) if side > 0 else IntervalSpec(-hi, -lo))
                    yield (side, theta, beta), ivs


@dataclass(frozen=True)
class DensityEstimate:
    lower_bound: float
    classification: str
    witness: SubstantialFamily | None
    best_ratio: float
    family: tuple | None = None
    notes: tuple = ()


def bm_density_estimate(points: DiscreteSet, D_grid, family: FamilySpec | None = None) -> DensityEstimate:
    """Certified lower bound for the Beurling-Malliavin density on a grid of ``D``.

    For each geometric family the worst ratio ``#(Lambda & I_k)/|I_k|`` over its
    tested intervals is computed; ``D`` passes if some family has worst ratio
    ``>= D``.  ``lower_bound`` is the largest passing grid value (0 if none)
    and the classification is ``infinite-flagged`` when every grid value
    passes.
    """
    D = np.asarray(list(D_grid), dtype=float)
    if D.size == 0:
        raise ConfigurationError("D_grid is empty", field="D_grid")
    if np.any(np.diff(D) <= 0) or np.any(D <= 0):
        raise ConfigurationError("D_grid must be positive and increasing", field="D_grid")
    if len(points) == 0:
        raise DomainError("empty point set")
    family = family or FamilySpec()
    best, best_key, best_ivs = -1.0, None, None
    for key, ivs in family.families(points.truncation_extent):
        ratio = min(count_in_interval(points, iv) / iv.length for iv in ivs)
        if ratio > best:
            best, best_key, best_ivs = ratio, key, ivs
    notes = [f"families tested on |lambda| <= {points.truncation_extent:g}, "
             f"{family.scales} largest scales each"]
    if best_ivs is None:
        notes.append("no admissible family inside the truncation window")
        return DensityEstimate(0.0, "finite", None, 0.0, None, tuple(notes))
    passing = D[D <= best * (1 + 1e-12)]
    lower = float(passing[-1]) if passing.size else 0.0
    classification = "infinite-flagged" if passing.size == D.size else "finite"
    if classification == "infinite-flagged":
        notes.append(f"every D up to {D[-1]:g} passes; finite windows cannot certify infinity")
    return DensityEstimate(lower, classification, substantial_check(best_ivs), float(best),
                           best_key, tuple(notes))


def exponential_gram(points: DiscreteSet, r: float, cap: int = GRAM_CAP) -> np.ndarray:
    """``G_jk = integral_{-r}^{r} exp(i (l_j - l_k) t) dt = 2 sin((l_j - l_k) r)/(l_j - l_k)``."""
    if r <= 0:
        raise DomainError(f"r must be positive, got {r}")
    if len(points) > cap:
        raise ResourceError(f"{len(points)} frequencies exceed the Gram cap {cap}")
    lam = points.points
    d = lam[:, None] - lam[None, :]
    with np.errstate(invalid="ignore", divide="ignore"):
        G = np.where(d == 0, 2.0 * r, 2.0 * np.sin(d * r) / np.where(d == 0, 1.0, d))
    return G.astype(complex)


def _quadrature(r, max_freq):
    m = int(max(64, math.ceil(r * max_freq) + 64))
    x, w = leggauss(m)
    return r * x, r * w


def _target_values(target, t):
    if isinstance(target, SpectralFunction):
        return np.asarray(target(t), dtype=complex)
    if callable(target):
        return np.asarray(target(t), dtype=complex)
    return np.exp(1j * float(target) * t)


def _target_bandwidth(target):
    if isinstance(target, SpectralFunction):
        return math.pi / target.grid.spacing
    if callable(target):
        return 0.0
    return abs(float(target))


@dataclass(frozen=True)
class ProbeCurve:
    """Residuals ``[i_r, i_trunc, i_target]`` of the spectral-radius probe."""

    r_grid: tuple
    truncations: tuple
    residuals: np.ndarray
    threshold: float
    knee: float | None
    rank_warnings: tuple = ()
    ridge_factor: float = 1e-10

    def worst(self):
        """Max over targets at the largest truncation, one value per r."""
        return self.residuals[:, -1, :].max(axis=1)

    def knee_at(self, threshold: float):
        return _knee(self.r_grid, self.worst(), threshold)


def _knee(r_grid, worst, threshold):
    knee = None
    for r, v in zip(r_grid, worst):
        if v < threshold:
            knee = r
        else:
            break
    return knee


def spectral_radius_probe(points: DiscreteSet, targets, r_grid, truncations=None,
                          threshold: float = 1e-3, ridge_factor: float = 1e-10,
                          cap: int = GRAM_CAP) -> ProbeCurve:
    """Least-squares distance from each target to ``E(Lambda)`` in ``L^2(-r, r)``.

    Parameters
    ----------
    points : DiscreteSet
    targets : sequence
        Float ``mu`` meaning ``exp(i mu t)``, a callable of ``t``, or a
        :class:`SpectralFunction` evaluated by interpolation.
    r_grid : sequence of float
        Increasing interval half-lengths.
    truncations : sequence of float, optional
        Nested windows ``|lambda| <= N``; the default is the whole set.
    threshold : float
        Residual below which ``E(Lambda)`` counts as dense at that ``r``.
    ridge_factor : float
        Ridge ``rho = ridge_factor * trace(G)/n``.

    Notes
    -----
    The ridge problem ``min |W^(1/2)(u - Bc)|^2 + rho |c|^2`` is solved as an
    augmented least-squares system on Gauss-Legendre nodes, which is
    algebraically the regularized Gram system.  The reported residual is
    ``sqrt(|u - Bc|_W^2 + rho |c|^2) / |u|_W``, the square root of the optimal
    objective; it cannot increase when frequencies are added.
    """
    r_grid = tuple(float(r) for r in r_grid)
    if not r_grid or any(r <= 0 for r in r_grid) or any(b <= a for a, b in zip(r_grid, r_grid[1:])):
        raise ConfigurationError("r_grid must be positive and increasing", field="r_grid")
    if truncations is None:
        truncations = (float(np.max(np.abs(points.points))),)
    truncations = tuple(float(t) for t in truncations)
    if any(b <= a for a, b in zip(truncations, truncations[1:])):
        raise ConfigurationError("truncations must be increasing", field="truncations")
    if not targets:
        raise ConfigurationError("no targets", field="targets")
    largest = points.within(truncations[-1])
    if len(largest) > cap:
        raise ResourceError(f"{len(largest)} frequencies exceed the Gram cap {cap}")
    max_freq = float(np.max(np.abs(largest.points))) + max(_target_bandwidth(t) for t in targets)
    out = np.zeros((len(r_grid), len(truncations), len(targets)))
    warnings = []
    for i, r in enumerate(r_grid):
        t, w = _quadrature(r, max_freq)
        sw = np.sqrt(w)
        U = np.stack([_target_values(tg, t) for tg in targets], axis=1)
        unorm = np.sqrt(np.sum(w[:, None] * np.abs(U) ** 2, axis=0))
        for j, N in enumerate(truncations):
            lam = points.within(N).points
            n = lam.size
            if n == 0:
                out[i, j] = 1.0
                continue
            rho = ridge_factor * 2.0 * r  # trace(G)/n = 2r
            B = sw[:, None] * np.exp(1j * np.outer(t, lam))
            A = np.vstack([B, math.sqrt(rho) * np.eye(n)])
            rhs = np.vstack([sw[:, None] * U, np.zeros((n, len(targets)))])
            C = linalg.lstsq(A, rhs, lapack_driver="gelsy")[0]
            weak = int(np.sum(linalg.eigvalsh(B.conj().T @ B) < rho))
            if weak:
                warnings.append(f"{weak} Gram eigenvalues below the ridge at r={r:g}, N={N:g}")
            res = np.linalg.norm(rhs - A @ C, axis=0)
            out[i, j] = res / np.where(unorm > 0, unorm, 1.0)
    knee = _knee(r_grid, out[:, -1, :].max(axis=1), threshold)
    return ProbeCurve(r_grid, truncations, out, threshold, knee, tuple(warnings), ridge_factor)
