"""Annihilators of translate systems and the nonvanishing-spectrum criterion.

If ``g`` vanishes on ``Lambda`` and ``g_hat`` has compact support away from
0 where ``f_hat`` does not vanish, then ``K = g_hat / f_hat`` gives a bounded
``k`` with ``<k, tau_lam f> = C g(-lam)`` for every real ``lam`` (``C`` is
:data:`~translate_lab.conventions.PAIRING_CONSTANT`), so ``k`` annihilates
every translate ``tau_lam f`` with ``lam`` in ``Lambda``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import conventions
from .errors import DivisionHazardError, DomainError, PreconditionError
from .grid import SampledFunction, SpectralFunction, UniformGrid
from .lambda_sets import DiscreteSet
from .norms import lp_norm
from .transforms import fourier_forward, fourier_inverse, real_if_close, reflect

SUPPORT_TOL = 1e-10
HAZARD_TOL = 1e-8
WIENER_TOL = 1e-9
CSV_COLUMNS = ("lambda", "re_residual", "im_residual", "abs_residual", "normalized")


@dataclass(frozen=True)
class WienerRecord:
    nonvanishing: bool
    witness_zero: float | None
    min_modulus: float
    max_modulus: float


def wiener_spectrum_predicate(F: SpectralFunction, eta: float, tol: float = WIENER_TOL) -> WienerRecord:
    """:func:`wiener_predicate` applied to a spectrum directly."""
    if not eta > 0:
        raise DomainError(f"eta must be positive, got {eta}")
    z = F.grid.nodes
    a = np.abs(F.values)
    top = float(np.max(a))
    scan = np.abs(z) > eta
    vals = a[scan]
    j = int(np.argmin(vals))
    lowest = float(vals[j])
    if top > 0 and lowest > tol * top:
        return WienerRecord(True, None, lowest, top)
    return WienerRecord(False, float(z[scan][j]), lowest, top)


def wiener_predicate(f: SampledFunction, eta: float, tol: float = WIENER_TOL) -> WienerRecord:
    """Does ``f_hat`` stay away from 0 on ``|z| > eta``?

    ``nonvanishing`` holds iff ``min |f_hat| > tol * max |f_hat|`` over grid
    frequencies with ``|z| > eta``; otherwise ``witness_zero`` is the
    frequency of the smallest modulus.
    """
    return wiener_spectrum_predicate(fourier_forward(f), eta, tol)


def integer_vanishing_spectrum(delta: float, grid: UniformGrid) -> SpectralFunction:
    """Transform of ``sin(pi x) sinc(delta x)`` sampled on ``grid`` (a frequency grid).

    It equals ``(pi / (2 i delta)) (1[|z + pi| < delta] - 1[|z - pi| < delta])``
    with half values on nodes that hit a jump.
    """
    if not 0 < delta < math.pi:
        raise DomainError(f"delta must lie in (0, pi), got {delta}")
    z = grid.nodes
    tol = 1e-9 * grid.spacing

    def box(c):
        d = np.abs(z - c) - delta
        return np.where(d < -tol, 1.0, np.where(d <= tol, 0.5, 0.0))

    return SpectralFunction(grid, (math.pi / (2j * delta)) * (box(-math.pi) - box(math.pi)))


def vanishing_on_integers(delta: float, grid: UniformGrid) -> SampledFunction:
    """``g(x) = sin(pi x) sinc(delta x)`` on the spatial ``grid``, synthesized spectrally.

    Building ``g`` from its compactly supported transform keeps the spectrum
    exact on the grid; ``g`` then vanishes at the integer nodes to rounding
    because the frequency samples are symmetric about ``+-pi``, which needs
    ``pi`` to be a frequency node, that is an integer half-extent.

    Raises
    ------
    DomainError
        If ``delta`` is not in ``(0, pi)``.
    PreconditionError
        If the grid half-extent is not an integer or the grid does not
        resolve ``pi + delta``.
    """
    if not 0 < delta < math.pi:
        raise DomainError(f"delta must lie in (0, pi), got {delta}")
    L = grid.half_extent
    if abs(L - round(L)) > 1e-9:
        raise PreconditionError(f"spatial half-extent must be an integer, got {L}")
    fgrid = grid.dual()
    if fgrid.half_extent <= math.pi + delta:
        raise PreconditionError("grid too coarse to resolve the spectrum of g")
    return real_if_close(fourier_inverse(integer_vanishing_spectrum(delta, fgrid)))


def sinc(u):
    u = np.asarray(u, dtype=float)
    return np.sinc(u / math.pi)


def integer_vanishing_closed_form(x, delta: float):
    """``sin(pi x) sinc(delta x)`` evaluated directly (oracle for the synthesized ``g``)."""
    x = np.asarray(x, dtype=float)
    return np.sin(math.pi * x) * sinc(delta * x)


def translate(f: SampledFunction, s: float) -> SampledFunction:
    """``(tau_s f)(x) = f(x - s)`` via the transform factor ``exp(i s z)``."""
    F = fourier_forward(f)
    out = fourier_inverse(F.with_values(F.values * np.exp(1j * s * F.grid.nodes)))
    return real_if_close(out) if not np.iscomplexobj(f.values) else out


@dataclass(frozen=True)
class ResidualTable:
    lambdas: np.ndarray
    residuals: np.ndarray
    normalized: np.ndarray
    excluded: np.ndarray = field(default_factory=lambda: np.array([]))
    window: float = math.inf

    def __len__(self):
        return int(self.lambdas.size)

    def max_normalized(self) -> float:
        return float(np.max(self.normalized)) if len(self) else 0.0

    def as_dict(self) -> dict:
        return {lam: complex(r) for lam, r in zip(self.lambdas.tolist(), self.residuals)}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for lam, r, nr in zip(self.lambdas, self.residuals, self.normalized):
            w.writerow([repr(float(lam)), repr(float(r.real)), repr(float(r.imag)),
                        repr(float(abs(r))), repr(float(nr))])
        return buf.getvalue()


@dataclass(frozen=True)
class AnnihilatorWitness:
    g_spec: SpectralFunction
    K: SpectralFunction
    k: SampledFunction
    residuals: ResidualTable | None = None
    trivial: bool = False
    support: tuple = ()
    gap_max: float = 0.0

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.k.values)))

    def gap_ok(self, tol: float = 1e-12) -> bool:
        """``max |g_hat|`` near 0 is below ``tol`` (relative to ``max |g_hat|``)."""
        top = float(np.max(np.abs(self.g_spec.values)))
        return self.trivial or self.gap_max <= tol * top

    def bound_check(self) -> tuple:
        """``(||k||_inf, integral |K| / (2 pi)^(1/2))``; the first never exceeds the second."""
        return self.sup_norm, float(np.sum(np.abs(self.K.values)) * self.K.grid.spacing
                                    / math.sqrt(2 * math.pi))


def build_annihilator(f: SampledFunction, g: SampledFunction, lambdas=None, eta: float = 0.5,
                      support_tol: float = SUPPORT_TOL, hazard_tol: float = HAZARD_TOL) -> AnnihilatorWitness:
    """``K = g_hat / f_hat`` on the support of ``g_hat`` and ``k = K`` pulled back.

    ``k(x) = (2 pi)^(-1/2) integral K(z) exp(+i x z) dz``, so that
    ``<k, tau_lam f> = sqrt(2 pi) g(-lam)``.  ``eta`` is the radius around 0
    where ``g_hat`` is checked to vanish.

    Raises
    ------
    DivisionHazardError
        If ``|f_hat| < hazard_tol * ||f_hat||_inf`` somewhere on the support.
    """
    if f.grid != g.grid:
        raise PreconditionError("f and g live on different grids")
    G = fourier_forward(g)
    F = fourier_forward(f)
    z = G.grid.nodes
    aG = np.abs(G.values)
    top = float(np.max(aG))
    gap_max = float(np.max(aG[np.abs(z) <= eta])) if np.any(np.abs(z) <= eta) else 0.0
    if top == 0.0:
        zero_k = SampledFunction(f.grid, np.zeros(f.grid.points))
        K = G.with_values(np.zeros(G.grid.points, dtype=complex))
        table = annihilation_scan(zero_k, f, lambdas) if lambdas is not None else None
        return AnnihilatorWitness(G, K, zero_k, table, True, (), 0.0)
    supp = aG > support_tol * top
    aF = np.abs(F.values)
    bad = supp & (aF < hazard_tol * float(np.max(aF)))
    if np.any(bad):
        z0 = float(z[np.argmax(bad)])
        raise DivisionHazardError(f"f_hat is numerically zero at frequency {z0:.6g} inside supp g_hat")
    Kv = np.zeros(G.grid.points, dtype=complex)
    Kv[supp] = G.values[supp] / F.values[supp]
    K = G.with_values(Kv)
    k = real_if_close(fourier_inverse(reflect(K)) * conventions.PAIRING_CONSTANT)
    table = annihilation_scan(k, f, lambdas) if lambdas is not None else None
    return AnnihilatorWitness(G, K, k, table, False,
                              (float(z[supp].min()), float(z[supp].max())), gap_max)


def pairing_spectral(k: SampledFunction, f: SampledFunction, lambdas) -> np.ndarray:
    """``integral k(x) f(x - lam) dx`` for each ``lam`` from one pair of transforms.

    Uses ``(1/2 pi) integral k_hat(-z) f_hat(z) exp(i lam z) dz``.
    """
    lam = np.atleast_1d(np.asarray(lambdas, dtype=float))
    if lam.size == 0:
        return np.zeros(0, dtype=complex)
    Kh = reflect(fourier_forward(k))
    Fh = fourier_forward(f)
    prod = Kh.values * Fh.values
    z = Fh.grid.nodes
    keep = prod != 0
    phases = np.exp(1j * np.outer(lam, z[keep]))
    return (Fh.grid.spacing / (2 * math.pi)) * (phases @ prod[keep])


def pairing_spatial(k: SampledFunction, f: SampledFunction, lam: float) -> complex:
    """The same pairing by direct quadrature against the translated ``f``."""
    tf = translate(f, lam)
    return complex(k.grid.spacing * np.sum(k.values * tf.values))


def annihilation_scan(k: SampledFunction, f: SampledFunction, points) -> ResidualTable:
    """Residuals ``<k, tau_lam f>`` for ``lam`` in ``points`` within half the grid extent.

    Frequencies beyond ``L/2`` are excluded (the translate wraps around the
    periodic grid) and returned in ``excluded``.  ``normalized`` is
    ``|residual| / (||k||_inf ||f||_1)``.
    """
    if k.grid != f.grid:
        raise PreconditionError("k and f live on different grids")
    lam = points.points if isinstance(points, DiscreteSet) else np.asarray(points, dtype=float)
    lam = np.atleast_1d(lam)
    window = f.grid.half_extent / 2
    inside = np.abs(lam) <= window
    used = lam[inside]
    res = pairing_spectral(k, f, used)
    scale = float(np.max(np.abs(k.values))) * lp_norm(f, 1)
    normalized = np.abs(res) / scale if scale > 0 else np.zeros(used.size)
    return ResidualTable(used, res, normalized, lam[~inside], window)
