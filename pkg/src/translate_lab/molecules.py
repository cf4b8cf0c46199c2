"""(q, a0)-molecules and the embedding of W0 into the Fourier image of H^1.

A molecule centred at ``x0`` has finite ``||m||_q`` and
``||m |x - x0|^b0||_q`` with ``b0 = 1 - 1/q + a0``, and integral zero.  Its
molecular norm is

    N_q(m) = ||m||_q^(a0/b0) * ||m |x - x0|^b0||_q^(1 - a0/b0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, PreconditionError
from .grid import SampledFunction, SpectralFunction, integrate
from .norms import h1_norm, lp_norm, sobolev_norm, sobolev_parts
from .transforms import fourier_inverse, real_if_close


@dataclass(frozen=True)
class MoleculeParams:
    q: float
    a0: float
    center: float = 0.0
    b0: float = field(init=False)

    def __post_init__(self):
        q, a0 = float(self.q), float(self.a0)
        if not q > 1:
            raise DomainError(f"q must exceed 1, got {q}")
        if not a0 > 0:
            raise DomainError(f"a0 must be positive, got {a0}")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "a0", a0)
        object.__setattr__(self, "b0", 1.0 - 1.0 / q + a0)

    @property
    def exponent(self) -> float:
        """``a0 / b0``, always in (0, 1)."""
        return self.a0 / self.b0


def molecule_params(q: float, a0: float, center: float = 0.0) -> MoleculeParams:
    return MoleculeParams(q, a0, center)


@dataclass(frozen=True)
class MoleculeReport:
    lq_norm: float
    weighted_norm: float
    molecular_norm: float
    cancellation: complex
    is_molecule: bool
    tolerance: float


def assess_molecule(m: SampledFunction, params: MoleculeParams, tol: float | None = None) -> MoleculeReport:
    """Norms, cancellation and molecular norm of ``m``.

    ``tol`` bounds ``|integral m|``; it defaults to ``1e-8 ||m||_1``.
    Failures are reported in the record, never raised.
    """
    if tol is None:
        tol = 1e-8 * lp_norm(m, 1)
    x = m.grid.nodes
    lq = lp_norm(m, params.q)
    weighted = lp_norm(m.with_values(m.values * np.abs(x - params.center) ** params.b0), params.q)
    theta = params.exponent
    molecular = lq ** theta * weighted ** (1.0 - theta)
    cancel = integrate(m)
    finite = all(math.isfinite(v) for v in (lq, weighted, molecular))
    ok = bool(finite and abs(cancel) <= tol)
    return MoleculeReport(lq, weighted, molecular, cancel, ok, float(tol))


@dataclass(frozen=True)
class EmbeddingRecord:
    x_norm: float
    w_norm: float
    ratio: float
    l2: float = 0.0
    derivative_l2: float = 0.0


def embedding_check(F: SpectralFunction, zero_tol: float = 1e-9) -> EmbeddingRecord:
    """``||F-check||_H1`` against ``||F||_W`` for ``F`` in ``W0``.

    Raises
    ------
    PreconditionError
        If ``|F(0)| > zero_tol``.
    """
    f0 = F.values[F.grid.zero_index]
    if abs(f0) > zero_tol:
        raise PreconditionError(f"F(0) = {f0!r} is not zero within {zero_tol}")
    l2, dl2 = sobolev_parts(F)
    w = l2 + dl2
    if w == 0:
        return EmbeddingRecord(0.0, 0.0, 0.0)
    f = real_if_close(fourier_inverse(F))
    x = h1_norm(f).value
    return EmbeddingRecord(x, w, x / w, l2, dl2)


def random_w0_element(grid, rng, reach: int = 4) -> SpectralFunction:
    """Random combination of integer translates of the tent with zero weight at 0."""
    from .generators.tent import tent_phi

    phi = tent_phi()
    coeffs = rng.uniform(-1.0, 1.0, 2 * reach + 1)
    coeffs[reach] = 0.0
    z = grid.nodes
    values = sum(c * phi(z - i) for c, i in zip(coeffs, range(-reach, reach + 1)))
    return SpectralFunction(grid, values)


def random_molecule(grid, rng, terms: int = 3) -> SampledFunction:
    """Sum of shifted, dilated copies of ``x exp(-x^2)`` (each has integral zero)."""
    x = grid.nodes
    values = np.zeros(grid.points)
    for _ in range(terms):
        c = rng.uniform(-1.0, 1.0)
        s = rng.uniform(0.5, 2.0)
        x0 = rng.uniform(-2.0, 2.0)
        u = (x - x0) / s
        values += c * u * np.exp(-u ** 2) / s
    return SampledFunction(grid, values)


def plancherel_gap(F: SpectralFunction) -> tuple:
    """``(||x F-check||_2, ||F'||_2 / sqrt(2 pi))``; equal under the forward convention."""
    f = fourier_inverse(F)
    xf = f.with_values(f.values * f.grid.nodes)
    return lp_norm(xf, 2), sobolev_parts(F)[1] / math.sqrt(2 * math.pi)
