"""Scenario execution: one function per command, report assembly and replay."""

from __future__ import annotations

import json
import math
import os
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import __version__, conventions
from ..duality import (
    annihilation_scan,
    build_annihilator,
    integer_vanishing_closed_form,
    pairing_spatial,
    pairing_spectral,
    vanishing_on_integers,
    wiener_predicate,
)
from ..errors import ConfigurationError, ReproducibilityError
from ..generators import (
    build_dense_family,
    completeness_experiment,
    construct_generator,
    fit_polynomial,
    offered_frequencies,
    pair_generators,
    tent_phi,
)
from ..generators.tent import TENT_W_NORM, epsilon_schedule, initial_coefficients
from ..generators.pair import check_pair_spectrum, pair_recipe
from ..grid import SampledFunction, SpectralFunction, UniformGrid, frequency_grid, make_grid
from ..lambda_sets import DiscreteSet, _knee, bm_density_estimate, spectral_radius_probe
from ..molecules import (
    assess_molecule,
    embedding_check,
    molecule_params,
    plancherel_gap,
    random_molecule,
    random_w0_element,
)
from ..norms import IntervalSpec, bmo_seminorm, bmo_truncate, h1_norm, lp_norm, sobolev_parts
from ..transforms import fourier_forward, fourier_inverse, hilbert_transform, real_if_close
from .config import ScenarioConfig, build_config, config_hash, parse_lambda_spec

PASS, FAIL, LOW = "pass", "fail", "low-confidence"
REPORT_SCHEMA = 1
REPLAY_TOL = 1e-12


@dataclass
class Outcome:
    metrics: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)
    documents: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)

    def verdict(self, name: str, ok, trace: str, low: bool = False):
        status = PASS if ok else FAIL
        if ok and low:
            status = LOW
        self.verdicts[name] = {"status": status, "trace": trace}


def _clean(v):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to None."""
    if isinstance(v, dict):
        return {str(k): _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_clean(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, complex):
        return [_clean(v.real), _clean(v.imag)]
    return v


def curve_csv(x, y, names=("x", "y")) -> str:
    """Two-column CSV with a header row; floats written with ``repr``."""
    lines = [",".join(names)]
    lines += [f"{float(a)!r},{float(b)!r}" for a, b in zip(x, y)]
    return "\n".join(lines) + "\n"


def _grid(cfg) -> UniformGrid:
    return make_grid(cfg["grid.half_extent"], cfg["grid.points"])


def _lambda(cfg) -> DiscreteSet:
    return parse_lambda_spec(cfg["lambda_spec"], cfg.sub_seed("lambda"), cfg.base_dir)


# ---------------------------------------------------------------------------
# commands


def run_density(cfg: ScenarioConfig, jobs: int = 1) -> Outcome:
    out = Outcome()
    pts = _lambda(cfg)
    D = np.round(np.arange(cfg["d_step"], cfg["d_max"] + 0.5 * cfg["d_step"], cfg["d_step"]), 12)
    est = bm_density_estimate(pts, D)
    out.metrics.update(lower_bound=est.lower_bound, classification=est.classification,
                       best_ratio=est.best_ratio, points=len(pts),
                       family=list(est.family) if est.family else None)
    if est.witness is not None:
        out.metrics["witness"] = est.witness.as_dict()
        rows = ["lo,hi,count"] + [f"{iv.lo!r},{iv.hi!r},{int(np.sum(iv.contains(pts.points)))}"
                                  for iv in est.witness.intervals]
        out.tables["density_witness.csv"] = "\n".join(rows) + "\n"
    expected = cfg.get("expect.classification")
    if expected:
        out.verdict("classification", est.classification == expected, "acceptance 5")
    bounds = cfg.get("expect.lower_bound")
    if bounds:
        if len(bounds) != 2:
            raise ConfigurationError("expect.lower_bound needs two numbers", field="expect.lower_bound")
        out.verdict("lower_bound_range", bounds[0] <= est.lower_bound <= bounds[1], "acceptance 5")
    out.verdict("witness_substantial", est.witness is None or not est.witness.short_intervals
                or est.lower_bound == 0.0, "substantial family invariant")
    return out


def run_probe(cfg: ScenarioConfig, jobs: int = 1) -> Outcome:
    out = Outcome()
    pts = _lambda(cfg)
    step = cfg["r_step"]
    r_grid = np.round(np.arange(cfg["r_min"], cfg["r_max"] + 0.5 * step, step), 10)
    targets = cfg["targets"]
    truncs = cfg["truncations"]
    check_r = cfg.get("check_r")
    chunks = [r_grid[i::max(1, jobs)] for i in range(max(1, jobs))]
    chunks = [c for c in chunks if c.size]

    def work(rs):
        return spectral_radius_probe(pts, targets, rs, truncs, cfg["tol.threshold"],
                                     cfg["tol.ridge"])

    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            parts = list(pool.map(work, chunks))
    else:
        parts = [work(c) for c in chunks]
    res = np.zeros((r_grid.size, len(truncs), len(targets)))
    warnings = []
    for i, part in enumerate(parts):
        res[i::len(parts)] = part.residuals
        warnings += list(part.rank_warnings)
    worst = res[:, -1, :].max(axis=1)
    thr = cfg["tol.threshold"]
    knee = _knee(r_grid, worst, thr)
    knees = {f"{t:g}": _knee(r_grid, worst, t) for t in (thr / 10, thr, thr * 10)}
    mono = float(np.max(np.diff(res, axis=1))) if len(truncs) > 1 else 0.0
    out.metrics.update(knee=knee, knees_by_threshold=knees, worst=worst.tolist(),
                       monotone_excess=mono, rank_warnings=len(warnings),
                       r_grid=r_grid.tolist(), truncations=list(truncs))
    for j, N in enumerate(truncs):
        out.tables[f"probe_N{N:g}.csv"] = curve_csv(r_grid, res[:, j, :].max(axis=1), ("r", "residual"))
    out.verdict("monotone_in_truncation", mono <= cfg["tol.monotone"], "acceptance 6")
    out.verdict("threshold_stability", len(set(knees.values())) == 1, "probe threshold decision")
    if cfg.get("expect.knee") is not None:
        target = cfg["expect.knee"]
        ok = knee is not None and abs(knee - target) <= cfg["tol.knee"] * target
        out.verdict("knee", ok, "acceptance 6")
    if check_r is not None:
        rc = spectral_radius_probe(pts, targets, [check_r], truncs, thr, cfg["tol.ridge"])
        floor = float(np.min(rc.residuals[0, :, :].max(axis=1)))
        out.metrics["check_r"] = check_r
        out.metrics["check_residuals"] = rc.residuals[0, :, :].max(axis=1).tolist()
        out.verdict("above_floor_beyond_knee", floor > cfg["tol.check_floor"], "acceptance 6")
    return out


def _band_limited(grid: UniformGrid, rng, bandwidth: float) -> SampledFunction:
    fg = grid.dual()
    z = fg.nodes
    centers = rng.uniform(0.2 * bandwidth, 0.8 * bandwidth, 3)
    widths = rng.uniform(0.05, 0.2, 3) * bandwidth
    amps = rng.normal(size=3) + 1j * rng.normal(size=3)
    half = sum(a * np.exp(-((np.abs(z) - c) / w) ** 2) for a, c, w in zip(amps, centers, widths))
    vals = np.where(z > 0, half, np.conj(half))
    vals = np.where(np.abs(z) < bandwidth, vals, 0.0)
    vals[fg.zero_index] = 0.0
    vals[0] = 0.0
    return real_if_close(fourier_inverse(SpectralFunction(fg, vals)))


def run_hilbert(cfg: ScenarioConfig, jobs: int = 1) -> Outcome:
    out = Outcome()
    t0 = time.perf_counter()
    grid = _grid(cfg)
    rng = np.random.default_rng(cfg.sub_seed("functions"))
    worst = 0.0
    for _ in range(cfg["count"]):
        f = _band_limited(grid, rng, cfg["bandwidth"])
        hh = hilbert_transform(hilbert_transform(f))
        worst = max(worst, float(np.linalg.norm(hh.values + f.values) / np.linalg.norm(f.values)))
    x = grid.nodes
    f = SampledFunction.from_callable(lambda s: 1.0 / (1.0 + s ** 2), grid)
    H = hilbert_transform(f, pad=4).values.real
    expected = -x / (1.0 + x ** 2)
    closed = float(np.max(np.abs(H - expected)))
    opposite = float(np.max(np.abs(H + expected)))
    pars = 0.0
    for _ in range(cfg["parseval_count"]):
        g = SampledFunction(grid, rng.normal(size=grid.points) * np.exp(-(x / 8) ** 2))
        G = fourier_forward(g)
        ratio = lp_norm(g, 2) ** 2 / (lp_norm(G, 2) ** 2 / (2 * math.pi))
        pars = max(pars, abs(ratio - 1.0))
    elapsed = time.perf_counter() - t0
    out.metrics.update(involution_max_rel=worst, closed_form_max_err=closed,
                       closed_form_err_opposite_sign=opposite, parseval_max_dev=pars,
                       convention=conventions.CONVENTION_TAG)
    out.timing["elapsed"] = elapsed
    out.tables["hilbert_pair.csv"] = curve_csv(x[::8], H[::8], ("x", "hilbert"))
    out.verdict("involution", worst < cfg["tol.involution"], "acceptance 1")
    out.verdict("closed_form", closed < cfg["tol.closed_form"], "acceptance 1")
    out.verdict("runtime", elapsed < cfg["tol.runtime"], "acceptance 1")
    out.verdict("parseval", pars <= cfg["tol.parseval"], "acceptance 2")
    return out


def _random_steps(rng, n, pieces=None, scale=3.0):
    k = int(pieces or rng.integers(2, 12))
    edges = np.sort(rng.choice(np.arange(1, n), k - 1, replace=False))
    vals = rng.normal(0, scale, k) * rng.choice([1.0, 10.0], k)
    return np.repeat(vals, np.diff(np.concatenate([[0], edges, [n]])))


def brute_force_bmo(v) -> float:
    """Every contiguous window of at least two nodes, one at a time."""
    v = np.asarray(v, dtype=float)
    best = 0.0
    for i in range(v.size - 1):
        for j in range(i + 2, v.size + 1):
            w = v[i:j]
            best = max(best, float(np.mean(np.abs(w - np.mean(w)))))
    return best


def run_norms(cfg: ScenarioConfig, jobs: int = 1) -> Outcome:
    out = Outcome()
    grid = _grid(cfg)
    rng = np.random.default_rng(cfg.sub_seed("functions"))
    const = bmo_seminorm(SampledFunction(grid, np.full(grid.points, 3.7))).value
    small = make_grid(1.0, cfg["oracle_points"])
    gap = 0.0
    for _ in range(cfg["count"]):
        v = _random_steps(rng, small.points)
        a = bmo_seminorm(SampledFunction(small, v), "all_windows").value
        b = brute_force_bmo(v)
        gap = max(gap, abs(a - b) / max(b, 1e-300))
    sup_ok, bmo_excess, idem = True, -math.inf, 0.0
    for _ in range(cfg["count"]):
        h = SampledFunction(grid, _random_steps(rng, grid.points))
        base = bmo_seminorm(h).value
        for r in cfg["truncation_levels"]:
            hr = bmo_truncate(h, r)
            sup_ok &= bool(np.max(np.abs(hr.values)) <= r)
            bmo_excess = max(bmo_excess, bmo_seminorm(hr).value - base)
            idem = max(idem, float(np.max(np.abs(bmo_truncate(hr, 2 * r).values - hr.values))))
    sign = bmo_seminorm(SampledFunction(small, np.sign(small.nodes + 0.5 * small.spacing))).value
    logs = []
    for n in (grid.points, 2 * grid.points):
        g2 = make_grid(grid.half_extent, n)
        x = g2.nodes
        logs.append(bmo_seminorm(SampledFunction(g2, np.log(np.maximum(np.abs(x), g2.spacing / 2)))).value)
    out.metrics.update(constant=const, oracle_max_rel_gap=gap, truncation_sup_ok=sup_ok,
                       truncation_bmo_excess=bmo_excess, truncation_idempotence=idem,
                       sign_bmo=sign, log_bmo=logs, log_bmo_rel_change=abs(logs[1] / logs[0] - 1))
    out.verdict("constant_zero", const == 0.0, "acceptance 4")
    out.verdict("oracle_match", gap <= cfg["tol.oracle"], "acceptance 4")
    out.verdict("truncation_sup", sup_ok, "acceptance 4")
    out.verdict("truncation_bmo", bmo_excess <= cfg["tol.truncation"], "acceptance 4")
    out.verdict("truncation_idempotent", idem == 0.0, "truncation idempotence invariant")
    out.verdict("log_in_bmo", abs(logs[1] / logs[0] - 1) < 0.1, "log|x| stability example")
    return out


def _smooth_w0(grid):
    z = grid.nodes
    return SpectralFunction(grid, z * np.exp(-z ** 2))


def _d0_estimate(fgrid, seed, count):
    rng = np.random.default_rng(seed)
    return max(embedding_check(random_w0_element(fgrid, rng)).ratio for _ in range(count))


def run_molecules(cfg: ScenarioConfig, jobs: int = 1) -> Outcome:
    out = Outcome()
    grid = _grid(cfg)
    params = molecule_params(cfg["q"], cfg["a0"])
    rng = np.random.default_rng(cfg.sub_seed("molecules"))
    ratios, homog, all_mol = [], 0.0, True
    for _ in range(cfg["count"]):
        m = random_molecule(grid, rng)
        rep = assess_molecule(m, params)
        all_mol &= rep.is_molecule
        ratios.append(h1_norm(m).value / rep.molecular_norm)
        alpha = rng.uniform(-5, 5)
        scaled = assess_molecule(m * alpha, params).molecular_norm
        homog = max(homog, abs(scaled - abs(alpha) * rep.molecular_norm) / (abs(alpha) * rep.molecular_norm))
    spacing = cfg["frequency.spacing"]
    fg = frequency_grid(spacing, 8.0)
    fg2 = frequency_grid(spacing / 2, 8.0)
    seed = cfg.sub_seed("functions")
    d0 = _d0_estimate(fg, seed, cfg["w0_count"])
    d0_fine = _d0_estimate(fg2, seed, cfg["w0_count"])
    amgm = -math.inf
    r2 = np.random.default_rng(seed)
    for _ in range(cfg["w0_count"]):
        a, b = sobolev_parts(random_w0_element(fg, r2))
        amgm = max(amgm, math.sqrt(a * b) - (a + b) / 2)
    xf, dF = plancherel_gap(_smooth_w0(frequency_grid(1.0 / 1024, 8.0)))
    out.metrics.update(all_molecules=all_mol, h1_over_molecular_max=max(ratios),
                       h1_over_molecular_min=min(ratios), homogeneity_max_rel=homog,
                       amgm_max_excess=amgm, d0=d0, d0_refined=d0_fine,
                       d0_rel_change=abs(d0_fine / d0 - 1), plancherel_rel_gap=abs(xf / dF - 1))
    out.verdict("molecules_valid", all_mol, "acceptance 3")
    out.verdict("ratio_finite", math.isfinite(max(ratios)), "acceptance 3")
    out.verdict("homogeneity", homog < cfg["tol.homogeneity"], "acceptance 3")
    out.verdict("amgm", amgm <= cfg["tol.amgm"], "acceptance 3")
    out.verdict("d0_stability", abs(d0_fine / d0 - 1) <= cfg["tol.d0_stability"], "acceptance 3")
    out.verdict("plancherel", abs(xf / dF - 1) < 1e-6, "Plancherel step invariant")
    return out


def _frequency_grid(cfg) -> UniformGrid:
    return make_grid(cfg["grid.half_extent"], cfg["grid.points"])


def run_generator_build(cfg: ScenarioConfig, jobs: int = 1) -> Outcome:
    out = Outcome()
    t0 = time.perf_counter()
    grid = _frequency_grid(cfg)
    pts = _lambda(cfg)
    dens = bm_density_estimate(pts, np.round(np.arange(0.05, 4.0001, 0.05), 12))
    family = build_dense_family(cfg["family_size"], grid, cfg.sub_seed("family"))
    stages = cfg["stages"]
    recipe = construct_generator(pts, family, stages, cap_factor=cfg["cap_factor"],
                                 density_classification=dens.classification)
    elapsed = time.perf_counter() - t0
    fine = make_grid(grid.half_extent, 2 * grid.points)
    refined = recipe.recompute_stage_errors(fine)
    rel = [abs(a / b - 1) if b > 0 else abs(a) for a, b in zip(refined, recipe.stage_errors)]
    eps = [s.epsilon for s in recipe.stages]
    c = recipe.coefficients
    # the identity needs the schedule to reach (numerically) zero, so extend it
    long = initial_coefficients(c.epsilon_schedule + epsilon_schedule(64)[len(c.epsilon_schedule):])
    tele = max(abs(long.tail_sum(n) - long.epsilon_schedule[n]) for n in range(1, stages + 1))
    F = recipe.spectrum()
    inclusion = all(np.all(np.isin(s.fit.frequencies, pts.points)) for s in recipe.stages)
    props = recipe.properties
    ratios = [p.w_ratio for p in props]
    out.metrics.update(
        density_classification=dens.classification, stage_errors=list(recipe.stage_errors),
        epsilons=eps, refined_stage_errors=list(refined), refined_rel_diff=rel,
        chain_bounds=list(recipe.chain_bounds), deltas=list(c.deltas),
        stars=[s.star for s in recipe.stages], fit_residuals=[s.fit.residual_W for s in recipe.stages],
        penalties=[s.fit.penalty for s in recipe.stages],
        active_terms=[s.fit.active() for s in recipe.stages],
        lower_bounds_ok=[s.lower_bound_ok for s in recipe.stages],
        support_ok=[p.support_ok for p in props], increments=[p.increment_w for p in props],
        increment_bounds=[p.increment_bound for p in props],
        star_F=[p.star for p in props], star_F_bound=[p.star_bound for p in props],
        star_equality=[p.star_equality for p in props], w_ratio=ratios,
        w_constant=max(ratios), telescoping_gap=tele, frequencies_in_lambda=inclusion,
        F_min=float(np.min(F.values)), F_at_zero=float(F.values[grid.zero_index]),
        warnings=list(recipe.warnings))
    out.timing["elapsed"] = elapsed
    out.documents["generator_recipe.json"] = recipe.as_dict()
    out.tables["generator_stage_errors.csv"] = curve_csv(range(1, stages + 1), recipe.stage_errors,
                                                         ("stage", "stage_error"))
    z = grid.nodes
    keep = np.abs(z) <= stages + 1
    out.tables["generator_spectrum.csv"] = curve_csv(z[keep], F.values[keep], ("zeta", "F"))
    out.verdict("stage_errors", all(e < s for e, s in zip(recipe.stage_errors, eps)), "acceptance 7")
    out.verdict("property_support", all(p.support_ok for p in props), "acceptance 7")
    out.verdict("property_increment", all(p.increment_ok for p in props), "acceptance 7")
    out.verdict("property_star", all(p.star_ok for p in props), "acceptance 7")
    out.verdict("property_w_constant", max(ratios) <= TENT_W_NORM, "acceptance 7")
    out.verdict("lower_bound", all(s.lower_bound_ok for s in recipe.stages), "F_n lower bound")
    out.verdict("refined_grid", max(rel) <= cfg["tol.refine"], "acceptance 7")
    out.verdict("telescoping", tele <= 1e-14, "telescoping identity invariant")
    out.verdict("frequencies_in_lambda", inclusion, "set inclusion invariant")
    out.verdict("F_nonnegative", float(np.min(F.values)) >= 0 and F.values[grid.zero_index] == 0.0,
                "F nonnegative, zero at 0")
    out.verdict("runtime", elapsed < cfg["tol.runtime"], "acceptance 7")
    return out


def _perturbed_spectrum(fgrid, member, seed, eta):
    base = member.sample(fgrid)
    if eta == 0:
        return base
    P = random_w0_element(fgrid, np.random.default_rng(seed))
    return base + P * eta


def run_generator_demo(cfg: ScenarioConfig, jobs: int = 1) -> Outcome:
    out = Outcome()
    grid = _frequency_grid(cfg)
    pts = _lambda(cfg)
    stages = cfg["stages"]
    eps = cfg["epsilon"]
    base_seed = cfg.sub_seed("family")
    seeds = [base_seed + i for i in range(cfg["recipes"])]

    def build(seed):
        return construct_generator(pts, build_dense_family(stages, grid, seed), stages)

    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            recipes = list(pool.map(build, seeds))
    else:
        recipes = [build(s) for s in seeds]
    d0 = cfg.get("d0")
    if d0 is None:
        d0 = _d0_estimate(grid, cfg.sub_seed("functions"), cfg["d0_samples"])
        d0 = max([d0] + [embedding_check(r.family.sample(n)).ratio
                         for r in recipes for n in range(2, stages + 1)])
    fine = make_grid(grid.half_extent, 2 * grid.points)
    rows = []
    for i, recipe in enumerate(recipes):
        eligible = [s.index for s in recipe.stages if d0 * s.epsilon < eps / 2]
        if not eligible:
            rows.append({"recipe": i, "coverage_failure": True})
            continue
        N = eligible[-1]
        member = recipe.family.member(N)
        for j in range(cfg["targets_per_recipe"]):
            eta = 0.0 if j == 0 else cfg["perturbation"] * j
            tseed = cfg.sub_seed("targets") + 100 * i + j
            T = _perturbed_spectrum(grid, member, tseed, eta)
            target = real_if_close(fourier_inverse(T))
            rep = completeness_experiment(recipe, target, eps, d0)
            row = {"recipe": i, "target": j, "perturbation": eta,
                   "achieved": rep.achieved_error_H1, "stage_used": rep.stage_used,
                   "distance": rep.distance_H1, "chain_bound": rep.chain_bound,
                   "coverage_failure": rep.coverage_failure, "terms": int(rep.frequencies.size)}
            if not rep.coverage_failure:
                used = recipe.stages[rep.stage_used - 1].fit
                Tf = _perturbed_spectrum(fine, member, tseed, eta)
                diff = Tf - recipe.spectrum(fine) * used.sample(fine)
                row["achieved_fine"] = h1_norm(real_if_close(fourier_inverse(diff))).value
            rows.append(row)
    ok = [r for r in rows if not r["coverage_failure"]]
    out.metrics.update(d0=d0, epsilon=eps, targets=rows,
                       max_achieved=max((r["achieved"] for r in ok), default=None),
                       max_chain_bound=max((r["chain_bound"] for r in ok), default=None),
                       coverage_failures=len(rows) - len(ok))
    lines = ["recipe,target,stage_used,achieved,achieved_fine,chain_bound"]
    lines += [f"{r['recipe']},{r.get('target', '')},{r.get('stage_used', '')},"
              f"{r.get('achieved', '')!r},{r.get('achieved_fine', '')!r},{r.get('chain_bound', '')!r}"
              for r in rows]
    out.tables["completeness.csv"] = "\n".join(lines) + "\n"
    out.verdict("coverage", len(ok) == len(rows) and len(rows) > 0, "acceptance 8")
    out.verdict("achieved_below_epsilon", all(r["achieved"] < eps for r in ok) and bool(ok), "acceptance 8")
    out.verdict("chain_below_epsilon", all(r["chain_bound"] < eps for r in ok) and bool(ok), "acceptance 8")
    out.verdict("refined_below_epsilon", all(r["achieved_fine"] < eps for r in ok) and bool(ok),
                "finer-grid recomputation")
    return out


def run_pair(cfg: ScenarioConfig, jobs: int = 1) -> Outcome:
    out = Outcome()
    grid = _frequency_grid(cfg)
    i1, i2 = cfg["interval1"], cfg["interval2"]
    if len(i1) != 2 or len(i2) != 2:
        raise ConfigurationError("intervals need two endpoints", field="interval1")
    I1, I2 = IntervalSpec(*i1), IntervalSpec(*i2)
    res = pair_generators(I1, I2, grid, cfg["range_n"], cfg["schedule"])
    growth = []
    for I in (I1, I2):
        r2 = pair_recipe(I, 2 * cfg["range_n"], cfg["schedule"])
        reach = abs(r2.cell(-r2.range_n).lo) + abs(r2.cell(r2.range_n).hi)
        big = frequency_grid(grid.spacing, reach)
        c2 = check_pair_spectrum(r2, r2.sample(big), tuple(cfg["decay_rates"]), cfg["shift"])
        growth.append(c2.decay_constants)
    checks = res.checks
    out.metrics.update(pair=_clean(res.as_dict()),
                       decay_constants_doubled_range=[{str(k): v for k, v in g.items()} for g in growth])
    out.documents["pair_recipes.json"] = _clean(res.as_dict())
    for name, F in (("f1_spectrum.csv", res.f1_spec), ("f2_spectrum.csv", res.f2_spec)):
        out.tables[name] = curve_csv(grid.nodes, F.values, ("t", "F"))
    tol = cfg["tol.zero"]
    out.verdict("zero_set", all(c.zero_set_ok(tol) for c in checks), "acceptance 10")
    out.verdict("positive_on_cells", all(c.positive_on_cells for c in checks), "acceptance 10")
    out.verdict("decay_envelope", all(all(math.isfinite(v) for v in c.decay_constants.values())
                                      for c in checks), "acceptance 10")
    out.verdict("shifted_h1_finite", all(c.shifted_h1 is not None and math.isfinite(c.shifted_h1)
                                         for c in checks), "acceptance 10")
    out.verdict("covers", res.covers, "acceptance 10")
    out.verdict("periodicity", all(c.periodicity_deviation <= cfg["tol.periodicity"] for c in checks),
                "periodicity invariant")
    return out


def _wiener_profiles(grid, zero, half_width):
    fg = grid.dual()
    z = fg.nodes
    base = 1.0 + tent_phi()(z - 3.0)
    notch = np.minimum(1.0, np.maximum(0.0, np.abs(z - zero) - half_width))
    pos = real_if_close(fourier_inverse(SpectralFunction(fg, base)))
    planted = real_if_close(fourier_inverse(SpectralFunction(fg, base * notch)))
    return pos, planted


def run_annihilate(cfg: ScenarioConfig, jobs: int = 1) -> Outcome:
    out = Outcome()
    grid = _grid(cfg)
    delta = cfg["delta"]
    g = vanishing_on_integers(delta, grid)
    f = SampledFunction.from_callable(lambda x: x * np.exp(-x ** 2 / 2), grid)
    pts = _lambda(cfg)
    w = build_annihilator(f, g, pts, eta=cfg["eta"])
    table = w.residuals
    lam0 = cfg["probe_lambda"]
    r0 = complex(pairing_spectral(w.k, f, [lam0])[0])
    oracle = conventions.PAIRING_CONSTANT * abs(float(integer_vanishing_closed_form(lam0, delta)))
    probe = np.arange(-10, 10) + 0.5
    res = pairing_spectral(w.k, f, probe)
    gv = integer_vanishing_closed_form(-probe, delta)
    const = complex(np.vdot(gv, res) / np.vdot(gv, gv))
    pert = parse_lambda_spec(
        f"perturbed:{cfg['perturbed_gamma']}:{cfg['perturbed_extent']}", cfg.sub_seed("lambda"))
    ptab = annihilation_scan(w.k, f, pert)
    porc = conventions.PAIRING_CONSTANT * np.abs(integer_vanishing_closed_form(ptab.lambdas, delta))
    pdev = float(np.max(np.abs(np.abs(ptab.residuals) / porc - 1)))
    spatial = pairing_spatial(w.k, f, lam0)
    kinf, bound = w.bound_check()
    eta_w = cfg["wiener_eta"]
    pos, planted = _wiener_profiles(make_grid(64.0, 8192), cfg["wiener_zero"], math.pi / 64)
    wp = wiener_predicate(pos, eta_w)
    wz = wiener_predicate(planted, eta_w)
    spacing = math.pi / 64
    g_int = float(np.max(np.abs(g(np.arange(-20.0, 21.0)))))
    out.metrics.update(
        g_max_on_integers=g_int, max_normalized_residual=table.max_normalized(),
        excluded=table.excluded.tolist(), probe_residual=abs(r0), probe_oracle=oracle,
        probe_rel_error=abs(abs(r0) / oracle - 1), fitted_constant=[const.real, const.imag],
        constant_rel_error=abs(const / conventions.PAIRING_CONSTANT - 1),
        perturbed_max_rel_dev=pdev, parseval_rel_gap=abs(spatial - r0) / abs(r0),
        k_sup=kinf, k_bound=bound, gap_ok=w.gap_ok(),
        wiener_positive=wp.nonvanishing, wiener_planted=wz.nonvanishing,
        wiener_witness=wz.witness_zero)
    out.tables["annihilation_residuals.csv"] = table.to_csv()
    out.tables["perturbed_residuals.csv"] = ptab.to_csv()
    out.verdict("annihilation", table.max_normalized() < cfg["tol.annihilation"], "acceptance 9")
    out.verdict("probe_oracle", abs(abs(r0) / oracle - 1) < cfg["tol.oracle"], "acceptance 9")
    out.verdict("pairing_constant", abs(const / conventions.PAIRING_CONSTANT - 1) < cfg["tol.constant"],
                "acceptance 9")
    out.verdict("perturbed_oracle", pdev < cfg["tol.perturbed"], "perturbed integer scan")
    out.verdict("k_bounded", kinf <= bound * (1 + 1e-12), "bounded annihilator invariant")
    out.verdict("spectral_gap", w.gap_ok(), "g_hat vanishes near 0")
    out.verdict("wiener_positive", wp.nonvanishing, "acceptance 11")
    out.verdict("wiener_planted", (not wz.nonvanishing) and wz.witness_zero is not None
                and abs(wz.witness_zero - cfg["wiener_zero"]) <= spacing * (1 + 1e-9), "acceptance 11")
    return out


def run_approx(cfg: ScenarioConfig, jobs: int = 1) -> Outcome:
    out = Outcome()
    grid = _frequency_grid(cfg)
    pts = _lambda(cfg)
    lo, hi = cfg["interval"]
    I = IntervalSpec(lo, hi)
    target = SpectralFunction(grid, tent_phi()(grid.nodes))
    hilbert, wres = [], []
    for m in cfg["max_terms"]:
        fit = fit_polynomial(target, pts, I, int(m))
        a, b = sobolev_parts(target - fit.sample(grid), I)
        hilbert.append(math.hypot(a, b))
        wres.append(fit.residual_W)
    # thinned to spacing 2 pi/|I| the exponentials are well separated, so the
    # in-span solution is unique and must use one term
    spacing = 2 * math.pi / I.length
    sparse = offered_frequencies(pts, 4 * max(abs(lo), abs(hi)), None, spacing)
    lam0 = float(sparse[len(sparse) // 2 + 1])
    exp_target = SpectralFunction(grid, np.exp(1j * lam0 * grid.nodes))
    efit = fit_polynomial(exp_target, pts, I, None, min_spacing=spacing)
    zfit = fit_polynomial(SpectralFunction(grid, np.zeros(grid.points)), pts, I, 8)
    excess = max(np.diff(hilbert)) if len(hilbert) > 1 else 0.0
    out.metrics.update(max_terms=cfg["max_terms"], hilbert_residuals=hilbert, w_residuals=wres,
                       monotone_excess=float(excess), in_span_residual=efit.residual_W,
                       in_span_active=efit.active(1e-6), zero_residual=zfit.residual_W)
    out.tables["approx_residuals.csv"] = curve_csv(cfg["max_terms"], hilbert, ("max_terms", "residual"))
    out.verdict("monotone", excess <= cfg["tol.monotone"], "fit_polynomial doubling example")
    out.verdict("in_span", efit.residual_W < 1e-10 and efit.active(1e-6) == 1, "fit_polynomial in-span example")
    out.verdict("zero_target", zfit.residual_W == 0.0 and not np.any(zfit.coefficients),
                "fit_polynomial zero example")
    return out


COMMAND_TABLE = {
    "density": run_density,
    "probe-radius": run_probe,
    "hilbert-check": run_hilbert,
    "norms": run_norms,
    "molecule-suite": run_molecules,
    "generator-build": run_generator_build,
    "generator-demo": run_generator_demo,
    "pair-build": run_pair,
    "annihilate": run_annihilate,
    "approx": run_approx,
}


# ---------------------------------------------------------------------------
# reports


def atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def report_name(command: str) -> str:
    return f"{command}.report.json"


def run(cfg: ScenarioConfig, jobs: int = 1, write: bool = True) -> dict:
    """Run one scenario, write its files into ``cfg.output_dir`` and return the report."""
    start = time.perf_counter()
    outcome = COMMAND_TABLE[cfg.command](cfg, jobs)
    wall = time.perf_counter() - start
    prefix = cfg.command.replace("-", "_")
    files = []
    outdir = Path(cfg.output_dir)
    report = {
        "schema": REPORT_SCHEMA,
        "command": cfg.command,
        "config": cfg.echo(),
        "config_hash": cfg.digest(),
        "metrics": _clean(outcome.metrics),
        "verdicts": outcome.verdicts,
        "provenance": {"version": __version__, "seed": cfg.seed,
                       "convention": conventions.CONVENTION_TAG},
        "wall_time": wall,
        "timing": _clean(outcome.timing),
        "output_dir": str(outdir),
        "base_dir": str(Path(cfg.base_dir).resolve()),
        "files": files,
    }
    if write:
        for name, text in sorted(outcome.tables.items()):
            fname = f"{prefix}.{name}"
            atomic_write(outdir / fname, text)
            files.append(fname)
        for name, doc in sorted(outcome.documents.items()):
            fname = f"{prefix}.{name}"
            atomic_write(outdir / fname, json.dumps(_clean(doc), indent=1, sort_keys=True) + "\n")
            files.append(fname)
        atomic_write(outdir / report_name(cfg.command), json.dumps(report, indent=1, sort_keys=True) + "\n")
    return report


def overall_status(report: dict) -> int:
    return 1 if any(v["status"] == FAIL for v in report["verdicts"].values()) else 0


def compare_metrics(old, new, path="metrics", tol=REPLAY_TOL):
    """First path where ``new`` drifts from ``old`` beyond ``tol`` (relative above 1), else None."""
    if isinstance(old, dict) and isinstance(new, dict):
        if set(old) != set(new):
            return path
        for k in old:
            bad = compare_metrics(old[k], new[k], f"{path}.{k}", tol)
            if bad:
                return bad
        return None
    if isinstance(old, list) and isinstance(new, list):
        if len(old) != len(new):
            return path
        for i, (a, b) in enumerate(zip(old, new)):
            bad = compare_metrics(a, b, f"{path}[{i}]", tol)
            if bad:
                return bad
        return None
    if isinstance(old, bool) or isinstance(new, bool) or old is None or new is None:
        return None if old == new else path
    if isinstance(old, (int, float)) and isinstance(new, (int, float)):
        return None if abs(old - new) <= tol * max(1.0, abs(old)) else path
    return None if old == new else path


def replay(report_path, output_dir: str | None = None, jobs: int = 1) -> dict:
    """Re-run the embedded config and check the metrics.

    Raises
    ------
    ReproducibilityError
        On a config hash mismatch or metric drift beyond 1e-12.
    """
    p = Path(report_path)
    try:
        stored = json.loads(p.read_text())
        echo = stored["config"]
        digest = stored["config_hash"]
        metrics = stored["metrics"]
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise ConfigurationError(f"unreadable report {p}: {exc}", field="report") from None
    if config_hash(echo) != digest:
        raise ReproducibilityError("config hash mismatch: the embedded config was modified")
    out = output_dir or stored.get("output_dir") or str(p.parent)
    cfg = build_config(dict(echo), None, stored.get("base_dir", str(p.parent)), out)
    report = run(cfg, jobs)
    drift = compare_metrics(metrics, report["metrics"])
    if drift:
        raise ReproducibilityError(f"metric drift at {drift}")
    return report
