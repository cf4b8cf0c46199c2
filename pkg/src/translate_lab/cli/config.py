"""Scenario configuration: parsing, defaults, validation and hashing.

A config is a flat ``key = value`` text file (``#`` starts a comment) or a
JSON object with the same keys.  Nested names use dots: ``grid.points``,
``tol.knee``.  Lists are comma separated.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import ConfigurationError
from ..lambda_sets import DiscreteSet, integers, lattice, multiscale_cluster, perturbed_integers

COMMANDS = ("density", "probe-radius", "hilbert-check", "norms", "molecule-suite",
            "generator-build", "generator-demo", "pair-build", "annihilate", "approx")

#: sub-seed offsets; every random stream is ``default_rng(seed + offset)``
SEED_OFFSETS = {"lambda": 1, "family": 2, "functions": 3, "targets": 4, "molecules": 5}

_COMMON = {"command": (str, None), "seed": (int, 0), "output_dir": (str, "out")}

# key -> (type, default); "floats" is a comma-separated list, None default means optional
SCHEMAS = {
    "density": {
        "lambda_spec": (str, "integers:4096"),
        "d_step": (float, 0.05), "d_max": (float, 4.0),
        "expect.classification": (str, None),
        "expect.lower_bound": ("floats", None),
    },
    "probe-radius": {
        "lambda_spec": (str, "integers:199"),
        "targets": ("floats", "0.5"),
        "r_min": (float, 2.0), "r_max": (float, 4.0), "r_step": (float, 0.1),
        "truncations": ("floats", "30,60,120,199"),
        "tol.threshold": (float, 1e-3), "tol.ridge": (float, 1e-10),
        "tol.monotone": (float, 1e-10),
        "expect.knee": (float, None), "tol.knee": (float, 0.1),
        "check_r": (float, None), "tol.check_floor": (float, 0.05),
    },
    "hilbert-check": {
        "grid.half_extent": (float, 64.0), "grid.points": (int, 8192),
        "count": (int, 50), "parseval_count": (int, 20), "bandwidth": (float, 4.0),
        "tol.involution": (float, 1e-10), "tol.closed_form": (float, 2e-3),
        "tol.parseval": (float, 1e-8), "tol.runtime": (float, 5.0),
    },
    "norms": {
        "grid.half_extent": (float, 4.0), "grid.points": (int, 256),
        "count": (int, 20), "oracle_points": (int, 64),
        "truncation_levels": ("floats", "0.5,1,2,5"),
        "tol.truncation": (float, 1e-6), "tol.oracle": (float, 1e-12),
    },
    "molecule-suite": {
        "grid.half_extent": (float, 64.0), "grid.points": (int, 4096),
        "count": (int, 100), "q": (float, 2.0), "a0": (float, 0.5),
        "w0_count": (int, 100), "frequency.spacing": (float, 1.0 / 16),
        "tol.homogeneity": (float, 1e-10), "tol.amgm": (float, 1e-12),
        "tol.d0_stability": (float, 0.2),
    },
    "generator-build": {
        "lambda_spec": (str, "cluster:7"),
        "grid.half_extent": (float, 16.0), "grid.points": (int, 4096),
        "stages": (int, 4), "family_size": (int, 6), "cap_factor": (float, 8.0),
        "tol.refine": (float, 0.05), "tol.runtime": (float, 60.0),
    },
    "generator-demo": {
        "lambda_spec": (str, "cluster:7"),
        "grid.half_extent": (float, 16.0), "grid.points": (int, 4096),
        "stages": (int, 4), "recipes": (int, 5), "targets_per_recipe": (int, 2),
        "epsilon": (float, 0.1), "perturbation": (float, 1e-3), "d0_samples": (int, 20),
        "d0": (float, None),
    },
    "pair-build": {
        "grid.half_extent": (float, 32.0), "grid.points": (int, 4096),
        "interval1": ("floats", "-3.2,0.1"), "interval2": ("floats", "-0.1,3.2"),
        "range_n": (int, 3), "schedule": (str, "exponential"),
        "decay_rates": ("floats", "0.1,0.3"), "shift": (float, 0.5),
        "tol.zero": (float, 1e-12), "tol.periodicity": (float, 0.05),
    },
    "annihilate": {
        "lambda_spec": (str, "integers:20"),
        "grid.half_extent": (float, 512.0), "grid.points": (int, 65536),
        "delta": (float, 0.5), "eta": (float, 0.5), "probe_lambda": (float, 0.5),
        "perturbed_gamma": (float, 0.5), "perturbed_extent": (float, 10.0),
        "wiener_zero": (float, 1.0), "wiener_eta": (float, 0.1),
        "tol.annihilation": (float, 1e-6), "tol.oracle": (float, 0.05),
        "tol.perturbed": (float, 0.1), "tol.constant": (float, 1e-3),
    },
    "approx": {
        "lambda_spec": (str, "lattice:0.25:32"),
        "grid.half_extent": (float, 4.0), "grid.points": (int, 1024),
        "interval": ("floats", "-2,2"), "max_terms": ("floats", "8,16,32,64,128"),
        "tol.monotone": (float, 1e-10),
    },
}


def _coerce(key, kind, raw):
    if raw is None:
        return None
    try:
        if kind is str:
            return str(raw)
        if kind is int:
            if isinstance(raw, float) and not raw.is_integer():
                raise ValueError
            return int(raw)
        if kind is float:
            v = float(raw)
            if not math.isfinite(v):
                raise ValueError
            return v
        if kind == "floats":
            items = raw if isinstance(raw, list) else [s for s in str(raw).split(",") if s.strip()]
            return [float(s) for s in items]
    except (TypeError, ValueError):
        raise ConfigurationError(f"cannot read {key} = {raw!r} as {getattr(kind, '__name__', kind)}",
                                 field=key) from None
    raise ConfigurationError(f"unknown type for {key}", field=key)


def parse_text(text: str) -> dict:
    """``key = value`` lines; blank lines and ``#`` comments are skipped."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected key = value", field=f"line {lineno}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in out:
            raise ConfigurationError(f"duplicate key {key}", field=key)
        out[key] = value
    return out


def _flatten(obj, prefix=""):
    out = {}
    for k, v in obj.items():
        name = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, name + "."))
        else:
            out[name] = v
    return out


@dataclass(frozen=True)
class ScenarioConfig:
    command: str
    values: dict
    base_dir: str = "."
    output_dir: str = "out"

    @property
    def seed(self) -> int:
        return self.values["seed"]

    def __getitem__(self, key):
        return self.values[key]

    def get(self, key, default=None):
        v = self.values.get(key)
        return default if v is None else v

    def sub_seed(self, purpose: str) -> int:
        return self.seed + SEED_OFFSETS[purpose]

    @property
    def tolerances(self) -> dict:
        return {k[4:]: v for k, v in self.values.items() if k.startswith("tol.")}

    def echo(self) -> dict:
        """Everything that determines the result (``output_dir`` excluded)."""
        return {"command": self.command, **{k: v for k, v in sorted(self.values.items())}}

    def digest(self) -> str:
        return config_hash(self.echo())


def config_hash(echo: dict) -> str:
    blob = json.dumps(echo, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def build_config(raw: dict, command: str | None = None, base_dir: str = ".",
                 output_dir: str | None = None) -> ScenarioConfig:
    """Validate ``raw`` against the command schema and fill defaults."""
    raw = _flatten(raw)
    cmd = raw.get("command") or command
    if command and raw.get("command") and raw["command"] != command:
        raise ConfigurationError(f"config is for {raw['command']!r}, not {command!r}", field="command")
    if cmd not in COMMANDS:
        raise ConfigurationError(f"unknown command {cmd!r}", field="command")
    schema = {**_COMMON, **SCHEMAS[cmd]}
    unknown = sorted(set(raw) - set(schema))
    if unknown:
        raise ConfigurationError(f"unknown key {unknown[0]!r} for {cmd}", field=unknown[0])
    values = {}
    for key, (kind, default) in schema.items():
        if key in ("command", "output_dir"):
            continue
        values[key] = _coerce(key, kind, raw.get(key, default))
    for key, v in values.items():
        if key.startswith("tol.") and v is not None and not v > 0:
            raise ConfigurationError(f"tolerance {key} must be positive, got {v}", field=key)
    for key in ("grid.points", "count", "stages", "recipes", "range_n", "w0_count"):
        if key in values and values[key] is not None and values[key] < 1:
            raise ConfigurationError(f"{key} must be >= 1", field=key)
    if "lambda_spec" in values:
        spec = values["lambda_spec"]
        if spec.startswith("file:"):
            path = Path(base_dir, spec[5:])
            if not path.is_file():
                raise ConfigurationError(f"point-set file {path} does not exist", field="lambda_spec")
    out = output_dir or raw.get("output_dir") or "out"
    return ScenarioConfig(cmd, values, str(base_dir), str(out))


def load_config(path, command: str | None = None, output_dir: str | None = None) -> ScenarioConfig:
    """Read a key-value or JSON config file."""
    p = Path(path)
    if not p.is_file():
        raise ConfigurationError(f"config file {p} not found", field="config")
    text = p.read_text()
    if text.lstrip().startswith("{"):
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"invalid JSON: {exc}", field="config") from None
    else:
        raw = parse_text(text)
    out = output_dir
    if out is None and "output_dir" in raw:
        out = str(Path(p.parent, raw["output_dir"]))
    return build_config(raw, command, str(p.parent), out)


def parse_lambda_spec(spec: str, seed: int = 0, base_dir: str = ".") -> DiscreteSet:
    """``integers:E``, ``lattice:SPACING:E``, ``cluster:LEVELS``,
    ``perturbed:GAMMA:E`` or ``file:PATH``."""
    kind, _, rest = spec.partition(":")
    args = rest.split(":") if rest else []
    try:
        if kind == "integers" and len(args) == 1:
            return integers(float(args[0]))
        if kind == "lattice" and len(args) == 2:
            return lattice(float(args[1]), float(args[0]))
        if kind == "cluster" and len(args) == 1:
            return multiscale_cluster(int(args[0]))
        if kind == "perturbed" and len(args) == 2:
            return perturbed_integers(float(args[0]), float(args[1]), seed)
        if kind == "file" and rest:
            return DiscreteSet.from_text(Path(base_dir, rest).read_text())
    except (ValueError, OSError) as exc:
        raise ConfigurationError(f"bad lambda_spec {spec!r}: {exc}", field="lambda_spec") from None
    raise ConfigurationError(f"bad lambda_spec {spec!r}", field="lambda_spec")


def fixture_dir() -> Path:
    return Path(os.path.dirname(os.path.dirname(__file__)), "fixtures")


def fixture_path(name: str) -> Path:
    return fixture_dir() / f"{name}.cfg"
