"""Built-in and user-defined scenarios: a base space, a beta-change, vector
fields with known Killing status, and a reproducible sample of tangent points.

Scenarios are plain JSON-compatible dicts first (so workers and config files
share one schema) and are materialised by :func:`build_scenario`.
"""
from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import fields as fld
from .beta_change import (BetaChange, identity_change, matsumoto_change, power_series_change,
                          randers_change)
from .errors import ConfigError
from .finsler import (FinslerSpace, TangentPoint, conformally_flat, euclidean, randers_space,
                      riemannian)
from .killing import is_killing

STATUSES = ("killing-both", "killing-base-only", "killing-neither")
DEFAULT_SEED = 42
DEFAULT_SAMPLE = {
    "mode": "random", "count": 100, "seed": DEFAULT_SEED,
    "x_bound": 1.0, "y_min": 0.5, "y_max": 2.0,
    "beta_min": 1e-3, "lbar_margin": 0.1,
}


def _rot(plane, name, expected):
    return {"name": name, "kind": "rotation", "plane": plane, "expected": expected}


def _tr(axis, expected):
    return {"name": f"translation-{axis}", "kind": "translation", "axis": axis,
            "expected": expected}


BUILTIN_CONFIGS = [
    {
        "name": "identity",
        "description": "Euclidean R^3, identity change f = L (b nonzero and x-dependent)",
        "dim": 3,
        "metric": {"kind": "euclidean"},
        "change": {"kind": "identity"},
        "b": {"const": [0.0, 0.0, 0.2], "linear": [[0, 0.1, 0], [0, 0, 0], [0, 0, 0]]},
        "fields": [_tr(1, "killing-both"), _tr(2, "killing-both"), _tr(3, "killing-both"),
                   _rot([1, 2], "rot3", "killing-both"), _rot([2, 3], "rot1", "killing-both"),
                   {"name": "dilation", "kind": "dilation", "expected": "killing-neither"}],
    },
    {
        "name": "randers-rot3",
        "description": "Euclidean R^3, Randers change f = L + beta, b = (0, 0, 0.3)",
        "dim": 3,
        "metric": {"kind": "euclidean"},
        "change": {"kind": "randers"},
        "b": {"const": [0.0, 0.0, 0.3]},
        "fields": [_rot([1, 2], "rot3", "killing-both"),
                   _rot([2, 3], "rot1", "killing-base-only"),
                   {"name": "dilation", "kind": "dilation", "expected": "killing-neither"}],
    },
    {
        "name": "conformal-rot3",
        "description": "Riemannian a_ij = (1 + 0.1|x|^2) delta_ij, Randers change, b = (0, 0, 0.2)",
        "dim": 3,
        "metric": {"kind": "riemannian", "conformal": 0.1},
        "change": {"kind": "randers"},
        "b": {"const": [0.0, 0.0, 0.2]},
        "fields": [_rot([1, 2], "rot3", "killing-both"),
                   _rot([2, 3], "rot1", "killing-base-only")],
    },
    {
        "name": "matsumoto",
        "description": "Euclidean R^3, Matsumoto change f = L^2/(L - beta), b = (0.1, 0, 0)",
        "dim": 3,
        "metric": {"kind": "euclidean"},
        "change": {"kind": "matsumoto"},
        "b": {"const": [0.1, 0.0, 0.0]},
        "fields": [_rot([2, 3], "rot1", "killing-both"), _tr(1, "killing-both"),
                   _rot([1, 2], "rot3", "killing-base-only")],
    },
    {
        "name": "nonparallel",
        "description": "Euclidean R^3, Randers change, b = (0.1 x^2, 0, 0) (not parallel)",
        "dim": 3,
        "metric": {"kind": "euclidean"},
        "change": {"kind": "randers"},
        "b": {"const": [0.0, 0.0, 0.0], "linear": [[0, 0.1, 0], [0, 0, 0], [0, 0, 0]]},
        "fields": [_tr(1, "killing-both"), _tr(3, "killing-both"),
                   _tr(2, "killing-base-only")],
    },
    {
        "name": "randers-base-matsumoto",
        "description": "Randers base L = |y| + 0.2 y^3, Matsumoto change, b = (0.1 x^2, 0, 0)",
        "dim": 3,
        "metric": {"kind": "randers-base", "a": [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
                   "b": {"const": [0.0, 0.0, 0.2]}},
        "change": {"kind": "matsumoto"},
        "b": {"const": [0.0, 0.0, 0.0], "linear": [[0, 0.1, 0], [0, 0, 0], [0, 0, 0]]},
        "fields": [_tr(1, "killing-both"), _tr(2, "killing-base-only")],
    },
    {
        "name": "rotational-form-2d",
        "description": "Riemannian a_ij = (1 + 0.1|x|^2) delta_ij on R^2, Randers change, "
                       "b = 0.1 (-x^2, x^1)",
        "dim": 2,
        "metric": {"kind": "riemannian", "conformal": 0.1},
        "change": {"kind": "randers"},
        "b": {"const": [0.0, 0.0], "linear": [[0, -0.1], [0.1, 0]]},
        "fields": [_rot([1, 2], "rot", "killing-both"), _tr(1, "killing-neither")],
    },
    {
        "name": "custom-power-4d",
        "description": "Euclidean R^4, f = L + 0.5 beta + 0.25 beta^2/L, b = (0.2, 0, 0, 0.1)",
        "dim": 4,
        "metric": {"kind": "euclidean"},
        "change": {"kind": "custom-power", "coeffs": [1.0, 0.5, 0.25]},
        "b": {"const": [0.2, 0.0, 0.0, 0.1]},
        "fields": [_rot([2, 3], "rot23", "killing-both"), _tr(4, "killing-both"),
                   _rot([1, 2], "rot12", "killing-base-only")],
    },
]


@dataclass
class Scenario:
    name: str
    description: str
    space: FinslerSpace
    change: BetaChange
    bar_space: FinslerSpace
    fields: list  # of (PolynomialField, expected status)
    sample: dict
    config: dict = field(repr=False, default_factory=dict)

    def field(self, name: str):
        for v, _ in self.fields:
            if v.name == name:
                return v
        raise ConfigError("field", f"scenario {self.name!r} has no field {name!r}; "
                          f"available: {[v.name for v, _ in self.fields]}")

    def points(self, count: int | None = None, seed: int | None = None) -> list[TangentPoint]:
        spec = dict(self.sample)
        if count is not None:
            spec["count"] = count
        if seed is not None:
            spec["seed"] = seed
        return sample_points(spec, self)


def builtin_configs() -> dict[str, dict]:
    return {c["name"]: copy.deepcopy(c) for c in BUILTIN_CONFIGS}


def builtin_scenarios() -> list[Scenario]:
    return [build_scenario(c) for c in BUILTIN_CONFIGS]


def get_scenario(name: str) -> Scenario:
    configs = builtin_configs()
    if name not in configs:
        raise ConfigError("scenario", f"unknown scenario {name!r}; choose from {sorted(configs)}")
    return build_scenario(configs[name])


def load_scenario_file(path) -> Scenario:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError("config", f"cannot read scenario file {path}: {exc}") from None
    return build_scenario(data)


def _metric(spec: dict, n: int) -> FinslerSpace:
    kind = spec.get("kind")
    if kind == "euclidean":
        return euclidean(n)
    if kind == "riemannian":
        if "conformal" in spec:
            return conformally_flat(n, float(spec["conformal"]))
        a = np.asarray(spec.get("a"), dtype=float)
        if a.shape != (n, n) or not np.allclose(a, a.T):
            raise ConfigError("metric.a", f"expected a symmetric {n}x{n} matrix")
        if np.any(np.linalg.eigvalsh(a) <= 0):
            raise ConfigError("metric.a", "matrix must be positive definite")
        return riemannian(a)
    if kind == "randers-base":
        a = np.asarray(spec.get("a", np.eye(n)), dtype=float)
        if a.shape != (n, n):
            raise ConfigError("metric.a", f"expected a {n}x{n} matrix")
        b0 = fld.from_spec(spec.get("b", {"kind": "zero"}), n, "metric.b")
        return randers_space(a, b0)
    raise ConfigError("metric.kind", f"unknown metric kind {kind!r}")


def _change(spec: dict, b) -> BetaChange:
    kind = spec.get("kind")
    if kind == "identity":
        return identity_change(b)
    if kind == "randers":
        return randers_change(b)
    if kind == "matsumoto":
        return matsumoto_change(b)
    if kind == "custom-power":
        coeffs = spec.get("coeffs")
        if not coeffs or not isinstance(coeffs, list):
            raise ConfigError("change.coeffs", "custom-power needs a non-empty coefficient list")
        return power_series_change(coeffs, b)
    raise ConfigError("change.kind", f"unknown change kind {kind!r}")


def build_scenario(cfg: dict) -> Scenario:
    if not isinstance(cfg, dict):
        raise ConfigError("scenario", "scenario definition must be an object")
    name = cfg.get("name", "custom")
    try:
        n = int(cfg["dim"])
    except (KeyError, TypeError, ValueError):
        raise ConfigError("dim", "scenario needs an integer 'dim'") from None
    if n < 2:
        raise ConfigError("dim", "dimension must be at least 2")
    space = _metric(cfg.get("metric", {}), n)
    b = fld.from_spec(cfg.get("b", {"kind": "zero"}), n, "b")
    change = _change(cfg.get("change", {}), b)
    field_list = []
    for k, fs in enumerate(cfg.get("fields", [])):
        v = fld.from_spec(fs, n, fs.get("name", f"field-{k}"))
        status = fs.get("expected", "killing-neither")
        if status not in STATUSES:
            raise ConfigError(f"fields[{k}].expected", f"must be one of {STATUSES}")
        field_list.append((v, status))
    sample = dict(DEFAULT_SAMPLE)
    sample.update(cfg.get("sample", {}))
    validate_sample(sample)
    return Scenario(name, cfg.get("description", ""), space, change, change.apply(space),
                    field_list, sample, copy.deepcopy(cfg))


def validate_sample(spec: dict):
    mode = spec.get("mode", "random")
    if mode not in ("random", "grid"):
        raise ConfigError("sample.mode", "must be 'random' or 'grid'")
    if mode == "random":
        count = spec.get("count")
        if not isinstance(count, int) or isinstance(count, bool) or count < 1:
            raise ConfigError("count", f"must be an integer >= 1, got {count!r}")
        if not isinstance(spec.get("seed"), int):
            raise ConfigError("seed", "must be an integer")
        if not 0 < spec["y_min"] <= spec["y_max"]:
            raise ConfigError("sample.y_min", "need 0 < y_min <= y_max")
        if spec["x_bound"] < 0:
            raise ConfigError("sample.x_bound", "must be non-negative")
    else:
        if not spec.get("x") or not spec.get("y"):
            raise ConfigError("sample", "grid mode needs non-empty 'x' and 'y' lists")


# sampling --------------------------------------------------------------------------

def admissible(scenario: Scenario, pt: TangentPoint, spec: dict) -> bool:
    """Reject points on the singular shells of the scenario's closed forms."""
    L = float(scenario.space.L(list(pt.x), list(pt.y)))
    if not L > 0:
        return False
    kind = scenario.change.params.get("kind")
    beta = float(scenario.change.beta(list(pt.x), list(pt.y)))
    if kind != "identity" and abs(beta) < spec["beta_min"] * L:
        return False
    if kind == "matsumoto" and not L - beta > spec["lbar_margin"]:
        return False
    if kind == "randers":
        # |b| < 1 in the base metric keeps Lbar positive on the whole fibre
        bx = scenario.change.b.value(pt.x)
        if scenario.space.name == "euclidean" and not bx @ bx < 1:
            return False
    Lbar = float(scenario.bar_space.L(list(pt.x), list(pt.y)))
    return Lbar > 0


def sample_points(spec: dict, scenario: Scenario) -> list[TangentPoint]:
    """Deterministic sample for a fixed seed (numpy PCG64 via default_rng)."""
    spec = {**DEFAULT_SAMPLE, **spec}
    validate_sample(spec)
    n = scenario.space.dim
    if spec["mode"] == "grid":
        pts = [TangentPoint(x, y) for x in spec["x"] for y in spec["y"]]
        pts = [p for p in pts if admissible(scenario, p, spec)]
        if not pts:
            raise ConfigError("sample", f"no admissible grid point for scenario {scenario.name!r}")
        return pts
    rng = np.random.default_rng(spec["seed"])
    out: list[TangentPoint] = []
    count = spec["count"]
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 1000 * count:
            raise ConfigError("sample", f"empty admissible region for scenario {scenario.name!r}")
        x = rng.uniform(-spec["x_bound"], spec["x_bound"], n)
        d = rng.standard_normal(n)
        norm = np.linalg.norm(d)
        if norm == 0:
            continue
        y = d / norm * rng.uniform(spec["y_min"], spec["y_max"])
        pt = TangentPoint(x, y)
        if admissible(scenario, pt, spec):
            out.append(pt)
    return out


class FixtureError(AssertionError):
    pass


def verify_fixtures(scenario: Scenario, points) -> dict[str, str]:
    """Check every expected status against the Lie-derivative oracle."""
    observed = {}
    for v, expected in scenario.fields:
        base = is_killing(scenario.space, v, points)
        bar = is_killing(scenario.bar_space, v, points)
        status = ("killing-both" if base and bar else
                  "killing-base-only" if base else
                  "killing-neither" if not bar else "killing-bar-only")
        if status != expected:
            raise FixtureError(f"scenario {scenario.name!r}: field {v.name!r} expected "
                               f"{expected} but the oracle finds {status}")
        observed[v.name] = status
    return observed
