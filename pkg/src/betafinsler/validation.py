"""Validation suites evaluated point by point and reduced into a summary.

Each check produces one number per sampled point (a max-abs or relative
deviation).  Checks are either *authoritative* (they decide the exit status)
or *diagnostic* (reported, never fatal).  Every point is evaluated
independently, so the sweep parallelises and is merged by point index.
"""
from __future__ import annotations

import fnmatch
import functools
import json
import math
from dataclasses import dataclass

import numpy as np

from .beta_change import (ChangePair, beta_angular_metric, beta_associate_cartan, beta_cartan,
                          beta_metric, closed_inverse_metric, v_tensor)
from .errors import ConfigError, DegenerateChangeError, DegenerateMetricError
from .finsler import PointFrame, TangentPoint
from .killing import KILLING_RTOL, killing_report
from .scenarios import Scenario, build_scenario

SUITES = ("tensors", "differences", "killing", "theorem1")
AUTHORITATIVE = "authoritative"
DIAGNOSTIC = "diagnostic"
# relative deviations treat reference magnitudes below this as this
REL_FLOOR = 1e-6
CONDITION_TOL = 1e-7


@dataclass(frozen=True)
class Check:
    name: str
    tol: float
    kind: str = AUTHORITATIVE
    description: str = ""


def maxabs(a) -> float:
    a = np.asarray(a, dtype=float)
    return float(np.max(np.abs(a))) if a.size else 0.0


def rel_dev(a, ref) -> float:
    return maxabs(np.asarray(a) - np.asarray(ref)) / max(maxabs(ref), REL_FLOOR)


def _frame_checks(prefix: str) -> list[Check]:
    return [
        Check(f"{prefix}.g_yy_L2", 1e-10, description="|g_ij y^i y^j - L^2| / L^2"),
        Check(f"{prefix}.g_inv", 1e-10, description="|g^ij g_jk - delta|"),
        Check(f"{prefix}.h_y", 1e-10, description="|h_ij y^j|"),
        Check(f"{prefix}.C_y", 1e-10, description="|C_ijk y^k|"),
        Check(f"{prefix}.g_hcov", 1e-8, description="|g_ij|k|"),
        Check(f"{prefix}.F_y_N", 1e-8, description="|F^i_jk y^k - N^i_j|"),
    ]


def _frame_values(prefix: str, fr: PointFrame) -> dict:
    n = fr.point.dim
    y = fr.y
    L2 = fr.L ** 2
    return {
        f"{prefix}.g_yy_L2": abs(y @ fr.g @ y - L2) / L2,
        f"{prefix}.g_inv": maxabs(fr.g_inv @ fr.g - np.eye(n)),
        f"{prefix}.h_y": maxabs(fr.h @ y),
        f"{prefix}.C_y": maxabs(fr.C @ y),
        f"{prefix}.g_hcov": maxabs(fr.g_hcov),
        f"{prefix}.F_y_N": maxabs(fr.F @ y - fr.N),
    }


def suite_checks(scenario: Scenario, suites) -> list[Check]:
    out: list[Check] = []
    if "tensors" in suites:
        out += _frame_checks("base") + _frame_checks("bar")
        out += [
            Check("change.hbar", 1e-7, description="closed-form hbar vs direct"),
            Check("change.gbar", 1e-8, description="closed-form gbar vs direct"),
            Check("change.Cbar", 1e-7, description="closed-form Cbar_ijk vs direct"),
            Check("change.Cbar_up", 1e-7, description="C^h_ij - V^h_ij vs direct Cbar^h_ij"),
            Check("change.gbar_inv_closed", 1e-8, DIAGNOSTIC,
                  "s-coefficient inverse (corrected s0) vs numerical inverse"),
            Check("change.gbar_inv_closed_uncorrected", 1e-8, DIAGNOSTIC,
                  "s-coefficient inverse with the uncorrected s0"),
            Check("change.V_uncorrected", 1e-7, DIAGNOSTIC, "uncorrected V^h_ij variant"),
        ]
    if "differences" in suites:
        out += [
            Check("diff.Dc_y_Dn", 1e-8, description="|D^i_jk y^k - D^i_j|"),
            Check("diff.Dn_y_2D", 1e-8, description="|D^i_j y^j - 2 D^i|"),
            Check("diff.Dn_jet", 1e-8, description="jet d/dy of Gbar - G vs Nbar - N"),
        ]
        if scenario.change.params.get("kind") == "identity":
            out.append(Check("diff.identity_zero", 1e-12,
                             description="max |D|, |D^i_j|, |D^i_jk| for f = L"))
        out += [
            Check("diff.D_closed", 1e-7, DIAGNOSTIC, "closed D^i with q = f f_2"),
            Check("diff.Dn_closed", 1e-6, DIAGNOSTIC, "y-derivative of closed D^i"),
            Check("diff.Dc_lowered", 1e-7, DIAGNOSTIC, "closed D^i_jk, Q_k = g_kr Q^r reading"),
            Check("diff.Dc_expanded", 1e-7, DIAGNOSTIC, "closed D^i_jk, expanded reading"),
        ]
    for v, _ in scenario.fields:
        f = v.name
        if "killing" in suites:
            out += [
                Check(f"killing.{f}.lie_eq_base", 1e-8,
                      description="Lie derivative of g vs Killing equation"),
                Check(f"killing.{f}.lie_eq_bar", 1e-8,
                      description="Lie derivative of gbar vs Killing equation"),
            ]
        if "theorem1" in suites:
            out += [
                Check(f"theorem1.{f}.proof_identity", 1e-7,
                      description="changed-connection Killing expression + 2 x condition"),
                Check(f"theorem1.{f}.chain_condition_y", 1e-7,
                      description="y^i-transvection of the condition vs the transvected vector"),
                Check(f"theorem1.{f}.chain_transvected_y", 1e-7,
                      description="y^j-transvection of the transvected vector vs 2 v_r D^r"),
                Check(f"theorem1.{f}.transvected", 1e-7, description="transvected vector, both-Killing points"),
                Check(f"theorem1.{f}.reduced_condition", 1e-7, description="reduced condition, both-Killing points"),
                Check(f"theorem1.{f}.v_dot_D", 1e-7, description="v_r D^r, both-Killing points"),
                Check(f"theorem1.{f}.condition", CONDITION_TOL, DIAGNOSTIC,
                      "max |condition| over base-Killing points"),
                Check(f"theorem1.{f}.condition_weight4", CONDITION_TOL, DIAGNOSTIC,
                      "condition with weight 4 on Cbar C v D"),
                Check(f"theorem1.{f}.proof_identity_weight4", 1e-7, DIAGNOSTIC,
                      "proof identity with the weight-4 condition"),
            ]
    return out


def apply_overrides(checks: list[Check], overrides: dict) -> tuple[list[Check], dict]:
    """Apply NAME=VALUE tolerance overrides (NAME may be a glob).

    The special names ``killing_rtol`` and ``condition`` set the Killing
    verdict scale and the condition verdict threshold.
    """
    params = {"killing_rtol": KILLING_RTOL, "condition": CONDITION_TOL}
    checks = list(checks)
    for pattern, value in overrides.items():
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
            raise ConfigError(f"tol.{pattern}", f"tolerance must be positive, got {value!r}")
        if pattern in params:
            params[pattern] = float(value)
            continue
        hit = False
        for i, c in enumerate(checks):
            if fnmatch.fnmatchcase(c.name, pattern):
                checks[i] = Check(c.name, float(value), c.kind, c.description)
                hit = True
        if not hit:
            raise ConfigError(f"tol.{pattern}", "matches no check of the selected suites")
    return checks, params


@functools.lru_cache(maxsize=8)
def _scenario_from_json(text: str) -> Scenario:
    return build_scenario(json.loads(text))


def scenario_key(scenario: Scenario) -> str:
    return json.dumps(scenario.config, sort_keys=True)


def evaluate_point(cfg_text: str, suites: tuple, index: int, x, y,
                   params: dict | None = None) -> dict:
    """Every selected check at one point, plus per-field verdicts."""
    scenario = _scenario_from_json(cfg_text)
    params = params or {"killing_rtol": KILLING_RTOL, "condition": CONDITION_TOL}
    pt = TangentPoint(np.asarray(x, float), np.asarray(y, float))
    rec = {"type": "point", "index": index, "x": list(map(float, pt.x)),
           "y": list(map(float, pt.y)), "degenerate": None, "checks": {}, "verdicts": {}}
    try:
        _fill(rec, scenario, pt, suites, params)
    except (DegenerateMetricError, DegenerateChangeError) as exc:
        kind = getattr(exc, "kind", "singular-metric")
        rec["degenerate"] = {"kind": kind, "message": str(exc)}
        rec["checks"] = {}
        rec["verdicts"] = {}
    return rec


def _fill(rec, scenario, pt, suites, params):
    pair = ChangePair(scenario.space, scenario.change, pt, scenario.bar_space)
    base, bar = pair.base, pair.bar
    vals = rec["checks"]
    if "tensors" in suites:
        vals.update(_frame_values("base", base))
        vals.update(_frame_values("bar", bar))
        sc = pair.scalars
        vals["change.hbar"] = rel_dev(beta_angular_metric(sc, base.h), bar.h)
        vals["change.gbar"] = rel_dev(beta_metric(sc, base.g), bar.g)
        vals["change.Cbar"] = rel_dev(beta_cartan(sc, base), bar.C)
        vals["change.Cbar_up"] = rel_dev(beta_associate_cartan(sc, base), bar.C_assoc)
        vals["change.gbar_inv_closed"] = rel_dev(
            closed_inverse_metric(sc, base.g_inv, pt.y), bar.g_inv)
        vals["change.gbar_inv_closed_uncorrected"] = rel_dev(
            closed_inverse_metric(sc, base.g_inv, pt.y, uncorrected=True), bar.g_inv)
        vals["change.V_uncorrected"] = rel_dev(base.C_assoc - v_tensor(sc, base, uncorrected=True),
                                           bar.C_assoc)
    if "differences" in suites:
        d = pair.differences
        y = pt.y
        vals["diff.Dc_y_Dn"] = maxabs(d.Dc @ y - d.Dn)
        vals["diff.Dn_y_2D"] = maxabs(d.Dn @ y - 2 * d.D)
        jet = pair.spray_difference_jet()
        vals["diff.Dn_jet"] = maxabs(np.array([j.partials(0, 1) for j in jet]) - d.Dn)
        if scenario.change.params.get("kind") == "identity":
            vals["diff.identity_zero"] = max(maxabs(d.D), maxabs(d.Dn), maxabs(d.Dc))
        vals["diff.D_closed"] = rel_dev(pair.closed_difference_vector(), d.D)
        vals["diff.Dn_closed"] = rel_dev(pair.closed_difference_nlc(), d.Dn)
        vals["diff.Dc_lowered"] = rel_dev(pair.closed_difference_connection("lowered"), d.Dc)
        vals["diff.Dc_expanded"] = rel_dev(pair.closed_difference_connection("expanded"), d.Dc)
    if "killing" in suites or "theorem1" in suites:
        for v, _ in scenario.fields:
            r = killing_report(pair, v, params["killing_rtol"])
            f = v.name
            base_k, bar_k = r.base_killing, r.bar_killing
            verdict = {"base": base_k, "bar": bar_k}
            if "killing" in suites:
                vals[f"killing.{f}.lie_eq_base"] = maxabs(r.lie_base - r.killing_residual_base)
                vals[f"killing.{f}.lie_eq_bar"] = maxabs(r.lie_bar - r.killing_residual_bar)
            if "theorem1" in suites:
                t1, t1c = r.theorem1_residual, r.theorem1_corrected
                n_vec = r.transvection_residual
                vals[f"theorem1.{f}.chain_condition_y"] = maxabs(t1 @ pt.y - n_vec)
                vals[f"theorem1.{f}.chain_transvected_y"] = abs(float(n_vec @ pt.y) - 2 * r.orthogonality)
                if base_k:
                    cond = maxabs(t1) < params["condition"]
                    verdict["condition"] = cond
                    verdict["iff_violation"] = cond != bar_k
                    vals[f"theorem1.{f}.proof_identity"] = maxabs(r.proof_lhs_bar + 2 * t1)
                    vals[f"theorem1.{f}.condition"] = maxabs(t1)
                    vals[f"theorem1.{f}.condition_weight4"] = maxabs(t1c)
                    vals[f"theorem1.{f}.proof_identity_weight4"] = maxabs(r.proof_lhs_bar + 2 * t1c)
                else:
                    verdict["condition"] = None
                    verdict["iff_violation"] = False
                    for k in ("proof_identity", "condition", "condition_weight4",
                              "proof_identity_weight4"):
                        vals[f"theorem1.{f}.{k}"] = None
                if base_k and bar_k:
                    vals[f"theorem1.{f}.transvected"] = maxabs(n_vec)
                    vals[f"theorem1.{f}.reduced_condition"] = maxabs(r.corollary_b_residual)
                    vals[f"theorem1.{f}.v_dot_D"] = abs(r.orthogonality)
                else:
                    for k in ("transvected", "reduced_condition", "v_dot_D"):
                        vals[f"theorem1.{f}.{k}"] = None
            rec["verdicts"][f] = verdict


def run_points(scenario: Scenario, points, suites, params, jobs: int = 1) -> list[dict]:
    """Evaluate all points; results are ordered by point index whatever ``jobs`` is."""
    text = scenario_key(scenario)
    suites = tuple(suites)
    args = [(text, suites, i, p.x.tolist(), p.y.tolist(), params) for i, p in enumerate(points)]
    if jobs <= 1 or len(args) < 2:
        return [evaluate_point(*a) for a in args]
    from concurrent.futures import ProcessPoolExecutor
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(evaluate_point, *a) for a in args]
        return [fut.result() for fut in futures]


def _status(base: bool, bar: bool) -> str:
    if base and bar:
        return "killing-both"
    if base:
        return "killing-base-only"
    return "killing-bar-only" if bar else "killing-neither"


def summarize(scenario: Scenario, records: list[dict], checks: list[Check], suites) -> dict:
    """Reduce per-point records: max over points for each check, field verdicts."""
    residuals = {}
    failed = []
    for c in checks:
        vals = [r["checks"].get(c.name) for r in records if r["degenerate"] is None]
        vals = [v for v in vals if v is not None]
        finite = [v for v in vals if math.isfinite(v)]
        nonfinite = len(vals) - len(finite)
        mx = max(finite) if finite else None
        ok = (mx is None or mx < c.tol) and (nonfinite == 0 or c.kind == DIAGNOSTIC)
        residuals[c.name] = {"max": mx, "tol": c.tol, "kind": c.kind, "pass": ok,
                             "points": len(vals), "nonfinite": nonfinite}
        if c.kind == AUTHORITATIVE and not ok:
            failed.append(c.name)
    verdicts = {}
    iff_violations = 0
    if "killing" in suites or "theorem1" in suites:
        for v, expected in scenario.fields:
            f = v.name
            per = [r["verdicts"][f] for r in records if r["degenerate"] is None]
            base = all(p["base"] for p in per)
            bar = all(p["bar"] for p in per)
            entry = {"expected": expected, "observed": _status(base, bar),
                     "base_killing": base, "bar_killing": bar}
            if "theorem1" in suites:
                conds = [p["condition"] for p in per if p["condition"] is not None]
                entry["condition"] = (all(conds) if base and conds else None)
                k = sum(1 for p in per if p.get("iff_violation"))
                entry["iff_violations"] = k
                iff_violations += k
            if "killing" in suites:
                entry["fixture_ok"] = entry["observed"] == expected
                if not entry["fixture_ok"]:
                    failed.append(f"fixture.{f}")
            verdicts[f] = entry
    if iff_violations:
        failed.append("theorem1.iff")
    degenerate = [{"index": r["index"], **r["degenerate"]} for r in records
                  if r["degenerate"] is not None]
    return {
        "type": "summary",
        "scenario": scenario.name,
        "suites": list(suites),
        "points": len(records),
        "max_residuals": residuals,
        "verdicts": verdicts,
        "iff_violations": iff_violations,
        "degenerate_points": degenerate,
        "failed": failed,
        "status": "fail" if failed else "pass",
    }


# check-killing ------------------------------------------------------------------

def killing_point(cfg_text: str, v, index: int, x, y, params: dict | None = None) -> dict:
    """Per-point Killing report for one field, as a JSON-ready dict."""
    scenario = _scenario_from_json(cfg_text)
    params = params or {"killing_rtol": KILLING_RTOL, "condition": CONDITION_TOL}
    pt = TangentPoint(np.asarray(x, float), np.asarray(y, float))
    rec = {"type": "point", "index": index, "x": list(map(float, pt.x)),
           "y": list(map(float, pt.y)), "degenerate": None}
    try:
        pair = ChangePair(scenario.space, scenario.change, pt, scenario.bar_space)
        r = killing_report(pair, v, params["killing_rtol"])
    except (DegenerateMetricError, DegenerateChangeError) as exc:
        rec["degenerate"] = {"kind": getattr(exc, "kind", "singular-metric"), "message": str(exc)}
        return rec
    cond = r.condition_holds(params["condition"])
    rec.update({
        "base_killing": r.base_killing,
        "bar_killing": r.bar_killing,
        "condition": cond,
        "iff_violation": cond is not None and cond != r.bar_killing,
        "norms": {
            "killing_residual_base": maxabs(r.killing_residual_base),
            "killing_residual_bar": maxabs(r.killing_residual_bar),
            "theorem1_residual": maxabs(r.theorem1_residual),
            "theorem1_weight4": maxabs(r.theorem1_corrected),
            "corollary_b_residual": maxabs(r.corollary_b_residual),
            "transvection_residual": maxabs(r.transvection_residual),
            "orthogonality": abs(r.orthogonality),
            "tol_base": r.tol_base,
            "tol_bar": r.tol_bar,
        },
        "killing_residual_base": r.killing_residual_base.tolist(),
        "killing_residual_bar": r.killing_residual_bar.tolist(),
        "theorem1_residual": r.theorem1_residual.tolist(),
        "corollary_b_residual": r.corollary_b_residual.tolist(),
        "transvection_residual": r.transvection_residual.tolist(),
        "orthogonality": r.orthogonality,
    })
    return rec


def run_killing(scenario: Scenario, v, points, params, jobs: int = 1) -> list[dict]:
    text = scenario_key(scenario)
    args = [(text, v, i, p.x.tolist(), p.y.tolist(), params) for i, p in enumerate(points)]
    if jobs <= 1 or len(args) < 2:
        return [killing_point(*a) for a in args]
    from concurrent.futures import ProcessPoolExecutor
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(killing_point, *a) for a in args]
        return [fut.result() for fut in futures]


def killing_summary(scenario: Scenario, v, records: list[dict]) -> dict:
    good = [r for r in records if r["degenerate"] is None]
    base = bool(good) and all(r["base_killing"] for r in good)
    bar = bool(good) and all(r["bar_killing"] for r in good)
    if base:
        condition = "yes" if all(r["condition"] for r in good) else "no"
    else:
        condition = "hypothesis-violated"
    violations = [r["index"] for r in good if r["iff_violation"]]
    maxima = {}
    for key in ("killing_residual_base", "killing_residual_bar", "theorem1_residual",
                "theorem1_weight4", "corollary_b_residual", "transvection_residual",
                "orthogonality"):
        vals = [r["norms"][key] for r in good]
        maxima[key] = max(vals) if vals else None
    return {
        "type": "summary",
        "scenario": scenario.name,
        "field": v.name,
        "points": len(records),
        "max_residuals": maxima,
        "verdicts": {
            "base_killing": "yes" if base else "no",
            "bar_killing": ("yes" if bar else "no") if base else "-",
            "bar_killing_direct": "yes" if bar else "no",
            "condition": condition,
        },
        "iff_violations": violations,
        "degenerate_points": [{"index": r["index"], **r["degenerate"]} for r in records
                              if r["degenerate"] is not None],
        "status": "fail" if violations else "pass",
    }
