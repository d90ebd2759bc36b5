"""Command-line front end.

    betafinsler list-scenarios [--json]
    betafinsler validate --scenario NAME [--suite all] [--count N] [--seed S] [--json]
    betafinsler check-killing --scenario NAME --field NAME [--json]

Exit status: 0 when every authoritative check passes, 1 on an
authoritative failure (or an iff violation for ``check-killing``), 2 on a
configuration error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import fields as fld
from . import report
from .errors import ConfigError
from .scenarios import FixtureError, build_scenario, builtin_configs, sample_points, verify_fixtures
from .validation import (AUTHORITATIVE, SUITES, apply_overrides, killing_summary, run_killing,
                         run_points, suite_checks, summarize)

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _parse_tol(items) -> dict:
    out = {}
    for item in items or []:
        name, sep, value = item.partition("=")
        if not sep or not name:
            raise ConfigError("tol", f"expected NAME=VALUE, got {item!r}")
        try:
            out[name] = float(value)
        except ValueError:
            raise ConfigError(f"tol.{name}", f"not a number: {value!r}") from None
    return out


def _read_json(path, field: str):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(field, f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(field, f"invalid JSON in {path}: {exc}") from None


def load_run_config(args) -> dict:
    """Merge a config file (scenario definition or run config) with CLI flags."""
    run = {"scenario": None, "sample": {}, "tol": {}, "suites": None}
    if args.config:
        data = _read_json(args.config, "config")
        if not isinstance(data, dict):
            raise ConfigError("config", "top level must be an object")
        if "metric" in data:
            run["scenario"] = data
        else:
            run["scenario"] = data.get("scenario")
            run["sample"] = dict(data.get("sample", {}))
            run["tol"] = dict(data.get("tol", {}))
            run["suites"] = data.get("suites")
    if args.scenario:
        run["scenario"] = args.scenario
    if run["scenario"] is None:
        raise ConfigError("scenario", "give --scenario NAME or --config FILE")
    if isinstance(run["scenario"], str):
        configs = builtin_configs()
        if run["scenario"] not in configs:
            raise ConfigError("scenario", f"unknown scenario {run['scenario']!r}; "
                              f"choose from {sorted(configs)}")
        run["scenario"] = configs[run["scenario"]]
    if args.count is not None:
        run["sample"]["count"] = args.count
    if args.seed is not None:
        run["sample"]["seed"] = args.seed
    run["tol"].update(_parse_tol(args.tol))
    if getattr(args, "suite", None):
        run["suites"] = args.suite
    if args.jobs < 1:
        raise ConfigError("jobs", "must be >= 1")
    return run


def _suites(requested) -> tuple:
    requested = requested or ["all"]
    if isinstance(requested, str):
        requested = [requested]
    names = []
    for item in requested:
        for s in str(item).split(","):
            s = s.strip()
            if s == "all":
                names.extend(SUITES)
            elif s in SUITES:
                names.append(s)
            else:
                raise ConfigError("suite", f"unknown suite {s!r}; choose from {SUITES + ('all',)}")
    return tuple(s for s in SUITES if s in names)


def _prepare(run: dict):
    cfg = dict(run["scenario"])
    cfg["sample"] = {**cfg.get("sample", {}), **run["sample"]}
    scenario = build_scenario(cfg)
    points = sample_points(scenario.sample, scenario)
    return scenario, points


def _fmt(x) -> str:
    return "-" if x is None else f"{x:.3e}"


def cmd_validate(args, out) -> int:
    t0 = time.perf_counter()
    run = load_run_config(args)
    suites = _suites(run["suites"])
    scenario, points = _prepare(run)
    checks, params = apply_overrides(suite_checks(scenario, suites), run["tol"])
    if "killing" in suites:
        # fixtures must be confirmed by the oracle before anything relies on them
        verify_fixtures(scenario, points)
    records = run_points(scenario, points, suites, params, args.jobs)
    summary = summarize(scenario, records, checks, suites)
    summary["seed"] = scenario.sample["seed"]
    summary["count"] = len(points)
    if args.timing:
        summary["wall_time"] = time.perf_counter() - t0
    if args.json:
        out.write(report.dump_stream(records, summary))
    else:
        _print_validate(summary, out)
    return EXIT_FAIL if summary["failed"] else EXIT_OK


def _print_validate(summary: dict, out):
    out.write(f"scenario {summary['scenario']}: {summary['points']} points, "
              f"suites {', '.join(summary['suites'])}\n")
    width = max((len(k) for k in summary["max_residuals"]), default=10)
    out.write(f"{'check':<{width}}  {'max':>10}  {'tol':>8}  kind           result\n")
    for name, r in summary["max_residuals"].items():
        result = "ok" if r["pass"] else ("FAIL" if r["kind"] == AUTHORITATIVE else "deviates")
        out.write(f"{name:<{width}}  {_fmt(r['max']):>10}  {r['tol']:>8.0e}  "
                  f"{r['kind']:<13}  {result}\n")
    for f, v in summary["verdicts"].items():
        extra = ""
        if "iff_violations" in v:
            extra = f", condition {v['condition']}, iff violations {v['iff_violations']}"
        out.write(f"field {f}: expected {v['expected']}, observed {v['observed']}{extra}\n")
    for d in summary["degenerate_points"]:
        out.write(f"degenerate point {d['index']}: {d['kind']}\n")
    if "wall_time" in summary:
        out.write(f"wall time {summary['wall_time']:.2f} s\n")
    out.write(f"status: {summary['status']}")
    out.write(f" ({', '.join(summary['failed'])})\n" if summary["failed"] else "\n")


def _field_from_args(args, scenario):
    if args.field_file:
        data = _read_json(args.field_file, "field-file")
        if not isinstance(data, dict):
            raise ConfigError("field-file", "top level must be an object")
        return fld.from_spec(data, scenario.space.dim, data.get("name", Path(args.field_file).stem))
    if args.field:
        return scenario.field(args.field)
    raise ConfigError("field", "give --field NAME or --field-file FILE")


def cmd_check_killing(args, out) -> int:
    t0 = time.perf_counter()
    run = load_run_config(args)
    scenario, points = _prepare(run)
    _, params = apply_overrides([], run["tol"])
    v = _field_from_args(args, scenario)
    records = run_killing(scenario, v, points, params, args.jobs)
    summary = killing_summary(scenario, v, records)
    if args.timing:
        summary["wall_time"] = time.perf_counter() - t0
    if args.json:
        out.write(report.dump_stream(records, summary))
    else:
        verdict = summary["verdicts"]
        out.write(f"scenario {scenario.name}, field {v.name}, {len(points)} points\n")
        for key, val in summary["max_residuals"].items():
            out.write(f"  max {key:<22} {_fmt(val)}\n")
        out.write(f"Killing in base: {verdict['base_killing']}\n")
        out.write(f"Killing in changed space: {verdict['bar_killing']}\n")
        out.write(f"condition: {verdict['condition']}\n")
        if summary["iff_violations"]:
            out.write(f"IFF VIOLATION at points {summary['iff_violations']}\n")
        if "wall_time" in summary:
            out.write(f"wall time {summary['wall_time']:.2f} s\n")
    return EXIT_FAIL if summary["iff_violations"] else EXIT_OK


def cmd_list_scenarios(args, out) -> int:
    configs = builtin_configs()
    if args.json:
        rows = [{"name": c["name"], "dim": c["dim"], "description": c["description"],
                 "fields": [{"name": f["name"], "expected": f["expected"]} for f in c["fields"]]}
                for c in configs.values()]
        out.write(report.dumps(rows) + "\n")
        return EXIT_OK
    for c in configs.values():
        out.write(f"{c['name']}: {c['description']}\n")
        for f in c["fields"]:
            out.write(f"    {f['name']:<16} {f['expected']}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="betafinsler",
                                     description="Killing fields under beta-changes of Finsler metrics")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--scenario", help="built-in scenario name")
        p.add_argument("--config", help="JSON scenario definition or run config")
        p.add_argument("--seed", type=int, help="sampling seed")
        p.add_argument("--count", type=int, help="number of sampled points")
        p.add_argument("--tol", action="append", metavar="NAME=VALUE",
                       help="tolerance override; NAME may be a glob over check names")
        p.add_argument("--json", action="store_true", help="emit a JSON Lines report")
        p.add_argument("--jobs", type=int, default=1, help="worker processes")
        p.add_argument("--timing", action="store_true",
                       help="add wall_time to the summary (makes output run-dependent)")

    p = sub.add_parser("validate", help="run validation suites on a scenario")
    common(p)
    p.add_argument("--suite", action="append",
                   help="tensors, differences, killing, theorem1 or all (repeatable)")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("check-killing", help="check one vector field in both spaces")
    common(p)
    p.add_argument("--field", help="field name from the scenario")
    p.add_argument("--field-file", help="JSON polynomial coefficient table for the field")
    p.set_defaults(func=cmd_check_killing)

    p = sub.add_parser("list-scenarios", help="list built-in scenarios")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_list_scenarios)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FixtureError as exc:
        print(f"fixture verification failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
