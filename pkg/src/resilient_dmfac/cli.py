"""Command-line front end: ``run``, ``check`` and ``sweep``.

Exit codes: 0 ok, 1 condition failure (``check`` only), 2 validation error,
3 divergence.
"""
from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import analysis
from .attacks import AttackError, DoSBudget, validate_budget, validate_variation
from .engine import DivergenceError, DoSGenerator, Scenario, ScenarioError, export_csv, run
from .scenario import load_scenario
from .twin_layer import GainError

SEED_ENV = "RESILIENT_DMFAC_SEED"
EXIT_OK, EXIT_CONDITION, EXIT_INVALID, EXIT_DIVERGED = 0, 1, 2, 3

BOUNDS_NOTE = ("# alpha_cpl is the empirical max contraction ratio of max_i |e_i| above the\n"
               "# 10*omega floor; it stands in for the trajectory-dependent CPL rate in b_analytic.\n")


class UsageError(ValueError):
    pass


def _seed_override():
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw.strip() == "":
        return None
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def _load(path) -> Scenario:
    return load_scenario(path, seed_override=_seed_override())


def _budget(sc: Scenario) -> DoSBudget:
    if sc.budget is not None:
        return sc.budget
    if isinstance(sc.dos, DoSGenerator):
        return sc.dos.budget
    raise ScenarioError("scenario has no DoS budget (dos.M, dos.beta)")


def conditions(sc: Scenario) -> analysis.ConditionReport:
    budget = _budget(sc)
    return analysis.check_conditions(sc.b_t, sc.b_c, sc.tl_gains, sc.cpl_gains, sc.graph,
                                     sc.alpha1, sc.alpha2, budget.beta)


def assumption_checks(sc: Scenario) -> dict:
    schedule = sc.schedule()
    return {
        "dos_budget_pass": validate_budget(schedule, _budget(sc)),
        "aa_variation_pass": all(validate_variation(sig, sc.horizon) for sig in sc.aa),
    }


def condition_text(sc: Scenario) -> tuple:
    report = conditions(sc)
    checks = assumption_checks(sc)
    text = analysis.format_report(report)
    text += "".join(f"{k} = {'true' if v else 'false'}\n" for k, v in checks.items())
    ok = report.all_pass and all(checks.values())
    return text, ok


def write_plot_data(trace, path):
    etl = np.max(np.abs(trace.etl), axis=1)
    e = np.max(np.abs(trace.e), axis=1)
    with open(path, "w", newline="\n") as fh:
        fh.write("# k etl_max e_max psi\n")
        for k, a, b, p in zip(trace.k, etl, e, trace.psi):
            fh.write(f"{int(k)} {a:.17g} {b:.17g} {int(p)}\n")


def cmd_run(scenario_path, out_dir) -> int:
    sc = _load(scenario_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    text, _ = condition_text(sc)
    (out / "conditions.txt").write_text(text)
    try:
        trace = run(sc)
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    export_csv(trace, out / "trace.csv")
    budget = _budget(sc)
    report = analysis.bound_report(trace, budget.M, budget.beta, sc.b_c, sc.comp.d_bar,
                                   transient_cut=sc.transient_cut, margin=sc.transient_margin)
    bounds = analysis.format_report(report)
    (out / "bounds.txt").write_text(BOUNDS_NOTE + bounds)
    write_plot_data(trace, out / "plot_errors.dat")
    sys.stdout.write(bounds)
    return EXIT_OK


def cmd_check(scenario_path) -> int:
    sc = _load(scenario_path)
    text, ok = condition_text(sc)
    sys.stdout.write(text)
    return EXIT_OK if ok else EXIT_CONDITION


SWEEP_PARAMS = ("beta", "M", "d_bar")


def sweep_variant(sc: Scenario, param: str, value: float) -> Scenario:
    if param in ("beta", "M"):
        old = _budget(sc)
        budget = DoSBudget(M=value if param == "M" else old.M,
                           beta=value if param == "beta" else old.beta)
        dos = replace(sc.dos, budget=budget) if isinstance(sc.dos, DoSGenerator) else sc.dos
        return replace(sc, budget=budget, dos=dos)
    if param == "d_bar":
        aa = [replace(sig, variation_bound=value) for sig in sc.aa]
        return replace(sc, comp=replace(sc.comp, d_bar=value), aa=aa)
    raise UsageError(f"unknown sweep parameter {param!r}; choose from {', '.join(SWEEP_PARAMS)}")


def sweep_point(sc: Scenario, param: str, value: float) -> dict:
    variant = sweep_variant(sc, param, value)
    row = {"param": param, "value": value}
    try:
        row["conditions_pass"] = conditions(variant).all_pass
    except analysis.AnalysisError:
        row["conditions_pass"] = False
    row["assumptions_pass"] = all(assumption_checks(variant).values())
    try:
        trace = run(variant)
    except DivergenceError:
        row.update(bt_observed=float("nan"), b_observed=float("nan"), diverged=True)
        return row
    cut = (variant.transient_cut if variant.transient_cut is not None
           else analysis.default_transient_cut(trace, variant.transient_margin))
    bt, b = analysis.measure_uub(trace, cut)
    row.update(bt_observed=bt, b_observed=b, diverged=False)
    return row


def _sweep_point_args(args):
    return sweep_point(*args)


def cmd_sweep(scenario_path, param, start, stop, steps, out_dir, jobs=1) -> int:
    if param not in SWEEP_PARAMS:
        raise UsageError(f"unknown sweep parameter {param!r}; choose from {', '.join(SWEEP_PARAMS)}")
    if steps < 1:
        raise UsageError("sweep range is empty (--steps must be >= 1)")
    sc = _load(scenario_path)
    values = sorted(set(np.linspace(start, stop, steps).tolist()))
    for v in values:
        sweep_variant(sc, param, v)  # validate every point before running any
    work = [(sc, param, v) for v in values]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_point_args, work))
    else:
        rows = [sweep_point(*w) for w in work]
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cols = ["param", "value", "conditions_pass", "assumptions_pass", "bt_observed",
            "b_observed", "diverged"]
    lines = [",".join(cols)]
    for r in rows:
        cells = []
        for c in cols:
            v = r[c]
            cells.append(("1" if v else "0") if isinstance(v, bool)
                         else format(v, ".17g") if isinstance(v, float) else str(v))
        lines.append(",".join(cells))
    path = out / f"sweep_{param}.csv"
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {len(rows)} rows to {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="resilient-dmfac", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate a scenario and write trace and reports")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("check", help="evaluate the feasibility conditions only")
    p.add_argument("--scenario", required=True)

    p = sub.add_parser("sweep", help="sweep beta, M or d_bar and tabulate observed bounds")
    p.add_argument("--scenario", required=True)
    p.add_argument("--param", required=True, choices=SWEEP_PARAMS)
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=1)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        if args.command == "run":
            return cmd_run(args.scenario, args.out)
        if args.command == "check":
            return cmd_check(args.scenario)
        return cmd_sweep(args.scenario, args.param, args.start, args.stop, args.steps,
                         args.out, args.jobs)
    except (ScenarioError, UsageError, GainError, AttackError, analysis.AnalysisError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    raise SystemExit(main())
