"""Command-line front end.

Subcommands: ``gen`` (random scenario to file), ``solve`` (one schedule),
``best-response``, ``worst-case``, ``tune``, ``cases`` (the seven study
cases), and ``sweep`` (sensitivity sweeps). Exit codes: 0 success, 2 usage
or validation error, 3 I/O error. Errors print one line on stderr as
``error: <category>: <message>``.

Result CSVs are byte-deterministic for a fixed invocation: floats are
written with shortest round-trip precision (Python ``repr``), and every run
that writes files also writes a ``<out>.manifest.json`` naming them with
content digests and the resolved configuration.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import asdict
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

from . import __version__
from .adversary import AttackConfig, BestResponseConfig, best_response, worst_case_deviation
from .coordinator import default_theta_grid, tune_malicious, tune_self_interested
from .experiments import (
    CASE_IDS,
    CaseResult,
    ScenarioParams,
    SearchConfig,
    run_all_cases,
    run_sweep,
    sweep_cells,
)
from .rules import RuleParams, THETA0, apply_rule, inadmissible_ids
from .scenario import (
    DeviationVector,
    Scenario,
    ScenarioFormatError,
    apply_deviation,
    generate_scenario,
    load_scenario,
    serialize_scenario,
)
from .schedule_core import schedule_cost

CSV_HEADER = (
    "case,rep,seed,n,s_min,sigma,epsilon,m_size,rule_w,rule_kappa,"
    "cost_true,cost_reported,max_delay,kendall_tau,deviator_gain,"
    "bystander_harm,br_converged,inadmissible_count"
)

SEED_ENV_VAR = "SEQSHIELD_SEED"


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def result_row(r: CaseResult) -> str:
    m = r.metrics
    fields = [
        r.case_id, r.rep, r.seed, r.n, float(r.s_min), float(r.sigma),
        float(r.epsilon), r.m_size, float(r.theta.w), float(r.theta.kappa),
        m.cost_true, m.cost_reported, m.max_delay, m.kendall_tau,
        m.deviator_gain, m.bystander_harm, r.br_converged, r.inadmissible_count,
    ]
    return ",".join(_fmt(f) for f in fields)


def write_results(rows: Sequence[CaseResult], path: str | Path) -> str:
    """Write the results CSV and return its content digest (sha256 hex)."""
    text = CSV_HEADER + "\n" + "".join(result_row(r) + "\n" for r in rows)
    data = text.encode("utf-8")
    Path(path).write_bytes(data)
    return hashlib.sha256(data).hexdigest()


def _write_manifest(out_path: Path, command: str, config: dict, cells, outputs) -> Path:
    manifest_path = out_path.with_name(out_path.name + ".manifest.json")
    payload = {
        "tool": "seqshield",
        "version": __version__,
        "command": command,
        "config": config,
        "cells": cells,
        "outputs": outputs,
        "created_utc": datetime.now(timezone.utc).isoformat(),
    }
    manifest_path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return manifest_path


def _err(category: str, exc: Exception) -> None:
    message = " ".join(str(exc).split())
    print(f"error: {category}: {message}", file=sys.stderr)


def _resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return seed
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ValueError(f"{SEED_ENV_VAR} must be an integer, got {env!r}") from exc
    raise ValueError(f"a seed is required (use --seed or {SEED_ENV_VAR})")


def _read_scenario(path: str) -> Scenario:
    return load_scenario(Path(path).read_text(encoding="utf-8"))


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x != ""]
    except ValueError as exc:
        raise ValueError(f"expected a comma-separated list of numbers, got {text!r}") from exc


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x != ""]
    except ValueError as exc:
        raise ValueError(f"expected a comma-separated list of integers, got {text!r}") from exc


def _parse_range(text: str) -> list[float]:
    """Parse 'start:stop:step' into an inclusive list of grid values."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"expected start:stop:step, got {text!r}")
    start, stop, step = (float(p) for p in parts)
    if step <= 0 or stop < start:
        raise ValueError(f"bad grid range {text!r}")
    values = []
    k = 0
    while True:
        # Rounding keeps decimal grids like 0:1:0.1 exact.
        v = round(start + k * step, 12)
        if v > stop + 1e-9:
            break
        values.append(v)
        k += 1
    return values


def _theta(args) -> RuleParams:
    if getattr(args, "theta0", False):
        if args.w is not None or args.kappa is not None:
            raise ValueError("--theta0 cannot be combined with --w/--kappa")
        return THETA0
    w = args.w if args.w is not None else 0.0
    kappa = args.kappa if args.kappa is not None else 1.0
    return RuleParams(w=w, kappa=kappa)


def _theta_grid(args) -> list[RuleParams]:
    if args.w_grid is None and args.kappa_grid is None:
        return default_theta_grid()
    ws = _parse_range(args.w_grid) if args.w_grid is not None else [k / 10 for k in range(11)]
    kappas = _float_list(args.kappa_grid) if args.kappa_grid is not None else [0.25, 0.5, 0.75, 1.0]
    return [RuleParams(w=w, kappa=k) for w in ws for k in kappas]


def _search_config(args) -> SearchConfig:
    return SearchConfig(
        br=BestResponseConfig(grid_points=args.grid_points),
        attack=AttackConfig(
            grid_points_per_dim=args.wc_grid_points, refine_iters=args.refine_iters
        ),
        eval_reference="surveillance" if getattr(args, "eval_proxy", False) else "true",
    )


def _add_theta_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--w", type=float, default=None, help="trust weight in [0,1]")
    p.add_argument("--kappa", type=float, default=None, help="window shrink factor in [0,1]")
    p.add_argument("--theta0", action="store_true", help="use the baseline rule (w=0, kappa=1)")


def _add_grid_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--w-grid", default=None, metavar="START:STOP:STEP")
    p.add_argument("--kappa-grid", default=None, metavar="V1,V2,...")


def _add_search_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--grid-points", type=int, default=201,
                   help="best-response grid points per vehicle")
    p.add_argument("--wc-grid-points", type=int, default=21,
                   help="worst-case grid points per dimension")
    p.add_argument("--refine-iters", type=int, default=2,
                   help="worst-case coordinate-ascent rounds")
    p.add_argument("--eval-proxy", action="store_true",
                   help="tune against surveillance ETAs instead of true ETAs")


def _add_gen_flags(p: argparse.ArgumentParser) -> None:
    d = ScenarioParams()
    p.add_argument("--n", type=int, default=d.n)
    p.add_argument("--horizon", type=float, default=d.horizon)
    p.add_argument("--s-min", type=float, default=d.s_min)
    p.add_argument("--sigma", type=float, default=d.sigma)
    p.add_argument("--epsilon", type=float, default=d.epsilon)
    p.add_argument("--m-size", type=int, default=d.m_size)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="seqshield",
        description="Secure vertiport arrival sequencing under falsified ETA reports",
    )
    p.add_argument("--version", action="version", version=f"seqshield {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a random scenario file")
    _add_gen_flags(g)
    g.add_argument("--seed", type=int, default=None)
    g.add_argument("--out", required=True)

    s = sub.add_parser("solve", help="schedule one scenario's reports")
    s.add_argument("--scenario", required=True)
    s.add_argument("--delta", default=None, metavar="V1,...,VN",
                   help="reporting deviations, one per vehicle (default: truthful)")
    _add_theta_flags(s)
    s.add_argument("--out", default=None, help="also write the schedule as JSON")

    b = sub.add_parser("best-response", help="one vehicle's best misreport")
    b.add_argument("--scenario", required=True)
    b.add_argument("--vehicle", type=int, required=True)
    b.add_argument("--grid-points", type=int, default=201)
    _add_theta_flags(b)

    w = sub.add_parser("worst-case", help="worst-case spoofing deviations")
    w.add_argument("--scenario", required=True)
    w.add_argument("--wc-grid-points", type=int, default=21)
    w.add_argument("--refine-iters", type=int, default=2)
    _add_theta_flags(w)

    t = sub.add_parser("tune", help="grid-search the rule parameters")
    t.add_argument("--scenario", required=True)
    t.add_argument("--mode", choices=("self", "malicious"), required=True)
    _add_grid_flags(t)
    _add_search_flags(t)
    t.add_argument("--out", default=None, help="write per-theta objectives as CSV")

    c = sub.add_parser("cases", help="run the seven study cases")
    c.add_argument("--scenario", default=None,
                   help="scenario file (omit to generate one from the flags below)")
    _add_gen_flags(c)
    c.add_argument("--seed", type=int, default=None)
    c.add_argument("--cases", default=None, metavar="LIST", help="e.g. 1,2,3 (default: all)")
    _add_grid_flags(c)
    _add_search_flags(c)
    c.add_argument("--out", required=True)

    sw = sub.add_parser("sweep", help="sensitivity sweep over one parameter")
    _add_gen_flags(sw)
    sw.add_argument("--param", required=True, choices=("n", "s_min", "sigma", "m_size", "epsilon"))
    sw.add_argument("--values", required=True, metavar="V1,V2,...")
    sw.add_argument("--reps", type=int, default=1)
    sw.add_argument("--seed", type=int, default=None)
    sw.add_argument("--cases", default=None, metavar="LIST")
    _add_grid_flags(sw)
    _add_search_flags(sw)
    sw.add_argument("--jobs", type=int, default=1)
    sw.add_argument("--out", required=True)
    return p


def _cmd_gen(args) -> int:
    seed = _resolve_seed(args.seed)
    scenario = generate_scenario(
        args.n, args.horizon, args.s_min, args.sigma, args.epsilon, args.m_size, seed
    )
    out = Path(args.out)
    out.write_text(serialize_scenario(scenario), encoding="utf-8")
    print(f"wrote {out}")
    return 0


def _cmd_solve(args) -> int:
    scenario = _read_scenario(args.scenario)
    theta = _theta(args)
    if args.delta is not None:
        values = _float_list(args.delta)
        if len(values) != scenario.n:
            raise ValueError(f"--delta needs {scenario.n} values, got {len(values)}")
        deltas = DeviationVector(tuple(values))
    else:
        deltas = DeviationVector.zeros(scenario.n)
    reports = apply_deviation(scenario, deltas)
    schedule = apply_rule(reports, scenario, theta)
    cost_true, _ = schedule_cost(schedule, scenario.taus())
    cost_reported, _ = schedule_cost(schedule, list(reports.tau_hat))
    bad = inadmissible_ids(reports, scenario)
    print("order: " + ",".join(str(i) for i in schedule.order))
    print("times: " + ",".join(repr(t) for t in schedule.times))
    print(f"cost_true: {cost_true!r}")
    print(f"cost_reported: {cost_reported!r}")
    print("inadmissible: " + (",".join(str(i) for i in bad) if bad else "none"))
    if args.out:
        payload = {
            "order": list(schedule.order),
            "times": list(schedule.times),
            "cost_true": cost_true,
            "cost_reported": cost_reported,
            "inadmissible_ids": list(bad),
        }
        Path(args.out).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return 0


def _cmd_best_response(args) -> int:
    scenario = _read_scenario(args.scenario)
    res = best_response(scenario, _theta(args), args.vehicle, grid_points=args.grid_points)
    print(f"vehicle: {args.vehicle}")
    print(f"delta_star: {res.delta_star!r}")
    print(f"own_cost: {res.own_cost!r}")
    print(f"grid_resolution: {res.grid_resolution!r}")
    print(f"candidates_evaluated: {res.candidates_evaluated}")
    return 0


def _cmd_worst_case(args) -> int:
    scenario = _read_scenario(args.scenario)
    deltas, worst = worst_case_deviation(
        scenario, _theta(args), args.wc_grid_points, args.refine_iters
    )
    print("deltas: " + ",".join(repr(d) for d in deltas.delta))
    print(f"worst_cost: {worst!r}")
    return 0


def _cmd_tune(args) -> int:
    scenario = _read_scenario(args.scenario)
    grid = _theta_grid(args)
    search = _search_config(args)
    if args.mode == "self":
        result = tune_self_interested(scenario, grid, search.br, search.eval_reference)
    else:
        result = tune_malicious(scenario, grid, search.attack, search.eval_reference)
    print(f"mode: {args.mode}")
    print(f"theta_star: w={result.theta_star.w!r} kappa={result.theta_star.kappa!r}")
    print(f"objective: {result.objective!r}")
    if args.out:
        out = Path(args.out)
        text = "w,kappa,objective\n" + "".join(
            f"{t.w!r},{t.kappa!r},{obj!r}\n" for t, obj in result.per_theta
        )
        data = text.encode("utf-8")
        out.write_bytes(data)
        _write_manifest(
            out,
            "tune",
            {"mode": args.mode, "scenario": args.scenario,
             "theta_grid": [[t.w, t.kappa] for t in grid],
             "eval_reference": search.eval_reference},
            [],
            [{"path": str(out), "sha256": hashlib.sha256(data).hexdigest(),
              "rows": len(result.per_theta)}],
        )
    return 0


def _case_list(text: str | None) -> list[int]:
    if text is None:
        return list(CASE_IDS)
    ids = _int_list(text)
    bad = [c for c in ids if c not in CASE_IDS]
    if bad:
        raise ValueError(f"invalid case id(s) {bad}; valid cases are 1..7")
    return ids


def _cmd_cases(args) -> int:
    if args.scenario is not None:
        scenario = _read_scenario(args.scenario)
        source = {"scenario_file": args.scenario}
    else:
        seed = _resolve_seed(args.seed)
        scenario = generate_scenario(
            args.n, args.horizon, args.s_min, args.sigma, args.epsilon, args.m_size, seed
        )
        source = {"generated": {"n": args.n, "horizon": args.horizon, "s_min": args.s_min,
                                "sigma": args.sigma, "epsilon": args.epsilon,
                                "m_size": args.m_size, "seed": seed}}
    ids = _case_list(args.cases)
    grid = _theta_grid(args)
    search = _search_config(args)
    rows = run_all_cases(scenario, ids, grid, search)
    out = Path(args.out)
    digest = write_results(rows, out)
    _write_manifest(
        out,
        "cases",
        {**source, "cases": ids, "theta_grid": [[t.w, t.kappa] for t in grid],
         "grid_points": args.grid_points, "wc_grid_points": args.wc_grid_points,
         "refine_iters": args.refine_iters, "eval_reference": search.eval_reference},
        [{"rep": 0, "seed": scenario.seed}],
        [{"path": str(out), "sha256": digest, "rows": len(rows)}],
    )
    print(f"wrote {out} ({len(rows)} rows)")
    return 0


def _cmd_sweep(args) -> int:
    seed = _resolve_seed(args.seed)
    base = ScenarioParams(n=args.n, horizon=args.horizon, s_min=args.s_min,
                          sigma=args.sigma, epsilon=args.epsilon, m_size=args.m_size)
    values = _int_list(args.values) if args.param in ("n", "m_size") else _float_list(args.values)
    ids = _case_list(args.cases)
    grid = _theta_grid(args)
    search = _search_config(args)
    rows = run_sweep(base, args.param, values, args.reps, seed,
                     case_ids=ids, theta_grid=grid, search=search, jobs=args.jobs)
    out = Path(args.out)
    digest = write_results(rows, out)
    cells = [
        {"param": args.param, "value": v, "rep": rep, "seed": s}
        for v, rep, s in sweep_cells(base, args.param, values, args.reps, seed)
    ]
    _write_manifest(
        out,
        "sweep",
        {"base": asdict(base), "param": args.param, "values": values,
         "reps": args.reps, "master_seed": seed, "cases": ids,
         "theta_grid": [[t.w, t.kappa] for t in grid],
         "grid_points": args.grid_points, "wc_grid_points": args.wc_grid_points,
         "refine_iters": args.refine_iters, "eval_reference": search.eval_reference,
         "jobs": args.jobs},
        cells,
        [{"path": str(out), "sha256": digest, "rows": len(rows)}],
    )
    print(f"wrote {out} ({len(rows)} rows)")
    return 0


_COMMANDS = {
    "gen": _cmd_gen,
    "solve": _cmd_solve,
    "best-response": _cmd_best_response,
    "worst-case": _cmd_worst_case,
    "tune": _cmd_tune,
    "cases": _cmd_cases,
    "sweep": _cmd_sweep,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors, 0 on --help
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return _COMMANDS[args.command](args)
    except ScenarioFormatError as exc:
        _err("parse", exc)
        return 2
    except ValueError as exc:
        _err("invalid-argument", exc)
        return 2
    except OSError as exc:
        _err("io", exc)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
