"""Experiment harness: the seven study cases, metrics, and parameter sweeps.

Case wiring (reporting condition x coordination rule):

==== ======================== ==============================
case reporting                rule
==== ======================== ==============================
1    truthful                 baseline
2    truthful                 tuned vs self-interested
3    truthful                 tuned vs malicious
4    self-interested response baseline
5    self-interested response tuned vs self-interested
6    worst-case spoofing      baseline
7    worst-case spoofing      tuned vs malicious
==== ======================== ==============================

Cases 1-3 quantify the efficiency cost of robustness under truthful
reporting; cases 4-7 quantify the security benefit under false reporting.
Metrics are always computed against the true ETAs of the same scenario, so
paired case comparisons are attributable to the rule and reporting
condition alone.

Sweeps derive one seed per (parameter, value, rep) cell by hashing the
canonical token ``"{param}={value!r};rep={rep}"`` with 64-bit FNV-1a and
XORing the master seed; cells are therefore independent and reproducible,
and rows come back in (value position, rep, case) order no matter how the
cells were executed.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from .adversary import (
    AttackConfig,
    BestResponseConfig,
    iterated_best_response,
    worst_case_deviation,
)
from .coordinator import TuneResult, default_theta_grid, tune_malicious, tune_self_interested
from .rules import THETA0, RuleParams, apply_rule, count_inadmissible
from .scenario import DeviationVector, Scenario, apply_deviation, generate_scenario
from .schedule_core import Schedule, schedule_cost, solve_schedule

CASE_IDS = (1, 2, 3, 4, 5, 6, 7)
SWEEPABLE_PARAMS = ("n", "s_min", "sigma", "m_size", "epsilon")

_CASE_RULES = {
    1: "baseline",
    2: "self_robust",
    3: "malicious_robust",
    4: "baseline",
    5: "self_robust",
    6: "baseline",
    7: "malicious_robust",
}


@dataclass(frozen=True)
class Metrics:
    cost_true: float
    cost_reported: float
    per_vehicle_cost_true: tuple[float, ...]
    max_delay: float
    kendall_tau: int
    deviator_gain: float
    bystander_harm: float


@dataclass(frozen=True)
class CaseResult:
    case_id: int
    rep: int
    n: int
    s_min: float
    sigma: float
    epsilon: float
    m_size: int
    seed: int
    rule: str
    theta: RuleParams
    metrics: Metrics
    br_converged: bool
    inadmissible_count: int


@dataclass(frozen=True)
class ScenarioParams:
    """Generation inputs for one experiment scenario (defaults per manifest)."""

    n: int = 6
    horizon: float = 20.0
    s_min: float = 2.0
    sigma: float = 0.5
    epsilon: float = 1.0
    m_size: int = 1


@dataclass(frozen=True)
class SearchConfig:
    br: BestResponseConfig = BestResponseConfig()
    attack: AttackConfig = AttackConfig()
    eval_reference: str = "true"


def truthful_baseline(scenario: Scenario) -> tuple[Schedule, float, list[float]]:
    """Cost-minimizing schedule given the true ETAs, with total/per costs."""
    schedule = solve_schedule(scenario.taus(), scenario.s_min)
    total, per = schedule_cost(schedule, scenario.taus())
    return schedule, total, per


def _true_eta_order(scenario: Scenario) -> list[int]:
    return sorted(range(1, scenario.n + 1), key=lambda i: (scenario.vehicles[i - 1].tau, i))


def _discordant_pairs(order_a: Sequence[int], order_b: Sequence[int]) -> int:
    pos_a = {i: k for k, i in enumerate(order_a)}
    pos_b = {i: k for k, i in enumerate(order_b)}
    ids = list(order_a)
    count = 0
    for x in range(len(ids)):
        for y in range(x + 1, len(ids)):
            i, j = ids[x], ids[y]
            if (pos_a[i] - pos_a[j]) * (pos_b[i] - pos_b[j]) < 0:
                count += 1
    return count


def compute_metrics(
    schedule: Schedule, scenario: Scenario, deltas: DeviationVector
) -> Metrics:
    """All reported metrics for one schedule under one deviation profile.

    Deviator gain and bystander harm are measured against the truthful
    baseline on the same scenario, so
    ``cost_true == baseline - deviator_gain + bystander_harm`` exactly.
    """
    n = scenario.n
    if len(schedule.times) != n or len(deltas.delta) != n:
        raise ValueError("schedule, scenario, and deviations must agree on N")
    taus = scenario.taus()
    cost_true, per_true = schedule_cost(schedule, taus)
    tau_hat = [t + d for t, d in zip(taus, deltas.delta)]
    cost_reported, _ = schedule_cost(schedule, tau_hat)
    max_delay = max(0.0, max(a - t for a, t in zip(schedule.times, taus)))
    kendall = _discordant_pairs(_true_eta_order(scenario), schedule.order)
    _, _, base_per = truthful_baseline(scenario)
    deviator_gain = float(
        sum(base_per[v.id - 1] - per_true[v.id - 1] for v in scenario.vehicles if v.untrusted)
    )
    bystander_harm = float(
        sum(per_true[v.id - 1] - base_per[v.id - 1] for v in scenario.vehicles if not v.untrusted)
    )
    return Metrics(
        cost_true=cost_true,
        cost_reported=cost_reported,
        per_vehicle_cost_true=tuple(per_true),
        max_delay=max_delay,
        kendall_tau=kendall,
        deviator_gain=deviator_gain,
        bystander_harm=bystander_harm,
    )


def _descriptor(scenario: Scenario) -> dict:
    return {
        "n": scenario.n,
        "s_min": scenario.s_min,
        "sigma": scenario.sigma,
        "epsilon": max(v.epsilon for v in scenario.vehicles),
        "m_size": len(scenario.untrusted_ids()),
        "seed": scenario.seed,
    }


def run_all_cases(
    scenario: Scenario,
    case_ids: Iterable[int] | None = None,
    theta_grid: Sequence[RuleParams] | None = None,
    search: SearchConfig = SearchConfig(),
    rep: int = 0,
) -> list[CaseResult]:
    """Run the selected cases on one scenario, sharing the tuning work.

    Cases 2 and 5 share the self-interested tuning result, cases 3 and 7 the
    malicious one; all computations are deterministic, so the sharing is
    unobservable in the outputs.
    """
    ids = sorted(set(CASE_IDS if case_ids is None else case_ids))
    bad = [c for c in ids if c not in CASE_IDS]
    if bad:
        raise ValueError(f"invalid case id(s) {bad}; valid cases are 1..7")
    grid = list(theta_grid) if theta_grid is not None else default_theta_grid()

    tune_s: TuneResult | None = None
    tune_m: TuneResult | None = None
    if {2, 5} & set(ids):
        tune_s = tune_self_interested(scenario, grid, search.br, search.eval_reference)
    if {3, 7} & set(ids):
        tune_m = tune_malicious(scenario, grid, search.attack, search.eval_reference)

    zeros = DeviationVector.zeros(scenario.n)
    desc = _descriptor(scenario)
    results: list[CaseResult] = []
    for cid in ids:
        converged = True
        if cid == 1:
            theta, deltas = THETA0, zeros
        elif cid == 2:
            assert tune_s is not None
            theta, deltas = tune_s.theta_star, zeros
        elif cid == 3:
            assert tune_m is not None
            theta, deltas = tune_m.theta_star, zeros
        elif cid == 4:
            fp = iterated_best_response(
                scenario, THETA0, search.br.grid_points, search.br.max_iters, search.br.tol
            )
            theta, deltas, converged = THETA0, fp.deltas, fp.converged
        elif cid == 5:
            assert tune_s is not None
            fp = iterated_best_response(
                scenario,
                tune_s.theta_star,
                search.br.grid_points,
                search.br.max_iters,
                search.br.tol,
            )
            theta, deltas, converged = tune_s.theta_star, fp.deltas, fp.converged
        elif cid == 6:
            deltas, _ = worst_case_deviation(
                scenario, THETA0, search.attack.grid_points_per_dim, search.attack.refine_iters
            )
            theta = THETA0
        else:  # case 7
            assert tune_m is not None
            deltas, _ = worst_case_deviation(
                scenario,
                tune_m.theta_star,
                search.attack.grid_points_per_dim,
                search.attack.refine_iters,
            )
            theta = tune_m.theta_star
        reports = apply_deviation(scenario, deltas)
        schedule = apply_rule(reports, scenario, theta)
        metrics = compute_metrics(schedule, scenario, deltas)
        results.append(
            CaseResult(
                case_id=cid,
                rep=rep,
                rule=_CASE_RULES[cid],
                theta=theta,
                metrics=metrics,
                br_converged=converged,
                inadmissible_count=count_inadmissible(reports, scenario),
                **desc,
            )
        )
    return results


def run_case(
    scenario: Scenario,
    case_id: int,
    theta_grid: Sequence[RuleParams] | None = None,
    search: SearchConfig = SearchConfig(),
    rep: int = 0,
) -> CaseResult:
    return run_all_cases(scenario, [case_id], theta_grid, search, rep)[0]


_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF


def fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for b in data:
        h = ((h ^ b) * _FNV_PRIME) & _MASK64
    return h


def cell_seed(master_seed: int, param: str, value, rep: int) -> int:
    """Deterministic per-cell seed: FNV-1a of the cell token XOR the master."""
    token = f"{param}={value!r};rep={rep}"
    return (int(master_seed) ^ fnv1a64(token.encode("utf-8"))) & _MASK64


def _sweep_cell(args) -> list[CaseResult]:
    base, param, value, rep, seed, ids, grid, search = args
    params = replace(base, **{param: value})
    scenario = generate_scenario(
        params.n, params.horizon, params.s_min, params.sigma, params.epsilon,
        params.m_size, seed,
    )
    return run_all_cases(scenario, ids, grid, search, rep=rep)


def sweep_cells(
    base: ScenarioParams, param: str, values: Sequence, reps: int, seed: int
) -> list[tuple]:
    """The (value, rep, seed) grid a sweep will run, in output order."""
    if param not in SWEEPABLE_PARAMS:
        raise ValueError(
            f"unknown sweep parameter {param!r}; expected one of {SWEEPABLE_PARAMS}"
        )
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    if not values:
        raise ValueError("values must not be empty")
    cells = []
    for value in values:
        coerced = int(value) if param in ("n", "m_size") else float(value)
        for rep in range(reps):
            cells.append((coerced, rep, cell_seed(seed, param, coerced, rep)))
    return cells


def run_sweep(
    base: ScenarioParams,
    param: str,
    values: Sequence,
    reps: int,
    seed: int,
    case_ids: Iterable[int] | None = None,
    theta_grid: Sequence[RuleParams] | None = None,
    search: SearchConfig = SearchConfig(),
    jobs: int = 1,
) -> list[CaseResult]:
    """Run all cases for every (value, rep) cell; rows in canonical order.

    ``jobs > 1`` evaluates cells in a process pool; results are identical to
    the serial run because cells are independent and rows are emitted in
    (value position, rep, case) order regardless of completion order.
    """
    ids = sorted(set(CASE_IDS if case_ids is None else case_ids))
    grid = list(theta_grid) if theta_grid is not None else default_theta_grid()
    cells = sweep_cells(base, param, values, reps, seed)
    tasks = [(base, param, v, rep, s, ids, grid, search) for v, rep, s in cells]
    if jobs <= 1:
        per_cell = [_sweep_cell(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            per_cell = list(pool.map(_sweep_cell, tasks))
    return [row for cell in per_cell for row in cell]
