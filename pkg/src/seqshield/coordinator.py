"""Outer tuning of the sequencing rule against misreporting and spoofing.

Both tuners exhaustively evaluate a grid of rule parameters: the objective
is piecewise and discontinuous in the parameters (landing-order changes), so
grid search is both robust and reproducible at this grid size. Against
self-interested misreporting each grid point is scored by the system cost at
the deviators' iterated best response; against malicious spoofing by the
worst-case system cost (min-max). Ties go to the smallest trust weight, then
the largest window (least intervention).
"""

from __future__ import annotations

from dataclasses import dataclass

from .adversary import (
    AttackConfig,
    BestResponseConfig,
    iterated_best_response,
    worst_case_deviation,
)
from .rules import THETA0, RuleParams, apply_rule
from .scenario import DeviationVector, Scenario, apply_deviation
from .schedule_core import schedule_cost


@dataclass(frozen=True)
class TuneResult:
    theta_star: RuleParams
    objective: float
    per_theta: tuple[tuple[RuleParams, float], ...]
    mode: str  # "self_interested" | "malicious"


def default_theta_grid() -> list[RuleParams]:
    """Trust weights 0.0..1.0 in steps of 0.1 crossed with four windows."""
    grid = [RuleParams(w=k / 10, kappa=kap) for k in range(11) for kap in (0.25, 0.5, 0.75, 1.0)]
    if THETA0 not in grid:
        grid.append(THETA0)
    return grid


def _dedupe_sorted(theta_grid) -> list[RuleParams]:
    if not theta_grid:
        raise ValueError("theta grid must not be empty")
    unique = dict.fromkeys(theta_grid)
    return sorted(unique, key=lambda t: (t.w, t.kappa))


def evaluate_cost(
    scenario: Scenario,
    params: RuleParams,
    deltas: DeviationVector,
    reference: str = "true",
) -> float:
    """System cost of the rule's schedule under ``deltas`` (public pipeline)."""
    if reference not in ("true", "surveillance"):
        raise ValueError(f"reference must be 'true' or 'surveillance', got {reference!r}")
    schedule = apply_rule(apply_deviation(scenario, deltas), scenario, params)
    ref = scenario.taus() if reference == "true" else scenario.surv_taus()
    total, _ = schedule_cost(schedule, ref)
    return total


def _select(entries: list[tuple[RuleParams, float]]) -> tuple[RuleParams, float]:
    return min(entries, key=lambda e: (e[1], e[0].w, -e[0].kappa))


def tune_self_interested(
    scenario: Scenario,
    theta_grid=None,
    br_config: BestResponseConfig = BestResponseConfig(),
    eval_reference: str = "true",
) -> TuneResult:
    """Pick the grid point minimizing cost at the deviators' best response."""
    grid = _dedupe_sorted(theta_grid if theta_grid is not None else default_theta_grid())
    entries: list[tuple[RuleParams, float]] = []
    for theta in grid:
        fp = iterated_best_response(
            scenario,
            theta,
            grid_points=br_config.grid_points,
            max_iters=br_config.max_iters,
            tol=br_config.tol,
        )
        entries.append((theta, evaluate_cost(scenario, theta, fp.deltas, eval_reference)))
    theta_star, objective = _select(entries)
    return TuneResult(theta_star, objective, tuple(entries), "self_interested")


def tune_malicious(
    scenario: Scenario,
    theta_grid=None,
    attack_config: AttackConfig = AttackConfig(),
    eval_reference: str = "true",
) -> TuneResult:
    """Pick the grid point minimizing the worst-case spoofing cost (min-max)."""
    grid = _dedupe_sorted(theta_grid if theta_grid is not None else default_theta_grid())
    entries: list[tuple[RuleParams, float]] = []
    for theta in grid:
        deltas, _ = worst_case_deviation(
            scenario,
            theta,
            grid_points_per_dim=attack_config.grid_points_per_dim,
            refine_iters=attack_config.refine_iters,
            reference=eval_reference,
        )
        entries.append((theta, evaluate_cost(scenario, theta, deltas, eval_reference)))
    theta_star, objective = _select(entries)
    return TuneResult(theta_star, objective, tuple(entries), "malicious")
