"""Independent brute-force oracles used to pin expected values.

These deliberately avoid the code paths they check: the fixed-order times
oracle is a general-purpose convex QP solve, and the search oracles are
dense-grid enumerations with no knowledge of breakpoints or refinement.
"""

from __future__ import annotations

import cvxpy as cp
import numpy as np

from seqshield import RuleParams, Scenario, own_cost_curve, system_cost_curve


def qp_assign_times(ref_etas, s_min: float) -> np.ndarray:
    """Solve min sum (a-t)^2 s.t. a[k+1]-a[k] >= s_min as a convex QP."""
    t = np.asarray(ref_etas, dtype=float)
    n = len(t)
    a = cp.Variable(n)
    constraints = [a[1:] - a[:-1] >= s_min] if n > 1 else []
    problem = cp.Problem(cp.Minimize(cp.sum_squares(a - t)), constraints)
    problem.solve(
        solver=cp.CLARABEL, tol_gap_abs=1e-12, tol_gap_rel=1e-12, tol_feas=1e-12
    )
    assert problem.status == cp.OPTIMAL, problem.status
    return np.asarray(a.value, dtype=float)


def qp_cost(ref_etas, s_min: float) -> float:
    a = qp_assign_times(ref_etas, s_min)
    return float(np.sum((a - np.asarray(ref_etas, dtype=float)) ** 2))


def dense_best_response(
    scenario: Scenario, params: RuleParams, i: int, points: int = 100_000
) -> tuple[float, float]:
    """(delta, own cost) minimizing over a uniform grid with ``points`` points."""
    eps = scenario.vehicles[i - 1].epsilon
    grid = np.linspace(-eps, eps, points)
    costs = own_cost_curve(scenario, params, i, grid)
    best = min(range(points), key=lambda k: (costs[k], abs(grid[k]), grid[k]))
    return float(grid[best]), float(costs[best])


def dense_worst_case_single(
    scenario: Scenario, params: RuleParams, i: int, points: int = 100_000
) -> tuple[float, float]:
    """(delta, system cost) maximizing over a uniform grid, single deviator."""
    eps = scenario.vehicles[i - 1].epsilon
    grid = np.linspace(-eps, eps, points)
    costs = system_cost_curve(scenario, params, i, grid)
    best = max(range(points), key=lambda k: (costs[k], -abs(grid[k])))
    return float(grid[best]), float(costs[best])
