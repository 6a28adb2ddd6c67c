"""Falsification behavior against an announced sequencing rule.

Three searches live here:

* ``best_response``: the deviation an untrusted vehicle picks to minimize its
  own adjustment cost, given everyone else's reports. The own-cost curve is
  piecewise quadratic in the deviation with jumps where the vehicle's
  effective ETA ties another vehicle's, so the uniform grid is augmented with
  those tie points offset by +/-1e-9 (the id tie-break makes the curve
  discontinuous exactly at a tie).
* ``iterated_best_response``: Gauss-Seidel sweeps of ``best_response`` over
  the untrusted set from the truthful profile, with a convergence flag
  instead of an equilibrium-existence claim.
* ``worst_case_deviation``: spoofing attack that maximizes the system cost
  over the box of admissible deviations, via product grid + box vertices +
  coordinate-ascent refinement on a 10x finer local grid. The result is a
  certified lower bound on the true worst case.

All argmin/argmax tie-breaks are defined on values (cost, then smaller
absolute deviation, then smaller deviation), so results never depend on
evaluation order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .rules import RuleParams, effective_eta
from .scenario import DeviationVector, Scenario, validate_deviation
from .schedule_core import solve_times

BREAKPOINT_OFFSET = 1e-9


@dataclass(frozen=True)
class BestResponseConfig:
    grid_points: int = 201
    max_iters: int = 100
    tol: float = 1e-9


@dataclass(frozen=True)
class AttackConfig:
    grid_points_per_dim: int = 21
    refine_iters: int = 2


@dataclass(frozen=True)
class BestResponseResult:
    delta_star: float
    own_cost: float
    grid_resolution: float
    candidates_evaluated: int


@dataclass(frozen=True)
class FixedPointResult:
    deltas: DeviationVector
    converged: bool
    iterations: int


def _reference(scenario: Scenario, which: str) -> list[float]:
    if which == "true":
        return scenario.taus()
    if which == "surveillance":
        return scenario.surv_taus()
    raise ValueError(f"reference must be 'true' or 'surveillance', got {which!r}")


def _base_effective(
    scenario: Scenario, params: RuleParams, deltas: Sequence[float]
) -> list[float]:
    """Effective ETAs for the report vector tau + deltas (no validation)."""
    out: list[float] = []
    for v, d in zip(scenario.vehicles, deltas):
        r = v.tau + d
        if v.untrusted:
            out.append(effective_eta(r, v.surv_tau, v.epsilon, params))
        else:
            out.append(r)
    return out


def _check_deviator(scenario: Scenario, i: int) -> None:
    if not 1 <= i <= scenario.n:
        raise ValueError(f"vehicle id {i} out of range 1..{scenario.n}")
    if not scenario.vehicles[i - 1].untrusted:
        raise ValueError(f"vehicle {i} is trusted; only untrusted vehicles deviate")


def _grid(lo: float, hi: float, points: int) -> list[float]:
    step = (hi - lo) / (points - 1)
    return [lo + k * step for k in range(points)]


def _candidate_deltas(
    u_base: Sequence[float],
    i0: int,
    tau_i: float,
    surv_i: float,
    eps: float,
    params: RuleParams,
    grid_points: int,
) -> list[float]:
    """Uniform grid over [-eps, eps] plus clamp kinks and order-tie points."""
    cands: set[float] = set(_grid(-eps, eps, grid_points))
    cands.update((0.0, -eps, eps))
    span = params.kappa * eps
    lo = surv_i - span
    hi = surv_i + span
    # Kinks where the clamp becomes active (continuous, no offset needed).
    cands.add(lo - tau_i)
    cands.add(hi - tau_i)
    w = params.w
    if w < 1.0:
        for j, uj in enumerate(u_base):
            if j == i0:
                continue
            # Solve (1-w)*clamped + w*surv == u_j on the unclamped branch.
            c = (uj - w * surv_i) / (1.0 - w) if w > 0.0 else uj
            if lo - BREAKPOINT_OFFSET <= c <= hi + BREAKPOINT_OFFSET:
                d = c - tau_i
                cands.add(d - BREAKPOINT_OFFSET)
                cands.add(d)
                cands.add(d + BREAKPOINT_OFFSET)
    return sorted(d for d in cands if -eps <= d <= eps)


def best_response(
    scenario: Scenario,
    params: RuleParams,
    i: int,
    others_deltas: DeviationVector | None = None,
    grid_points: int = 201,
) -> BestResponseResult:
    """Deviation minimizing vehicle i's own cost, given the others' reports.

    Ties are broken by smaller |delta|, then smaller delta, so truthful
    reporting wins whenever it is optimal.
    """
    _check_deviator(scenario, i)
    if grid_points < 2:
        raise ValueError(f"grid_points must be >= 2, got {grid_points}")
    n = scenario.n
    others = others_deltas if others_deltas is not None else DeviationVector.zeros(n)
    validate_deviation(scenario, others, ignore_id=i)

    v = scenario.vehicles[i - 1]
    i0 = i - 1
    tau_i = v.tau
    eps = v.epsilon
    s_min = scenario.s_min
    u_base = _base_effective(scenario, params, others.delta)

    if eps == 0.0:
        u = list(u_base)
        u[i0] = effective_eta(tau_i, v.surv_tau, eps, params)
        cost = (solve_times(u, s_min)[i0] - tau_i) ** 2
        return BestResponseResult(0.0, cost, 0.0, 1)

    cands = _candidate_deltas(u_base, i0, tau_i, v.surv_tau, eps, params, grid_points)
    u = list(u_base)
    best_key: tuple[float, float, float] | None = None
    for d in cands:
        u[i0] = effective_eta(tau_i + d, v.surv_tau, eps, params)
        cost = (solve_times(u, s_min)[i0] - tau_i) ** 2
        key = (cost, abs(d), d)
        if best_key is None or key < best_key:
            best_key = key
    assert best_key is not None
    return BestResponseResult(
        delta_star=best_key[2],
        own_cost=best_key[0],
        grid_resolution=2.0 * eps / (grid_points - 1),
        candidates_evaluated=len(cands),
    )


def own_cost_curve(
    scenario: Scenario,
    params: RuleParams,
    i: int,
    deltas: Iterable[float],
    others_deltas: DeviationVector | None = None,
) -> list[float]:
    """Vehicle i's own cost at each deviation in ``deltas`` (analysis helper)."""
    _check_deviator(scenario, i)
    n = scenario.n
    others = others_deltas if others_deltas is not None else DeviationVector.zeros(n)
    validate_deviation(scenario, others, ignore_id=i)
    v = scenario.vehicles[i - 1]
    i0 = i - 1
    s_min = scenario.s_min
    u = _base_effective(scenario, params, others.delta)
    out: list[float] = []
    for d in deltas:
        u[i0] = effective_eta(v.tau + d, v.surv_tau, v.epsilon, params)
        out.append((solve_times(u, s_min)[i0] - v.tau) ** 2)
    return out


def iterated_best_response(
    scenario: Scenario,
    params: RuleParams,
    grid_points: int = 201,
    max_iters: int = 100,
    tol: float = 1e-9,
) -> FixedPointResult:
    """Gauss-Seidel best-response sweeps from the truthful profile.

    Sweeps run in ascending vehicle-id order; convergence means a full sweep
    changed no deviation by more than ``tol``. Non-convergence is reported in
    the flag, never raised.
    """
    if max_iters < 1:
        raise ValueError(f"max_iters must be >= 1, got {max_iters}")
    if not tol > 0:
        raise ValueError(f"tol must be > 0, got {tol}")
    n = scenario.n
    m_ids = scenario.untrusted_ids()
    deltas = [0.0] * n
    converged = False
    iterations = 0
    for sweep in range(1, max_iters + 1):
        iterations = sweep
        max_change = 0.0
        for i in m_ids:
            res = best_response(
                scenario, params, i, DeviationVector(tuple(deltas)), grid_points
            )
            change = abs(res.delta_star - deltas[i - 1])
            if change > max_change:
                max_change = change
            deltas[i - 1] = res.delta_star
        if max_change <= tol:
            converged = True
            break
    return FixedPointResult(DeviationVector(tuple(deltas)), converged, iterations)


def _system_cost_fn(
    scenario: Scenario, params: RuleParams, reference: str
) -> tuple[list[int], Callable[[Sequence[float]], float]]:
    """Cost of the schedule induced by deviations of the untrusted set.

    Returns the untrusted ids (ascending) and a function mapping a deviation
    tuple over that set to the total system cost against the chosen
    reference ETAs. Trusted vehicles report truthfully.
    """
    ref = _reference(scenario, reference)
    s_min = scenario.s_min
    m_ids = list(scenario.untrusted_ids())
    base_u = _base_effective(scenario, params, [0.0] * scenario.n)
    m_info = [
        (i - 1, scenario.vehicles[i - 1].tau, scenario.vehicles[i - 1].surv_tau,
         scenario.vehicles[i - 1].epsilon)
        for i in m_ids
    ]

    def cost(dev: Sequence[float]) -> float:
        u = list(base_u)
        for (i0, tau_i, surv_i, eps_i), d in zip(m_info, dev):
            u[i0] = effective_eta(tau_i + d, surv_i, eps_i, params)
        times = solve_times(u, s_min)
        return sum((a - r) ** 2 for a, r in zip(times, ref))

    return m_ids, cost


def system_true_cost(
    scenario: Scenario,
    params: RuleParams,
    deviations: DeviationVector,
    reference: str = "true",
) -> float:
    """Total system cost of the rule's schedule under the given deviations."""
    validate_deviation(scenario, deviations)
    m_ids, cost = _system_cost_fn(scenario, params, reference)
    return cost([deviations.delta[i - 1] for i in m_ids])


def system_cost_curve(
    scenario: Scenario,
    params: RuleParams,
    i: int,
    deltas: Iterable[float],
    reference: str = "true",
) -> list[float]:
    """System cost as vehicle i's deviation varies, others truthful."""
    _check_deviator(scenario, i)
    m_ids, cost = _system_cost_fn(scenario, params, reference)
    slot = m_ids.index(i)
    dev = [0.0] * len(m_ids)
    out: list[float] = []
    for d in deltas:
        dev[slot] = d
        out.append(cost(dev))
    return out


def _clip(x: float, lo: float, hi: float) -> float:
    return lo if x < lo else (hi if x > hi else x)


def worst_case_deviation(
    scenario: Scenario,
    params: RuleParams,
    grid_points_per_dim: int = 21,
    refine_iters: int = 2,
    reference: str = "true",
    extra_candidates: Sequence[Sequence[float]] = (),
) -> tuple[DeviationVector, float]:
    """Spoofing deviations maximizing system cost over the admissible box.

    Searches the product grid over the untrusted set, all box vertices, the
    truthful point, and any ``extra_candidates`` (seed points over the
    untrusted set, e.g. for warm starts or nested-box studies), then applies
    ``refine_iters`` rounds of coordinate ascent on a local grid ten times
    finer than the coarse one. The returned cost is a lower bound on the
    exact worst case; the grid always contains the truthful point, so the
    bound is never below the truthful cost.
    """
    if grid_points_per_dim < 3:
        raise ValueError(f"grid_points_per_dim must be >= 3, got {grid_points_per_dim}")
    if refine_iters < 0:
        raise ValueError(f"refine_iters must be >= 0, got {refine_iters}")
    n = scenario.n
    m_ids, cost = _system_cost_fn(scenario, params, reference)
    m = len(m_ids)
    if m == 0:
        return DeviationVector.zeros(n), cost(())

    epss = [scenario.vehicles[i - 1].epsilon for i in m_ids]
    axes = []
    for eps in epss:
        if eps == 0.0:
            axes.append([0.0])
        else:
            axes.append(sorted(set(_grid(-eps, eps, grid_points_per_dim)) | {-eps, 0.0, eps}))
    candidates: set[tuple[float, ...]] = set(itertools.product(*axes))
    candidates.update(itertools.product(*[(-e, e) if e else (0.0,) for e in epss]))
    candidates.add(tuple(0.0 for _ in m_ids))
    for seed in extra_candidates:
        if len(seed) != m:
            raise ValueError(
                f"extra candidate has length {len(seed)}, expected {m} (untrusted set)"
            )
        candidates.add(tuple(_clip(float(d), -e, e) for d, e in zip(seed, epss)))

    def key(dev: tuple[float, ...], c: float) -> tuple:
        return (-c, tuple((abs(d), d) for d in dev))

    best_dev: tuple[float, ...] | None = None
    best_cost = 0.0
    best_key: tuple | None = None
    for dev in sorted(candidates):
        c = cost(dev)
        k = key(dev, c)
        if best_key is None or k < best_key:
            best_key, best_dev, best_cost = k, dev, c
    assert best_dev is not None

    for _ in range(refine_iters):
        for slot, eps in enumerate(epss):
            if eps == 0.0:
                continue
            coarse_step = 2.0 * eps / (grid_points_per_dim - 1)
            fine = coarse_step / 10.0
            cur = best_dev[slot]
            local = sorted({_clip(cur + k * fine, -eps, eps) for k in range(-10, 11)})
            for d in local:
                dev = best_dev[:slot] + (d,) + best_dev[slot + 1 :]
                c = cost(dev)
                k = key(dev, c)
                if k < best_key:
                    best_key, best_dev, best_cost = k, dev, c

    full = [0.0] * n
    for i, d in zip(m_ids, best_dev):
        full[i - 1] = d
    return DeviationVector(tuple(full)), best_cost
