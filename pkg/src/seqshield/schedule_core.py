"""Separation-constrained arrival scheduling.

For a fixed landing order with reference ETAs ``t_0..t_{N-1}``, the assigned
times minimize ``sum_k (a_k - t_k)^2`` subject to ``a_{k+1} - a_k >= s_min``.
Substituting ``b_k = a_k - k*s_min`` turns the separation constraints into
``b_{k+1} >= b_k``, i.e. nondecreasing isotonic regression of
``z_k = t_k - k*s_min``, which pool-adjacent-violators solves exactly in
O(N): each pooled block takes the mean of its z values.

Order selection sorts vehicles by reference ETA (ties by ascending id).
``brute_force_schedule`` enumerates every landing order instead and is the
oracle that justifies the sorting rule.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

FEASIBILITY_TOL = 1e-9
_BRUTE_FORCE_MAX = 8


@dataclass(frozen=True)
class Schedule:
    """A landing order plus assigned times.

    ``order[k]`` is the id of the k-th landing vehicle; ``times[i-1]`` is the
    assigned arrival time of vehicle ``i``. Consecutive landings are separated
    by at least ``s_min`` (up to FEASIBILITY_TOL).
    """

    order: tuple[int, ...]
    times: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "order", tuple(int(i) for i in self.order))
        object.__setattr__(self, "times", tuple(float(t) for t in self.times))

    def time_of(self, vehicle_id: int) -> float:
        return self.times[vehicle_id - 1]


def _pava_fit(z: Sequence[float]) -> list[float]:
    """Nondecreasing least-squares fit of z (unit weights), by block pooling."""
    sums: list[float] = []
    counts: list[int] = []
    means: list[float] = []
    for v in z:
        s, c, m = v, 1, v
        while means and means[-1] > m:
            s += sums.pop()
            c += counts.pop()
            means.pop()
            m = s / c
        sums.append(s)
        counts.append(c)
        means.append(m)
    fit: list[float] = []
    for m, c in zip(means, counts):
        fit.extend([m] * c)
    return fit


def assign_times(ref_etas_in_order: Sequence[float], s_min: float) -> list[float]:
    """Optimal separation-feasible times for a fixed landing order.

    Returns the unique minimizer of ``sum_k (a_k - t_k)^2`` subject to
    ``a_{k+1} - a_k >= s_min``.
    """
    n = len(ref_etas_in_order)
    if n == 0:
        raise ValueError("at least one reference ETA is required")
    if s_min < 0:
        raise ValueError(f"s_min must be >= 0, got {s_min}")
    z = [t - k * s_min for k, t in enumerate(ref_etas_in_order)]
    b = _pava_fit(z)
    return [bk + k * s_min for k, bk in enumerate(b)]


def _sorted_order(ref_etas: Sequence[float]) -> list[int]:
    # 0-based positions sorted by (eta, position); position order == id order.
    return sorted(range(len(ref_etas)), key=lambda j: (ref_etas[j], j))


def solve_times(ref_etas: Sequence[float], s_min: float) -> list[float]:
    """Times-only fast path of solve_schedule (same order rule, no Schedule)."""
    n = len(ref_etas)
    if n == 0:
        raise ValueError("at least one reference ETA is required")
    order0 = _sorted_order(ref_etas)
    a = assign_times([ref_etas[j] for j in order0], s_min)
    times = [0.0] * n
    for pos, j in enumerate(order0):
        times[j] = a[pos]
    return times


def solve_schedule(ref_etas: Sequence[float], s_min: float) -> Schedule:
    """Choose the landing order (ascending reference ETA, ties by id) and times.

    ``ref_etas[i-1]`` is the reference ETA of vehicle ``i``.
    """
    n = len(ref_etas)
    if n == 0:
        raise ValueError("at least one reference ETA is required")
    order0 = _sorted_order(ref_etas)
    a = assign_times([ref_etas[j] for j in order0], s_min)
    times = [0.0] * n
    for pos, j in enumerate(order0):
        times[j] = a[pos]
    return Schedule(order=tuple(j + 1 for j in order0), times=tuple(times))


def brute_force_schedule(ref_etas: Sequence[float], s_min: float) -> Schedule:
    """Exhaustive oracle: best schedule over all N! landing orders.

    Ties are broken by the lexicographically smallest order. Rejected for
    N > 8 (factorial enumeration).
    """
    n = len(ref_etas)
    if n == 0:
        raise ValueError("at least one reference ETA is required")
    if n > _BRUTE_FORCE_MAX:
        raise ValueError(
            f"brute force enumerates N! orders; N={n} exceeds the cap of {_BRUTE_FORCE_MAX}"
        )
    best_cost = None
    best_order: tuple[int, ...] = ()
    best_a: list[float] = []
    for perm in itertools.permutations(range(1, n + 1)):
        a = assign_times([ref_etas[i - 1] for i in perm], s_min)
        cost = sum((ak - ref_etas[i - 1]) ** 2 for ak, i in zip(a, perm))
        if best_cost is None or cost < best_cost:
            best_cost = cost
            best_order = perm
            best_a = a
    times = [0.0] * n
    for pos, i in enumerate(best_order):
        times[i - 1] = best_a[pos]
    return Schedule(order=best_order, times=tuple(times))


def schedule_cost(
    schedule: Schedule, reference_etas: Sequence[float]
) -> tuple[float, list[float]]:
    """Total and per-vehicle squared adjustment cost against ``reference_etas``.

    Pass true ETAs for the true cost, reported ETAs for the reported cost.
    """
    if len(schedule.times) != len(reference_etas):
        raise ValueError(
            f"schedule has {len(schedule.times)} vehicles, reference has "
            f"{len(reference_etas)}"
        )
    per_vehicle = [(a - r) ** 2 for a, r in zip(schedule.times, reference_etas)]
    return sum(per_vehicle), per_vehicle
