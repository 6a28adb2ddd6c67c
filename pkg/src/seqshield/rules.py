"""Coordinator-side sequencing rule: screening and trust-weighted reports.

The rule is parameterized by a trust weight ``w`` and an interval-shrink
factor ``kappa``, both applied only to untrusted vehicles. A report is first
clamped to the admissible window ``[surv_tau - kappa*epsilon, surv_tau +
kappa*epsilon]`` and then blended toward the surveillance estimate:
``u = (1-w)*clamped + w*surv_tau``. Trusted vehicles' reports pass through
unchanged. The resulting effective ETAs feed the separation solver.

Out-of-window reports are clamped rather than dropped, so every vehicle
still receives a slot; hard rejection, if wanted, is a front-end concern
(the CLI reports per-vehicle admissibility separately).
"""

from __future__ import annotations

from dataclasses import dataclass

from .scenario import ReportVector, Scenario
from .schedule_core import Schedule, solve_schedule

# Tolerance on the admissibility test so exact-boundary reports never flap.
ADMISSIBILITY_TOL = 1e-12


@dataclass(frozen=True)
class RuleParams:
    """Sequencing-rule parameters.

    ``w=0`` uses the (clamped) report, ``w=1`` uses the surveillance estimate;
    ``kappa`` shrinks the admissible window around the surveillance estimate.
    The baseline rule is ``w=0, kappa=1``.
    """

    w: float = 0.0
    kappa: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "w", float(self.w))
        object.__setattr__(self, "kappa", float(self.kappa))
        if not 0.0 <= self.w <= 1.0:
            raise ValueError(f"w must be in [0, 1], got {self.w}")
        if not 0.0 <= self.kappa <= 1.0:
            raise ValueError(f"kappa must be in [0, 1], got {self.kappa}")


THETA0 = RuleParams(w=0.0, kappa=1.0)


def admissible(report: float, surv_tau: float, epsilon: float) -> bool:
    """True iff the report is within epsilon of the surveillance estimate."""
    if epsilon < 0:
        raise ValueError(f"epsilon must be >= 0, got {epsilon}")
    return abs(report - surv_tau) <= epsilon + ADMISSIBILITY_TOL


def effective_eta(
    report: float, surv_tau: float, epsilon: float, params: RuleParams
) -> float:
    """Clamp-and-blend transform for one untrusted vehicle's report."""
    span = params.kappa * epsilon
    lo = surv_tau - span
    hi = surv_tau + span
    clamped = lo if report < lo else (hi if report > hi else report)
    w = params.w
    # Branches keep the exact identities u == surv_tau when w == 1 and
    # u == report when nothing moved, instead of round-tripping through
    # the blend arithmetic.
    if w == 1.0:
        return surv_tau
    if w == 0.0 or clamped == surv_tau:
        return clamped
    return (1.0 - w) * clamped + w * surv_tau


def effective_etas(
    reports: ReportVector, scenario: Scenario, params: RuleParams
) -> list[float]:
    """Per-vehicle ETAs the rule actually schedules on.

    Trusted vehicles' reports are used directly; untrusted vehicles' reports
    go through clamp-and-blend.
    """
    if len(reports.tau_hat) != scenario.n:
        raise ValueError(
            f"report vector has length {len(reports.tau_hat)}, expected {scenario.n}"
        )
    out: list[float] = []
    for v, r in zip(scenario.vehicles, reports.tau_hat):
        if v.untrusted:
            out.append(effective_eta(r, v.surv_tau, v.epsilon, params))
        else:
            out.append(r)
    return out


def apply_rule(
    reports: ReportVector, scenario: Scenario, params: RuleParams
) -> Schedule:
    """Full sequencing rule: effective ETAs, then the separation solver."""
    return solve_schedule(effective_etas(reports, scenario, params), scenario.s_min)


def count_inadmissible(reports: ReportVector, scenario: Scenario) -> int:
    """How many reports fall outside their vehicle's admissibility window."""
    return sum(
        0 if admissible(r, v.surv_tau, v.epsilon) else 1
        for v, r in zip(scenario.vehicles, reports.tau_hat)
    )


def inadmissible_ids(reports: ReportVector, scenario: Scenario) -> tuple[int, ...]:
    return tuple(
        v.id
        for v, r in zip(scenario.vehicles, reports.tau_hat)
        if not admissible(r, v.surv_tau, v.epsilon)
    )
