"""Secure vertiport arrival sequencing under falsified ETA reports.

Library layout: ``scenario`` (world model and file I/O), ``schedule_core``
(exact separation-constrained solver), ``rules`` (the parameterized
sequencing rule), ``adversary`` (misreporting and spoofing searches),
``coordinator`` (rule tuning), ``experiments`` (study cases and sweeps),
``cli`` (command-line front end).
"""

__version__ = "0.1.0"

from .adversary import (
    AttackConfig,
    BestResponseConfig,
    BestResponseResult,
    FixedPointResult,
    best_response,
    iterated_best_response,
    own_cost_curve,
    system_cost_curve,
    system_true_cost,
    worst_case_deviation,
)
from .coordinator import (
    TuneResult,
    default_theta_grid,
    evaluate_cost,
    tune_malicious,
    tune_self_interested,
)
from .experiments import (
    CASE_IDS,
    CaseResult,
    Metrics,
    ScenarioParams,
    SearchConfig,
    cell_seed,
    compute_metrics,
    run_all_cases,
    run_case,
    run_sweep,
    truthful_baseline,
)
from .rules import (
    RuleParams,
    THETA0,
    admissible,
    apply_rule,
    count_inadmissible,
    effective_etas,
)
from .scenario import (
    DeviationVector,
    ReportVector,
    Scenario,
    ScenarioFormatError,
    ScenarioValidationError,
    Vehicle,
    apply_deviation,
    generate_scenario,
    load_scenario,
    serialize_scenario,
    truthful_reports,
    validate_deviation,
)
from .schedule_core import (
    Schedule,
    assign_times,
    brute_force_schedule,
    schedule_cost,
    solve_schedule,
    solve_times,
)

__all__ = [
    "AttackConfig",
    "BestResponseConfig",
    "BestResponseResult",
    "CASE_IDS",
    "CaseResult",
    "DeviationVector",
    "FixedPointResult",
    "Metrics",
    "ReportVector",
    "RuleParams",
    "Scenario",
    "ScenarioFormatError",
    "ScenarioParams",
    "ScenarioValidationError",
    "Schedule",
    "SearchConfig",
    "THETA0",
    "TuneResult",
    "Vehicle",
    "admissible",
    "apply_deviation",
    "apply_rule",
    "assign_times",
    "best_response",
    "brute_force_schedule",
    "cell_seed",
    "compute_metrics",
    "count_inadmissible",
    "default_theta_grid",
    "effective_etas",
    "evaluate_cost",
    "generate_scenario",
    "iterated_best_response",
    "load_scenario",
    "own_cost_curve",
    "run_all_cases",
    "run_case",
    "run_sweep",
    "schedule_cost",
    "serialize_scenario",
    "solve_schedule",
    "solve_times",
    "system_cost_curve",
    "system_true_cost",
    "truthful_baseline",
    "truthful_reports",
    "tune_malicious",
    "tune_self_interested",
    "validate_deviation",
    "worst_case_deviation",
]
