"""World model for vertiport arrival sequencing under uncertain reports.

A scenario holds N inbound vehicles. Each vehicle has a true ETA ``tau``
(what it would fly absent intervention), a surveillance-inferred ETA
``surv_tau`` obtained independently of the vehicle's own broadcast, and an
uncertainty half-width ``epsilon`` bounding how far a falsified report can
drift from the truth while staying consistent with surveillance. Vehicles
flagged ``untrusted`` form the set whose reports may be falsified; everyone
else reports truthfully by assumption.

Reports are ``tau_hat = tau + delta`` where ``delta`` is the per-vehicle
reporting deviation (zero for trusted vehicles, within ``[-epsilon,
epsilon]`` for untrusted ones).

Scenario files are UTF-8 JSON::

    {"s_min": <number>, "sigma": <number>, "seed": <integer>,
     "vehicles": [{"id": 1, "tau": 0.0, "surv_tau": 0.0,
                   "epsilon": 0.5, "untrusted": false}, ...]}

Serialization writes vehicles in id order with full round-trip float
precision, so ``load_scenario(serialize_scenario(s)) == s``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
import numpy as np

# Slack applied when checking |delta| <= epsilon so exact-boundary
# deviations (e.g. grid endpoints) never flap on rounding.
DEVIATION_TOL = 1e-12


class ScenarioFormatError(ValueError):
    """Scenario text could not be parsed into the expected structure."""


class ScenarioValidationError(ValueError):
    """Parsed scenario data violates a model invariant."""


@dataclass(frozen=True)
class Vehicle:
    """One inbound vehicle; ids are 1-based and unique within a scenario."""

    id: int
    tau: float
    surv_tau: float
    epsilon: float
    untrusted: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "id", int(self.id))
        object.__setattr__(self, "tau", float(self.tau))
        object.__setattr__(self, "surv_tau", float(self.surv_tau))
        object.__setattr__(self, "epsilon", float(self.epsilon))
        object.__setattr__(self, "untrusted", bool(self.untrusted))
        if self.id < 1:
            raise ScenarioValidationError(f"vehicle id must be >= 1, got {self.id}")
        if not self.epsilon >= 0.0:
            raise ScenarioValidationError(
                f"vehicle {self.id}: epsilon must be >= 0, got {self.epsilon}"
            )


@dataclass(frozen=True)
class Scenario:
    """Immutable world state: vehicles, separation minimum, noise level, seed.

    Vehicles are stored in id order, so list position ``i`` always holds
    vehicle ``i + 1``. ``sigma`` is the surveillance-noise half-width used at
    generation; the invariant ``sigma <= min epsilon over untrusted vehicles``
    guarantees that a truthful report is always admissible.
    """

    vehicles: tuple[Vehicle, ...]
    s_min: float
    sigma: float
    seed: int = 0

    def __post_init__(self) -> None:
        vehicles = tuple(sorted(self.vehicles, key=lambda v: v.id))
        object.__setattr__(self, "vehicles", vehicles)
        object.__setattr__(self, "s_min", float(self.s_min))
        object.__setattr__(self, "sigma", float(self.sigma))
        object.__setattr__(self, "seed", int(self.seed))
        if not vehicles:
            raise ScenarioValidationError("a scenario needs at least one vehicle")
        ids = [v.id for v in vehicles]
        if len(set(ids)) != len(ids):
            raise ScenarioValidationError("duplicate vehicle id")
        if ids != list(range(1, len(ids) + 1)):
            raise ScenarioValidationError(
                f"vehicle ids must be exactly 1..{len(ids)}, got {ids}"
            )
        if not self.s_min >= 0.0:
            raise ScenarioValidationError(f"s_min must be >= 0, got {self.s_min}")
        if not self.sigma >= 0.0:
            raise ScenarioValidationError(f"sigma must be >= 0, got {self.sigma}")
        untrusted_eps = [v.epsilon for v in vehicles if v.untrusted]
        if untrusted_eps and self.sigma > min(untrusted_eps):
            raise ScenarioValidationError(
                "sigma exceeds the smallest untrusted epsilon; a truthful report "
                "could be rejected"
            )

    @property
    def n(self) -> int:
        return len(self.vehicles)

    def taus(self) -> list[float]:
        return [v.tau for v in self.vehicles]

    def surv_taus(self) -> list[float]:
        return [v.surv_tau for v in self.vehicles]

    def epsilons(self) -> list[float]:
        return [v.epsilon for v in self.vehicles]

    def untrusted_ids(self) -> tuple[int, ...]:
        return tuple(v.id for v in self.vehicles if v.untrusted)


@dataclass(frozen=True)
class DeviationVector:
    """Per-vehicle reporting deviations, indexed by vehicle id - 1."""

    delta: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "delta", tuple(float(d) for d in self.delta))

    @classmethod
    def zeros(cls, n: int) -> "DeviationVector":
        return cls((0.0,) * n)


@dataclass(frozen=True)
class ReportVector:
    """Reported ETAs tau_hat = tau + delta, indexed by vehicle id - 1."""

    tau_hat: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "tau_hat", tuple(float(t) for t in self.tau_hat))


def validate_deviation(
    scenario: Scenario, dev: DeviationVector, ignore_id: int | None = None
) -> None:
    """Raise ValueError unless ``dev`` is admissible for ``scenario``.

    Trusted vehicles must have exactly zero deviation; untrusted ones must
    stay within ``[-epsilon, epsilon]``. ``ignore_id`` skips one vehicle's
    entry (used when that entry is about to be overwritten).
    """
    if len(dev.delta) != scenario.n:
        raise ValueError(
            f"deviation vector has length {len(dev.delta)}, expected {scenario.n}"
        )
    for v, d in zip(scenario.vehicles, dev.delta):
        if v.id == ignore_id:
            continue
        if not v.untrusted:
            if d != 0.0:
                raise ValueError(
                    f"vehicle {v.id} is trusted but has nonzero deviation {d}"
                )
        elif abs(d) > v.epsilon + DEVIATION_TOL:
            raise ValueError(
                f"vehicle {v.id}: |deviation| {abs(d)} exceeds epsilon {v.epsilon}"
            )


def apply_deviation(scenario: Scenario, dev: DeviationVector) -> ReportVector:
    """Form the reported ETAs tau_hat = tau + delta (validated, no noise)."""
    validate_deviation(scenario, dev)
    return ReportVector(tuple(v.tau + d for v, d in zip(scenario.vehicles, dev.delta)))


def truthful_reports(scenario: Scenario) -> ReportVector:
    return ReportVector(tuple(v.tau for v in scenario.vehicles))


def generate_scenario(
    n: int,
    horizon: float,
    s_min: float,
    sigma: float,
    epsilon: float,
    m_size: int,
    seed: int,
) -> Scenario:
    """Draw a random scenario; identical inputs and seed give identical output.

    True ETAs are i.i.d. uniform on [0, horizon] and vehicles are relabeled so
    ids ascend with tau. Surveillance ETAs add i.i.d. uniform noise on
    [-sigma, sigma], so |surv_tau - tau| <= sigma by construction. ``m_size``
    vehicles are marked untrusted, chosen uniformly without replacement. All
    vehicles share the same epsilon.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not horizon > 0:
        raise ValueError(f"horizon must be > 0, got {horizon}")
    if s_min < 0:
        raise ValueError(f"s_min must be >= 0, got {s_min}")
    if sigma < 0 or epsilon < 0:
        raise ValueError("sigma and epsilon must be >= 0")
    if sigma > epsilon:
        raise ValueError(
            f"sigma ({sigma}) must not exceed epsilon ({epsilon}); a truthful "
            "report could otherwise be rejected"
        )
    if not 0 <= m_size <= n:
        raise ValueError(f"m_size must be in [0, {n}], got {m_size}")

    rng = np.random.default_rng(int(seed))
    taus = np.sort(rng.uniform(0.0, float(horizon), n))
    noise = rng.uniform(-float(sigma), float(sigma), n)
    untrusted = {int(k) for k in rng.choice(n, size=int(m_size), replace=False)}
    vehicles = tuple(
        Vehicle(
            id=k + 1,
            tau=float(taus[k]),
            surv_tau=float(taus[k] + noise[k]),
            epsilon=float(epsilon),
            untrusted=k in untrusted,
        )
        for k in range(n)
    )
    return Scenario(vehicles=vehicles, s_min=float(s_min), sigma=float(sigma), seed=int(seed))


def serialize_scenario(scenario: Scenario) -> str:
    """Render a scenario as JSON text (vehicles in id order, full precision)."""
    payload = {
        "s_min": scenario.s_min,
        "sigma": scenario.sigma,
        "seed": scenario.seed,
        "vehicles": [
            {
                "id": v.id,
                "tau": v.tau,
                "surv_tau": v.surv_tau,
                "epsilon": v.epsilon,
                "untrusted": v.untrusted,
            }
            for v in scenario.vehicles
        ],
    }
    return json.dumps(payload, indent=2) + "\n"


def _require_number(obj: dict, key: str, where: str) -> float:
    if key not in obj:
        raise ScenarioFormatError(f"{where}: missing key {key!r}")
    val = obj[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ScenarioFormatError(f"{where}: {key!r} must be a number, got {val!r}")
    return float(val)


def load_scenario(text: str) -> Scenario:
    """Parse scenario-file content and return a fully validated Scenario.

    Malformed text raises ScenarioFormatError; structurally sound text whose
    values break a model invariant (duplicate ids, negative epsilon, sigma
    larger than the smallest untrusted epsilon) raises
    ScenarioValidationError.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioFormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ScenarioFormatError("scenario file must contain a JSON object")
    s_min = _require_number(data, "s_min", "scenario")
    sigma = _require_number(data, "sigma", "scenario")
    if "seed" not in data:
        raise ScenarioFormatError("scenario: missing key 'seed'")
    seed = data["seed"]
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ScenarioFormatError(f"scenario: 'seed' must be an integer, got {seed!r}")
    raw_vehicles = data.get("vehicles")
    if not isinstance(raw_vehicles, list) or not raw_vehicles:
        raise ScenarioFormatError("scenario: 'vehicles' must be a non-empty list")

    vehicles = []
    for k, item in enumerate(raw_vehicles):
        where = f"vehicles[{k}]"
        if not isinstance(item, dict):
            raise ScenarioFormatError(f"{where}: must be an object")
        if "id" not in item or isinstance(item["id"], bool) or not isinstance(item["id"], int):
            raise ScenarioFormatError(f"{where}: 'id' must be an integer")
        if "untrusted" not in item or not isinstance(item["untrusted"], bool):
            raise ScenarioFormatError(f"{where}: 'untrusted' must be a boolean")
        vehicles.append(
            Vehicle(
                id=item["id"],
                tau=_require_number(item, "tau", where),
                surv_tau=_require_number(item, "surv_tau", where),
                epsilon=_require_number(item, "epsilon", where),
                untrusted=item["untrusted"],
            )
        )
    return Scenario(vehicles=tuple(vehicles), s_min=s_min, sigma=sigma, seed=seed)
