"""Shared test fixtures: the reference instance and random scenario drawing."""

from __future__ import annotations

import numpy as np

from seqshield import Scenario, Vehicle, generate_scenario

# Three vehicles at true ETAs 0, 1, 1.1 with s_min=2; only vehicle 3 is
# untrusted (epsilon 0.5) and surveillance is exact. Small enough to verify
# everything by hand or by enumeration.
REF_TAUS = (0.0, 1.0, 1.1)
REF_S_MIN = 2.0
REF_EPSILON = 0.5


def reference_scenario() -> Scenario:
    return Scenario(
        vehicles=tuple(
            Vehicle(id=i + 1, tau=t, surv_tau=t, epsilon=REF_EPSILON, untrusted=(i == 2))
            for i, t in enumerate(REF_TAUS)
        ),
        s_min=REF_S_MIN,
        sigma=0.0,
        seed=0,
    )


def check_pava_structure(t, s_min: float, a, tol: float = 1e-9) -> None:
    """Assert separation feasibility and the pooled-block optimality structure.

    Blocks are recovered from the fitted values with a tolerance because
    ``b_k = a_k - k*s_min`` round-trips through one addition; merging nearly
    equal neighbors never breaks the zero-residual property, splitting would.
    """
    n = len(a)
    for k in range(n - 1):
        assert a[k + 1] - a[k] >= s_min - tol
    b = [ak - k * s_min for k, ak in enumerate(a)]
    z = [tk - k * s_min for k, tk in enumerate(t)]
    scale = max(1.0, max(abs(v) for v in z), max(abs(v) for v in b))
    k = 0
    while k < n:
        j = k
        while j + 1 < n and abs(b[j + 1] - b[k]) <= tol * scale:
            j += 1
        residual = sum(z[x] - b[x] for x in range(k, j + 1))
        assert abs(residual) <= tol * scale
        if j + 1 < n:
            assert b[j + 1] > b[k]
        k = j + 1


def random_scenario(
    rng: np.random.Generator,
    n_max: int = 6,
    n_min: int = 1,
    m_max: int | None = None,
    m_min: int = 0,
    horizon: float = 10.0,
    s_min_range: tuple[float, float] = (0.5, 2.0),
    eps_range: tuple[float, float] = (0.1, 1.0),
    sigma_zero: bool = False,
) -> Scenario:
    """Draw a scenario with parameters sampled from the given ranges."""
    n = int(rng.integers(n_min, n_max + 1))
    cap = n if m_max is None else min(m_max, n)
    m_size = int(rng.integers(m_min, cap + 1)) if cap >= m_min else m_min
    s_min = float(rng.uniform(*s_min_range))
    epsilon = float(rng.uniform(*eps_range))
    sigma = 0.0 if sigma_zero else float(rng.uniform(0.0, epsilon))
    seed = int(rng.integers(0, 2**63))
    return generate_scenario(n, horizon, s_min, sigma, epsilon, m_size, seed)
