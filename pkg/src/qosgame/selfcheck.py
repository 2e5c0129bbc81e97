"""Deterministic oracle suite behind the `validate` CLI command.

Cross-checks the closed forms against independent computations:

* geometric retransmission outage vs the simulated empirical CDF,
* the M/G/1 mean-sojourn formula vs the simulated queue,
* the direct linear-solve matched-filter powers vs best-response dynamics.

Every check is a pure function of (seed, scale), so two runs with the same
arguments produce byte-identical reports.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .delay import (
    OutageDelaySpec,
    eta_tilde,
    mg1_mean_wait,
    simulate_mg1,
    simulate_retransmissions,
    sir_target_infinite,
)
from .dynamics import run_best_response
from .efficiency import EfficiencyModel
from .powergame import RadioEnv, finite_k_mf_powers

DEFAULT_SEED = 20260301

_SCALES = {"small": 200_000, "full": 2_000_000}

# (success probability, transmission budget)
_RETRANS_CASES = [
    (1.0, 1),
    (0.5, 2),
    (0.9, 3),
    (0.245, 5),
    (eta_tilde(OutageDelaySpec(1, 0.99)), 1),
    (eta_tilde(OutageDelaySpec(3, 0.90)), 3),
]

# (arrival rate pkt/s, tx time s, success probability); all stable
_MG1_CASES = [
    (50.0, 1e-3, 0.245),
    (50.0, 1e-3, 0.857),
    (10.0, 1e-3, 0.5),
    (100.0, 1e-3, 0.3),
    (200.0, 1e-3, 0.5),
    (30.0, 2e-3, 0.4),
    (80.0, 5e-4, 0.2),
    (5.0, 1e-2, 0.9),
]


@dataclass(frozen=True)
class CheckResult:
    name: str
    statistic: float
    reference: float
    bound: float  # allowed |statistic - reference|
    passed: bool


def _check(name: str, statistic: float, reference: float, bound: float) -> CheckResult:
    return CheckResult(
        name=name,
        statistic=statistic,
        reference=reference,
        bound=bound,
        passed=abs(statistic - reference) <= bound,
    )


def _feasible_instance(rng: np.random.Generator, model: EfficiencyModel):
    """Random finite-K matched-filter instance with load kept below 0.95."""
    k = int(rng.integers(2, 31))
    gains = rng.uniform(0.5, 2.0, k)
    targets = np.array(
        [
            sir_target_infinite(
                OutageDelaySpec(int(rng.integers(1, 6)), float(rng.uniform(0.5, 0.995))),
                model,
            )
            for _ in range(k)
        ]
    )
    n = 128.0
    while float(np.sum(1.0 / (1.0 + n / targets))) >= 0.95:
        n *= 2.0
    return targets, gains, n


def run_checks(seed: int = DEFAULT_SEED, scale: str = "small") -> list[CheckResult]:
    if scale not in _SCALES:
        raise ValueError(f"scale must be one of {sorted(_SCALES)}, got {scale!r}")
    n_samples = _SCALES[scale]
    n_instances = 10 if scale == "small" else 40
    results = []

    for i, (f, budget) in enumerate(_RETRANS_CASES):
        sim = simulate_retransmissions(f, budget, n_samples, seed + i)
        closed = -math.expm1(budget * math.log1p(-f)) if f < 1.0 else 1.0
        results.append(
            _check(
                f"retransmission outage f={f:.4f} L={budget}",
                sim.within_budget_prob,
                closed,
                3.0 * sim.std_error,
            )
        )

    for i, (lam, tau, f) in enumerate(_MG1_CASES):
        sim = simulate_mg1(lam, tau, f, n_samples, seed + 100 + i)
        results.append(
            _check(
                f"mg1 mean wait lam={lam:g} tau={tau:g} f={f:g}",
                sim.mean_wait,
                mg1_mean_wait(lam, tau, f),
                3.0 * sim.std_error,
            )
        )

    rerun = simulate_mg1(*_MG1_CASES[0], n_samples, seed + 100)
    first = simulate_mg1(*_MG1_CASES[0], n_samples, seed + 100)
    results.append(
        _check("mg1 determinism (same seed)", rerun.mean_wait, first.mean_wait, 0.0)
    )

    model = EfficiencyModel(packet_bits=100)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_instances):
        targets, gains, n = _feasible_instance(rng, model)
        env = RadioEnv(noise_power=1.0, gains=gains, processing_gain=n)
        run = run_best_response(env, targets, tol=1e-12, max_iter=5000)
        direct = finite_k_mf_powers(targets, gains, 1.0, n)
        worst = max(worst, float(np.max(np.abs(run.outcome.powers - direct) / direct)))
    results.append(
        _check(
            f"best response vs linear solve ({n_instances} instances, max rel diff)",
            worst,
            0.0,
            1e-8,
        )
    )

    targets, gains, n = _feasible_instance(rng, model)
    env = RadioEnv(noise_power=1.0, gains=gains, processing_gain=n, max_power=1e6)
    lo = run_best_response(env, targets, tol=1e-12, max_iter=5000, initial="zero")
    hi = run_best_response(env, targets, tol=1e-12, max_iter=5000, initial="pmax")
    results.append(
        _check(
            "best response start independence (max rel diff)",
            float(np.max(np.abs(lo.outcome.powers - hi.outcome.powers) / lo.outcome.powers)),
            0.0,
            1e-8,
        )
    )
    return results


def format_report(results: list[CheckResult], seed: int, scale: str) -> str:
    lines = [f"qosgame validation suite (seed={seed}, scale={scale})", "-" * 100]
    for r in results:
        verdict = "PASS" if r.passed else "FAIL"
        lines.append(
            f"{r.name:<62s} stat={r.statistic: .6e} ref={r.reference: .6e} "
            f"tol={r.bound:.3e} {verdict}"
        )
    n_pass = sum(r.passed for r in results)
    lines.append("-" * 100)
    lines.append(f"RESULT: {n_pass}/{len(results)} checks passed")
    return "\n".join(lines) + "\n"
