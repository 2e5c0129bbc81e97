"""Best-response power dynamics for the finite-K matched-filter system.

Used as an independent check that the closed-form equilibrium powers are
the fixed point (and attractor) of per-user best responses: each sweep,
every user simultaneously sets the cheapest power meeting its SIR target
against the current interference, clipped at the power cap. The update is
a standard interference function, so on feasible targets the iteration
converges monotonically from zero to the unique fixed point; on infeasible
targets some users escalate to the cap and stay pinned there with SIR below
target, which is detected behaviorally.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import IO, Optional, Sequence, Union

import numpy as np

from .efficiency import EfficiencyModel, psr
from .powergame import EquilibriumOutcome, RadioEnv

# consecutive all-capped-and-short-of-target sweeps treated as infeasibility
_PINNED_SWEEPS = 50


def best_response_step(
    powers: np.ndarray,
    targets: np.ndarray,
    gains: np.ndarray,
    noise_power: float,
    processing_gain: float,
    max_power: float,
) -> np.ndarray:
    """One synchronous sweep: each user exactly meets its target, capped."""
    q = powers * gains**2
    interference = noise_power + (q.sum() - q) / processing_gain
    return np.minimum(max_power, targets * interference / gains**2)


def achieved_sir(
    powers: np.ndarray, gains: np.ndarray, noise_power: float, processing_gain: float
) -> np.ndarray:
    """Matched-filter output SIR per user at the given powers."""
    q = powers * gains**2
    return q / (noise_power + (q.sum() - q) / processing_gain)


@dataclass
class BestResponseRun:
    initial_powers: np.ndarray
    tol: float
    max_iter: int
    powers_history: np.ndarray  # (n_sweeps + 1, K)
    sir_history: np.ndarray
    converged: bool
    iterations: int
    outcome: EquilibriumOutcome


def run_best_response(
    env: RadioEnv,
    targets: Sequence[float],
    tol: float = 1e-10,
    max_iter: int = 1000,
    initial: Union[np.ndarray, Sequence[float], str, None] = None,
    model: Optional[EfficiencyModel] = None,
    rate: Optional[float] = None,
) -> BestResponseRun:
    """Iterate best responses to convergence (or a non-convergence report).

    `initial` may be an explicit power vector, "zero" (default) or "pmax".
    Convergence means the max relative power change between sweeps drops
    below `tol`. Exceeding max_iter is reported, not raised. Utilities are
    filled when `model` and `rate` are supplied, else NaN.
    """
    targets = np.asarray(targets, dtype=float)
    k = len(targets)
    if env.gains.shape != targets.shape:
        raise ValueError("env.gains and targets must have the same length")

    if initial is None or (isinstance(initial, str) and initial == "zero"):
        powers = np.zeros(k)
    elif isinstance(initial, str) and initial == "pmax":
        powers = np.full(k, env.max_power)
    elif isinstance(initial, str):
        raise ValueError(f"unknown initialization {initial!r}")
    else:
        powers = np.asarray(initial, dtype=float).copy()
        if powers.shape != targets.shape:
            raise ValueError("initial powers must match the number of users")
        if np.any(powers < 0.0) or np.any(powers > env.max_power):
            raise ValueError("initial powers must lie in [0, max_power]")

    history = [powers]
    converged = False
    pinned_streak = 0
    pinned_out = False
    sweeps = 0
    for sweeps in range(1, max_iter + 1):
        nxt = best_response_step(
            powers, targets, env.gains, env.noise_power, env.processing_gain,
            env.max_power,
        )
        history.append(nxt)
        rel = np.max(np.abs(nxt - powers) / np.maximum(nxt, 1e-300))
        short = achieved_sir(nxt, env.gains, env.noise_power, env.processing_gain) < (
            targets * (1.0 - 1e-9)
        )
        pinned_streak = pinned_streak + 1 if ((nxt >= env.max_power) & short).any() else 0
        powers = nxt
        if rel < tol:
            converged = True
            break
        if pinned_streak >= _PINNED_SWEEPS:
            pinned_out = True
            break

    powers_history = np.vstack(history)
    sir_history = np.vstack(
        [
            achieved_sir(p, env.gains, env.noise_power, env.processing_gain)
            for p in history
        ]
    )
    sirs = sir_history[-1]
    capped = powers >= env.max_power
    missed = sirs < targets * (1.0 - 1e-9)
    feasible = converged and not missed.any()
    if feasible:
        reason = ""
    elif missed.any():
        reason = (
            f"{int(missed.sum())} user(s) below target with "
            f"{int(capped.sum())} pinned at max_power"
        )
    else:
        reason = f"not converged within {max_iter} sweeps"

    if model is not None and rate is not None:
        with np.errstate(divide="ignore", invalid="ignore"):
            utilities = rate * np.array([psr(model, s) for s in sirs]) / powers
    else:
        utilities = np.full(k, np.nan)

    outcome = EquilibriumOutcome(
        sir_targets=targets,
        powers=powers,
        utilities=utilities,
        feasible=feasible,
        reason=reason,
        achieved_sir=sirs,
        power_capped=capped,
    )
    return BestResponseRun(
        initial_powers=powers_history[0],
        tol=tol,
        max_iter=max_iter,
        powers_history=powers_history,
        sir_history=sir_history,
        converged=converged and not pinned_out,
        iterations=sweeps,
        outcome=outcome,
    )


def write_trajectory_csv(run: BestResponseRun, stream: IO[str]) -> None:
    """Dump the iterate log as rows of (iteration, user, power, SIR)."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["iteration", "user", "power_w", "sir_lin"])
    for it, (prow, srow) in enumerate(zip(run.powers_history, run.sir_history)):
        for user, (p, s) in enumerate(zip(prow, srow)):
            writer.writerow([it, user, f"{p:.12g}", f"{s:.12g}"])
