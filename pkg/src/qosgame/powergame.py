"""Nash equilibrium of the delay-constrained power control game.

Every user maximizes bits-per-Joule utility u = R*f(gamma)/p subject to a
SIR floor from its delay requirement. At equilibrium each user hits the SIR
target max(gamma_tilde, gamma_star), independent of the receiver, and the
power is the cheapest one achieving that target (clipped at the power cap).

For a many-user system (user count and spreading factor growing at fixed
ratio alpha = K/N) the equilibrium utilities have closed forms per user
class c with load alpha_c and target g_c, differing only in an
interference-margin factor:

    matched filter   margin = 1 - sum_c alpha_c * g_c        (load: g weight)
    decorrelator     margin = 1 - sum_c alpha_c              (weight 1)
    linear MMSE      margin = 1 - sum_c alpha_c * g_c/(1+g_c)

    u_c = (R * h**2 / sigma2) * margin * f(g_c) / g_c,   valid iff margin > 0

and the equilibrium transmit power is p = sigma2 * g / (h**2 * margin).

The finite-K matched-filter system solves the exact per-user balance
    gamma_k = p_k h_k**2 / (sigma2 + (1/N) * sum_{j!=k} p_j h_j**2),
a linear system with a unique positive solution iff
sum_k 1/(1 + N/gamma_k) < 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .delay import OutageDelaySpec, gamma_tilde, sir_target_infinite
from .efficiency import EfficiencyModel, gamma_star, psr
from .errors import InfeasibleLoadError


class ReceiverKind(Enum):
    MATCHED_FILTER = "matched-filter"
    DECORRELATOR = "decorrelator"
    MMSE = "mmse"


@dataclass(frozen=True)
class ClassSpec:
    """A user class: load fraction, shared delay requirement, transmit rate."""

    load: float  # alpha_c = lim K_c / N
    requirement: OutageDelaySpec
    rate: float = 1.0  # bit/s
    name: str = ""

    def __post_init__(self) -> None:
        if not self.load >= 0.0:
            raise ValueError(f"class load must be >= 0, got {self.load!r}")
        if not self.rate > 0.0:
            raise ValueError(f"class rate must be > 0, got {self.rate!r}")


@dataclass
class RadioEnv:
    """Finite-K radio parameters shared by power solvers and dynamics."""

    noise_power: float  # sigma^2, W
    gains: np.ndarray  # amplitude gains h_k (power gain is h_k**2)
    processing_gain: float  # N
    max_power: float = math.inf  # W
    packet_bits: int = 100

    def __post_init__(self) -> None:
        self.gains = np.asarray(self.gains, dtype=float)
        if not self.noise_power > 0.0:
            raise ValueError(f"noise_power must be > 0, got {self.noise_power!r}")
        if np.any(self.gains <= 0.0):
            raise ValueError("all channel gains must be > 0")
        if not self.processing_gain >= 1.0:
            raise ValueError(
                f"processing_gain must be >= 1, got {self.processing_gain!r}"
            )
        if not self.max_power > 0.0:
            raise ValueError(f"max_power must be > 0, got {self.max_power!r}")


@dataclass
class EquilibriumOutcome:
    """Per-user equilibrium report.

    `feasible` means every SIR target is met at the reported powers; when it
    is False, `reason` says why (load condition violated, caps binding, ...).
    """

    sir_targets: np.ndarray
    powers: np.ndarray
    utilities: np.ndarray
    feasible: bool
    reason: str = ""
    achieved_sir: Optional[np.ndarray] = None
    power_capped: Optional[np.ndarray] = None


@dataclass(frozen=True)
class Feasibility:
    feasible: bool
    load: float  # receiver-specific effective load
    slack: float  # 1 - load
    condition: str

    def __bool__(self) -> bool:
        return self.feasible


@dataclass(frozen=True)
class ClassTarget:
    sir_target: float  # linear
    delay_bound_active: bool  # True iff the delay floor exceeds gamma_star


@dataclass(frozen=True)
class SweepPoint:
    split_a: float
    feasible: bool
    utility_ratio_a: Optional[float]
    utility_ratio_b: Optional[float]


def pcg_sir_targets(
    classes: Sequence[ClassSpec], model: EfficiencyModel
) -> list[ClassTarget]:
    """Equilibrium SIR target per class: max(gamma_tilde, gamma_star).

    Receiver-independent; holds for any linear receiver.
    """
    g_star = gamma_star(model)
    out = []
    for spec in classes:
        floor = gamma_tilde(spec.requirement, model)
        out.append(
            ClassTarget(sir_target=max(floor, g_star), delay_bound_active=floor > g_star)
        )
    return out


def _load_weight(receiver: ReceiverKind, gamma: float) -> float:
    if receiver is ReceiverKind.MATCHED_FILTER:
        return gamma
    if receiver is ReceiverKind.DECORRELATOR:
        return 1.0
    return gamma / (1.0 + gamma)


_CONDITION = {
    ReceiverKind.MATCHED_FILTER: "sum_c alpha_c * gamma_c",
    ReceiverKind.DECORRELATOR: "sum_c alpha_c",
    ReceiverKind.MMSE: "sum_c alpha_c * gamma_c/(1+gamma_c)",
}


def effective_load(
    receiver: ReceiverKind, loads: Sequence[float], targets: Sequence[float]
) -> float:
    """Receiver-specific load measure whose margin (1 - load) scales utility."""
    return sum(a * _load_weight(receiver, g) for a, g in zip(loads, targets))


def feasibility(
    receiver: ReceiverKind, classes: Sequence[ClassSpec], model: EfficiencyModel
) -> Feasibility:
    """Strict large-system admission check for the receiver: load < 1."""
    targets = [t.sir_target for t in pcg_sir_targets(classes, model)]
    load = effective_load(receiver, [c.load for c in classes], targets)
    return Feasibility(
        feasible=load < 1.0,
        load=load,
        slack=1.0 - load,
        condition=_CONDITION[receiver],
    )


def multiclass_utilities(
    receiver: ReceiverKind,
    classes: Sequence[ClassSpec],
    noise_power: float,
    model: EfficiencyModel,
    rate: Optional[float] = None,
    gain: float = 1.0,
) -> np.ndarray:
    """Closed-form equilibrium utility (bit/Joule) per class.

    Uses each class's own rate unless a common representative `rate` is
    given. Heterogeneous gains within a class only rescale utility by h**2,
    so a single representative gain suffices here.
    """
    verdict = feasibility(receiver, classes, model)
    if not verdict:
        raise InfeasibleLoadError(verdict.condition, verdict.load)
    targets = [t.sir_target for t in pcg_sir_targets(classes, model)]
    margin = 1.0 - effective_load(receiver, [c.load for c in classes], targets)
    out = np.empty(len(classes))
    for i, (spec, g) in enumerate(zip(classes, targets)):
        r = rate if rate is not None else spec.rate
        out[i] = (r * gain**2 / noise_power) * margin * psr(model, g) / g
    return out


def equilibrium_powers_large_system(
    receiver: ReceiverKind,
    classes: Sequence[ClassSpec],
    class_of_user: Sequence[int],
    gains: Sequence[float],
    noise_power: float,
    model: EfficiencyModel,
    max_power: float = math.inf,
) -> EquilibriumOutcome:
    """Per-user equilibrium powers in the many-user limit.

    p_k = sigma2 * g_c(k) / (h_k**2 * margin); plugging these back into
    u = R f/p reproduces the closed-form class utilities exactly. Powers
    above `max_power` are clipped and flagged, in which case the clipped
    users cannot meet their targets and the outcome is marked infeasible.
    """
    verdict = feasibility(receiver, classes, model)
    if not verdict:
        raise InfeasibleLoadError(verdict.condition, verdict.load)
    class_of_user = np.asarray(class_of_user, dtype=int)
    gains = np.asarray(gains, dtype=float)
    if class_of_user.shape != gains.shape:
        raise ValueError("class_of_user and gains must have the same length")
    if np.any(gains <= 0.0):
        raise ValueError("all channel gains must be > 0")

    class_targets = np.array([t.sir_target for t in pcg_sir_targets(classes, model)])
    rates = np.array([c.rate for c in classes])
    margin = 1.0 - effective_load(
        receiver, [c.load for c in classes], class_targets.tolist()
    )
    targets = class_targets[class_of_user]
    wanted = noise_power * targets / (gains**2 * margin)
    capped = wanted > max_power
    powers = np.minimum(wanted, max_power)

    utilities = rates[class_of_user] * np.array(
        [psr(model, g) for g in targets]
    ) / wanted
    utilities[capped] = np.nan  # target missed at the cap: closed form invalid

    feasible = not capped.any()
    reason = "" if feasible else (
        f"{int(capped.sum())} user(s) clipped at max_power; SIR targets not met"
    )
    return EquilibriumOutcome(
        sir_targets=targets,
        powers=powers,
        utilities=utilities,
        feasible=feasible,
        reason=reason,
        power_capped=capped,
    )


def finite_k_mf_powers(
    targets: Sequence[float],
    gains: Sequence[float],
    noise_power: float,
    processing_gain: float,
    method: str = "solve",
) -> np.ndarray:
    """Exact matched-filter powers hitting the per-user SIR targets.

    Solves q_k - (gamma_k/N) * sum_{j!=k} q_j = gamma_k * sigma2 in the
    received powers q_k = p_k h_k**2. Unique positive solution exists iff
    sum_k 1/(1 + N/gamma_k) < 1; otherwise InfeasibleLoadError.

    method="solve" uses a direct linear solve; method="fixed-point" iterates
    the interference balance to convergence (kept as a cross-check).
    """
    targets = np.asarray(targets, dtype=float)
    gains = np.asarray(gains, dtype=float)
    if targets.shape != gains.shape:
        raise ValueError("targets and gains must have the same length")
    if np.any(targets <= 0.0) or np.any(gains <= 0.0):
        raise ValueError("targets and gains must be > 0")
    n = processing_gain
    load = float(np.sum(1.0 / (1.0 + n / targets)))
    if load >= 1.0:
        raise InfeasibleLoadError("sum_k 1/(1 + N/gamma_k)", load)

    k = len(targets)
    if method == "solve":
        a = np.eye(k) - (targets / n)[:, None] * (1.0 - np.eye(k))
        q = np.linalg.solve(a, targets * noise_power)
    elif method == "fixed-point":
        q = np.zeros(k)
        for _ in range(100_000):
            q_next = targets * (noise_power + (q.sum() - q) / n)
            if np.max(np.abs(q_next - q)) <= 1e-14 * max(1.0, float(q_next.max())):
                q = q_next
                break
            q = q_next
    else:
        raise ValueError(f"unknown method {method!r}")
    return q / gains**2


def utility_loss_sweep(
    receiver: ReceiverKind,
    total_load: float,
    splits: Sequence[float],
    class_a: OutageDelaySpec,
    class_b: OutageDelaySpec,
    model: EfficiencyModel,
) -> list[SweepPoint]:
    """Utility ratios vs the fraction of load carried by class A.

    For each split s, class A holds load s*alpha and class B the rest; the
    reference u is the all-unconstrained network (every target at
    gamma_star) under the same receiver and total load. Ratios factor into
    (margin ratio) * (efficiency-term ratio), which keeps the decorrelator's
    load independence exact in floating point. A class with zero load has no
    users and reports ratio 1. Infeasible points carry None ratios.
    """
    g_star = gamma_star(model)
    g_a = sir_target_infinite(class_a, model)
    g_b = sir_target_infinite(class_b, model)
    se = lambda g: psr(model, g) / g
    se_star = se(g_star)

    out = []
    for s in splits:
        if not 0.0 <= s <= 1.0:
            raise ValueError(f"split must lie in [0, 1], got {s!r}")
        loads = [s * total_load, (1.0 - s) * total_load]
        margin_mix = 1.0 - effective_load(receiver, loads, [g_a, g_b])
        margin_base = 1.0 - effective_load(receiver, loads, [g_star, g_star])
        if margin_mix <= 0.0 or margin_base <= 0.0:
            out.append(SweepPoint(s, False, None, None))
            continue
        margin_ratio = margin_mix / margin_base
        ratio_a = 1.0 if loads[0] == 0.0 else margin_ratio * (se(g_a) / se_star)
        ratio_b = 1.0 if loads[1] == 0.0 else margin_ratio * (se(g_b) / se_star)
        out.append(SweepPoint(s, True, ratio_a, ratio_b))
    return out
