"""Joint power and rate control game with average-delay constraints.

Each user picks a transmit power and a transmit rate to maximize bits per
Joule while keeping its mean queueing-plus-transmission delay within D. At
the efficient Nash equilibrium the user transmits at the rate

    omega_star = (M/D) * (1 + D*lam + sqrt(1 + D**2 lam**2
                  + 2*(1 - f_star)*D*lam)) / (2 f_star),

which makes the delay constraint exactly tight at the efficiency-optimal
SIR gamma_star (f_star = f(gamma_star)), and sets the power that achieves
gamma_star. The pair (source rate, delay bound) thereby reduces to a single
scalar "size"

    phi_star = 1 / (1 + B / (omega_star * gamma_star)),

the fraction of network resource the user consumes: a set of users is
admissible iff their sizes sum to strictly less than 1.

With heterogeneous rates the per-user spreading factor is N_k = B/R_k and
the matched-filter balance gamma_k = q_k / (sigma2 + (Q - q_k)/N_k) in
received powers q_k = p_k h_k**2, Q = sum q_j, has the closed-form solution

    Q   = gamma_star * sigma2 * sum_k (1 - phi_k) / (1 - sum_k phi_k),
    q_k = gamma_star * sigma2 * (1 - phi_k) + phi_k * Q,

which is positive exactly on the admissible set.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .delay import AverageDelaySpec
from .efficiency import EfficiencyModel, gamma_star, psr
from .errors import InfeasibleLoadError


@dataclass(frozen=True)
class PrcgUser:
    """A finite-backlog user: arrival/delay QoS, channel gain, power cap."""

    qos: AverageDelaySpec
    gain: float = 1.0  # amplitude h
    max_power: float = math.inf  # W
    packet_bits: Optional[int] = None  # defaults to the system model's M

    def __post_init__(self) -> None:
        if not self.gain > 0.0:
            raise ValueError(f"gain must be > 0, got {self.gain!r}")
        if not self.max_power > 0.0:
            raise ValueError(f"max_power must be > 0, got {self.max_power!r}")


@dataclass(frozen=True)
class SystemParams:
    bandwidth: float  # B, Hz
    noise_power: float  # sigma^2, W
    model: EfficiencyModel

    def __post_init__(self) -> None:
        if not self.bandwidth > 0.0:
            raise ValueError(f"bandwidth must be > 0, got {self.bandwidth!r}")
        if not self.noise_power > 0.0:
            raise ValueError(f"noise_power must be > 0, got {self.noise_power!r}")


@dataclass(frozen=True)
class AdmissionVerdict:
    admissible: bool
    total_size: float
    sizes: tuple[float, ...]

    def __bool__(self) -> bool:
        return self.admissible


@dataclass
class PrcgEquilibrium:
    """Efficient equilibrium of the joint game for an admitted user set."""

    rates: np.ndarray  # R*_k = omega_star, bit/s
    sizes: np.ndarray  # phi_star per user
    total_size: float
    powers: np.ndarray  # W, unclipped equilibrium powers
    utilities: np.ndarray  # bit/Joule
    sir_target: float  # gamma_star, common to all users
    power_capped: np.ndarray  # True where the equilibrium power exceeds the cap


def _packet_bits(user: PrcgUser, model: EfficiencyModel) -> int:
    return user.packet_bits if user.packet_bits is not None else model.packet_bits


def omega_star(user: PrcgUser, model: EfficiencyModel) -> float:
    """Equilibrium transmit rate making the delay bound tight at gamma_star."""
    m = _packet_bits(user, model)
    lam = user.qos.arrival_rate
    d = user.qos.delay_bound
    f_star = psr(model, gamma_star(model))
    dl = d * lam
    root = math.sqrt(1.0 + dl * dl + 2.0 * (1.0 - f_star) * dl)
    return (m / d) * (1.0 + dl + root) / (2.0 * f_star)


def phi_star(omega: float, bandwidth: float, gamma_star_value: float) -> float:
    """User size: share of the network consumed at equilibrium rate omega."""
    if not omega > 0.0:
        raise ValueError(f"omega must be > 0, got {omega!r}")
    if not bandwidth > 0.0:
        raise ValueError(f"bandwidth must be > 0, got {bandwidth!r}")
    return 1.0 / (1.0 + bandwidth / (omega * gamma_star_value))


def user_size(user: PrcgUser, params: SystemParams) -> float:
    """phi_star for a user under given system parameters."""
    return phi_star(
        omega_star(user, params.model), params.bandwidth, gamma_star(params.model)
    )


def admissible(users: Sequence[PrcgUser], params: SystemParams) -> AdmissionVerdict:
    """Strict admission test: total size < 1."""
    sizes = tuple(user_size(u, params) for u in users)
    total = sum(sizes)
    return AdmissionVerdict(admissible=total < 1.0, total_size=total, sizes=sizes)


def capacity_from_size(size: float) -> int:
    """Largest K with K*size < 1 (strict)."""
    if not 0.0 < size < 1.0:
        raise ValueError(f"size must lie in (0, 1), got {size!r}")
    k = max(1, math.ceil(1.0 / size) - 1)
    while (k + 1) * size < 1.0:
        k += 1
    while k > 1 and k * size >= 1.0:
        k -= 1
    return k


def network_capacity(user: PrcgUser, params: SystemParams) -> int:
    """Maximum number of identical users whose QoS can be accommodated."""
    return capacity_from_size(user_size(user, params))


def total_goodput(count: int, omega: float, f_star: float) -> float:
    """Aggregate reliably delivered rate of `count` equilibrium users."""
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count!r}")
    return count * omega * f_star


def rate_constraint_ok(user: PrcgUser, rate: float, packet_bits: int) -> bool:
    """Rate-feasibility constraint of the joint game.

    r/R < (D*R/M - 1) / (D*R/M - 1/2); equivalent to the required success
    probability being < 1. A rate below M/D cannot carry even one packet
    within the bound and is rejected outright; at exactly M/D the right
    side is zero and the constraint is simply unmet.
    """
    if not rate > 0.0:
        raise ValueError(f"rate must be > 0, got {rate!r}")
    x = user.qos.delay_bound * rate / packet_bits
    if x < 1.0:
        raise ValueError(
            f"delay bound {user.qos.delay_bound!r} s is smaller than the packet "
            f"transmission time {packet_bits / rate!r} s at rate {rate!r}"
        )
    r_source = user.qos.source_rate(packet_bits)
    return r_source / rate < (x - 1.0) / (x - 0.5)


def prcg_equilibrium(
    users: Sequence[PrcgUser], params: SystemParams
) -> PrcgEquilibrium:
    """Efficient Nash equilibrium (rates, powers, utilities) for a user set.

    Raises InfeasibleLoadError when the users are not admissible. Powers
    exceeding a user's cap are reported unclipped and flagged in
    `power_capped` so the caller can re-run admission with fewer users.
    """
    model = params.model
    g_star = gamma_star(model)
    f_star = psr(model, g_star)

    rates = np.array([omega_star(u, model) for u in users])
    sizes = np.array([phi_star(r, params.bandwidth, g_star) for r in rates])
    total = float(sizes.sum())
    if total >= 1.0:
        raise InfeasibleLoadError("sum_k phi_k", total)

    gains = np.array([u.gain for u in users])
    caps = np.array([u.max_power for u in users])
    q_total = g_star * params.noise_power * float((1.0 - sizes).sum()) / (1.0 - total)
    q = g_star * params.noise_power * (1.0 - sizes) + sizes * q_total
    powers = q / gains**2
    utilities = rates * f_star / powers

    return PrcgEquilibrium(
        rates=rates,
        sizes=sizes,
        total_size=total,
        powers=powers,
        utilities=utilities,
        sir_target=g_star,
        power_capped=powers > caps,
    )
