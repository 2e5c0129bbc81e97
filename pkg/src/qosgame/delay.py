"""Delay requirements and their translation into SIR lower bounds.

Two styles of requirement are supported:

* Outage style (infinite backlog): at most L transmissions per packet with
  probability >= beta. With independent retransmissions the transmission
  count is geometric in the success rate f, so the constraint is equivalent
  to f(gamma) >= eta_tilde(L, beta) = 1 - (1-beta)**(1/L), i.e. a SIR floor
  gamma_tilde = f^{-1}(eta_tilde).

* Average-delay style (finite backlog): Poisson packet arrivals at rate
  lambda feed a FIFO queue served over the radio link. Transmission time is
  tau = M/R per attempt and the service time is m*tau with m geometric in
  f, an M/G/1 queue. Its mean sojourn is
      wait = tau * (1 - lambda*tau/2) / (f - lambda*tau),    f > lambda*tau,
  so a bound wait <= D becomes f(gamma) >= eta_hat and a SIR floor
  gamma_hat = f^{-1}(eta_hat).

Seeded Monte Carlo counterparts of both closed forms live at the bottom of
the module; they are used as independent oracles by the validation suite.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .efficiency import EfficiencyModel, gamma_star, psr_inverse
from .errors import RateInfeasibleError, UnstableQueueError


@dataclass(frozen=True)
class OutageDelaySpec:
    """At most `max_transmissions` tries per packet with prob >= `confidence`."""

    max_transmissions: int  # L
    confidence: float  # beta

    def __post_init__(self) -> None:
        if int(self.max_transmissions) != self.max_transmissions or self.max_transmissions < 1:
            raise ValueError(
                f"max_transmissions must be an integer >= 1, got {self.max_transmissions!r}"
            )
        if not 0.0 < self.confidence < 1.0:
            raise ValueError(
                f"confidence must lie strictly in (0, 1), got {self.confidence!r}"
            )


@dataclass(frozen=True)
class AverageDelaySpec:
    """Mean total delay (queueing + service) bounded by `delay_bound` seconds."""

    arrival_rate: float  # lambda, packets/s
    delay_bound: float  # D, s

    def __post_init__(self) -> None:
        if not math.isfinite(self.arrival_rate) or self.arrival_rate < 0.0:
            raise ValueError(f"arrival_rate must be >= 0, got {self.arrival_rate!r}")
        if not self.delay_bound > 0.0:
            raise ValueError(f"delay_bound must be > 0, got {self.delay_bound!r}")

    def source_rate(self, packet_bits: int) -> float:
        """Average source rate r = M * lambda in bit/s."""
        return packet_bits * self.arrival_rate


def eta_tilde(spec: OutageDelaySpec) -> float:
    """Minimum success rate meeting the outage spec: 1 - (1-beta)**(1/L)."""
    # expm1/log1p form stays accurate for beta near 1
    return -math.expm1(math.log1p(-spec.confidence) / spec.max_transmissions)


def gamma_tilde(spec: OutageDelaySpec, model: EfficiencyModel) -> float:
    """SIR floor implied by the outage spec: f^{-1}(eta_tilde).

    Increasing in the confidence, decreasing in the transmission budget.
    """
    return psr_inverse(model, eta_tilde(spec))


def sir_target_infinite(spec: OutageDelaySpec, model: EfficiencyModel) -> float:
    """Equilibrium SIR target under an outage spec: max(gamma_tilde, gamma_star).

    The delay floor binds only when it exceeds the efficiency-optimal SIR.
    """
    return max(gamma_tilde(spec, model), gamma_star(model))


def mg1_mean_wait(arrival_rate: float, tx_time: float, success_prob: float) -> float:
    """Mean packet sojourn time of the retransmission queue.

        tau * (1 - lambda*tau/2) / (f - lambda*tau)

    Requires f > lambda*tau for stability; raises UnstableQueueError at or
    below the boundary.
    """
    if not tx_time > 0.0:
        raise ValueError(f"tx_time must be > 0, got {tx_time!r}")
    if arrival_rate < 0.0:
        raise ValueError(f"arrival_rate must be >= 0, got {arrival_rate!r}")
    if not 0.0 < success_prob <= 1.0:
        raise ValueError(f"success_prob must lie in (0, 1], got {success_prob!r}")
    load = arrival_rate * tx_time
    if success_prob <= load:
        raise UnstableQueueError(arrival_rate, tx_time, success_prob)
    return tx_time * (1.0 - 0.5 * load) / (success_prob - load)


def eta_hat(spec: AverageDelaySpec, rate: float, packet_bits: int) -> float:
    """Success rate that makes the mean sojourn exactly equal the bound.

        eta_hat = r/R + M/(D*R) - M*r/(2*D*R**2)
                = lambda*tau + tau/D - lambda*tau**2/(2*D),  tau = M/R.

    A value >= 1 means no success rate can meet the bound at this transmit
    rate (equivalently the rate-feasibility constraint of the joint game is
    violated); that is reported as RateInfeasibleError, never clamped.
    """
    if not rate > 0.0:
        raise ValueError(f"rate must be > 0, got {rate!r}")
    if packet_bits < 1:
        raise ValueError(f"packet_bits must be >= 1, got {packet_bits!r}")
    tau = packet_bits / rate
    load = spec.arrival_rate * tau
    eta = load + (tau / spec.delay_bound) * (1.0 - 0.5 * load)
    if eta >= 1.0:
        raise RateInfeasibleError(eta, rate, spec.arrival_rate, spec.delay_bound)
    return eta


def gamma_hat(spec: AverageDelaySpec, rate: float, model: EfficiencyModel) -> float:
    """SIR floor implied by the average-delay spec at a given transmit rate.

    At gamma_hat the queue's mean sojourn equals the bound exactly.
    """
    return psr_inverse(model, eta_hat(spec, rate, model.packet_bits))


# ---------------------------------------------------------------------------
# Monte Carlo oracles
# ---------------------------------------------------------------------------


@dataclass
class QueueState:
    """One realized sample path of the FIFO retransmission queue."""

    seed: int
    arrival_times: np.ndarray  # absolute, FIFO order
    service_times: np.ndarray  # multiples of tau
    waits: np.ndarray  # sojourn = queueing + service, per packet

    @property
    def departure_times(self) -> np.ndarray:
        return self.arrival_times + self.waits


@dataclass(frozen=True)
class MG1SimResult:
    mean_wait: float
    std_error: float
    n_packets: int
    seed: int


@dataclass(frozen=True)
class RetransmissionSimResult:
    within_budget_prob: float
    std_error: float
    n_samples: int
    seed: int


def mg1_queue_sample(
    arrival_rate: float, tx_time: float, success_prob: float, n_packets: int, seed: int
) -> QueueState:
    """Simulate the queue: Poisson arrivals, geometric-count service in tau.

    The per-packet sojourn is computed with the Lindley recursion in its
    reflected-random-walk form, which is exactly the FIFO single-server
    evolution. Deterministic for a given seed.
    """
    if not arrival_rate > 0.0:
        raise ValueError(f"arrival_rate must be > 0, got {arrival_rate!r}")
    if not tx_time > 0.0:
        raise ValueError(f"tx_time must be > 0, got {tx_time!r}")
    if not 0.0 < success_prob <= 1.0:
        raise ValueError(f"success_prob must lie in (0, 1], got {success_prob!r}")
    if n_packets < 1:
        raise ValueError(f"n_packets must be >= 1, got {n_packets!r}")
    if success_prob <= arrival_rate * tx_time:
        raise UnstableQueueError(arrival_rate, tx_time, success_prob)

    rng = np.random.default_rng(seed)
    gaps = rng.exponential(1.0 / arrival_rate, n_packets)
    services = tx_time * rng.geometric(success_prob, n_packets)

    # queue wait of packet k: running maximum of the net-input random walk
    walk = np.concatenate(([0.0], np.cumsum(services[:-1] - gaps[1:])))
    queue_wait = walk - np.minimum.accumulate(walk)
    return QueueState(
        seed=seed,
        arrival_times=np.cumsum(gaps),
        service_times=services,
        waits=queue_wait + services,
    )


def simulate_mg1(
    arrival_rate: float, tx_time: float, success_prob: float, n_packets: int, seed: int
) -> MG1SimResult:
    """Empirical mean sojourn with a batch-means standard error.

    Sojourns of successive packets are correlated, so the standard error is
    estimated from contiguous batch means rather than per-packet variance.
    """
    state = mg1_queue_sample(arrival_rate, tx_time, success_prob, n_packets, seed)
    waits = state.waits
    n = len(waits)
    mean = float(waits.mean())
    n_batches = 64
    if n >= 2 * n_batches:
        usable = (n // n_batches) * n_batches
        batch_means = waits[:usable].reshape(n_batches, -1).mean(axis=1)
        se = float(batch_means.std(ddof=1) / math.sqrt(n_batches))
    elif n > 1:
        se = float(waits.std(ddof=1) / math.sqrt(n))
    else:
        se = float("nan")
    return MG1SimResult(mean_wait=mean, std_error=se, n_packets=n, seed=seed)


def simulate_retransmissions(
    success_prob: float, max_transmissions: int, n_samples: int, seed: int
) -> RetransmissionSimResult:
    """Empirical Pr{transmission count <= L} for geometric retransmissions.

    The closed-form value is 1 - (1 - f)**L; binomial standard error.
    """
    if not 0.0 < success_prob <= 1.0:
        raise ValueError(f"success_prob must lie in (0, 1], got {success_prob!r}")
    if max_transmissions < 1:
        raise ValueError(f"max_transmissions must be >= 1, got {max_transmissions!r}")
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples!r}")
    rng = np.random.default_rng(seed)
    counts = rng.geometric(success_prob, n_samples)
    hits = counts <= max_transmissions
    p = float(hits.mean())
    se = math.sqrt(p * (1.0 - p) / n_samples)
    return RetransmissionSimResult(
        within_budget_prob=p, std_error=se, n_samples=n_samples, seed=seed
    )
