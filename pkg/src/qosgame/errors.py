"""Exception types shared across the toolkit.

Plain argument-domain violations (negative SIR, probability outside (0,1),
...) raise the builtin ValueError. The classes below mark *model* outcomes
that callers are expected to branch on.
"""


class QosGameError(Exception):
    """Base class for model-level failures."""


class UnstableQueueError(QosGameError):
    """Packet success rate does not exceed the offered load (f <= lambda*tau)."""

    def __init__(self, arrival_rate, tx_time, success_prob):
        self.arrival_rate = arrival_rate
        self.tx_time = tx_time
        self.success_prob = success_prob
        super().__init__(
            f"queue unstable: success probability {success_prob:.6g} <= "
            f"offered load lambda*tau = {arrival_rate * tx_time:.6g}"
        )


class RateInfeasibleError(QosGameError):
    """No packet success rate in (0,1) can meet the delay bound at this rate.

    Raised when the required success probability comes out at or above 1,
    i.e. the transmit rate is too small for the (arrival rate, delay bound)
    pair. Carries the offending threshold so callers can report it.
    """

    def __init__(self, eta_required, rate, arrival_rate, delay_bound):
        self.eta_required = eta_required
        self.rate = rate
        self.arrival_rate = arrival_rate
        self.delay_bound = delay_bound
        super().__init__(
            f"rate {rate:.6g} bit/s cannot meet delay bound {delay_bound:.6g} s "
            f"at arrival rate {arrival_rate:.6g} pkt/s: required success "
            f"probability {eta_required:.6g} >= 1"
        )


class InfeasibleLoadError(QosGameError):
    """An admission/feasibility condition of the form `load < 1` is violated.

    `condition` names the violated sum, `load` is its value.
    """

    def __init__(self, condition, load):
        self.condition = condition
        self.load = load
        super().__init__(f"infeasible: {condition} = {load:.6g} >= 1")


class ConfigError(QosGameError):
    """A scenario document is malformed. `field` names the offending entry."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"config field '{field}': {message}")
