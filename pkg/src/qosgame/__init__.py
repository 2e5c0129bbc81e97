"""Delay-constrained, energy-efficient power and rate control games.

Computes Nash-equilibrium SIR targets, powers, rates, bits-per-Joule
utilities, admission feasibility, network capacity and goodput for
multiuser CDMA uplinks, and validates the closed forms against Monte Carlo
and best-response oracles.
"""

from .delay import (
    AverageDelaySpec,
    MG1SimResult,
    OutageDelaySpec,
    QueueState,
    RetransmissionSimResult,
    eta_hat,
    eta_tilde,
    gamma_hat,
    gamma_tilde,
    mg1_mean_wait,
    mg1_queue_sample,
    simulate_mg1,
    simulate_retransmissions,
    sir_target_infinite,
)
from .dynamics import (
    BestResponseRun,
    achieved_sir,
    best_response_step,
    run_best_response,
    write_trajectory_csv,
)
from .efficiency import (
    EXPONENTIAL,
    EfficiencyModel,
    PsrCurve,
    gamma_star,
    gamma_star_from_curve,
    psr,
    psr_derivative,
    psr_inverse,
)
from .errors import (
    ConfigError,
    InfeasibleLoadError,
    QosGameError,
    RateInfeasibleError,
    UnstableQueueError,
)
from .powergame import (
    ClassSpec,
    ClassTarget,
    EquilibriumOutcome,
    Feasibility,
    RadioEnv,
    ReceiverKind,
    SweepPoint,
    effective_load,
    equilibrium_powers_large_system,
    feasibility,
    finite_k_mf_powers,
    multiclass_utilities,
    pcg_sir_targets,
    utility_loss_sweep,
)
from .rategame import (
    AdmissionVerdict,
    PrcgEquilibrium,
    PrcgUser,
    SystemParams,
    admissible,
    capacity_from_size,
    network_capacity,
    omega_star,
    phi_star,
    prcg_equilibrium,
    rate_constraint_ok,
    total_goodput,
    user_size,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
