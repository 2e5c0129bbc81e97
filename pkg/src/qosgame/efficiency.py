"""Packet-success-rate model and the efficiency-optimal SIR.

The efficiency function f(gamma) maps output SIR (linear ratio) to packet
success rate. It is sigmoidal with f(0) = 0 and f(inf) = 1, so the energy
efficiency f(gamma)/gamma has a unique interior maximizer gamma_star: the
positive solution of f(gamma) = gamma * f'(gamma).

The built-in curve is f(gamma) = (1 - exp(-gamma))**M for an M-bit packet,
a good success-rate approximation for moderate-to-large M. For that curve
the gamma_star condition reduces algebraically to exp(gamma) = 1 + M*gamma,
the inverse is closed-form, and the inflection point sits at ln(M).

All SIR values here are linear ratios; dB conversion is presentation-layer
only and lives in the CLI.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional


def _check_gamma(gamma: float) -> float:
    gamma = float(gamma)
    if not math.isfinite(gamma) or gamma < 0.0:
        raise ValueError(f"SIR must be finite and nonnegative, got {gamma!r}")
    return gamma


def _exp_value(gamma: float, m: int) -> float:
    # -expm1(-g) = 1 - exp(-g), accurate for small g
    return (-math.expm1(-gamma)) ** m


def _exp_derivative(gamma: float, m: int) -> float:
    return m * math.exp(-gamma) * (-math.expm1(-gamma)) ** (m - 1)


def _exp_inverse(eta: float, m: int) -> float:
    # f(g) = eta  <=>  g = -ln(1 - eta**(1/M)), evaluated via expm1/log for
    # accuracy when eta**(1/M) is close to 1
    return -math.log(-math.expm1(math.log(eta) / m))


def _exp_inflection(m: int) -> float:
    return math.log(m)


@dataclass(frozen=True)
class PsrCurve:
    """Extension point for alternative success-rate curves.

    A curve must supply the success rate, its derivative in gamma, and the
    location of its single inflection point (the sigmoidicity certificate;
    the toolkit does not verify S-shape symbolically). An analytic inverse
    is optional; without one the inverse is solved numerically.

    All callables take (gamma, packet_bits).
    """

    name: str
    value: Callable[[float, int], float]
    derivative: Callable[[float, int], float]
    inflection: Callable[[int], float]
    inverse: Optional[Callable[[float, int], float]] = None


EXPONENTIAL = PsrCurve(
    name="exponential",
    value=_exp_value,
    derivative=_exp_derivative,
    inflection=_exp_inflection,
    inverse=_exp_inverse,
)


@dataclass(frozen=True)
class EfficiencyModel:
    """Success-rate curve bound to a packet size.

    packet_bits must be >= 2: with a single-bit packet the efficiency
    maximizer degenerates to zero SIR.
    """

    packet_bits: int
    curve: PsrCurve = EXPONENTIAL

    def __post_init__(self) -> None:
        if int(self.packet_bits) != self.packet_bits or self.packet_bits < 2:
            raise ValueError(
                f"packet_bits must be an integer >= 2, got {self.packet_bits!r}"
            )


def psr(model: EfficiencyModel, gamma: float) -> float:
    """Packet success rate f(gamma) in [0, 1]."""
    gamma = _check_gamma(gamma)
    return model.curve.value(gamma, model.packet_bits)


def psr_derivative(model: EfficiencyModel, gamma: float) -> float:
    """Derivative f'(gamma), nonnegative for an increasing curve."""
    gamma = _check_gamma(gamma)
    return model.curve.derivative(gamma, model.packet_bits)


def psr_inverse(model: EfficiencyModel, eta: float) -> float:
    """SIR gamma with f(gamma) = eta, for eta strictly inside (0, 1).

    eta = 1 would require infinite SIR and eta <= 0 has no preimage on the
    open positive axis, so both are rejected.
    """
    eta = float(eta)
    if not math.isfinite(eta) or not 0.0 < eta < 1.0:
        raise ValueError(f"success rate must lie strictly in (0, 1), got {eta!r}")
    if model.curve.inverse is not None:
        return model.curve.inverse(eta, model.packet_bits)

    f = lambda g: model.curve.value(g, model.packet_bits) - eta
    lo, hi = 0.0, max(model.curve.inflection(model.packet_bits), 1.0)
    while f(hi) <= 0.0:
        hi *= 2.0
    return _bisect_newton(
        f, lambda g: model.curve.derivative(g, model.packet_bits), lo, hi
    )


def gamma_star(model: EfficiencyModel) -> float:
    """SIR maximizing efficiency f(gamma)/gamma.

    This is the unique positive root of f(gamma) = gamma * f'(gamma). For the
    built-in exponential curve the equation simplifies to
    exp(gamma) = 1 + M*gamma, which is what is solved here; other curves go
    through the generic root finder on (f - gamma*f').
    """
    if model.curve is EXPONENTIAL or model.curve.name == "exponential":
        m = model.packet_bits
        lo = math.log(m)
        # bracket [ln M, ln M + M], capped well before exp() overflows; the
        # root sits barely above the inflection point ln M
        hi = min(lo + m, 700.0)
        return _bisect_newton(
            lambda g: math.expm1(g) - m * g,
            lambda g: math.exp(g) - m,
            lo,
            hi,
        )
    return gamma_star_from_curve(model)


def gamma_star_from_curve(model: EfficiencyModel) -> float:
    """gamma_star via the defining equation f = gamma*f', no simplification.

    Works for any registered curve; for the built-in curve it must agree
    with gamma_star() to well under 1e-9.
    """
    m = model.packet_bits
    f = model.curve.value
    fp = model.curve.derivative

    def residual(g: float) -> float:
        return g * fp(g, m) - f(g, m)

    # Above the inflection point f is concave, so f - g*f' crosses zero
    # exactly once; expand the upper end until the sign flips.
    lo = model.curve.inflection(m)
    hi = lo + 1.0
    while residual(hi) >= 0.0:
        hi = lo + 2.0 * (hi - lo)
    return _bisect_newton(residual, None, lo, hi)


def _bisect_newton(
    func: Callable[[float], float],
    dfunc: Optional[Callable[[float], float]],
    lo: float,
    hi: float,
    tol: float = 1e-12,
    max_iter: int = 256,
) -> float:
    """Bracketed bisection to `tol`, then a short Newton polish.

    Requires func(lo) and func(hi) of opposite sign (zero endpoints are
    returned directly). Bisection guarantees convergence on any continuous
    bracket; the polish pushes the last digits when a derivative is known.
    """
    flo, fhi = func(lo), func(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise ValueError(f"root not bracketed on [{lo}, {hi}]")

    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fmid = func(mid)
        if fmid == 0.0:
            return mid
        if flo * fmid < 0.0:
            hi = mid
        else:
            lo, flo = mid, fmid
        if hi - lo < tol:
            break

    x = 0.5 * (lo + hi)
    if dfunc is not None:
        for _ in range(4):
            d = dfunc(x)
            if d == 0.0:
                break
            step = func(x) / d
            if not lo - tol <= x - step <= hi + tol:
                break
            x -= step
            if abs(step) <= 1e-16 * max(1.0, abs(x)):
                break
    return x
