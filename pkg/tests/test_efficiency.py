import math

import mpmath as mp
import pytest

from qosgame import (
    EXPONENTIAL,
    EfficiencyModel,
    PsrCurve,
    gamma_star,
    gamma_star_from_curve,
    psr,
    psr_derivative,
    psr_inverse,
)

mp.mp.dps = 40

M100 = EfficiencyModel(packet_bits=100)
M2 = EfficiencyModel(packet_bits=2)


def mp_psr(gamma, m):
    return (1 - mp.e ** (-mp.mpf(gamma))) ** m


def mp_inverse(eta, m):
    """Bisection oracle for f(gamma) = eta at high precision."""
    lo, hi = mp.mpf("1e-12"), mp.mpf(200)
    for _ in range(200):
        mid = (lo + hi) / 2
        if mp_psr(mid, m) < eta:
            lo = mid
        else:
            hi = mid
    return float((lo + hi) / 2)


def mp_gamma_star(m):
    """Bisection oracle for exp(g) = 1 + m*g on [ln m, ln m + m]."""
    lo, hi = mp.log(m), mp.log(m) + m
    for _ in range(200):
        mid = (lo + hi) / 2
        if mp.e**mid - 1 - m * mid < 0:
            lo = mid
        else:
            hi = mid
    return float((lo + hi) / 2)


class TestPsr:
    def test_zero_sir_gives_zero(self):
        assert psr(M100, 0.0) == 0.0

    def test_value_against_high_precision(self):
        # direct evaluation of (1 - e^-6.4748)^100
        expected = float(mp_psr("6.4748", 100))
        assert psr(M100, 6.4748) == pytest.approx(expected, rel=1e-12)
        assert psr(M100, 6.4748) == pytest.approx(0.857, abs=5e-4)

    def test_saturates_at_one(self):
        assert psr(M100, 1000.0) == 1.0

    def test_strictly_increasing(self):
        grid = [0.05 * i for i in range(1, 400)]
        values = [psr(M100, g) for g in grid]
        assert all(b > a for a, b in zip(values, values[1:]))

    @pytest.mark.parametrize("bad", [-1.0, -1e-12, float("inf"), float("nan")])
    def test_domain_errors(self, bad):
        with pytest.raises(ValueError):
            psr(M100, bad)


class TestPsrDerivative:
    def test_zero_at_origin(self):
        assert psr_derivative(M100, 0.0) == 0.0

    @pytest.mark.parametrize("gamma", [1.0, 6.48, 12.0])
    def test_matches_central_finite_difference(self, gamma):
        # h balances truncation against cancellation (f is within 1e-3 of
        # its saturation value at gamma = 12)
        h = 1e-4
        oracle = (psr(M100, gamma + h) - psr(M100, gamma - h)) / (2 * h)
        assert psr_derivative(M100, gamma) == pytest.approx(oracle, rel=1e-6)

    def test_closed_form_m2(self):
        # 2 * e^-ln2 * (1 - e^-ln2) = 2 * 1/2 * 1/2
        assert psr_derivative(M2, math.log(2)) == pytest.approx(0.5, rel=1e-14)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            psr_derivative(M100, -0.5)


class TestPsrInverse:
    def test_class_a_threshold(self):
        got = psr_inverse(M100, 0.99)
        assert got == pytest.approx(mp_inverse(mp.mpf("0.99"), 100), rel=1e-10)
        assert got == pytest.approx(9.205, abs=1e-3)

    def test_outage_eta_example(self):
        eta = float(1 - mp.mpf("0.1") ** (mp.mpf(1) / 3))  # 0.53584...
        got = psr_inverse(M100, eta)
        assert got == pytest.approx(mp_inverse(eta, 100), rel=1e-10)
        assert got == pytest.approx(5.08, abs=1e-2)

    def test_round_trip_identity(self):
        assert psr_inverse(M100, psr(M100, 5.0)) == pytest.approx(5.0, rel=1e-12)

    def test_round_trip_grid(self):
        for i in range(50):
            gamma = 0.1 + (20.0 - 0.1) * i / 49
            assert psr_inverse(M100, psr(M100, gamma)) == pytest.approx(gamma, rel=1e-8)

    def test_strictly_increasing(self):
        etas = [0.001 + 0.998 * i / 200 for i in range(201)]
        values = [psr_inverse(M100, e) for e in etas]
        assert all(b > a for a, b in zip(values, values[1:]))

    @pytest.mark.parametrize("bad", [0.0, 1.0, -0.1, 1.1, float("nan")])
    def test_domain_errors(self, bad):
        with pytest.raises(ValueError):
            psr_inverse(M100, bad)


class TestGammaStar:
    def test_m100_value(self):
        g = gamma_star(M100)
        assert g == pytest.approx(6.48, abs=0.01)
        assert g == pytest.approx(mp_gamma_star(100), rel=1e-12)

    def test_m2_value(self):
        g = gamma_star(M2)
        assert g == pytest.approx(1.2564, abs=1e-4)
        assert g == pytest.approx(mp_gamma_star(2), rel=1e-12)

    @pytest.mark.parametrize("m", [2, 10, 100])
    def test_defining_equation_residual(self, m):
        model = EfficiencyModel(packet_bits=m)
        g = gamma_star(model)
        assert abs(psr(model, g) - g * psr_derivative(model, g)) < 1e-10 * psr(model, g)

    @pytest.mark.parametrize("m", [2, 10, 100, 500])
    def test_simplified_agrees_with_curve_path(self, m):
        model = EfficiencyModel(packet_bits=m)
        assert abs(gamma_star(model) - gamma_star_from_curve(model)) < 1e-9

    def test_maximizes_efficiency_on_grid(self):
        g_star = gamma_star(M100)
        step = 30.0 / 30000
        grid = [step * i for i in range(1, 30001)]
        best = max(grid, key=lambda g: psr(M100, g) / g)
        assert abs(best - g_star) <= step

    def test_increasing_in_packet_size(self):
        values = [gamma_star(EfficiencyModel(m)) for m in (2, 10, 50, 100, 500)]
        assert all(b > a for a, b in zip(values, values[1:]))


class TestModelValidation:
    @pytest.mark.parametrize("m", [1, 0, -3])
    def test_degenerate_packet_size_rejected(self, m):
        with pytest.raises(ValueError):
            EfficiencyModel(packet_bits=m)

    def test_builtin_curve_is_exponential(self):
        assert M100.curve is EXPONENTIAL


class TestCustomCurve:
    """Exercise the extension point with a curve lacking an analytic inverse."""

    CURVE = PsrCurve(
        name="exponential-no-inverse",
        value=EXPONENTIAL.value,
        derivative=EXPONENTIAL.derivative,
        inflection=EXPONENTIAL.inflection,
        inverse=None,
    )

    def test_numeric_inverse_matches_closed_form(self):
        model = EfficiencyModel(packet_bits=100, curve=self.CURVE)
        for eta in (0.01, 0.245, 0.5, 0.99):
            assert psr_inverse(model, eta) == pytest.approx(
                psr_inverse(M100, eta), rel=1e-10
            )

    def test_gamma_star_uses_generic_root(self):
        model = EfficiencyModel(packet_bits=100, curve=self.CURVE)
        assert gamma_star(model) == pytest.approx(gamma_star(M100), rel=1e-9)
