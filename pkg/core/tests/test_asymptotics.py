import cmath
import math

import numpy as np
from django.test import SimpleTestCase

from core.exceptions import InvalidCase, InvalidParameters
from core.models import Axis, Case, Parameters, Quantity, RegimeLabel
from core.services.asymptotics_service import AUTO, AsymptoticsService
from core.services.coefficient_service import CoefficientService
from core.services.monodromy_service import MonodromyService
from core.services.verification_service import VerificationService

BASE = RegimeLabel.base(1)


def rel(x, y):
    return abs(x - y) / max(1e-300, abs(x), abs(y))


class PowerPartTests(SimpleTestCase):

    def test_a_zero_is_the_algebraic_solution(self):
        params = Parameters(a=0, b=1.0)
        for k in (1, -1):
            c0 = CoefficientService.branch(params, k).c0
            for tau in (3.0, 50.0, 1e4):
                value = AsymptoticsService.eval_u(params, RegimeLabel.base(k), None, tau, 12)
                self.assertLess(rel(value.power_part, c0 * tau ** (1.0 / 3.0)), 1e-14)
                self.assertEqual(value.exp_part, 0)
                self.assertEqual(value.next_term_proxy, 0.0)

    def test_c0_closed_form(self):
        params = Parameters(a=0.3, b=-2.0, epsilon=1)
        eb = params.eb
        for k in (1, -1):
            c0 = CoefficientService.branch(params, k).c0
            expected = np.cbrt(eb) ** 2 * cmath.exp(-2j * math.pi * k / 3) / 2
            self.assertLess(rel(c0, expected), 1e-14)

    def test_total_is_power_plus_exponential(self):
        params = Parameters(a=0.3 + 0.1j, b=1.0)
        value = AsymptoticsService.eval_u(params, BASE, 0.5 + 0.2j, 30.0, 10)
        self.assertEqual(value.total, value.power_part + value.exp_part)
        self.assertNotEqual(value.exp_part, 0)
        self.assertEqual(value.quantity, Quantity.U)

    def test_amplitude_vanishes_for_tronquee_multiplier(self):
        params = Parameters(a=0.3 + 0.1j, b=1.0)
        s00 = 1j * cmath.exp(-math.pi * params.a)
        self.assertLess(abs(AsymptoticsService.amplitude_A(params, 1, s00).value), 1e-15)
        value = AsymptoticsService.eval_u(params, BASE, s00, 40.0, 12)
        self.assertLess(abs(value.exp_part), 1e-15 * abs(value.power_part))

    def test_exponential_magnitude(self):
        params = Parameters(a=0.3, b=1.0)
        theta, beta = AsymptoticsService.theta_beta(params, 1, 8.0)
        self.assertLess(rel(theta, 1.5 * math.sqrt(3) * 8.0 ** (2.0 / 3.0)), 1e-14)
        self.assertLess(rel(beta, 4.5 * 8.0 ** (2.0 / 3.0)), 1e-14)
        magnitude = AsymptoticsService.exp_magnitude(params, 1, 8.0, BASE)
        self.assertLess(rel(magnitude, math.exp(-beta.real)), 1e-12)

    def test_proxy_decreases_with_tau(self):
        params = Parameters(a=0.3 + 0.1j, b=1.0)
        proxies = [AsymptoticsService.eval_u(params, BASE, None, tau, 8).next_term_proxy
                   for tau in (20.0, 40.0, 80.0)]
        self.assertGreater(proxies[0], proxies[1])
        self.assertGreater(proxies[1], proxies[2])

    def test_auto_order(self):
        params = Parameters(a=0.6 + 0.3j, b=1.0)
        N = AsymptoticsService.optimal_order(params, BASE, 5.0)
        value = AsymptoticsService.eval_u(params, BASE, None, 5.0, AUTO)
        self.assertEqual(value.order_N, N)
        self.assertGreaterEqual(N, 0)

    def test_u_prime_matches_difference_quotient(self):
        params = Parameters(a=0.3 + 0.1j, b=1.0)
        tau, h = 40.0, 1e-3

        def u(z):
            return AsymptoticsService.eval_u(params, BASE, None, z, 12).power_part

        quotient = (u(tau + h) - u(tau - h)) / (2 * h)
        exact = AsymptoticsService.eval_u_prime(params, BASE, tau, 12)
        self.assertLess(rel(quotient, exact), 1e-8)


class AuxiliaryFunctionTests(SimpleTestCase):
    """
    f−, f+, ℋ and σ evaluated from their own coefficient families agree with
    the same quantities computed pointwise from the u series.
    """

    REGIMES = (
        (Parameters(a=0.3 + 0.1j, b=1.0), RegimeLabel(Axis.REAL, 0, 0, 0, 0, 1)),
        (Parameters(a=0.3 + 0.1j, b=1.0), RegimeLabel(Axis.REAL, 0, 0, 0, 0, -1)),
        (Parameters(a=-0.2 + 0.4j, b=2.0, epsilon=-1), RegimeLabel(Axis.REAL, 0, 1, 1, 0, 1)),
        (Parameters(a=0.3 + 0.1j, b=1.0), RegimeLabel(Axis.IMAGINARY, 1, 0, 1, 0, 1)),
    )

    def test_power_parts_are_consistent(self):
        tau_magnitude = 2e3
        for params, regime in self.REGIMES:
            tau = tau_magnitude * regime.rotation()
            u = AsymptoticsService.eval_u(params, regime, None, tau, 14).power_part
            up = AsymptoticsService.eval_u_prime(params, regime, tau, 14)
            pair = AsymptoticsService.pair(params, regime)
            pointwise = VerificationService.derived(params, tau, u, up, pair)
            for quantity, key in ((Quantity.F_MINUS, 'f_minus'), (Quantity.F_PLUS, 'f_plus'),
                                  (Quantity.H, 'H'), (Quantity.SIGMA, 'sigma')):
                series = AsymptoticsService.evaluate(quantity, params, regime, None, tau, 14)
                self.assertLess(
                    rel(series.power_part, complex(pointwise[key])), 1e-9,
                    f'{quantity.value} in {regime}',
                )

    def test_u_prime_wraps_into_evaluation(self):
        params = Parameters(a=0.3, b=1.0)
        result = AsymptoticsService.evaluate(Quantity.U_PRIME, params, BASE, None, 10.0, 6)
        self.assertEqual(result.quantity, Quantity.U_PRIME)
        self.assertEqual(result.total, AsymptoticsService.eval_u_prime(params, BASE, 10.0, 6))

    def test_u_prime_carries_proxy_and_exponential_size(self):
        params = Parameters(a=0.3 + 0.1j, b=1.0)
        results = [AsymptoticsService.evaluate(Quantity.U_PRIME, params, BASE, 0.5 + 0.2j, tau, 8)
                   for tau in (20.0, 40.0)]
        for result in results:
            self.assertGreater(result.next_term_proxy, 0)
            self.assertLess(result.next_term_proxy, abs(result.power_part))
            self.assertGreater(result.exp_magnitude, AsymptoticsService.exp_magnitude(params, 1, result.tau, BASE))
            self.assertNotEqual(result.exp_part, 0)
            full = AsymptoticsService.eval_u_prime(params, BASE, result.tau, 8, monodromy=0.5 + 0.2j,
                                                   include_exp=True)
            self.assertLess(rel(result.total, full), 1e-14)
        self.assertGreater(results[0].next_term_proxy, results[1].next_term_proxy)


class MonodromyArgumentTests(SimpleTestCase):

    def test_case_one_point_is_rejected(self):
        point = MonodromyService.sample_point(Case.CASE_I, 0)
        params = Parameters(a=point.a, b=1.0)
        with self.assertRaises(InvalidCase):
            AsymptoticsService.eval_u(params, BASE, point, 20.0, 8)

    def test_wrong_branch_is_rejected(self):
        point = MonodromyService.sample_point(Case.CASE_III_KMINUS, 0)
        params = Parameters(a=point.a, b=1.0)
        with self.assertRaises(InvalidCase):
            AsymptoticsService.eval_u(params, BASE, point, 20.0, 8)

    def test_mismatched_a_is_rejected(self):
        point = MonodromyService.sample_point(Case.CASE_II_KPLUS, 0)
        params = Parameters(a=point.a + 0.5, b=1.0)
        with self.assertRaises(InvalidParameters):
            AsymptoticsService.eval_u(params, BASE, point, 20.0, 8)

    def test_point_and_bare_multiplier_agree(self):
        point = MonodromyService.sample_point(Case.CASE_II_KPLUS, 4)
        params = Parameters(a=point.a, b=1.0)
        with_point = AsymptoticsService.eval_u(params, BASE, point, 25.0, 8)
        with_s00 = AsymptoticsService.eval_u(params, BASE, point.s00, 25.0, 8)
        self.assertLess(rel(with_point.total, with_s00.total), 1e-14)

    def test_regime_evaluation_is_the_base_series_of_the_mapped_point(self):
        params = Parameters(a=0.3 + 0.1j, b=1.0)
        g11 = 1.1 + 0.3j
        # g12 = 0, so the (−1, 0, 0 | 0) image has g22 = 0
        case_one = MonodromyService.complete_case1(params.a, g11, 0, 0.7 - 0.4j, 1 / g11)
        case_two = MonodromyService.complete_case2(params.a, 0.2 + 0.1j, 0.9 - 0.5j)
        checks = (
            (RegimeLabel(Axis.REAL, -1, 0, 0, 0, 1), case_one, -40.0),
            (RegimeLabel(Axis.REAL, 0, 0, 0, 1, 1), case_two, 40.0),
        )
        for regime, point, tau in checks:
            image = MonodromyService.transformed_for_regime(regime, point)
            self.assertEqual(MonodromyService.classify(image).k, 1)
            mu = regime.rotation()
            value = AsymptoticsService.eval_u(params, regime, point, tau, 8)
            base = AsymptoticsService.eval_u(params, BASE, image.s00, regime.to_t(tau), 8)
            self.assertNotEqual(base.exp_part, 0)
            self.assertLess(rel(value.total, base.total / mu), 1e-12)
            self.assertLess(rel(value.exp_part, base.exp_part / mu), 1e-12)

    def test_phase_needs_full_point(self):
        params = Parameters(a=0.3, b=1.0)
        with self.assertRaises(InvalidParameters):
            AsymptoticsService.eval_phi(params, BASE, 0.2, 20.0, 8)

    def test_phase_is_reduced_mod_two_pi(self):
        params = Parameters(a=0.3, b=1.0)
        point = MonodromyService.complete_case2(params.a, 0.1, 1.3)
        value = AsymptoticsService.eval_phi(params, BASE, point, 50.0, 8)
        self.assertTrue(value.mod_2pi)
        self.assertGreater(value.power_part.real, -math.pi)
        self.assertLessEqual(value.power_part.real, math.pi)

    def test_regime_must_match_sign_of_eb(self):
        params = Parameters(a=0.3, b=-1.0)
        with self.assertRaises(InvalidParameters):
            AsymptoticsService.eval_u(params, BASE, None, 10.0, 6)

    def test_zero_tau(self):
        with self.assertRaises(InvalidParameters):
            AsymptoticsService.eval_u(Parameters(a=0.3, b=1.0), BASE, None, 0, 6)
