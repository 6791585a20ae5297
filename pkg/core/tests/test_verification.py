import cmath
import math
from unittest import mock

import numpy as np
from django.test import SimpleTestCase
from scipy.integrate import DOP853

from core.exceptions import DomainError, InvalidParameters, SingularStep
from core.models import Axis, Parameters, RegimeLabel
from core.services.asymptotics_service import AsymptoticsService
from core.services.coefficient_service import CoefficientService
from core.services.monodromy_service import MonodromyService
from core.services.series import PowerSeries
from core.services.verification_service import VerificationService
from core.signals import check_completed

BASE = RegimeLabel.base(1)


def rel(x, y):
    return abs(x - y) / max(1e-300, abs(x), abs(y))


class EquationTests(SimpleTestCase):

    def setUp(self):
        self.params = Parameters(a=0, b=1.0)
        self.u, self.up = VerificationService.exact_solution(self.params)

    def test_rhs_on_algebraic_solution(self):
        c0 = CoefficientService.branch(self.params, 1).c0
        tau = 3.0
        upp = VerificationService.dp3_rhs(self.params, tau, self.u(tau), self.up(tau))
        self.assertLess(rel(upp, -2 * c0 / 9 * tau ** (-5.0 / 3.0)), 1e-13)

    def test_taylor_jet_reproduces_algebraic_solution(self):
        tau0, h = 2.0, 0.1
        jet = VerificationService.taylor_jet(self.params, tau0, self.u(tau0), self.up(tau0), order=16)
        self.assertLess(rel(PowerSeries.evaluate(jet, h), self.u(tau0 + h)), 1e-13)

    def test_exact_solution_needs_a_zero(self):
        with self.assertRaises(DomainError):
            VerificationService.exact_solution(Parameters(a=0.1, b=1.0))

    def test_pole_proximity(self):
        with self.assertRaises(SingularStep) as caught:
            VerificationService.dp3_rhs(self.params, 1.5, 0j, 1.0)
        self.assertEqual(caught.exception.tau, 1.5)


class IdentityTests(SimpleTestCase):

    def test_closure_identities_hold_pointwise(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            params = Parameters(a=complex(*rng.uniform(-1, 1, 2)), b=rng.uniform(0.3, 2.0))
            tau = rng.uniform(1.0, 30.0)
            u = complex(*rng.uniform(0.2, 2.0, 2))
            up = complex(*rng.uniform(-1, 1, 2))
            residuals = VerificationService.identity_residuals(params, tau, u, up)
            self.assertLess(max(residuals.values()), 1e-12, residuals)

    def test_sigma_form_on_algebraic_solution(self):
        params = Parameters(a=0, b=1.0)
        u, up = VerificationService.exact_solution(params)
        self.assertLess(VerificationService.sigma_form_jet_residual(params, 5.0, u(5.0), up(5.0)), 1e-12)

    def test_sigma_form_on_general_data(self):
        params = Parameters(a=0.3 + 0.1j, b=1.0)
        tau0, u0, up0 = 3.0, 0.8 + 0.3j, 0.1 - 0.2j
        self.assertLess(VerificationService.sigma_form_jet_residual(params, tau0, u0, up0), 1e-9)
        sigma_fn = VerificationService.jet_sigma_fn(params, tau0, u0, up0)
        residual = VerificationService.sigma_form_residual(sigma_fn, params, tau0, h=1e-2, relative=True)
        self.assertLess(residual, 1e-6)


class IntegrationTests(SimpleTestCase):

    def _max_error(self, rel_tol, tau0=100.0, tau1=10.0):
        params = Parameters(a=0, b=1.0)
        u, up = VerificationService.exact_solution(params)
        trajectory = VerificationService.integrate(params, tau0, u(tau0), up(tau0), tau1, rel_tol=rel_tol)
        self.assertFalse(trajectory.truncated)
        return max(rel(value, u(tau)) for tau, value in zip(trajectory.tau_grid, trajectory.u))

    def test_algebraic_solution_is_followed(self):
        self.assertLess(self._max_error(1e-11), 1e-9)

    def test_error_shrinks_with_tolerance(self):
        loose = self._max_error(1e-6, 50.0, 5.0)
        tight = self._max_error(1e-8, 50.0, 5.0)
        self.assertGreaterEqual(loose, 4 * tight)

    def test_statistics_and_samples(self):
        params = Parameters(a=0, b=1.0)
        u, up = VerificationService.exact_solution(params)
        trajectory = VerificationService.integrate(params, 20.0, u(20.0), up(20.0), 10.0, n_samples=11)
        self.assertEqual(len(trajectory.tau_grid), 11)
        self.assertEqual(trajectory.stats.status, 'finished')
        self.assertGreater(trajectory.stats.steps, 0)
        self.assertGreaterEqual(trajectory.stats.rejected, 0)
        self.assertAlmostEqual(trajectory.tau_grid[-1], 10.0)

    def test_oversized_first_step_is_counted_as_rejected(self):

        class GreedyStart(DOP853):
            def __init__(self, *args, **kwargs):
                super().__init__(*args, first_step=1.0, **kwargs)

        params = Parameters(a=0, b=1.0)
        u, up = VerificationService.exact_solution(params)
        with mock.patch('core.services.verification_service.DOP853', GreedyStart):
            trajectory = VerificationService.integrate(params, 100.0, u(100.0), up(100.0), 10.0, n_samples=3)
        stats = trajectory.stats
        self.assertGreaterEqual(stats.rejected, 1)
        self.assertEqual(stats.status, 'finished')
        self.assertLessEqual(DOP853.n_stages * (stats.steps + stats.rejected), stats.nfev)

    def test_reversed_integration_returns_to_start(self):
        params = Parameters(a=0.3, b=1.0)
        u0 = AsymptoticsService.eval_u(params, BASE, None, 20.0, 8).power_part
        up0 = AsymptoticsService.eval_u_prime(params, BASE, 20.0, 8)
        out = VerificationService.integrate(params, 20.0, u0, up0, 10.0)
        back = VerificationService.integrate(params, 10.0, out.u[-1], out.u_prime[-1], 20.0)
        self.assertLess(rel(back.u[-1], u0), 1e-8)
        self.assertLess(rel(back.u_prime[-1], up0), 1e-8)

    def test_trajectory_satisfies_identities(self):
        params = Parameters(a=0.3 + 0.1j, b=1.0)
        u0 = AsymptoticsService.eval_u(params, BASE, None, 40.0, 10).power_part
        up0 = AsymptoticsService.eval_u_prime(params, BASE, 40.0, 10)
        trajectory = VerificationService.integrate(params, 40.0, u0, up0, 20.0, n_samples=11)
        self.assertTrue(VerificationService.trajectory_identities(params, trajectory).passed)

    def test_empty_segment(self):
        with self.assertRaises(InvalidParameters):
            VerificationService.integrate(Parameters(a=0, b=1.0), 5.0, 1.0, 0.1, 5.0)


class DecayTests(SimpleTestCase):

    def test_fit_of_exact_power_law(self):
        taus = [10.0, 20.0, 40.0, 80.0]
        fit = VerificationService.decay_order_fit(taus, [3 * t ** -2 for t in taus])
        self.assertAlmostEqual(fit.exponent, -2.0, places=12)
        self.assertAlmostEqual(math.exp(fit.intercept), 3.0, places=10)
        self.assertFalse(fit.saturated)

    def test_fit_flags_saturation(self):
        fit = VerificationService.decay_order_fit([10.0, 20.0, 40.0], [1e-6, 1e-20, 1e-22])
        self.assertTrue(fit.saturated)

    def test_fit_needs_three_points(self):
        with self.assertRaises(InvalidParameters):
            VerificationService.decay_order_fit([10.0, 20.0], [1.0, 0.5])

    def test_truncation_residual_decays_at_expected_rate(self):
        params = Parameters(a=0.3 + 0.1j, b=1.0)
        for k in (1, -1):
            for N in (6, 9, 12):
                report = VerificationService.truncation_report(
                    params, RegimeLabel.base(k), N, (40.0, 80.0, 160.0)
                )
                self.assertTrue(report.passed, f'k={k} N={N}: {report.fitted_decay_exponent}')
                omitted = VerificationService.first_omitted_index(params, k, N)
                self.assertEqual(report.expected_exponent, -(omitted + 3) / 3)

    def test_phase_derivative_consistency(self):
        params = Parameters(a=0.3, b=1.0)
        point = MonodromyService.complete_case2(params.a, 0, 1.0)
        report = VerificationService.phi_consistency(params, BASE, point, 4, (20.0, 35.0, 50.0, 80.0))
        self.assertTrue(report.passed, report.fitted_decay_exponent)
        self.assertEqual(report.expected_exponent, -3.0)

    def test_phase_derivative_consistency_for_negative_eb(self):
        params = Parameters(a=0.3 + 0.1j, b=-1.0)
        regime = RegimeLabel(Axis.REAL, 0, 1, 1, 0, 1)
        image = MonodromyService.complete_case2(params.a, 0, 1.0)
        taus = tuple(t * regime.rotation() for t in (20.0, 35.0, 50.0, 80.0))
        report = VerificationService.phi_consistency(params, regime, image, 4, taus,
                                                     already_transformed=True)
        self.assertTrue(report.passed, report.fitted_decay_exponent)
        self.assertEqual(report.expected_exponent, -3.0)


class InstantonTests(SimpleTestCase):

    def test_balance_identities(self):
        for params in (Parameters(a=0.3 + 0.1j, b=1.0), Parameters(a=0.7, b=-2.5, epsilon=-1)):
            for k in (1, -1):
                report = VerificationService.instanton_exponent_check(params, k, s00=0.2 + 0.1j)
                self.assertTrue(report.passed, (k, report.details))
                self.assertLess(abs(report.details['iota_1_value']), 1e-10)

    def test_riccati_constant_term_vanishes(self):
        g = VerificationService.riccati_series(Parameters(a=0.4, b=1.0))
        self.assertLess(abs(g[0]), 1e-10)

    def test_negative_branch_mirrors_positive_branch_for_real_a(self):
        params = Parameters(a=0.4, b=1.0)
        plus = VerificationService.riccati_series(params, 1)
        minus = VerificationService.riccati_series(params, -1)
        np.testing.assert_allclose(minus, np.conj(plus), rtol=0, atol=1e-12)

    def test_negative_branch_amplitude(self):
        params = Parameters(a=0.3 + 0.1j, b=1.0)
        s00 = 0.2 + 0.1j
        report = VerificationService.instanton_exponent_check(params, -1, s00)
        a = params.a
        expected = (
            1j * cmath.exp(-1j * math.pi / 4) * cmath.exp(1j * math.pi / 3)
            * (2 + math.sqrt(3)) ** (-1j * a) * (s00 - 1j * cmath.exp(-math.pi * a))
            / (math.sqrt(2 * math.pi) * 3 ** 0.25)
        )
        self.assertTrue(report.passed, report.details)
        self.assertLess(rel(report.details['amplitude'], expected), 1e-12)
        self.assertEqual(report.details['k'], -1)

    def test_negative_eb_makes_the_amplitude_coefficient_vanish(self):
        params = Parameters(a=0.3 + 0.1j, b=-1.0)
        for k in (1, -1):
            report = VerificationService.instanton_exponent_check(params, k, s00=0.2)
            self.assertTrue(report.passed, (k, report.details))
            self.assertIn('amplitude_coefficient', report.details)
            self.assertNotIn('amplitude', report.details)
            self.assertLess(abs(report.details['linear_coefficient']), 1e-12)

    def test_positive_eb_amplitude_coefficient(self):
        coefficient, _ = VerificationService.instanton_linear_coefficient(Parameters(a=0.3, b=2.0), -1)
        self.assertLess(rel(coefficient, 4 * math.sqrt(3) * (math.sqrt(3) + 1)), 1e-13)


class TransSeriesAgainstOdeTests(SimpleTestCase):

    def test_algebraic_solution_window(self):
        params = Parameters(a=0, b=1e-3)
        report = VerificationService.asymptotic_vs_ode(params, BASE, None, 8, 100.0, 50.0)
        self.assertTrue(report.passed, report.details['crossover'])

    def test_tronquee_window(self):
        params = Parameters(a=0.3, b=1.0)
        s00 = 1j * cmath.exp(-math.pi * params.a)
        report = VerificationService.asymptotic_vs_ode(params, BASE, s00, 8, 60.0, 58.0, n_points=5)
        self.assertTrue(report.passed, report.details['crossover'])
        self.assertFalse(report.details['truncated'])

    def test_tronquee_at_order_twelve(self):
        params = Parameters(a=0.3 + 0.1j, b=1.0)
        s00 = 1j * cmath.exp(-math.pi * params.a)
        report = VerificationService.asymptotic_vs_ode(params, BASE, s00, 12, 100.0, 98.0, n_points=5)
        self.assertTrue(report.passed, report.details['crossover'])

    def test_inward_integration_amplifies_the_decaying_mode(self):
        # a rounding-level perturbation at τ = 100 reaches O(|u|) before τ = 40
        params = Parameters(a=0.3 + 0.1j, b=1.0)
        growth = (AsymptoticsService.exp_magnitude(params, 1, 40.0, BASE)
                  / AsymptoticsService.exp_magnitude(params, 1, 100.0, BASE))
        self.assertGreater(growth, 1e18)

    def test_exponential_amplitude_is_recovered(self):
        params = Parameters(a=0, b=1.0)
        report = VerificationService.exponential_fit(params, BASE, 0j, 8, 6.0, 2.0)
        self.assertTrue(report.passed, report.details)
        self.assertGreater(report.details['expected_C'], 0)


class SignalTests(SimpleTestCase):

    def test_checks_announce_themselves(self):
        handler = mock.Mock()
        check_completed.connect(handler, weak=False)
        self.addCleanup(check_completed.disconnect, handler)
        VerificationService.instanton_exponent_check(Parameters(a=0.3, b=1.0))
        handler.assert_called_once()
        self.assertEqual(handler.call_args.kwargs['name'], 'instanton')
        self.assertTrue(handler.call_args.kwargs['report'].passed)

    def test_failed_check_is_logged(self):
        taus = [10.0, 20.0, 40.0]
        with self.assertLogs('core.signals', level='WARNING'):
            VerificationService.truncation_report(Parameters(a=0, b=1.0), BASE, 6, taus)
