import numpy as np
from django.test import SimpleTestCase, override_settings

from core.exceptions import DomainError, InvalidParameters
from core.models import Family, Parameters
from core.services.coefficient_service import CoefficientService


def random_parameters(rng):
    """a with |Re a|, |Im a| ≤ 1 and εb real of either sign."""
    a = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
    b = rng.uniform(0.2, 3.0) * rng.choice([-1.0, 1.0])
    return Parameters(a=a, b=b, epsilon=int(rng.choice([-1, 1])))


def rel_error(x, y):
    x, y = np.asarray(x, dtype=complex), np.asarray(y, dtype=complex)
    return float(np.max(np.abs(x - y) / np.maximum(1.0, np.maximum(np.abs(x), np.abs(y)))))


class ClosedFormTests(SimpleTestCase):

    def test_leading_u_coefficients(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            params = random_parameters(rng)
            a, eb = params.a, params.eb
            cb = np.cbrt(eb)
            for k in (1, -1):
                u = CoefficientService.u_coeffs(params, k, N=9)
                expected = np.zeros(10, dtype=complex)
                expected[0] = a * np.exp(-2j * np.pi * k / 3) / (3 * cb)
                expected[4] = -a * (a ** 2 + 1) / (81 * eb)
                expected[6] = a ** 2 * (a ** 2 + 1) * np.exp(-2j * np.pi * k / 3) / (243 * cb ** 4)
                expected[8] = a * (a ** 2 + 1) * np.exp(2j * np.pi * k / 3) / (243 * cb ** 5)
                self.assertLess(rel_error(u.values, expected), 1e-12)

    def test_u0_equals_a_over_six_alpha_squared(self):
        params = Parameters(a=0.4 - 0.3j, b=2.0)
        for k in (1, -1):
            constants = CoefficientService.derived_constants(params, k)
            u0 = CoefficientService.u_coeffs(params, k, N=0)[0]
            self.assertAlmostEqual(u0, params.a / (6 * constants.alpha_k ** 2), places=14)

    def test_leading_r_and_htilde(self):
        params = Parameters(a=0.3 + 0.1j, b=1.5)
        a = params.a
        for k in (1, -1):
            alpha2 = CoefficientService.derived_constants(params, k).alpha_k ** 2
            r = CoefficientService.r_coeffs(params, k, N=3)
            self.assertLess(rel_error(r[0], (a - 0.5j) / (3 * alpha2)), 1e-14)
            self.assertEqual(r[1], 0)
            self.assertLess(rel_error(r[2], 1j * a * (1 + 1j * a) / (18 * alpha2 ** 2)), 1e-14)
            self.assertEqual(r[3], 0)
            _, h = CoefficientService.d_and_htilde_coeffs(params, k, N=2)
            self.assertLess(rel_error(h[0], (12 * a ** 2 + 1) / (36 * alpha2)), 1e-14)
            self.assertEqual(h[1], 0)

    def test_a_zero_gives_vanishing_u_families(self):
        params = Parameters(a=0, b=1, epsilon=1)
        for k in (1, -1):
            u = CoefficientService.u_coeffs(params, k, N=12)
            self.assertFalse(any(u.values))
            self.assertFalse(any(CoefficientService.w_coeffs(u).values))
            self.assertFalse(any(CoefficientService.eta_coeffs(u).values))

    def test_odd_indices_vanish(self):
        params = Parameters(a=0.7 + 0.2j, b=-1.3)
        u = CoefficientService.u_coeffs(params, 1, N=25).as_array()
        self.assertFalse(np.any(u[1::2]))

    def test_table_metadata(self):
        params = Parameters(a=0.3, b=-2.0)
        table = CoefficientService.u_coeffs(params, -1, eps1=1, N=12)
        self.assertEqual(table.family, Family.U)
        self.assertEqual(table.N, 12)
        self.assertEqual(table.eps_labels, (1, params.eps2))
        self.assertEqual(CoefficientService.eta_coeffs(table).N, 10)

    def test_phase_label_is_checked_against_eb(self):
        params = Parameters(a=0.3, b=-2.0)
        table = CoefficientService.u_coeffs(params, 1, eps2=-1, N=8)
        self.assertEqual(table.eps_labels, (0, -1))
        self.assertEqual(table.params.eps2, -1)
        self.assertEqual(table.values, CoefficientService.u_coeffs(params, 1, eps2=1, N=8).values)
        self.assertEqual(CoefficientService.r_coeffs(params, 1, eps2=-1, N=8).eps_labels, (0, -1))
        for build in (CoefficientService.u_coeffs, CoefficientService.r_coeffs,
                      CoefficientService.phi_coeffs):
            with self.assertRaises(InvalidParameters):
                build(params, 1, eps2=0, N=8)
        with self.assertRaises(InvalidParameters):
            CoefficientService.hatted_family(Parameters(a=0.3, b=2.0), 1, 1, eps2_hat=1, N=8)

    def test_hatted_tables_use_minus_a(self):
        params = Parameters(a=0.25 + 0.5j, b=1.0)
        hatted = CoefficientService.hatted_family(params, 1, 1, N=10)
        flipped = CoefficientService.u_coeffs(params.with_a(-params.a), 1, N=10)
        np.testing.assert_allclose(hatted[Family.U_HAT].as_array(), flipped.as_array(), rtol=1e-14)
        self.assertEqual(hatted[Family.HSTAR_HAT].family, Family.HSTAR_HAT)

    def test_hatted_closed_forms(self):
        for params in (Parameters(a=0.3 + 0.1j, b=1.0), Parameters(a=-0.6 + 0.2j, b=-2.0, epsilon=-1)):
            a, eb = params.a, params.eb
            cb = eb ** (1.0 / 3.0)
            for k in (1, -1):
                tables = CoefficientService.hatted_family(params, k, 1, N=9)
                u = tables[Family.U_HAT].as_array()
                r = tables[Family.R_HAT].as_array()
                h = tables[Family.HSTAR_HAT].as_array()
                e2 = np.exp(2j * np.pi * k / 3)
                alpha2 = cb * e2 / 2
                self.assertLess(rel_error(u[0], -a / (3 * cb * e2)), 1e-14)
                self.assertLess(rel_error(u[4], a * (a ** 2 + 1) / (81 * eb)), 1e-14)
                self.assertLess(rel_error(u[6], a ** 2 * (a ** 2 + 1) / (243 * eb ** (4.0 / 3.0) * e2)), 1e-14)
                self.assertLess(rel_error(u[8], -a * (a ** 2 + 1) * e2 / (243 * eb ** (5.0 / 3.0))), 1e-14)
                self.assertEqual(u[9], 0)
                self.assertLess(rel_error(r[0], -(a + 0.5j) / (3 * alpha2)), 1e-14)
                self.assertLess(rel_error(r[2], 1j * a * (-1 + 1j * a) / (18 * alpha2 ** 2)), 1e-14)
                self.assertEqual(r[1], 0)
                self.assertEqual(r[3], 0)
                expected_h0 = -(12 * a ** 2 + 1) * np.exp(1j * np.pi * k / 3) / (18 * cb)
                self.assertLess(rel_error(h[0], expected_h0), 1e-14)

    def test_resonant_parameters_warn(self):
        params = Parameters(a=2j, b=1.0)
        with self.assertLogs('core.services.coefficient_service', level='WARNING'):
            table = CoefficientService.u_coeffs(params, 1, N=12)
        self.assertTrue(table.resonant)

    @override_settings(DP3_MAX_N=20)
    def test_order_cap(self):
        params = Parameters(a=0.3, b=1.0)
        with self.assertRaises(InvalidParameters):
            CoefficientService.u_coeffs(params, 1, N=21)
        with self.assertRaises(InvalidParameters):
            CoefficientService.u_coeffs(params, 1, N=-1)

    def test_bad_branch_index(self):
        with self.assertRaises(InvalidParameters):
            CoefficientService.u_coeffs(Parameters(a=0.3, b=1.0), 2, N=4)


class OracleTests(SimpleTestCase):

    def test_u_recurrence_matches_order_matching(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            params = random_parameters(rng)
            for k in (1, -1):
                for hatted in (False, True):
                    recurrence = CoefficientService.arrays(params, k, 20, hatted)['u'][:21]
                    oracle = CoefficientService.u_order_matching(params, k, 20, hatted)
                    self.assertLess(rel_error(recurrence, oracle), 1e-12)

    def test_w_matches_series_reciprocal(self):
        params = Parameters(a=0.6 - 0.4j, b=0.8, epsilon=-1)
        u = CoefficientService.u_coeffs(params, 1, N=30)
        w = CoefficientService.w_coeffs(u)
        self.assertLess(rel_error(w.values, CoefficientService.w_reciprocal_oracle(u.values)), 1e-12)

    def test_eta_matches_derivative_convolution(self):
        params = Parameters(a=-0.2 + 0.9j, b=1.7)
        u = CoefficientService.u_coeffs(params, -1, N=24)
        eta = CoefficientService.eta_coeffs(u)
        self.assertLess(rel_error(eta.values, CoefficientService.eta_convolution_oracle(u.values)), 1e-12)

    def test_r_matches_series_form(self):
        params = Parameters(a=0.3 + 0.1j, b=-1.2)
        for k in (1, -1):
            for hatted in (False, True):
                r = CoefficientService.arrays(params, k, 16, hatted)['r'][:17]
                oracle = CoefficientService.r_series_oracle(params, k, 16, hatted)
                self.assertLess(rel_error(r, oracle), 1e-12)

    def test_log_contribution_matches_series_log(self):
        params = Parameters(a=0.45 - 0.35j, b=2.2)
        u = CoefficientService.u_coeffs(params, 1, N=20)
        for m in range(2, 21):
            self.assertLess(
                rel_error(CoefficientService.log_series_contribution(u, m),
                          CoefficientService.log_oracle(u.values, m)),
                1e-12,
            )

    def test_log_contribution_low_orders(self):
        params = Parameters(a=0.3 + 0.2j, b=1.4, epsilon=-1)
        a, eb = params.a, params.eb
        cb = np.cbrt(eb)
        for k in (1, -1):
            u = CoefficientService.u_coeffs(params, k, N=8)
            log = CoefficientService.log_series_contribution
            self.assertLess(rel_error(log(u, 2), a * np.exp(-2j * np.pi * k / 3) / (3 * cb)), 1e-13)
            self.assertEqual(log(u, 3), 0)
            self.assertLess(rel_error(log(u, 4), a ** 2 * np.exp(-1j * np.pi * k / 3) / (18 * cb ** 2)), 1e-13)
            self.assertEqual(log(u, 5), 0)
            self.assertLess(rel_error(log(u, 6), -a / (81 * eb)), 1e-13)

    def test_log_contribution_domain(self):
        u = CoefficientService.u_coeffs(Parameters(a=0.3, b=1.0), 1, N=4)
        with self.assertRaises(DomainError):
            CoefficientService.log_series_contribution(u, 1)
        with self.assertRaises(DomainError):
            CoefficientService.log_series_contribution(u, 9)

    def test_phase_coefficients_against_log_identity(self):
        params = Parameters(a=0.35 - 0.15j, b=0.9)
        for k in (1, -1):
            data = CoefficientService.phi_arrays(params, k, 8)
            oracle = CoefficientService.nu_oracle(data['branch'], data['u'], data['w'], 4)
            self.assertLess(rel_error(data['nu'][1:5], oracle[1:5]), 1e-12)

    def test_mu_star_matches_log_derivative(self):
        params = Parameters(a=0.2 + 0.4j, b=1.1)
        nu, mu, _ = CoefficientService.phi_coeffs(params, 1, N=12)
        self.assertEqual(nu.family, Family.NU_TILDE)
        data = CoefficientService.phi_arrays(params, 1, 12)
        oracle = CoefficientService.mu_star_oracle(data['u'], 11)
        self.assertLess(rel_error(mu.as_array()[2:12], oracle[2:12]), 1e-12)

    def test_phase_equation_residual_at_a_zero(self):
        params = Parameters(a=0, b=1.0)
        for k in (1, -1):
            residual = CoefficientService.phi_ode_residual(params, k, 10)
            self.assertLess(float(np.max(np.abs(residual))), 1e-13)

    def test_phase_equation_residual_for_both_signs_of_eb(self):
        for params in (Parameters(a=0.3 + 0.1j, b=1.0), Parameters(a=0.3 + 0.1j, b=-1.0),
                       Parameters(a=-0.4 + 0.2j, b=1.5, epsilon=-1)):
            for k in (1, -1):
                residual = CoefficientService.phi_ode_residual(params, k, 10)
                self.assertLess(float(np.max(np.abs(residual))), 1e-10, (params, k))

    def test_negative_eb_phase_tables_are_the_mirrored_ones(self):
        params = Parameters(a=0.3 + 0.1j, b=-1.0)
        mirrored = Parameters(a=-params.a, b=-params.b)
        for k in (1, -1):
            nu = CoefficientService.phi_arrays(params, k, 12)['nu']
            expected = CoefficientService.phi_arrays(mirrored, k, 12)['nu']
            self.assertLess(rel_error(nu, expected), 1e-12)
