import numpy as np
from django.test import SimpleTestCase

from core.exceptions import DomainError
from core.services.series import PowerSeries


class PowerSeriesTests(SimpleTestCase):

    def test_product_is_truncated(self):
        product = PowerSeries.mul([1, 1], [1, -1], 4)
        np.testing.assert_allclose(product, [1, 0, -1, 0])
        self.assertEqual(len(PowerSeries.mul([1, 2, 3], [1, 2, 3], 2)), 2)

    def test_reciprocal_of_geometric_series(self):
        np.testing.assert_allclose(PowerSeries.reciprocal([1, -1], 6), np.ones(6))

    def test_reciprocal_needs_constant_term(self):
        with self.assertRaises(DomainError):
            PowerSeries.reciprocal([0, 1], 3)

    def test_log_of_geometric_series(self):
        n = 12
        log = PowerSeries.log(PowerSeries.reciprocal([1, -1], n), n)
        expected = np.concatenate(([0.0], 1.0 / np.arange(1, n)))
        np.testing.assert_allclose(log, expected, rtol=1e-14, atol=1e-15)

    def test_log_needs_unit_constant(self):
        with self.assertRaises(DomainError):
            PowerSeries.log([2, 1], 3)

    def test_division_undoes_product(self):
        a = np.array([1, 0.5 - 0.2j, 0.3, -0.1j])
        b = np.array([2, 1j, 0, 0.25])
        np.testing.assert_allclose(PowerSeries.div(PowerSeries.mul(a, b, 4), b, 4), a, atol=1e-15)

    def test_theta_shift_and_evaluate(self):
        np.testing.assert_allclose(PowerSeries.theta([5, 1, 1]), [0, 1, 2])
        np.testing.assert_allclose(PowerSeries.shift([1, 2, 3], 2, 4), [0, 0, 1, 2])
        np.testing.assert_allclose(PowerSeries.derivative([1, 2, 3]), [2, 6])
        self.assertAlmostEqual(PowerSeries.evaluate([1, 2, 3], 2.0), 17.0)
