"""
Business Logic Layer: Truncated Power Series
Coefficient-array arithmetic used by the recurrence oracles and by the
residual and Taylor-jet computations of the verification harness.
A series is a 1-D complex numpy array c with value Σ c[j] x^j.
"""
import numpy as np

from core.exceptions import DomainError


class PowerSeries:
    """
    Static helpers over truncated power series.
    All results are truncated to the requested length n (coefficients of
    x^0 .. x^{n-1}).
    """

    @staticmethod
    def coerce(c, n=None):
        """Return a complex array, zero-padded or cut to length n."""
        c = np.asarray(c, dtype=complex)
        if n is None:
            return c.copy()
        out = np.zeros(n, dtype=complex)
        m = min(n, len(c))
        out[:m] = c[:m]
        return out

    @staticmethod
    def mul(a, b, n):
        """Product of two series, truncated to n terms."""
        a = np.asarray(a, dtype=complex)[:n]
        b = np.asarray(b, dtype=complex)[:n]
        if len(a) == 0 or len(b) == 0:
            return np.zeros(n, dtype=complex)
        return PowerSeries.coerce(np.convolve(a, b), n)

    @staticmethod
    def reciprocal(a, n):
        """
        1/a truncated to n terms.

        Args:
            a: series with a nonzero constant term
            n: number of output terms

        Returns:
            ndarray: coefficients of 1/a
        """
        a = PowerSeries.coerce(a, n)
        if a[0] == 0:
            raise DomainError('series reciprocal needs a nonzero constant term')
        out = np.zeros(n, dtype=complex)
        out[0] = 1.0 / a[0]
        for j in range(1, n):
            out[j] = -np.dot(a[1:j + 1], out[j - 1::-1][:j]) / a[0]
        return out

    @staticmethod
    def div(a, b, n):
        return PowerSeries.mul(a, PowerSeries.reciprocal(b, n), n)

    @staticmethod
    def theta(a):
        """Euler operator x d/dx."""
        a = np.asarray(a, dtype=complex)
        return a * np.arange(len(a))

    @staticmethod
    def derivative(a):
        """d/dx, one term shorter."""
        a = np.asarray(a, dtype=complex)
        if len(a) <= 1:
            return np.zeros(1, dtype=complex)
        return a[1:] * np.arange(1, len(a))

    @staticmethod
    def log(a, n):
        """
        log(a) for a series with constant term 1, via θ log a = θa / a.
        """
        a = PowerSeries.coerce(a, n)
        if abs(a[0] - 1) > 1e-14:
            raise DomainError('series logarithm needs constant term 1')
        ratio = PowerSeries.div(PowerSeries.theta(a), a, n)
        out = np.zeros(n, dtype=complex)
        out[1:] = ratio[1:] / np.arange(1, n)
        return out

    @staticmethod
    def shift(a, k, n):
        """Multiply by x^k (k ≥ 0) and truncate."""
        out = np.zeros(n, dtype=complex)
        a = np.asarray(a, dtype=complex)
        if k < n:
            m = min(len(a), n - k)
            out[k:k + m] = a[:m]
        return out

    @staticmethod
    def evaluate(a, x):
        """Horner evaluation of Σ a[j] x^j."""
        a = np.asarray(a, dtype=complex)
        return complex(np.polynomial.polynomial.polyval(x, a))
