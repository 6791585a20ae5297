"""
Business Logic Layer: Coefficient Service
This module builds every coefficient family of the large-τ trans-series
(𝔲, 𝔴, η, 𝔯, 𝔡, h̃, ν̃, μ*, P* and their imaginary-axis twins) by their
recurrences, together with independent series-arithmetic oracles.

All families are computed by one engine parametrised by (a_eff, s, K):
the real-axis tables use a_eff = a and the imaginary-axis tables use
a_eff = −a; s = (−1)^{ε2} (resp. (−1)^{ε̂2}) and K = 2α_k².
"""
from dataclasses import dataclass, replace
import logging
import math

import numpy as np
from django.conf import settings

from core.exceptions import DomainError, InvalidParameters
from core.models import CoefficientTable, DerivedConstants, Family, _check_k
from core.services.series import PowerSeries

logger = logging.getLogger(__name__)

SQRT3 = math.sqrt(3.0)

# Closed-form entries of 𝔲 below the first recurrence index.
FIRST_RECURSIVE_INDEX = 10


@dataclass(frozen=True)
class Branch:
    """Engine inputs for one (Parameters, k, axis) combination."""
    a: complex
    s: int
    k: int
    epsilon: int
    b: float
    c: float
    K: complex
    alpha2: complex

    @property
    def c0(self):
        return self.epsilon * self.K ** 2 / 2

    @property
    def q(self):
        """(c0/b)², which equals 1/(4K²)."""
        return (self.c0 / self.b) ** 2

    @property
    def a_tilde(self):
        return self.a - 0.5j * self.s


class CoefficientService:
    """
    Service class for the expansion coefficients of the trans-series.
    Every method is a pure function of its arguments.
    """

    # ------------------------------------------------------------------
    # Constants and branches
    # ------------------------------------------------------------------

    @staticmethod
    def derived_constants(params, k, hatted=False):
        """
        Branch-resolved constants for (params, k).

        Positive reals take positive real roots; the cube root of a negative
        real is −|z|^{1/3}, hence (εb)^{1/6} = i|εb|^{1/6} for εb < 0.

        Args:
            params: Parameters instance
            k: branch index, +1 or −1
            hatted: use the imaginary-axis sign of a in 𝒫_a

        Returns:
            DerivedConstants: α_k, c_{0,k}, K_k, 𝒫_a, ϑ and β coefficients
        """
        _check_k(k)
        eb = params.eb
        cbrt_eb = float(np.cbrt(eb))
        root6 = abs(eb) ** (1.0 / 6.0)
        sixth_root_eb = complex(root6) if eb > 0 else 1j * root6

        # α_k = 2^{−1/2}(εb)^{1/6}e^{iπk/3}
        alpha_k = sixth_root_eb * np.exp(1j * np.pi * k / 3) / math.sqrt(2.0)
        K = 2 * alpha_k ** 2
        c0k = 2 * params.epsilon * alpha_k ** 4

        a = -params.a if hatted else params.a
        P_a = complex(np.exp(1j * a * np.log(2 + SQRT3)))

        return DerivedConstants(
            k=k,
            cbrt_eb=cbrt_eb,
            sixth_root_eb=sixth_root_eb,
            alpha_k=complex(alpha_k),
            c0k=complex(c0k),
            K=complex(K),
            P_a=P_a,
            theta_coeff=complex(1.5 * SQRT3 * cbrt_eb),
            beta_coeff=complex(4.5 * cbrt_eb),
        )

    @staticmethod
    def branch(params, k, hatted=False):
        """Engine inputs (a_eff, s, K, ...) for the real or imaginary axis."""
        constants = CoefficientService.derived_constants(params, k)
        s = 1 if params.eb > 0 else -1
        return Branch(
            a=-params.a if hatted else params.a,
            s=s,
            k=k,
            epsilon=params.epsilon,
            b=params.b.real,
            c=constants.cbrt_eb,
            K=constants.K,
            alpha2=constants.alpha_k ** 2,
        )

    @staticmethod
    def check_order(N):
        """Validate a truncation order against DP3_MAX_N."""
        if not isinstance(N, (int, np.integer)) or N < 0:
            raise InvalidParameters(f'truncation order must be a non-negative integer, got {N!r}')
        if N > settings.DP3_MAX_N:
            raise InvalidParameters(
                f'truncation order {N} exceeds the configured maximum {settings.DP3_MAX_N}'
            )
        return int(N)

    # ------------------------------------------------------------------
    # Engine recurrences (numpy arrays)
    # ------------------------------------------------------------------

    @staticmethod
    def u_series(br, depth):
        """
        𝔲_0..𝔲_depth together with 𝔴_0..𝔴_depth and η_0..η_{depth−2}.

        Args:
            br: Branch
            depth: last index to compute

        Returns:
            tuple: (u, w, eta) numpy arrays
        """
        a, K, q = br.a, br.K, br.q
        u = np.zeros(depth + 1, dtype=complex)
        w = np.zeros(depth + 1, dtype=complex)
        eta = np.zeros(max(depth - 1, 1), dtype=complex)

        closed = {
            0: a / (3 * K),
            4: -a * (a ** 2 + 1) / (81 * K ** 3),
            6: a ** 2 * (a ** 2 + 1) / (243 * K ** 4),
            8: a * (a ** 2 + 1) / (243 * K ** 5),
        }

        for n in range(depth + 1):
            if n < FIRST_RECURSIVE_INDEX:
                u[n] = closed.get(n, 0)
            elif n % 2 == 0:
                m = (n - FIRST_RECURSIVE_INDEX) // 2
                # Bracket multiplying (c0/b)²/27
                bracket = (
                    w[2 * m + 6] - 2 * u[0] * w[2 * m + 4]
                    + eta[2 * m + 4] - u[0] * eta[2 * m + 2]
                    + np.dot(eta[:2 * m + 1], w[2 * m + 2::-1][:2 * m + 1])
                )
                head = 2 * m + 8
                quadratic = np.dot(u[:head + 1] + w[:head + 1], u[head::-1])
                u[n] = (
                    q / 27 * bracket
                    - quadratic / 3
                    - q / 3 * ((2 * m + 7) / 3) ** 2 * u[2 * m + 6]
                )
            w[n] = CoefficientService._w_at(u, w, n)
            if n >= 2:
                eta[n - 2] = CoefficientService._eta_at(u, n - 2)

        logger.debug('u-series built to depth %d (k=%+d, s=%+d)', depth, br.k, br.s)
        return u, w, eta

    @staticmethod
    def _w_at(u, w, n):
        if n < 2:
            return -u[n]
        m = n - 2
        return -u[n] - np.dot(w[:m + 1], u[m::-1])

    @staticmethod
    def _eta_at(u, j):
        p = np.arange(j + 1)
        return -2 * (j + 3) * u[j + 2] + np.sum((p + 1) * (j - p + 1) * u[:j + 1] * u[j::-1])

    @staticmethod
    def w_from_u(u):
        """𝔴 table of an arbitrary 𝔲 array."""
        u = np.asarray(u, dtype=complex)
        w = np.zeros(len(u), dtype=complex)
        for n in range(len(u)):
            w[n] = CoefficientService._w_at(u, w, n)
        return w

    @staticmethod
    def eta_from_u(u):
        """η_0..η_{len(u)−3} of an arbitrary 𝔲 array."""
        u = np.asarray(u, dtype=complex)
        return np.array(
            [CoefficientService._eta_at(u, j) for j in range(len(u) - 2)], dtype=complex
        )

    @staticmethod
    def r_series(br, u, w, depth):
        """𝔯_0..𝔯_depth; needs 𝔲 up to depth and 𝔴 up to depth − 4."""
        a, s, alpha2 = br.a, br.s, br.alpha2
        r = np.zeros(depth + 1, dtype=complex)
        heads = {
            0: (a - 0.5j * s) / (3 * alpha2),
            2: 1j * s * a * (1 + 1j * s * a) / (18 * alpha2 ** 2),
        }
        for n in range(min(depth, 3) + 1):
            r[n] = heads.get(n, 0)

        for m in range(0, depth - 3):
            p = np.arange(m + 1)
            inner = (
                4j * alpha2 * (u[m + 2 - p] - u[0] * u[m - p])
                - s / 3 * (m - p + 2) * u[m - p]
            )
            total = (
                np.dot(inner, w[:m + 1])
                + 4j * alpha2 * (u[m + 4] - u[0] * u[m + 2])
                - s / 3 * (m + 4) * u[m + 2]
            )
            r[m + 4] = total / (2j * alpha2)
        return r

    @staticmethod
    def d_series(u, r, depth):
        """𝔡_0..𝔡_depth; needs 𝔲 and 𝔯 up to depth + 2."""
        d = np.zeros(depth + 1, dtype=complex)
        rr_u = PowerSeries.mul(PowerSeries.mul(r, r, depth + 1), u, depth + 1)
        for m in range(depth + 1):
            top = m + 2
            d[m] = (
                np.dot(8 * u[:top + 1], u[top::-1])
                + np.dot(4 * u[:top + 1] - r[:top + 1], r[top::-1])
                - rr_u[m]
            )
        return d

    @staticmethod
    def htilde_series(br, d, depth):
        """h̃_0..h̃_depth from 𝔡."""
        h = np.zeros(depth + 1, dtype=complex)
        h[0] = (12 * br.a ** 2 + 1) / (36 * br.alpha2)
        if depth >= 2:
            h[2:] = br.alpha2 * d[:depth - 1]
        return h

    @staticmethod
    def arrays(params, k, N, hatted=False):
        """
        All real-valued-index families for one branch as numpy arrays.

        Every array holds indices 0..N; the series used internally run a
        few orders deeper so that the look-ahead terms are available.

        Returns:
            dict: keys 'branch', 'u', 'w', 'eta', 'r', 'd', 'h'
        """
        N = CoefficientService.check_order(N)
        br = CoefficientService.branch(params, k, hatted)
        depth = N + 4
        u, w, eta = CoefficientService.u_series(br, depth)
        r = CoefficientService.r_series(br, u, w, depth)
        d = CoefficientService.d_series(u, r, depth - 2)
        h = CoefficientService.htilde_series(br, d, depth - 2)
        if params.is_resonant:
            logger.warning(
                'i*a = %s is an integer; coefficients are computed but this case '
                'requires a separate Backlund analysis', 1j * params.a
            )
        return {
            'branch': br,
            'u': u,
            'w': w,
            'eta': eta,
            'r': r,
            'd': d,
            'h': h,
            'depth': depth,
        }

    # ------------------------------------------------------------------
    # Public table builders
    # ------------------------------------------------------------------

    @staticmethod
    def _table(family, k, values, params, labels, N):
        return CoefficientTable(
            family=family,
            k=k,
            values=tuple(complex(v) for v in values[:N + 1]),
            params=params,
            eps_labels=tuple(labels),
            resonant=params.is_resonant,
        )

    @staticmethod
    def with_phase(params, **labels):
        """
        params with the given eps2/eps2_hat labels; None keeps the current
        one. Parameters validation rejects a label whose parity disagrees
        with the sign of εb, which is what fixes s = (−1)^{ε2}.
        """
        labels = {name: value for name, value in labels.items() if value is not None}
        return replace(params, **labels) if labels else params

    @staticmethod
    def u_coeffs(params, k, eps1=0, eps2=None, N=12):
        """
        Build the 𝔲 table of the real-axis regime (ε1, ε2).

        Args:
            params: Parameters instance
            k: branch index
            eps1: ray label ε1 (recorded only; the coefficients do not depend on it)
            eps2: phase label of εb, defaults to params.eps2
            N: last index

        Returns:
            CoefficientTable: family U, 𝔲_0..𝔲_N

        Raises:
            InvalidParameters: eps2 does not match the sign of εb
        """
        params = CoefficientService.with_phase(params, eps2=eps2)
        data = CoefficientService.arrays(params, k, N)
        return CoefficientService._table(Family.U, k, data['u'], params, (eps1, params.eps2), N)

    @staticmethod
    def w_coeffs(u_table):
        """𝔴 table of a 𝔲 table (reciprocal recurrence)."""
        w = CoefficientService.w_from_u(u_table.as_array())
        family = Family.W_HAT if u_table.family == Family.U_HAT else Family.W
        return CoefficientTable(
            family=family,
            k=u_table.k,
            values=tuple(complex(v) for v in w),
            params=u_table.params,
            eps_labels=u_table.eps_labels,
            resonant=u_table.resonant,
        )

    @staticmethod
    def eta_coeffs(u_table):
        """η table of a 𝔲 table; η_j needs 𝔲_{j+2}, so it is two entries shorter."""
        eta = CoefficientService.eta_from_u(u_table.as_array())
        family = Family.ETA_HAT if u_table.family == Family.U_HAT else Family.ETA
        return CoefficientTable(
            family=family,
            k=u_table.k,
            values=tuple(complex(v) for v in eta),
            params=u_table.params,
            eps_labels=u_table.eps_labels,
            resonant=u_table.resonant,
        )

    @staticmethod
    def r_coeffs(params, k, eps2=None, N=12):
        params = CoefficientService.with_phase(params, eps2=eps2)
        data = CoefficientService.arrays(params, k, N)
        return CoefficientService._table(Family.R, k, data['r'], params, (0, params.eps2), N)

    @staticmethod
    def d_and_htilde_coeffs(params, k, eps2=None, N=12):
        """
        𝔡 and h̃ tables.

        Returns:
            tuple: (CoefficientTable(D), CoefficientTable(HTILDE))
        """
        params = CoefficientService.with_phase(params, eps2=eps2)
        data = CoefficientService.arrays(params, k, N)
        labels = (0, params.eps2)
        return (
            CoefficientService._table(Family.D, k, data['d'], params, labels, N),
            CoefficientService._table(Family.HTILDE, k, data['h'], params, labels, N),
        )

    @staticmethod
    def hatted_family(params, k, eps1_hat=1, eps2_hat=None, N=12):
        """
        Imaginary-axis tables û, ŵ, η̂, r̂, d̂ and ĥ*.

        The hatted tables are the real-axis recurrences run with a ↦ −a and
        s = (−1)^{ε̂2}; ĥ* carries the extra factor s.

        Returns:
            dict: Family -> CoefficientTable
        """
        params = CoefficientService.with_phase(params, eps2_hat=eps2_hat)
        data = CoefficientService.arrays(params, k, N, hatted=True)
        labels = (eps1_hat, params.eps2_hat)
        s = data['branch'].s
        build = CoefficientService._table
        return {
            Family.U_HAT: build(Family.U_HAT, k, data['u'], params, labels, N),
            Family.W_HAT: build(Family.W_HAT, k, data['w'], params, labels, N),
            Family.ETA_HAT: build(Family.ETA_HAT, k, data['eta'], params, labels, N),
            Family.R_HAT: build(Family.R_HAT, k, data['r'], params, labels, N),
            Family.D_HAT: build(Family.D_HAT, k, data['d'], params, labels, N),
            Family.HSTAR_HAT: build(Family.HSTAR_HAT, k, s * data['h'], params, labels, N),
        }

    # ------------------------------------------------------------------
    # Phase function φ̂
    # ------------------------------------------------------------------

    @staticmethod
    def phi_series(br, u, w, r, depth):
        """
        ν̃_0..ν̃_depth, μ*_0..μ*_depth and P*_0..P*_depth.

        ν̃_0 is unused and kept as 0 so that indices are native.
        """
        a, s, k, c = br.a, br.s, br.k, br.c
        e_plus = np.exp(1j * np.pi * k / 3)
        e_minus = np.exp(-1j * np.pi * k / 3)
        e_two = np.exp(2j * np.pi * k / 3)

        P = np.zeros(depth + 1, dtype=complex)
        P[0] = -2 * a * e_plus / (3 * c)
        for j in range(2, depth + 1):
            conv = np.dot(u[:j + 1], r[j::-1])
            P[j] = 1.5 * (u[j] - 1j * s * e_two * c * (r[j + 2] - 2 * u[j + 2] + conv))

        mu = np.zeros(depth + 1, dtype=complex)
        mu[0] = 2 * a * e_plus / (3 * c)
        for m1 in range(0, depth - 1):
            mu[m1 + 2] = -2 * (P[m1 + 2] + w[m1 + 2] + np.dot(P[:m1 + 1], w[m1::-1]))

        nu = np.zeros(depth + 1, dtype=complex)
        heads = {
            2: a * (1 + 1j * s * a) * e_plus / (6 * c),
            4: -(1j * s * a * e_two / (36 * c ** 2)) * ((1 - 2 * a ** 2) / 3 + 1j * s * a),
        }
        for n in range(1, min(depth, 4) + 1):
            nu[n] = heads.get(n, 0)

        lead = 1j * s * e_plus / (12 * c)
        for m in range(0, depth - 4):
            j = np.arange(m)
            tail = np.sum((j + 1) * nu[j + 1] * (mu[m - j] - 2 * (m + 2 - j) * nu[m + 2 - j]))
            inner = (
                (m + 3) * (m + 5 + 2j * s * a) * nu[m + 3]
                - (1j * s * 2 * a ** 2 * e_plus / (3 * c)) * (m + 1) * nu[m + 1]
                + tail
            )
            rhs = (
                1.5j * e_minus * s * c * u[m + 5]
                + lead * (1 + 2j * s * a) * mu[m + 1]
                + mu[m + 3] / 4
                - lead * inner
            )
            nu[m + 5] = rhs / (m + 5)
        return nu, mu, P

    @staticmethod
    def phi_arrays(params, k, N, hatted=False):
        """Numpy versions of the φ̂ tables plus the underlying series."""
        data = CoefficientService.arrays(params, k, N, hatted=hatted)
        nu, mu, P = CoefficientService.phi_series(
            data['branch'], data['u'], data['w'], data['r'], data['depth'] - 2
        )
        data.update(nu=nu, mu=mu, P=P)
        return data

    @staticmethod
    def phi_coeffs(params, k, eps2=None, N=12, hatted=False):
        """
        ν̃, μ* and P* tables (or ν̂, μ̂*, P̂* when hatted).

        Returns:
            tuple: (nu table, mu table, P table)
        """
        if hatted:
            params = CoefficientService.with_phase(params, eps2_hat=eps2)
            eps2 = params.eps2_hat
            families = (Family.NU_HAT, Family.MU_HAT, Family.P_HAT)
        else:
            params = CoefficientService.with_phase(params, eps2=eps2)
            eps2 = params.eps2
            families = (Family.NU_TILDE, Family.MU_STAR, Family.P_STAR)
        data = CoefficientService.phi_arrays(params, k, N, hatted=hatted)
        labels = (0, eps2)
        return tuple(
            CoefficientService._table(family, k, data[key], params, labels, N)
            for family, key in zip(families, ('nu', 'mu', 'P'))
        )

    @staticmethod
    def log_series_contribution(u, m):
        """
        Coefficient of x^m in ln(1 + Σ_j 𝔲_j x^{j+2}), written as the
        multi-index sum over n + 𝔩 = m, 𝔩 ≥ n, and partitions of 𝔩 into
        n parts: Σ (−1)^{n−1}(n−1)! Π_j 𝔲_{j−1}^{i_j}/i_j!.

        Args:
            u: 𝔲 table or array, needs indices up to m − 2
            m: external index, m ≥ 2

        Returns:
            complex: the contribution
        """
        if m < 2:
            raise DomainError(f'log-series contribution is defined for m >= 2, got {m}')
        values = u.as_array() if isinstance(u, CoefficientTable) else np.asarray(u, dtype=complex)
        if len(values) < m - 1:
            raise DomainError(f'need u_0..u_{m - 2} for the log-series term at m={m}')

        total = 0j
        for n in range(1, m // 2 + 1):
            ell = m - n
            for parts in _partitions(ell, n, ell):
                term = complex((-1) ** (n - 1) * math.factorial(n - 1))
                for j, count in parts.items():
                    term *= values[j - 1] ** count / math.factorial(count)
                total += term
        return total

    # ------------------------------------------------------------------
    # Oracles
    # ------------------------------------------------------------------

    @staticmethod
    def u_tilde(u, n):
        """Coefficients of Ũ = 1 + Σ 𝔲_m x^{m+2}, truncated to n terms."""
        return PowerSeries.coerce(np.concatenate(([1.0, 0.0], np.asarray(u, dtype=complex))), n)

    @staticmethod
    def ode_defect(br, u_tilde, n):
        """
        Series defect of the DP3E for U = c0 x^{−1} Ũ, t = x^{−3}:
        (c0²/9)x⁴(Ũθ²Ũ − (θŨ)²) + b²(Ũ³ − 1) − 2ab c0 x²Ũ.
        """
        c0, b, a = br.c0, br.b, br.a
        mul = PowerSeries.mul
        th = PowerSeries.theta(u_tilde)
        th2 = PowerSeries.theta(th)
        wronsk = mul(u_tilde, th2, n) - mul(th, th, n)
        cube = mul(mul(u_tilde, u_tilde, n), u_tilde, n)
        cube[0] -= 1
        return (
            c0 ** 2 / 9 * PowerSeries.shift(wronsk, 4, n)
            + b ** 2 * cube
            - 2 * a * b * c0 * PowerSeries.shift(u_tilde, 2, n)
        )

    @staticmethod
    def u_order_matching(params, k, N, hatted=False):
        """
        Independent 𝔲_0..𝔲_N obtained by substituting the ansatz into the
        DP3E and solving order by order: 𝔲_n = −[x^{n+2}]defect/(3b²).
        """
        br = CoefficientService.branch(params, k, hatted)
        n_terms = N + 3
        u = np.zeros(N + 1, dtype=complex)
        for n in range(N + 1):
            u[n] = 0
            defect = CoefficientService.ode_defect(br, CoefficientService.u_tilde(u, n_terms), n_terms)
            u[n] = -defect[n + 2] / (3 * br.b ** 2)
        return u

    @staticmethod
    def w_reciprocal_oracle(u):
        """𝔴 read off the series reciprocal of Ũ."""
        u = np.asarray(u, dtype=complex)
        n = len(u) + 2
        z = PowerSeries.reciprocal(CoefficientService.u_tilde(u, n), n)
        return z[2:]

    @staticmethod
    def eta_convolution_oracle(u):
        """η via the self-convolution of the term-wise derivative series (p+1)𝔲_p."""
        u = np.asarray(u, dtype=complex)
        n = len(u) - 2
        deriv = u * np.arange(1, len(u) + 1)
        conv = PowerSeries.mul(deriv, deriv, n)
        return -2 * (np.arange(n) + 3) * u[2:] + conv

    @staticmethod
    def r_series_oracle(params, k, N, hatted=False):
        """
        𝔯 from 2f− with the truncated 𝔲 series substituted:
        Σ𝔯_m x^m = −(is/(3K))(1 − θŨ/Ũ) − 2Σ𝔴_m x^m.
        """
        br = CoefficientService.branch(params, k, hatted)
        u = CoefficientService.u_order_matching(params, k, N + 2, hatted)
        n = N + 3
        ut = CoefficientService.u_tilde(u, n)
        Q = -PowerSeries.div(PowerSeries.theta(ut), ut, n)
        Q[0] += 1
        z = PowerSeries.reciprocal(ut, n)
        w_shifted = z[2:]
        return (-(1j * br.s / (3 * br.K)) * Q[:N + 1] - 2 * w_shifted[:N + 1])

    @staticmethod
    def log_oracle(u, m):
        """[x^m] ln Ũ via the series logarithm."""
        return PowerSeries.log(CoefficientService.u_tilde(u, m + 1), m + 1)[m]

    @staticmethod
    def mu_star_oracle(u, n):
        """μ*_0..μ*_{n−1} as the coefficients of −θŨ/Ũ shifted by two."""
        ut = CoefficientService.u_tilde(u, n + 2)
        return -PowerSeries.div(PowerSeries.theta(ut), ut, n + 2)[2:]

    @staticmethod
    def nu_oracle(br, u, w, n):
        """
        ν̃_1..ν̃_n from the logarithmic-derivative identity
        2ν̃_m + [x^m] ln Ũ = −6isK 𝔴_m/m.
        """
        logs = PowerSeries.log(CoefficientService.u_tilde(u, n + 1), n + 1)
        nu = np.zeros(n + 1, dtype=complex)
        for m in range(1, n + 1):
            nu[m] = (-6j * br.s * br.K * w[m] / m - logs[m]) / 2
        return nu

    @staticmethod
    def phi_ode_residual(params, k, N):
        """
        Residual series of the second-order equation satisfied by the
        power part of the phase, with P(x) = 2A₀/3 + (ia/6)x² − (1/3)Σ mν̃_m x^{m+2}
        and A₀ = −(3k/4)(√3 + ik)(εb)^{1/3}. For εb < 0 the equation is the one of
        the mirrored parameters (−a, −b), which leave the 𝔲 series unchanged.

        Returns:
            ndarray: coefficients of x^0..x^{N+1}; all vanish when ν̃ is right
        """
        data = CoefficientService.phi_arrays(params, k, N)
        br = data['branch']
        a, c = br.s * br.a, br.s * br.c
        n = N + 2
        mul = PowerSeries.mul

        A0 = -(3 * k / 4) * (SQRT3 + 1j * k) * c
        P = np.zeros(n, dtype=complex)
        P[0] = 2 * A0 / 3
        P[2] += 1j * a / 6
        for m in range(1, N + 1):
            if m + 2 < n:
                P[m + 2] += -m * data['nu'][m] / 3
        ut = CoefficientService.u_tilde(data['u'], n)
        Q = -PowerSeries.div(PowerSeries.theta(ut), ut, n)
        Q[0] += 1

        q_minus_2 = Q.copy()
        q_minus_2[0] -= 2
        q_minus_1 = Q.copy()
        q_minus_1[0] -= 1
        q_shift = Q.copy()
        q_shift[0] -= 3 + 3j * a

        return (
            -PowerSeries.shift(P + PowerSeries.theta(P), 2, n) / 3
            - 2 * mul(P, P, n)
            - PowerSeries.shift(mul(q_minus_2, P, n), 2, n) / 3
            - PowerSeries.shift(q_minus_1, 4, n) / 9
            - (1j * a / 6) * PowerSeries.shift(q_shift, 4, n)
            - 4 * br.epsilon * br.c0 * ut
        )


def _partitions(total, parts, largest):
    """
    Yield the partitions of total into exactly parts positive integers no
    larger than largest, as {part: multiplicity} dicts.
    """
    if parts == 0:
        if total == 0:
            yield {}
        return
    if total < parts or largest * parts < total:
        return
    for first in range(min(largest, total - parts + 1), 0, -1):
        for rest in _partitions(total - first, parts - 1, first):
            out = dict(rest)
            out[first] = out.get(first, 0) + 1
            yield out
