"""
Business Logic Layer: Asymptotics Service
This module evaluates the truncated large-τ trans-series of u, u′, f−, f+,
ℋ, σ and φ̂ on the real and imaginary rays.

Every regime is evaluated through one reduced engine in t = τ/μ, where μ is
the ray rotation: u(τ) = μ^{−1}U(t), ℋ(τ) = μ^{−1}H(t), while f−, f+ and σ
keep their values. The series variable is x = t^{−1/3}.
"""
from dataclasses import dataclass
import logging
import math

import numpy as np
from django.conf import settings

from core.exceptions import InvalidCase, InvalidParameters
from core.models import (
    AmplitudeA, MonodromyPoint, Quantity, RegimeLabel, TransSeriesEval, _check_k, principal_angle,
)
from core.services.coefficient_service import CoefficientService, SQRT3
from core.services.monodromy_service import MonodromyService

logger = logging.getLogger(__name__)

AUTO = 'auto'


@dataclass(frozen=True)
class Frame:
    """Regime data resolved for one evaluation point."""
    regime: RegimeLabel
    mu: complex
    s: int
    varsigma: complex
    t: complex
    x: complex

    @property
    def hatted(self):
        return self.regime.hatted


class AsymptoticsService:
    """
    Service class for trans-series evaluation.
    Each eval_* method returns a TransSeriesEval with the power part, the
    one-instanton exponential part and an estimate of the truncation error.
    """

    # ------------------------------------------------------------------
    # Regime plumbing
    # ------------------------------------------------------------------

    @staticmethod
    def frame(params, regime, tau):
        """Resolve the ray rotation, signs and the engine variables at τ."""
        if not isinstance(regime, RegimeLabel):
            raise InvalidParameters(f'expected a RegimeLabel, got {regime!r}')
        if (regime.eps2 == 0) != (params.eb > 0):
            raise InvalidParameters(
                f'regime {regime} needs eps2 = 0 exactly when eps*b > 0 (eps*b = {params.eb:g})'
            )
        mu = regime.rotation()
        tau = complex(tau)
        if tau == 0:
            raise InvalidParameters('tau must be nonzero')
        t = tau / mu
        s = 1 if params.eb > 0 else -1
        return Frame(
            regime=regime,
            mu=mu,
            s=s,
            varsigma=s * mu ** 2,
            t=t,
            x=t ** (-1.0 / 3.0),
        )

    @staticmethod
    def pair(params, regime):
        """The parameter pair (A, B) = ς(a, b) used by the auxiliary functions."""
        s = 1 if params.eb > 0 else -1
        varsigma = s * regime.rotation() ** 2
        return varsigma * params.a, varsigma * params.b

    @staticmethod
    def _s00_and_image(params, regime, monodromy, already_transformed=False):
        """
        Split the monodromy argument into (s00, transformed point or None).

        A bare complex number is taken as s00; None suppresses the
        exponential term.
        """
        if monodromy is None:
            return None, None
        if isinstance(monodromy, MonodromyPoint):
            if abs(monodromy.a - params.a) > 1e-12 * max(1.0, abs(params.a)):
                raise InvalidParameters(
                    f'monodromy point has a={monodromy.a}, parameters have a={params.a}'
                )
            if already_transformed:
                image = monodromy
            else:
                image = MonodromyService.transformed_for_regime(regime, monodromy)
            return image.s00, image
        return complex(monodromy), None

    @staticmethod
    def resolve_order(params, regime, tau, N):
        if N == AUTO or N is None:
            return AsymptoticsService.optimal_order(params, regime, tau)
        return CoefficientService.check_order(N)

    # ------------------------------------------------------------------
    # Exponential term
    # ------------------------------------------------------------------

    @staticmethod
    def theta_beta(params, k, tau, regime=None):
        """
        ϑ = (3√3/2)(εb)^{1/3}τ^{2/3} and β = (9/2)(εb)^{1/3}τ^{2/3}; with a
        regime the argument is first mapped to the ray variable t.

        Returns:
            tuple: (ϑ, β) as complex numbers
        """
        _check_k(k)
        constants = CoefficientService.derived_constants(params, k)
        t = complex(tau) if regime is None else regime.to_t(tau)
        power = t ** (2.0 / 3.0)
        return constants.theta_coeff * power, constants.beta_coeff * power

    @staticmethod
    def _delta_s(br, s00):
        return s00 - 1j * np.exp(-br.s * np.pi * br.a)

    @staticmethod
    def _p_factor(br):
        """(2+√3)^{−iks·a_eff}."""
        return complex(np.exp(-1j * br.k * br.s * br.a * np.log(2 + SQRT3)))

    @staticmethod
    def _exp_factor(params, br, t):
        theta, beta = AsymptoticsService.theta_beta(params, br.k, t)
        return complex(np.exp(-1j * br.k * br.s * theta - br.s * beta))

    @staticmethod
    def exp_magnitude(params, k, tau, regime):
        br = CoefficientService.branch(params, k, regime.hatted)
        return abs(AsymptoticsService._exp_factor(params, br, regime.to_t(tau)))

    @staticmethod
    def _u_bracket(params, br, s00):
        """Coefficient of e^{−iksϑ}e^{−sβ} in U(t)."""
        root = abs(params.eb) ** 0.5
        return (
            -1j * params.epsilon * root * np.exp(1j * np.pi * br.k / 4)
            * AsymptoticsService._delta_s(br, s00)
            / (math.sqrt(math.pi) * 2 ** 1.5 * 3 ** 0.25 * AsymptoticsService._p_factor(br))
        )

    @staticmethod
    def _common(params, br, s00):
        """|εb|^{1/6}e^{iπk/4}e^{iπk/3}Δs/(√π 2^{k/2}𝒫) shared by f±, ℋ and σ."""
        k = br.k
        return (
            abs(params.eb) ** (1.0 / 6.0)
            * np.exp(1j * np.pi * k / 4) * np.exp(1j * np.pi * k / 3)
            * AsymptoticsService._delta_s(br, s00)
            / (math.sqrt(math.pi) * 2 ** (k / 2) * AsymptoticsService._p_factor(br))
        )

    @staticmethod
    def amplitude_A(params, k, s00, regime=None):
        """
        One-instanton amplitude A_k: U(t) ≈ c0 t^{1/3}(…) + c0·A_k·e^{−iksϑ}e^{−sβ}.

        Vanishes exactly when s00 = i·e^{−sπa_eff}.

        Returns:
            AmplitudeA
        """
        regime = RegimeLabel.base(k) if regime is None else regime
        if regime.k != k:
            raise InvalidParameters(f'regime k={regime.k} does not match k={k}')
        br = CoefficientService.branch(params, k, regime.hatted)
        value = AsymptoticsService._u_bracket(params, br, complex(s00)) / br.c0
        return AmplitudeA(value=complex(value), k=k, s00=complex(s00), regime=regime)

    # ------------------------------------------------------------------
    # Power-part helpers
    # ------------------------------------------------------------------

    @staticmethod
    def _first_omitted(coeffs, N, powers):
        """|coeffs[m]·x^{m+shift}| for the first nonzero m > N, or 0."""
        for m in range(N + 1, len(coeffs)):
            if abs(coeffs[m]) > 0:
                return abs(coeffs[m] * powers(m))
        return 0.0

    @staticmethod
    def hamiltonian_tail(data, N):
        """Coefficients T_0..T_N of the α²x⁵ΣT_m x^m tail of ℋ."""
        br = data['branch']
        u, w, d, h = data['u'], data['w'], data['d'], data['h']
        at = br.a_tilde
        tail = np.zeros(N + 1, dtype=complex)
        for m in range(N + 1):
            conv = np.dot(h[:m + 1] - 4 * at * u[:m + 1], w[m::-1])
            tail[m] = -4 * at * u[m + 2] + br.alpha2 * d[m] + conv
        return tail

    @staticmethod
    def optimal_order(params, regime, tau, n_max=None):
        """
        Smallest-term rule on the 𝔲 series at τ: N is the last index before
        the smallest nonzero term.
        """
        n_max = settings.DP3_MAX_N if n_max is None else n_max
        fr = AsymptoticsService.frame(params, regime, tau)
        data = CoefficientService.arrays(params, regime.k, n_max - 4, fr.hatted)
        u = data['u'][:n_max + 1]
        sizes = [(abs(u[m] * fr.x ** (m + 2)), m) for m in range(len(u)) if abs(u[m]) > 0]
        if not sizes:
            return 0
        _, smallest = min(sizes)
        N = max(smallest - 1, 0)
        logger.debug('optimal truncation at tau=%s: N=%d', tau, N)
        return N

    # ------------------------------------------------------------------
    # Evaluations
    # ------------------------------------------------------------------

    @staticmethod
    def _finish(fr, power, exp_part, N, proxy, magnitude, quantity, mod_2pi=False):
        tau = fr.t * fr.mu
        return TransSeriesEval.build(tau, power, exp_part, N, proxy, magnitude, quantity, mod_2pi)

    @staticmethod
    def eval_u(params, regime, monodromy, tau, N=12):
        """
        Trans-series of u(τ).

        Args:
            params: Parameters instance
            regime: RegimeLabel
            monodromy: MonodromyPoint, a bare s00, or None for the power part only
            tau: evaluation point on the regime's ray
            N: truncation index or 'auto'

        Returns:
            TransSeriesEval
        """
        fr = AsymptoticsService.frame(params, regime, tau)
        N = AsymptoticsService.resolve_order(params, regime, tau, N)
        s00, _ = AsymptoticsService._s00_and_image(params, regime, monodromy)
        data = CoefficientService.arrays(params, regime.k, N, fr.hatted)
        br, u, x = data['branch'], data['u'], fr.x

        # Calculate the power part U = c0 x^{−1}(1 + Σ𝔲_m x^{m+2})
        series = 1 + sum(u[m] * x ** (m + 2) for m in range(N + 1))
        power = br.c0 / x * series / fr.mu
        proxy = AsymptoticsService._first_omitted(
            u, N, lambda m: br.c0 * x ** (m + 1)
        )

        exp_part, magnitude = 0j, AsymptoticsService._magnitude(params, br, fr)
        if s00 is not None:
            exp_part = (AsymptoticsService._u_bracket(params, br, s00)
                        * AsymptoticsService._exp_factor(params, br, fr.t) / fr.mu)
        return AsymptoticsService._finish(fr, power, exp_part, N, proxy, magnitude, Quantity.U)

    @staticmethod
    def _magnitude(params, br, fr):
        return abs(AsymptoticsService._exp_factor(params, br, fr.t))

    @staticmethod
    def eval_u_prime(params, regime, tau, N=12, monodromy=None, include_exp=False):
        """
        du/dτ of the truncated power part, optionally plus the derivative of
        the exponential term.

        Returns:
            complex
        """
        _, _, power, exp_part, _, _ = AsymptoticsService._u_prime_parts(
            params, regime, tau, N, monodromy if include_exp else None
        )
        return complex(power + exp_part)

    @staticmethod
    def _u_prime_parts(params, regime, tau, N, monodromy):
        fr = AsymptoticsService.frame(params, regime, tau)
        N = AsymptoticsService.resolve_order(params, regime, tau, N)
        s00, _ = AsymptoticsService._s00_and_image(params, regime, monodromy)
        data = CoefficientService.arrays(params, regime.k, N, fr.hatted)
        br, u, x = data['branch'], data['u'], fr.x

        # U′(t) = (c0/3)x²(1 − Σ(m+1)𝔲_m x^{m+2})
        series = 1 - sum((m + 1) * u[m] * x ** (m + 2) for m in range(N + 1))
        power = br.c0 / 3 * x ** 2 * series / fr.mu ** 2
        proxy = AsymptoticsService._first_omitted(
            u, N, lambda m: br.c0 / 3 * (m + 1) * x ** (m + 4)
        )

        # d/dt of the exponential factor
        rate = -br.s * br.c * x * (3 + 1j * br.k * SQRT3)
        magnitude = AsymptoticsService._magnitude(params, br, fr) * abs(rate)
        exp_part = 0j
        if s00 is not None:
            exp_part = (AsymptoticsService._u_bracket(params, br, s00)
                        * AsymptoticsService._exp_factor(params, br, fr.t) * rate / fr.mu ** 2)
        return fr, N, power, exp_part, proxy, magnitude

    @staticmethod
    def _two_f_minus(params, regime, monodromy, tau, N):
        fr = AsymptoticsService.frame(params, regime, tau)
        N = AsymptoticsService.resolve_order(params, regime, tau, N)
        s00, _ = AsymptoticsService._s00_and_image(params, regime, monodromy)
        data = CoefficientService.arrays(params, regime.k, N, fr.hatted)
        br, r, x = data['branch'], data['r'], fr.x
        s, K, k = br.s, br.K, br.k

        lead = 1j * s * K / 2
        power = (-1j * (s * br.a - 0.5j) - 2 * lead / x ** 2
                 + lead * sum(r[m] * x ** m for m in range(N + 1)))
        proxy = AsymptoticsService._first_omitted(r, N, lambda m: lead * x ** m)

        exp_part = 0j
        if s00 is not None:
            exp_part = (-k * AsymptoticsService._common(params, br, s00)
                        * (SQRT3 + 1) ** k / 3 ** 0.25
                        / x * AsymptoticsService._exp_factor(params, br, fr.t))
        return fr, N, power, exp_part, proxy, AsymptoticsService._magnitude(params, br, fr)

    @staticmethod
    def eval_f_minus(params, regime, monodromy, tau, N=12):
        """Trans-series of f−(τ) (half of the printed 2f− expansion)."""
        fr, N, power, exp_part, proxy, magnitude = AsymptoticsService._two_f_minus(
            params, regime, monodromy, tau, N
        )
        return AsymptoticsService._finish(
            fr, power / 2, exp_part / 2, N, proxy / 2, magnitude, Quantity.F_MINUS
        )

    @staticmethod
    def eval_capital_f_plus(params, regime, monodromy, tau, N=12):
        """
        The normalised combination F+ = (4i/(εB))f+ with its expansion
        i(s·a_eff + i/2) + isKx^{−2}(1 + x²Σ(𝔯_m/2 + 2𝔴_m)x^m).

        Returns:
            tuple: (power, exp_part, N, proxy, frame)
        """
        fr = AsymptoticsService.frame(params, regime, tau)
        N = AsymptoticsService.resolve_order(params, regime, tau, N)
        s00, _ = AsymptoticsService._s00_and_image(params, regime, monodromy)
        data = CoefficientService.arrays(params, regime.k, N, fr.hatted)
        br, r, w, x = data['branch'], data['r'], data['w'], fr.x
        s, K, k = br.s, br.K, br.k

        combo = r / 2 + 2 * w
        lead = 1j * s * K
        power = (1j * (s * br.a + 0.5j) + lead / x ** 2
                 + lead * sum(combo[m] * x ** m for m in range(N + 1)))
        proxy = AsymptoticsService._first_omitted(combo, N, lambda m: lead * x ** m)

        exp_part = 0j
        if s00 is not None:
            exp_part = (AsymptoticsService._common(params, br, s00)
                        * (2 ** ((k + 1) / 2) - k * (SQRT3 + 1) ** k) / 3 ** 0.25
                        / x * AsymptoticsService._exp_factor(params, br, fr.t))
        return power, exp_part, N, proxy, fr

    @staticmethod
    def eval_f_plus(params, regime, monodromy, tau, N=12):
        """Trans-series of f+(τ) = εB·F+/(4i)."""
        power, exp_part, N, proxy, fr = AsymptoticsService.eval_capital_f_plus(
            params, regime, monodromy, tau, N
        )
        _, B = AsymptoticsService.pair(params, regime)
        factor = params.epsilon * B / 4j
        br = CoefficientService.branch(params, regime.k, fr.hatted)
        return AsymptoticsService._finish(
            fr, factor * power, factor * exp_part, N, abs(factor) * proxy,
            AsymptoticsService._magnitude(params, br, fr), Quantity.F_PLUS,
        )

    @staticmethod
    def _hamiltonian_parts(params, regime, monodromy, tau, N, sigma=False):
        fr = AsymptoticsService.frame(params, regime, tau)
        N = AsymptoticsService.resolve_order(params, regime, tau, N)
        s00, _ = AsymptoticsService._s00_and_image(params, regime, monodromy)
        data = CoefficientService.arrays(params, regime.k, N, fr.hatted)
        br, x = data['branch'], fr.x
        s, k = br.s, br.k
        tail = AsymptoticsService.hamiltonian_tail(data, N + 2)
        if sigma:
            tail = tail + 1j * s * data['r'][2:N + 5]
        common = 0j
        if s00 is not None:
            common = (-AsymptoticsService._common(params, br, s00) * (SQRT3 + 1) ** k
                      / 3 ** 0.75 * AsymptoticsService._exp_factor(params, br, fr.t))
        return fr, N, br, x, tail, common

    @staticmethod
    def eval_H(params, regime, monodromy, tau, N=12):
        """
        Trans-series of the Hamiltonian function ℋ(τ).
        """
        fr, N, br, x, tail, common = AsymptoticsService._hamiltonian_parts(
            params, regime, monodromy, tau, N
        )
        K, at, alpha2 = br.K, br.a_tilde, br.alpha2
        # Calculate H = 3K²x^{−1} + 2Kãx + (ã² − 1/3)x³/6 + α²x⁵ΣT_m x^m
        power = (3 * K ** 2 / x + 2 * K * at * x + (at ** 2 - 1.0 / 3.0) * x ** 3 / 6
                 + alpha2 * x ** 5 * sum(tail[m] * x ** m for m in range(N + 1)))
        proxy = AsymptoticsService._first_omitted(tail, N, lambda m: alpha2 * x ** (m + 5))
        exp_part = common * x ** 2
        return AsymptoticsService._finish(
            fr, power / fr.mu, exp_part / fr.mu, N, proxy,
            AsymptoticsService._magnitude(params, br, fr), Quantity.H,
        )

    @staticmethod
    def eval_sigma(params, regime, monodromy, tau, N=12):
        """
        Trans-series of σ(τ).
        """
        fr, N, br, x, tail, common = AsymptoticsService._hamiltonian_parts(
            params, regime, monodromy, tau, N, sigma=True
        )
        K, s, a, alpha2, k = br.K, br.s, br.a, br.alpha2, br.k
        one = 1 + 1j * s * a
        power = (3 * K ** 2 / x ** 4 - 2j * s * K * one / x ** 2 + (one ** 2 + 1.0 / 3.0) / 3
                 + alpha2 * x ** 2 * sum(tail[m] * x ** m for m in range(N + 1)))
        proxy = AsymptoticsService._first_omitted(tail, N, lambda m: alpha2 * x ** (m + 2))
        exp_part = (1 + k * SQRT3) * common / x
        return AsymptoticsService._finish(
            fr, power, exp_part, N, proxy,
            AsymptoticsService._magnitude(params, br, fr), Quantity.SIGMA,
        )

    @staticmethod
    def log_constant(image, br):
        """𝔏_k = 2ln(g11 e^{sπa_eff}) for k = +1, −2ln(g22 e^{sπa_eff}) for k = −1."""
        weight = np.exp(br.s * np.pi * br.a)
        if br.k == 1:
            if image.g11 == 0:
                raise InvalidCase('phase asymptotics for k=+1 need g11 != 0')
            return complex(2 * np.log(image.g11 * weight))
        if image.g22 == 0:
            raise InvalidCase('phase asymptotics for k=-1 need g22 != 0')
        return complex(-2 * np.log(image.g22 * weight))

    @staticmethod
    def eval_phi(params, regime, monodromy, tau, N=12, wrap=True, already_transformed=False):
        """
        Trans-series of the phase φ̂(τ), defined mod 2π.

        Args:
            params: Parameters instance
            regime: RegimeLabel
            monodromy: MonodromyPoint (the constant 𝔏_k needs g11 or g22)
            tau: evaluation point
            N: truncation index or 'auto'
            wrap: reduce the real part of the power part to (−π, π]
            already_transformed: monodromy is already the image under the regime label

        Returns:
            TransSeriesEval: mod_2pi is True
        """
        if not isinstance(monodromy, MonodromyPoint):
            raise InvalidParameters('phase asymptotics need a full monodromy point')
        fr = AsymptoticsService.frame(params, regime, tau)
        N = AsymptoticsService.resolve_order(params, regime, tau, N)
        s00, image = AsymptoticsService._s00_and_image(
            params, regime, monodromy, already_transformed
        )
        data = CoefficientService.phi_arrays(params, regime.k, N, fr.hatted)
        br, nu, u, x, t = data['branch'], data['nu'], data['u'], fr.x, fr.t
        k, s, a, c = br.k, br.s, br.a, br.c

        logs = [0j, 0j] + [CoefficientService.log_series_contribution(u, m)
                           for m in range(2, N + 3)]
        combo = np.array([2 * nu[m] + logs[m] for m in range(N + 3)])
        combo[:2] = 0

        big = (1j * AsymptoticsService.log_constant(image, br) - np.pi * k
               + 1.5j * k * (SQRT3 + 1j * k) * s * c * t ** (2.0 / 3.0)
               + 2 * s * a * np.log(2 * np.exp(-1j * np.pi * k / 3) * t ** (2.0 / 3.0)
                                   / abs(params.eb) ** (1.0 / 6.0))
               - 1j * sum(combo[m] * x ** m for m in range(2, N + 1)))
        proxy = AsymptoticsService._first_omitted(combo, N, lambda m: x ** m)

        amplitude = (k * np.exp(-1j * np.pi * k / 3) * np.exp(1j * np.pi * k / 4)
                     / AsymptoticsService._p_factor(br)
                     / (math.sqrt(2 * math.pi) * 3 ** 0.75 * abs(params.eb) ** (1.0 / 6.0)))
        exp_part = (-amplitude * AsymptoticsService._delta_s(br, s00) * x
                    * AsymptoticsService._exp_factor(params, br, t))

        power = fr.varsigma * big
        if wrap:
            power = principal_angle(power)
        return AsymptoticsService._finish(
            fr, power, fr.varsigma * exp_part, N, proxy,
            AsymptoticsService._magnitude(params, br, fr), Quantity.PHI, mod_2pi=True,
        )

    @staticmethod
    def evaluate(quantity, params, regime, monodromy, tau, N=12):
        """Dispatch on a Quantity; u′ is wrapped into a TransSeriesEval."""
        quantity = Quantity(quantity)
        if quantity == Quantity.U_PRIME:
            fr, N, power, exp_part, proxy, magnitude = AsymptoticsService._u_prime_parts(
                params, regime, tau, N, monodromy
            )
            return AsymptoticsService._finish(fr, power, exp_part, N, proxy, magnitude, Quantity.U_PRIME)
        handlers = {
            Quantity.U: AsymptoticsService.eval_u,
            Quantity.F_MINUS: AsymptoticsService.eval_f_minus,
            Quantity.F_PLUS: AsymptoticsService.eval_f_plus,
            Quantity.H: AsymptoticsService.eval_H,
            Quantity.SIGMA: AsymptoticsService.eval_sigma,
            Quantity.PHI: AsymptoticsService.eval_phi,
        }
        return handlers[quantity](params, regime, monodromy, tau, N)
