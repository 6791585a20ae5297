"""
Business Logic Layer: Monodromy Service
This module handles the monodromy manifold: the five defining equations,
case classification, completion of partial data into full points, seeded
sampling, and the action of the symmetry group with its composition table.
"""
import logging

import numpy as np
from django.conf import settings

from core.exceptions import DegeneratePoint, InadmissibleLabel, InvalidCase, InvalidParameters
from core.models import (
    Case, CaseTag, CompositionReport, ManifoldReport, MonodromyPoint, SymmetryLabel,
)
from core.services.symmetry_actions import ACTIONS, COMPOSITIONS, MonodromyInputs

logger = logging.getLogger(__name__)


class MonodromyService:
    """
    Service class for points of the monodromy manifold.
    Implements the business logic layer for classification and symmetries.
    """

    @staticmethod
    def manifold_terms(p):
        """
        Left-hand terms and right-hand sides of the five equations.

        Returns:
            list: (terms, rhs) per equation, in ManifoldReport.NAMES order
        """
        em = np.exp(-np.pi * p.a)
        ep = np.exp(np.pi * p.a)
        return [
            ((p.g11 * p.g22, -p.g12 * p.g21), 1),
            ((p.s0inf * p.s1inf,), -1 - em ** 2 - 1j * p.s00 * em),
            ((p.g21 * p.g22, -p.g11 * p.g12, p.s00 * p.g11 * p.g22), 1j * em),
            ((p.g11 ** 2, -p.g21 ** 2, -p.s00 * p.g11 * p.g21), 1j * p.s0inf * em),
            ((p.g22 ** 2, -p.g12 ** 2, p.s00 * p.g12 * p.g22), 1j * p.s1inf * ep),
        ]

    @staticmethod
    def check_manifold(p, tol=None):
        """
        Evaluate the five manifold equations at p.

        Residuals are also reported scaled by the largest term of each
        equation (floor 1), and pass/fail uses the scaled values.

        Args:
            p: MonodromyPoint
            tol: tolerance, defaults to DP3_TOLERANCES['manifold']

        Returns:
            ManifoldReport
        """
        tol = settings.DP3_TOLERANCES['manifold'] if tol is None else tol
        residuals = []
        scaled = []
        for terms, rhs in MonodromyService.manifold_terms(p):
            residual = complex(sum(terms) - rhs)
            scale = max([1.0, abs(rhs)] + [abs(term) for term in terms])
            residuals.append(residual)
            scaled.append(abs(residual) / scale)
        passed = max(scaled) <= tol
        if not passed:
            logger.debug('manifold check failed: %s', dict(zip(ManifoldReport.NAMES, scaled)))
        return ManifoldReport(tuple(residuals), tuple(scaled), tol, passed)

    @staticmethod
    def classify(p, tol=None):
        """
        Decide which case p belongs to.

        Args:
            p: MonodromyPoint
            tol: relative zero tolerance on |g11| and |g22|

        Returns:
            CaseTag: CASE_II (k=+1) when g22 = 0, CASE_III (k=−1) when g11 = 0,
            otherwise CASE_I
        """
        tol = settings.DP3_TOLERANCES['classify'] if tol is None else tol
        scale = p.g_scale
        g11_zero = abs(p.g11) <= tol * scale
        g22_zero = abs(p.g22) <= tol * scale
        if g11_zero and g22_zero:
            raise DegeneratePoint('g11 = g22 = 0: the point belongs to none of the cases')
        if g22_zero:
            return CaseTag(Case.CASE_II_KPLUS, 1)
        if g11_zero:
            return CaseTag(Case.CASE_III_KMINUS, -1)
        return CaseTag(Case.CASE_I, None)

    @staticmethod
    def complete_case2(a, s00, g11):
        """
        Full point with g22 = 0 from (a, s00, g11).
        """
        if g11 == 0:
            raise InvalidParameters('case II completion needs g11 != 0')
        a, s00, g11 = complex(a), complex(s00), complex(g11)
        e1 = np.exp(np.pi * a)
        return MonodromyPoint(
            a=a,
            s00=s00,
            s0inf=-1j * g11 ** 2 * (1 + e1 ** 2 + 1j * s00 * e1) * e1,
            s1inf=-1j / (e1 ** 3 * g11 ** 2),
            g11=g11,
            g12=-1j / (e1 * g11),
            g21=-1j * e1 * g11,
            g22=0,
        )

    @staticmethod
    def complete_case3(a, s00, g22):
        """
        Full point with g11 = 0 from (a, s00, g22).
        """
        if g22 == 0:
            raise InvalidParameters('case III completion needs g22 != 0')
        a, s00, g22 = complex(a), complex(s00), complex(g22)
        e1 = np.exp(np.pi * a)
        return MonodromyPoint(
            a=a,
            s00=s00,
            s0inf=-1j / (e1 * g22 ** 2),
            s1inf=-1j * g22 ** 2 * (1 + e1 ** 2 + 1j * s00 * e1) / e1,
            g11=0,
            g12=1j * e1 * g22,
            g21=1j / (e1 * g22),
            g22=g22,
        )

    @staticmethod
    def complete_case1(a, g11, g12, g21, g22, tol=None):
        """
        Full point from a connection matrix with g11·g22 ≠ 0 and det = 1;
        s00 follows from the cross equation and s0inf, s1inf from the
        quadratic ones.
        """
        tol = settings.DP3_TOLERANCES['manifold'] if tol is None else tol
        a, g11, g12, g21, g22 = (complex(v) for v in (a, g11, g12, g21, g22))
        if g11 * g22 == 0:
            raise InvalidParameters('case I completion needs g11*g22 != 0')
        det = g11 * g22 - g12 * g21
        if abs(det - 1) > tol * max(1.0, abs(g11 * g22), abs(g12 * g21)):
            raise InvalidParameters(f'connection matrix must have determinant 1, got {det}')
        em = np.exp(-np.pi * a)
        s00 = (1j * em - g21 * g22 + g11 * g12) / (g11 * g22)
        return MonodromyPoint(
            a=a,
            s00=s00,
            s0inf=(g11 ** 2 - g21 ** 2 - s00 * g11 * g21) / (1j * em),
            s1inf=(g22 ** 2 - g12 ** 2 + s00 * g12 * g22) / (1j / em),
            g11=g11,
            g12=g12,
            g21=g21,
            g22=g22,
        )

    @staticmethod
    def sample_point(case, seed=0):
        """
        Deterministic pseudo-random point of the requested case.

        Free parameters have modulus in [0.2, 2] and |Re a| ≤ 1.

        Args:
            case: Case or CaseTag
            seed: integer seed of numpy's default_rng

        Returns:
            MonodromyPoint
        """
        case = case.case if isinstance(case, CaseTag) else Case(case)
        rng = np.random.default_rng(seed)

        def draw():
            return rng.uniform(0.2, 2.0) * np.exp(2j * np.pi * rng.uniform())

        a = complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0))
        if case == Case.CASE_II_KPLUS:
            return MonodromyService.complete_case2(a, draw(), draw())
        if case == Case.CASE_III_KMINUS:
            return MonodromyService.complete_case3(a, draw(), draw())
        g11, g12, g21 = draw(), draw(), draw()
        g22 = (1 + g12 * g21) / g11
        return MonodromyService.complete_case1(a, g11, g12, g21, g22)

    @staticmethod
    def apply_symmetry(label, p):
        """
        Image of p under the symmetry map with the given label.

        Args:
            label: SymmetryLabel (or its string form)
            p: MonodromyPoint

        Returns:
            MonodromyPoint: transformed point; s00 is unchanged and a maps to
            (−1)^{ε2}a, or (−1)^{1+ε̂2}a for the imaginary-axis labels
        """
        if isinstance(label, str):
            label = SymmetryLabel.parse(label)
        key = (label.hatted, label.eps1, label.eps2, label.m_eps2, label.ell)
        action = ACTIONS.get(key)
        if action is None:
            raise InadmissibleLabel(f'no explicit action for {label}')
        s0inf, s1inf, g11, g12, g21, g22 = action(MonodromyInputs(p))
        parity = label.eps2 % 2
        if label.hatted:
            parity = 1 - parity
        a = -p.a if parity else p.a
        return MonodromyPoint(a, p.s00, s0inf, s1inf, g11, g12, g21, g22)

    @staticmethod
    def apply_chain(chain, p):
        """Apply F1∘F2∘…∘Fn to p (the last label acts first)."""
        for label in reversed(list(chain)):
            p = MonodromyService.apply_symmetry(label, p)
        return p

    @staticmethod
    def verify_composition(lhs, rhs_chain, p, tol=None):
        """
        Compare a composite map with its defining chain at p.

        (a, s00, s0inf, s1inf) must agree; (g11, g12, g21, g22) must agree up
        to one global sign.

        Returns:
            CompositionReport: with the sign that matched and per-coordinate deltas
        """
        tol = settings.DP3_TOLERANCES['composition'] if tol is None else tol
        left = MonodromyService.apply_symmetry(lhs, p)
        right = MonodromyService.apply_chain(rhs_chain, p)

        def rel(x, y):
            return abs(x - y) / max(1.0, abs(x), abs(y))

        deltas = {name: rel(getattr(left, name), getattr(right, name))
                  for name in ('a', 's00', 's0inf', 's1inf')}
        best_sign, best = 1, None
        for sign in (1, -1):
            g_deltas = {name: rel(getattr(left, name), sign * getattr(right, name))
                        for name in ('g11', 'g12', 'g21', 'g22')}
            if best is None or max(g_deltas.values()) < max(best.values()):
                best_sign, best = sign, g_deltas
        deltas.update(best)
        passed = max(deltas.values()) <= tol
        if not passed:
            logger.warning('composition %s failed: %s', lhs, deltas)
        return CompositionReport(
            lhs=lhs,
            rhs_chain=tuple(rhs_chain),
            passed=passed,
            sign=best_sign,
            deltas=deltas,
        )

    @staticmethod
    def compositions():
        """All defined compositions as (lhs, [F, G]) SymmetryLabel pairs."""
        return [
            (SymmetryLabel(*lhs), [SymmetryLabel(*item) for item in chain])
            for lhs, chain in COMPOSITIONS
        ]

    @staticmethod
    def enumerate_labels():
        """
        Returns:
            tuple: (30 real-axis labels, 16 imaginary-axis labels)
        """
        unhatted = [SymmetryLabel(*key) for key in ACTIONS if not key[0]]
        hatted = [SymmetryLabel(*key) for key in ACTIONS if key[0]]
        return unhatted, hatted

    @staticmethod
    def transformed_for_regime(regime, p):
        """
        Monodromy data seen by the trans-series of a regime, checked against
        the regime's branch index.

        Raises:
            InvalidCase: for case-I data or a case that does not match regime.k
        """
        image = MonodromyService.apply_symmetry(regime.symmetry_label(), p)
        tag = MonodromyService.classify(image)
        if tag.case == Case.CASE_I:
            raise InvalidCase(
                f'monodromy data is in case I for {regime}; the large-tau trans-series '
                'needs g11 = 0 or g22 = 0'
            )
        if tag.k != regime.k:
            raise InvalidCase(f'monodromy data belongs to k={tag.k:+d}, regime uses k={regime.k:+d}')
        return image
