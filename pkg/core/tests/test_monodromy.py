from django.test import SimpleTestCase

from core.exceptions import DegeneratePoint, InadmissibleLabel, InvalidParameters
from core.models import Case, MonodromyPoint, SymmetryLabel
from core.services.monodromy_service import MonodromyService

CASES = (Case.CASE_I, Case.CASE_II_KPLUS, Case.CASE_III_KMINUS)


class ManifoldTests(SimpleTestCase):

    def test_sampled_points_lie_on_manifold(self):
        for case in CASES:
            for seed in range(20):
                point = MonodromyService.sample_point(case, seed)
                report = MonodromyService.check_manifold(point)
                self.assertTrue(report.passed, f'{case} seed {seed}: {report.scaled}')

    def test_sampling_is_deterministic(self):
        first = MonodromyService.sample_point(Case.CASE_I, 42)
        second = MonodromyService.sample_point(Case.CASE_I, 42)
        self.assertEqual(first, second)
        self.assertNotEqual(first, MonodromyService.sample_point(Case.CASE_I, 43))

    def test_perturbed_point_fails(self):
        point = MonodromyService.sample_point(Case.CASE_II_KPLUS, 1)
        moved = MonodromyPoint(**{**point.as_dict(), 's0inf': point.s0inf + 0.1})
        self.assertFalse(MonodromyService.check_manifold(moved).passed)

    def test_classification(self):
        for case, k in ((Case.CASE_I, None), (Case.CASE_II_KPLUS, 1), (Case.CASE_III_KMINUS, -1)):
            tag = MonodromyService.classify(MonodromyService.sample_point(case, 5))
            self.assertEqual(tag.case, case)
            self.assertEqual(tag.k, k)

    def test_degenerate_point(self):
        point = MonodromyPoint(0.1, 0.2, 1, 1, 0, 1j, 1j, 0)
        with self.assertRaises(DegeneratePoint):
            MonodromyService.classify(point)

    def test_case_one_needs_unit_determinant(self):
        with self.assertRaises(InvalidParameters):
            MonodromyService.complete_case1(0.2, 1.0, 1.0, 1.0, 1.0)

    def test_case_completions_need_nonzero_parameter(self):
        with self.assertRaises(InvalidParameters):
            MonodromyService.complete_case2(0.2, 0.1, 0)
        with self.assertRaises(InvalidParameters):
            MonodromyService.complete_case3(0.2, 0.1, 0)


class SymmetryTests(SimpleTestCase):

    def test_label_counts(self):
        unhatted, hatted = MonodromyService.enumerate_labels()
        self.assertEqual(len(unhatted), 30)
        self.assertEqual(len(hatted), 16)
        self.assertEqual(len({label.key for label in unhatted + hatted}), 46)

    def test_label_parsing(self):
        label = SymmetryLabel.parse('^(1,0,-1|1)')
        self.assertTrue(label.hatted)
        self.assertEqual((label.eps1, label.eps2, label.m_eps2, label.ell), (1, 0, -1, 1))
        self.assertEqual(SymmetryLabel.parse(str(label)), label)
        self.assertEqual(SymmetryLabel.parse('0,0,0|0'), SymmetryLabel(False, 0, 0, 0, 0))

    def test_inadmissible_labels(self):
        for text in ('(0,0,1|0)', '(0,1,0|0)', '^(0,1,0|0)', '^(1,1,1|0)', '(0,0,0|2)', 'nonsense'):
            with self.assertRaises(InadmissibleLabel):
                SymmetryLabel.parse(text)

    def test_maps_preserve_manifold(self):
        unhatted, hatted = MonodromyService.enumerate_labels()
        for case in CASES:
            for seed in range(100):
                point = MonodromyService.sample_point(case, seed)
                for label in unhatted + hatted:
                    image = MonodromyService.apply_symmetry(label, point)
                    report = MonodromyService.check_manifold(image)
                    self.assertTrue(report.passed, f'{label} on {case} #{seed}: {report.scaled}')
                    self.assertEqual(image.s00, point.s00)
                    det = image.g11 * image.g22 - image.g12 * image.g21
                    scale = max(1.0, abs(image.g11 * image.g22), abs(image.g12 * image.g21))
                    self.assertLess(abs(det - 1) / scale, 1e-12)
                    flips = (label.eps2 % 2 == 1) != label.hatted
                    self.assertEqual(image.a, -point.a if flips else point.a)

    def test_string_labels_are_accepted(self):
        point = MonodromyService.sample_point(Case.CASE_I, 3)
        self.assertEqual(
            MonodromyService.apply_symmetry('(1,0,0|0)', point),
            MonodromyService.apply_symmetry(SymmetryLabel(False, 1, 0, 0, 0), point),
        )

    def test_identity_label(self):
        point = MonodromyService.sample_point(Case.CASE_I, 8)
        image = MonodromyService.apply_symmetry('(0,0,0|0)', point)
        for name in MonodromyPoint.FIELDS:
            self.assertAlmostEqual(getattr(image, name), getattr(point, name), places=12)

    def test_compositions_hold_up_to_sign(self):
        compositions = MonodromyService.compositions()
        self.assertTrue(compositions)
        for case in CASES:
            for seed in range(10):
                point = MonodromyService.sample_point(case, seed)
                for lhs, chain in compositions:
                    report = MonodromyService.verify_composition(lhs, chain, point, tol=1e-10)
                    self.assertTrue(report.passed, f'{lhs} = {chain} on {case} #{seed}: {report.deltas}')
                    self.assertIn(report.sign, (1, -1))

