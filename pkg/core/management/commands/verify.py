"""
Management command running one verification check.
Run: python manage.py verify --check instanton-exponent --k +1 --a 0.3 --b 1
Exit code 2 means the check ran and failed.
"""
from core.management.commands._base import Dp3Command
from core.services.run_service import CHECKS


class Command(Dp3Command):
    help = 'Run a verification check: ' + ', '.join(CHECKS)
    command_name = 'verify'
    command_keys = ('check', 'rel_tol', 'samples', 'composition_points')

    def add_command_arguments(self, parser):
        parser.add_argument('--check', choices=CHECKS)
        parser.add_argument('--rel-tol', type=float, dest='rel_tol', help='integrator relative tolerance')
        parser.add_argument('--samples', type=int, help='points per case for the manifold check')
        parser.add_argument('--composition-points', type=int, dest='composition_points',
                            help='points per case on which each composition is checked')

    def report(self, result):
        report = result.document['report']
        if report.passed:
            self.stderr.write(self.style.SUCCESS(f'{report.quantity}: passed'))
        else:
            self.stderr.write(self.style.ERROR(f'{report.quantity}: failed'))
