"""
Management command printing one coefficient table.
Run: python manage.py coeffs --family U --k +1 --a 0.3 --b 1 --N 12
"""
from core.management.commands._base import Dp3Command


class Command(Dp3Command):
    help = 'Coefficient table of one trans-series family (U, W, ETA, R, D, HTILDE, NU_TILDE, ...)'
    command_name = 'coeffs'
    command_keys = ('family',)

    def add_command_arguments(self, parser):
        parser.add_argument('--family', help='family name, case-insensitive (default U)')

    def report(self, result):
        for warning in result.document.get('warnings', ()):
            self.stderr.write(self.style.WARNING(warning))
