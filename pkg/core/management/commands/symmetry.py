"""
Management command for the symmetry group of the monodromy manifold.
Run: python manage.py symmetry --enumerate
     python manage.py symmetry --label '(1,0,0|0)' --case CASE_II_kplus --seed 3
     python manage.py symmetry --compositions
"""
from core.management.commands._base import Dp3Command


class Command(Dp3Command):
    help = 'Enumerate symmetry labels, apply one map, or verify the composition table'
    command_name = 'symmetry'
    command_keys = ('enumerate', 'label', 'compositions')

    def add_command_arguments(self, parser):
        parser.add_argument('--enumerate', action='store_true', default=None)
        parser.add_argument('--label', help="label such as '(1,0,0|0)' or '^(1,0,-1|0)'")
        parser.add_argument('--compositions', action='store_true', default=None)

    def report(self, result):
        counts = result.document.get('counts')
        if counts:
            self.stderr.write(self.style.SUCCESS(f'{counts[0]} real-axis and {counts[1]} imaginary-axis labels'))
