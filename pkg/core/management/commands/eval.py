"""
Management command evaluating trans-series over a tau ladder.
Run: python manage.py eval --a 0.3 --b 1 --quantity u,H --tau-start 20 --tau-stop 80 --tau-count 4
"""
from core.management.commands._base import Dp3Command


class Command(Dp3Command):
    help = 'Evaluate u, u_prime, f_minus, f_plus, H, sigma or phi from the trans-series'
    command_name = 'eval'
    command_keys = ('quantity',)

    def add_command_arguments(self, parser):
        parser.add_argument('--quantity', help='comma separated quantities (default u)')
