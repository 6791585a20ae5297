"""
Management command evaluating a grid of (regime, tau) cells in parallel.
Run: python manage.py sweep --config sweep.json
"""
from core.management.commands._base import Dp3Command


class Command(Dp3Command):
    help = 'Evaluate one quantity over every (regime, tau) cell on a thread pool'
    command_name = 'sweep'
    command_keys = ('quantity', 'regimes', 'workers')

    def add_command_arguments(self, parser):
        parser.add_argument('--quantity', help='quantity to evaluate (default u)')
        parser.add_argument('--regimes', help='JSON list of regime objects (axis, eps1, eps2_label, m_eps2, ell, k)')
        parser.add_argument('--workers', type=int, help='thread pool size, defaults to DP3_SWEEP_WORKERS')

    def report(self, result):
        failed = [cell for cell in result.document['cells'] if cell['error']]
        if failed:
            self.stderr.write(self.style.ERROR(f'{len(failed)} of {len(result.document["cells"])} cells failed'))
