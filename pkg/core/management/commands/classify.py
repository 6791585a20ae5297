"""
Management command classifying a monodromy point.
Run: python manage.py classify --monodromy '{"a": ..., "s00": ..., ...}'
"""
from core.management.commands._base import Dp3Command


class Command(Dp3Command):
    help = 'Manifold residuals and case (I, II with k=+1, III with k=-1) of a monodromy point'
    command_name = 'classify'

    def report(self, result):
        case = result.document['case']
        k = result.document['k']
        message = f'{case.value}' + (f' (k={k:+d})' if k is not None else '')
        if result.document['manifold'].passed:
            self.stderr.write(self.style.SUCCESS(message))
        else:
            self.stderr.write(self.style.ERROR(f'{message}: point is off the manifold'))
