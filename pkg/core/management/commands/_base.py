"""
Shared plumbing of the dp3asym management commands: common flags, config
file merging, validation through RunConfigForm and exit-code mapping.
"""
import logging

from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError

from core.exceptions import Dp3Error
from core.forms import RunConfigForm
from core.services.export_service import ExportService
from core.services.run_service import EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE, RunService

logger = logging.getLogger(__name__)

COMMON_KEYS = (
    'a', 'b', 'eps', 'eps2', 'eps2_hat',
    'axis', 'eps1', 'eps2_label', 'm_eps2', 'ell', 'k',
    'monodromy', 'case', 's00', 'g11', 'g22',
    'N', 'tau', 'tau_start', 'tau_stop', 'tau_count',
    'output', 'format', 'seed',
)


class Dp3Command(BaseCommand):
    """
    Base class of the commands. Subclasses set command_name and may add
    their own flags through add_command_arguments; those flags are passed
    on to the form under their dest names.
    """
    command_name = None
    command_keys = ()

    def add_arguments(self, parser):
        parser.add_argument('--config', help='JSON file with run settings; flags override it')

        group = parser.add_argument_group('parameters')
        group.add_argument('--a', help='parameter a, e.g. 0.3+0.1i (use --a=-0.5 for negative values)')
        group.add_argument('--b', help='parameter b (eps*b must be real)')
        group.add_argument('--eps', help='epsilon, +1 or -1')
        group.add_argument('--eps2', type=int, help='phase label of eps*b on the real axis')
        group.add_argument('--eps2-hat', type=int, dest='eps2_hat', help='phase label on the imaginary axis')

        group = parser.add_argument_group('regime')
        group.add_argument('--axis', choices=['REAL', 'IMAGINARY'])
        group.add_argument('--eps1', type=int, help='ray label (hatted on the imaginary axis)')
        group.add_argument('--regime-eps2', type=int, dest='eps2_label',
                           help='eps2 label of the regime, defaults from the parameters')
        group.add_argument('--m-eps2', type=int, dest='m_eps2')
        group.add_argument('--ell', type=int)
        group.add_argument('--k', help='branch index, +1 or -1')

        group = parser.add_argument_group('monodromy')
        group.add_argument('--monodromy', help='JSON object or list with a, s00, s0inf, s1inf, g11, g12, g21, g22')
        group.add_argument('--case', choices=['CASE_I', 'CASE_II_kplus', 'CASE_III_kminus'])
        group.add_argument('--s00', help='Stokes multiplier s00')
        group.add_argument('--g11', help='free parameter of a case II point')
        group.add_argument('--g22', help='free parameter of a case III point')

        group = parser.add_argument_group('evaluation')
        group.add_argument('--N', help="truncation index or 'auto'")
        group.add_argument('--tau', help='single evaluation point')
        group.add_argument('--tau-start', dest='tau_start')
        group.add_argument('--tau-stop', dest='tau_stop')
        group.add_argument('--tau-count', type=int, dest='tau_count')

        group = parser.add_argument_group('output')
        group.add_argument('--output', help='file to write; stdout when omitted')
        group.add_argument('--format', choices=['json', 'csv'])
        group.add_argument('--seed', type=int)
        group.add_argument('--tolerance', action='append', metavar='NAME=VALUE',
                           help='override one entry of DP3_TOLERANCES (repeatable)')

        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def _tolerances(self, pairs):
        tolerances = {}
        for pair in pairs or ():
            name, sep, value = pair.partition('=')
            if not sep:
                raise CommandError(f'--tolerance expects NAME=VALUE, got {pair!r}', returncode=EXIT_USAGE)
            tolerances[name.strip()] = value.strip()
        return tolerances

    def collect(self, options):
        """Config file values overlaid with the flags that were given."""
        data = {}
        if options.get('config'):
            try:
                loaded = ExportService.read_json(options['config'])
            except Dp3Error as exc:
                raise CommandError(str(exc), returncode=EXIT_USAGE) from exc
            if not isinstance(loaded, dict):
                raise CommandError('the config file must hold a JSON object', returncode=EXIT_USAGE)
            data.update(loaded)
        for key in COMMON_KEYS + tuple(self.command_keys):
            value = options.get(key)
            if value is not None:
                data[key] = value
        if options.get('tolerance'):
            data['tolerances'] = {**(data.get('tolerances') or {}), **self._tolerances(options['tolerance'])}
        data['command'] = self.command_name
        return data

    def handle(self, *args, **options):
        data = self.collect(options)
        try:
            config = RunConfigForm(data).build()
        except ValidationError as exc:
            raise CommandError('invalid configuration: ' + '; '.join(exc.messages),
                               returncode=EXIT_USAGE) from exc
        try:
            result = RunService.run(config)
        except Dp3Error as exc:
            logger.error('%s failed: %s', self.command_name, exc)
            raise CommandError(str(exc), returncode=EXIT_USAGE) from exc

        if result.output_path:
            style = self.style.SUCCESS if result.exit_code == EXIT_OK else self.style.WARNING
            self.stdout.write(style(f'Wrote {result.output_path}'))
        else:
            self.stdout.write(result.text, ending='')
        self.report(result)
        if result.exit_code == EXIT_CHECK_FAILED:
            raise CommandError(f'{self.command_name}: check failed', returncode=EXIT_CHECK_FAILED)

    def report(self, result):
        """Hook for a short human-readable summary on stderr."""
