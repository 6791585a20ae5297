"""
Business Logic Layer: Run Service
This module executes one validated RunConfig: it dispatches to the other
services, assembles the output document with its header block and decides
the exit code (0 success, 2 failed check; usage errors never get here).
"""
from concurrent.futures import ThreadPoolExecutor
import logging

import numpy as np
from django.conf import settings

from core.exceptions import Dp3Error, InvalidParameters
from core.models import (
    Case, Family, MonodromyPoint, Quantity, ResidualReport, RunResult, TauSpec,
)
from core.services.asymptotics_service import AsymptoticsService
from core.services.coefficient_service import CoefficientService
from core.services.export_service import ExportService
from core.services.monodromy_service import MonodromyService
from core.services.verification_service import VerificationService

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CHECK_FAILED = 2

CHECKS = (
    'coefficients',
    'manifold',
    'instanton-exponent',
    'truncation',
    'identities',
    'sigma-form',
    'asymptotic-vs-ode',
    'exponential-fit',
    'phi',
)

HATTED_FAMILIES = (
    Family.U_HAT, Family.W_HAT, Family.ETA_HAT, Family.R_HAT, Family.D_HAT, Family.HSTAR_HAT,
)


class RunService:
    """
    Service class behind the management commands.
    """

    @staticmethod
    def run(config):
        """
        Execute a RunConfig.

        Args:
            config: RunConfig with the command-specific fields filled in

        Returns:
            RunResult: exit code, document and rendered text (written to
            config.output_path when one is set)
        """
        handlers = {
            'coeffs': RunService.coeffs,
            'eval': RunService.evaluate,
            'classify': RunService.classify,
            'symmetry': RunService.symmetry,
            'verify': RunService.verify,
            'sweep': RunService.sweep,
        }
        handler = handlers.get(config.command)
        if handler is None:
            raise InvalidParameters(f'unknown command {config.command!r}')
        document, rows, passed = handler(config)
        document['header'] = ExportService.header(
            config.command,
            params=config.params,
            regime=config.regime,
            N=config.N,
            seed=config.seed,
        )
        if config.output_format == 'csv':
            text = ExportService.to_csv(document['header'], rows)
        else:
            text = ExportService.to_json(document)
        if config.output_path:
            ExportService.write(config.output_path, text)
        exit_code = EXIT_OK if passed else EXIT_CHECK_FAILED
        logger.info('%s finished with exit code %d', config.command, exit_code)
        return RunResult(exit_code, document, text, config.output_path)

    # ------------------------------------------------------------------
    # Helpers
    # ------------------------------------------------------------------

    @staticmethod
    def _require(config, *names):
        missing = [name for name in names if getattr(config, name) is None]
        if missing:
            raise InvalidParameters(f'{config.command} needs {", ".join(missing)}')

    @staticmethod
    def _taus(config, default):
        spec = config.tau_spec or TauSpec(*default)
        return spec.values()

    @staticmethod
    def _point(config):
        """The configured monodromy point, or a seeded sample of the configured case."""
        if config.monodromy is not None:
            return config.monodromy
        case = config.case or Case.CASE_II_KPLUS
        return MonodromyService.sample_point(case, config.seed)

    @staticmethod
    def _monodromy_argument(config):
        """What the evaluators take: a point, a bare s00 or None."""
        if config.monodromy is not None:
            return config.monodromy
        return config.s00

    @staticmethod
    def _report_document(report):
        return {'report': report, 'passed': report.passed}

    # ------------------------------------------------------------------
    # Commands
    # ------------------------------------------------------------------

    @staticmethod
    def coeffs(config):
        """Coefficient table of one family."""
        RunService._require(config, 'params', 'regime')
        params, k, N = config.params, config.regime.k, config.N
        family = Family(str(config.options.get('family', 'U')).upper())
        if family in HATTED_FAMILIES:
            table = CoefficientService.hatted_family(
                params, k, config.regime.eps1 if config.regime.hatted else 1, N=N
            )[family]
        elif family in (Family.NU_HAT, Family.MU_HAT, Family.P_HAT):
            tables = CoefficientService.phi_coeffs(params, k, N=N, hatted=True)
            table = dict(zip((Family.NU_HAT, Family.MU_HAT, Family.P_HAT), tables))[family]
        elif family in (Family.NU_TILDE, Family.MU_STAR, Family.P_STAR):
            tables = CoefficientService.phi_coeffs(params, k, N=N)
            table = dict(zip((Family.NU_TILDE, Family.MU_STAR, Family.P_STAR), tables))[family]
        elif family in (Family.D, Family.HTILDE):
            table = dict(zip((Family.D, Family.HTILDE),
                             CoefficientService.d_and_htilde_coeffs(params, k, N=N)))[family]
        elif family == Family.R:
            table = CoefficientService.r_coeffs(params, k, N=N)
        else:
            u_table = CoefficientService.u_coeffs(params, k, config.regime.eps1, N=N)
            table = {
                Family.U: u_table,
                Family.W: CoefficientService.w_coeffs(u_table),
                Family.ETA: CoefficientService.eta_coeffs(u_table),
            }[family]
        warnings = []
        if table.resonant:
            warnings.append('i*a is an integer: algebraic-solution case')
        document = {
            'family': table.family,
            'k': k,
            'eps_labels': table.eps_labels,
            'coefficients': table.values,
            'warnings': warnings,
        }
        rows = [{'m': m, 'value': value} for m, value in enumerate(table.values)]
        return document, rows, True

    @staticmethod
    def evaluate(config):
        """Trans-series values over a τ ladder for one or more quantities."""
        RunService._require(config, 'params', 'regime')
        quantities = config.options.get('quantity', [Quantity.U.value])
        if isinstance(quantities, str):
            quantities = [quantities]
        monodromy = RunService._monodromy_argument(config)
        results, rows = [], []
        for name in quantities:
            quantity = Quantity(name)
            for tau in RunService._taus(config, (100.0,)):
                result = AsymptoticsService.evaluate(
                    quantity, config.params, config.regime, monodromy, tau, config.N
                )
                results.append(result)
                rows.append({
                    'quantity': quantity.value,
                    'tau': result.tau,
                    'power': result.power_part,
                    'exp': result.exp_part,
                    'total': result.total,
                    'N': result.order_N,
                    'proxy': result.next_term_proxy,
                    'exp_magnitude': result.exp_magnitude,
                })
        return {'evaluations': results}, rows, True

    @staticmethod
    def classify(config):
        """Manifold residuals and case of a monodromy point."""
        point = RunService._point(config)
        report = MonodromyService.check_manifold(point, config.tolerances.get('manifold'))
        tag = MonodromyService.classify(point, config.tolerances.get('classify'))
        document = {'point': point, 'manifold': report, 'case': tag.case, 'k': tag.k}
        rows = [{'equation': name, 'residual': value, 'scaled': scaled}
                for name, value, scaled in zip(report.NAMES, report.residuals, report.scaled)]
        return document, rows, report.passed

    @staticmethod
    def symmetry(config):
        """Label enumeration, one symmetry image, or the composition table."""
        options = config.options
        if options.get('enumerate'):
            unhatted, hatted = MonodromyService.enumerate_labels()
            document = {
                'real_axis': [str(label) for label in unhatted],
                'imaginary_axis': [str(label) for label in hatted],
                'counts': [len(unhatted), len(hatted)],
            }
            rows = [{'label': str(label)} for label in unhatted + hatted]
            return document, rows, True

        point = RunService._point(config)
        if options.get('compositions'):
            reports = [
                MonodromyService.verify_composition(lhs, chain, point, config.tolerances.get('composition'))
                for lhs, chain in MonodromyService.compositions()
            ]
            rows = [{'lhs': str(r.lhs), 'chain': ' o '.join(str(c) for c in r.rhs_chain),
                     'sign': r.sign, 'passed': r.passed,
                     'max_delta': max(r.deltas.values())} for r in reports]
            return {'point': point, 'compositions': reports}, rows, all(r.passed for r in reports)

        label = options.get('label')
        if not label:
            raise InvalidParameters('symmetry needs --enumerate, --compositions or --label')
        image = MonodromyService.apply_symmetry(label, point)
        report = MonodromyService.check_manifold(image, config.tolerances.get('manifold'))
        rows = [{'field': name, 'before': getattr(point, name), 'after': getattr(image, name)}
                for name in MonodromyPoint.FIELDS]
        return {'label': label, 'point': point, 'image': image, 'manifold': report}, rows, report.passed

    @staticmethod
    def verify(config):
        """One named verification check."""
        check = config.options.get('check')
        if check not in CHECKS:
            raise InvalidParameters(f'unknown check {check!r}; choose from {", ".join(CHECKS)}')
        report = getattr(RunService, '_check_' + check.replace('-', '_'))(config)
        document = RunService._report_document(report)
        if report.trajectory is not None:
            pointwise = report.residuals if len(report.residuals) == len(report.tau_points) else None
            rows = ExportService.trajectory_rows(report.trajectory, pointwise)
            document['trajectory'] = rows
            return document, rows, report.passed
        rows = [{'tau': tau, 'residual': residual}
                for tau, residual in zip(report.tau_points, report.residuals)]
        if not rows:
            rows = [{'name': name, 'residual': value} for name, value in report.details.items()
                    if isinstance(value, float)]
        return document, rows, report.passed

    @staticmethod
    def sweep(config):
        """
        Evaluate a quantity over every (regime, τ) cell on a thread pool;
        results are sorted by cell key. A cell that raises is recorded with
        its error and makes the run fail.
        """
        RunService._require(config, 'params', 'regime')
        regimes = config.options.get('regimes') or [config.regime]
        quantity = Quantity(config.options.get('quantity', Quantity.U.value))
        monodromy = RunService._monodromy_argument(config)
        cells = [(regime, tau) for regime in regimes for tau in RunService._taus(config, (100.0,))]

        def evaluate(cell):
            regime, tau = cell
            key = (str(regime), tau.real, tau.imag)
            try:
                result = AsymptoticsService.evaluate(
                    quantity, config.params, regime, monodromy, tau, config.N
                )
            except Dp3Error as exc:
                logger.warning('sweep cell %s failed: %s', key, exc)
                return key, {'regime': str(regime), 'tau': tau, 'error': str(exc)}
            return key, {
                'regime': str(regime),
                'tau': tau,
                'total': result.total,
                'power': result.power_part,
                'exp': result.exp_part,
                'proxy': result.next_term_proxy,
                'error': '',
            }

        workers = config.options.get('workers') or settings.DP3_SWEEP_WORKERS
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = sorted(pool.map(evaluate, cells), key=lambda item: item[0])
        rows = [row for _, row in results]
        passed = not any(row['error'] for row in rows)
        return {'quantity': quantity, 'cells': rows}, rows, passed

    # ------------------------------------------------------------------
    # Checks
    # ------------------------------------------------------------------

    @staticmethod
    def _check_coefficients(config):
        """Recurrence tables against their independent series oracles."""
        RunService._require(config, 'params', 'regime')
        params, k, N = config.params, config.regime.k, config.N
        hatted = config.regime.hatted
        tol = config.tolerances.get('coefficient', settings.DP3_TOLERANCES['coefficient'])
        data = CoefficientService.arrays(params, k, N, hatted)
        u = data['u'][:N + 1]

        def rel(x, y):
            x, y = np.asarray(x), np.asarray(y)
            return float(np.max(np.abs(x - y) / np.maximum(1.0, np.maximum(np.abs(x), np.abs(y)))))

        details = {
            'u': rel(u, CoefficientService.u_order_matching(params, k, N, hatted)),
            'w': rel(data['w'][:N + 1], CoefficientService.w_reciprocal_oracle(u)[:N + 1]),
            'eta': rel(data['eta'][:N - 1], CoefficientService.eta_convolution_oracle(u)[:N - 1]),
            'r': rel(data['r'][:N + 1], CoefficientService.r_series_oracle(params, k, N, hatted)[:N + 1]),
        }
        residuals = tuple(details.values())
        report = ResidualReport(
            quantity='coefficients',
            tau_points=(),
            residuals=residuals,
            fitted_decay_exponent=float('nan'),
            expected_exponent=float('nan'),
            passed=max(residuals) <= tol,
            tolerance=tol,
            details=details,
        )
        VerificationService._announce('coefficients', report)
        return report

    @staticmethod
    def _check_manifold(config):
        """
        Every symmetry map keeps sampled points on the manifold, and every
        composition matches its chain on composition_points seeds per case.
        """
        samples = int(config.options.get('samples') or 100)
        composition_points = int(config.options.get('composition_points') or 10)
        tol = config.tolerances.get('manifold', settings.DP3_TOLERANCES['manifold'])
        unhatted, hatted = MonodromyService.enumerate_labels()
        cases = (Case.CASE_I, Case.CASE_II_KPLUS, Case.CASE_III_KMINUS)
        worst, failures = 0.0, []
        for case in cases:
            for j in range(samples):
                point = MonodromyService.sample_point(case, config.seed + j)
                for label in unhatted + hatted:
                    image = MonodromyService.apply_symmetry(label, point)
                    report = MonodromyService.check_manifold(image, tol)
                    worst = max(worst, report.max_residual)
                    if not report.passed:
                        failures.append(f'{case.value}#{j} {label}')

        composition_failures, checked = [], 0
        for case in cases:
            for j in range(composition_points):
                point = MonodromyService.sample_point(case, config.seed + j)
                for lhs, chain in MonodromyService.compositions():
                    checked += 1
                    outcome = MonodromyService.verify_composition(
                        lhs, chain, point, config.tolerances.get('composition')
                    )
                    if not outcome.passed:
                        composition_failures.append(f'{case.value}#{j} {lhs}')
        logger.info('manifold check: %d samples per case, %d composition checks', samples, checked)

        report = ResidualReport(
            quantity='manifold',
            tau_points=(),
            residuals=(worst,),
            fitted_decay_exponent=float('nan'),
            expected_exponent=float('nan'),
            passed=not failures and not composition_failures,
            tolerance=tol,
            details={'max_scaled_residual': worst, 'failures': failures,
                     'samples_per_case': samples, 'composition_checks': checked,
                     'composition_failures': composition_failures},
        )
        VerificationService._announce('manifold', report)
        return report

    @staticmethod
    def _check_instanton_exponent(config):
        RunService._require(config, 'params')
        k = config.regime.k if config.regime is not None else 1
        s00 = config.s00 if config.s00 is not None else 0j
        return VerificationService.instanton_exponent_check(
            config.params, k, s00, config.tolerances.get('instanton')
        )

    @staticmethod
    def _check_truncation(config):
        RunService._require(config, 'params', 'regime')
        taus = RunService._taus(config, (40.0, 160.0, 3))
        return VerificationService.truncation_report(
            config.params, config.regime, config.N, taus, config.tolerances.get('decay_fit')
        )

    @staticmethod
    def _trajectory(config, default):
        """Integrate from the trans-series at the first τ of the ladder to the last."""
        RunService._require(config, 'params', 'regime')
        taus = RunService._taus(config, default)
        if len(taus) < 2:
            raise InvalidParameters('this check needs --tau-start and --tau-stop')
        monodromy = RunService._monodromy_argument(config)
        params, regime = config.params, config.regime
        start = AsymptoticsService.eval_u(params, regime, monodromy, taus[0], config.N)
        up0 = AsymptoticsService.eval_u_prime(
            params, regime, taus[0], config.N, monodromy=monodromy, include_exp=True
        )
        return VerificationService.integrate(
            params, taus[0], start.total, up0, taus[-1],
            config.options.get('rel_tol'), pair=AsymptoticsService.pair(params, regime),
            tau_grid=taus,
        )

    @staticmethod
    def _check_identities(config):
        trajectory = RunService._trajectory(config, (40.0, 20.0, 11))
        return VerificationService.trajectory_identities(
            config.params, trajectory, config.tolerances.get('identity')
        )

    @staticmethod
    def _check_sigma_form(config):
        """σ-form residual along a trajectory, σ′ and σ″ by finite differences of the local jet."""
        trajectory = RunService._trajectory(config, (40.0, 20.0, 5))
        tol = config.tolerances.get('sigma_form', settings.DP3_TOLERANCES['sigma_form'])
        residuals = []
        for tau, u, up in zip(trajectory.tau_grid, trajectory.u, trajectory.u_prime):
            sigma_fn = VerificationService.jet_sigma_fn(config.params, tau, u, up, pair=trajectory.pair)
            residuals.append(VerificationService.sigma_form_residual(
                sigma_fn, config.params, tau, pair=trajectory.pair, relative=True
            ))
        report = ResidualReport(
            quantity=Quantity.SIGMA.value,
            tau_points=tuple(trajectory.tau_grid),
            residuals=tuple(residuals),
            fitted_decay_exponent=float('nan'),
            expected_exponent=float('nan'),
            passed=not trajectory.truncated and max(residuals) <= tol,
            tolerance=tol,
            details={'truncated': trajectory.truncated},
            trajectory=trajectory,
        )
        VerificationService._announce('sigma_form', report)
        return report

    @staticmethod
    def _check_asymptotic_vs_ode(config):
        RunService._require(config, 'params', 'regime')
        taus = RunService._taus(config, (100.0, 50.0, 2))
        return VerificationService.asymptotic_vs_ode(
            config.params, config.regime, RunService._monodromy_argument(config), config.N,
            taus[0], taus[-1], rel_tol=config.options.get('rel_tol'),
        )

    @staticmethod
    def _check_exponential_fit(config):
        RunService._require(config, 'params', 'regime', 's00')
        taus = RunService._taus(config, (6.0, 2.0, 2))
        return VerificationService.exponential_fit(
            config.params, config.regime, config.s00, config.N, taus[0], taus[-1],
            rel_tol=config.options.get('rel_tol'),
        )

    @staticmethod
    def _check_phi(config):
        """Phase derivative against 2a/τ + b/u; without --monodromy a case II/III point with g = 1 is completed."""
        RunService._require(config, 'params', 'regime')
        point = config.monodromy
        if point is None:
            s00 = config.s00 if config.s00 is not None else 0j
            if config.regime.k == 1:
                point = MonodromyService.complete_case2(config.params.a, s00, 1.0)
            else:
                point = MonodromyService.complete_case3(config.params.a, s00, 1.0)
        taus = RunService._taus(config, (20.0, 80.0, 4))
        return VerificationService.phi_consistency(
            config.params, config.regime, point, config.N, taus,
            tol=config.tolerances.get('decay_fit'),
        )
