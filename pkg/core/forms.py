"""
Presentation Layer: Forms for run configuration validation.
Every management command feeds its merged flags and config file through
RunConfigForm, which composes the smaller forms below and produces a
RunConfig. Validation problems are reported as ValidationError.
"""
from django import forms
from django.conf import settings
from django.core.exceptions import ValidationError

from core.exceptions import Dp3Error
from core.models import (
    Axis, Case, MonodromyPoint, Parameters, Quantity, RegimeLabel, RunConfig, TauSpec,
)
from core.services.asymptotics_service import AUTO
from core.services.monodromy_service import MonodromyService
from core.services.run_service import CHECKS

COMMANDS = ('coeffs', 'eval', 'classify', 'symmetry', 'verify', 'sweep')
PARAMETER_COMMANDS = ('coeffs', 'eval', 'sweep')


def parse_complex(value):
    """
    Accept 1.5, [re, im], '0.3+0.1i', '2j' or 'i'.

    Raises:
        ValidationError: for anything else
    """
    if isinstance(value, bool):
        raise ValidationError(f'{value!r} is not a complex number')
    if isinstance(value, (int, float, complex)):
        return complex(value)
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValidationError(f'expected [re, im], got {value!r}')
        try:
            return complex(float(value[0]), float(value[1]))
        except (TypeError, ValueError) as exc:
            raise ValidationError(f'expected [re, im], got {value!r}') from exc
    text = str(value).strip().lower().replace(' ', '').replace('i', 'j')
    try:
        return complex(text)
    except ValueError as exc:
        raise ValidationError(f'{value!r} is not a complex number') from exc


class ComplexField(forms.Field):
    """Form field holding one complex number."""

    def to_python(self, value):
        if value in self.empty_values:
            return None
        return parse_complex(value)


class OrderField(forms.Field):
    """Truncation order: a non-negative integer up to DP3_MAX_N, or 'auto'."""

    def to_python(self, value):
        if value in self.empty_values:
            return None
        if str(value).strip().lower() == AUTO:
            return AUTO
        try:
            order = int(str(value).strip())
        except ValueError as exc:
            raise ValidationError(f"N must be an integer or 'auto', got {value!r}") from exc
        if order < 0:
            raise ValidationError('N must be non-negative')
        if order > settings.DP3_MAX_N:
            raise ValidationError(f'N={order} exceeds the configured maximum {settings.DP3_MAX_N}')
        return order


class ListField(forms.Field):
    """A list given natively or as a comma separated string."""

    def to_python(self, value):
        if value in self.empty_values:
            return []
        if isinstance(value, str):
            return [item.strip() for item in value.split(',') if item.strip()]
        if isinstance(value, (list, tuple)):
            return list(value)
        raise ValidationError(f'expected a list, got {value!r}')


class SignField(forms.IntegerField):
    """+1 or −1."""

    def validate(self, value):
        super().validate(value)
        if value not in (None, 1, -1):
            raise ValidationError(f'expected +1 or -1, got {value}')


class ParametersForm(forms.Form):
    """
    (a, b, ε) with the optional phase labels of εb.
    """
    a = ComplexField()
    b = ComplexField()
    eps = SignField(required=False)
    eps2 = forms.IntegerField(required=False, min_value=-1, max_value=1)
    eps2_hat = forms.IntegerField(required=False, min_value=-1, max_value=1)

    def clean(self):
        cleaned_data = super().clean()
        if self.errors:
            return cleaned_data
        eps = cleaned_data.get('eps')
        try:
            cleaned_data['parameters'] = Parameters(
                a=cleaned_data['a'],
                b=cleaned_data['b'],
                epsilon=1 if eps is None else eps,
                eps2=cleaned_data.get('eps2'),
                eps2_hat=cleaned_data.get('eps2_hat'),
            )
        except Dp3Error as exc:
            raise ValidationError(str(exc)) from exc
        return cleaned_data


class RegimeForm(forms.Form):
    """
    Ray and labels of a trans-series regime.

    Unset labels default from the parameters: ε2 follows params.eps2 (or
    eps2_hat on the imaginary axis), ε1 is 0 on the real axis and 1 on the
    imaginary one, and m(ε2) takes the only or the positive admissible value.
    """
    axis = forms.ChoiceField(choices=[(axis.value, axis.value) for axis in Axis], required=False)
    eps1 = forms.IntegerField(required=False, min_value=-1, max_value=1)
    eps2_label = forms.IntegerField(required=False, min_value=-1, max_value=1)
    m_eps2 = forms.IntegerField(required=False, min_value=-1, max_value=1)
    ell = forms.IntegerField(required=False, min_value=0, max_value=1)
    k = SignField(required=False)

    def __init__(self, *args, params=None, **kwargs):
        self.params = params
        super().__init__(*args, **kwargs)

    def clean(self):
        cleaned_data = super().clean()
        if self.errors:
            return cleaned_data
        axis = Axis(cleaned_data.get('axis') or Axis.REAL.value)
        hatted = axis == Axis.IMAGINARY
        eps2 = cleaned_data.get('eps2_label')
        if eps2 is None and self.params is not None:
            eps2 = self.params.eps2_hat if hatted else self.params.eps2
        eps2 = 0 if eps2 is None else eps2
        eps1 = cleaned_data.get('eps1')
        if eps1 is None:
            eps1 = 1 if hatted else 0
        m_eps2 = cleaned_data.get('m_eps2')
        if m_eps2 is None:
            if hatted:
                m_eps2 = 1 if eps2 == 0 else 0
            else:
                m_eps2 = 0 if eps2 == 0 else eps2
        k = cleaned_data.get('k')
        try:
            cleaned_data['regime'] = RegimeLabel(
                axis=axis,
                eps1=eps1,
                eps2=eps2,
                m_eps2=m_eps2,
                ell=cleaned_data.get('ell') or 0,
                k=1 if k is None else k,
            )
        except Dp3Error as exc:
            raise ValidationError(str(exc)) from exc
        return cleaned_data


class MonodromyForm(forms.Form):
    """
    Monodromy data given as a full point, as a case with its free
    parameters, or as a case alone (sampled later from the seed).
    """
    monodromy = forms.JSONField(required=False)
    case = forms.ChoiceField(choices=[(case.value, case.value) for case in Case], required=False)
    s00 = ComplexField(required=False)
    g11 = ComplexField(required=False)
    g22 = ComplexField(required=False)

    def __init__(self, *args, params=None, **kwargs):
        self.params = params
        super().__init__(*args, **kwargs)

    def clean_monodromy(self):
        data = self.cleaned_data.get('monodromy')
        if not data:
            return None
        if isinstance(data, (list, tuple)) and len(data) == len(MonodromyPoint.FIELDS):
            data = dict(zip(MonodromyPoint.FIELDS, data))
        if not isinstance(data, dict):
            raise ValidationError('monodromy must be an object or a list of eight numbers')
        missing = [name for name in MonodromyPoint.FIELDS if name not in data]
        if missing:
            raise ValidationError(f'monodromy point lacks {", ".join(missing)}')
        return MonodromyPoint(**{name: parse_complex(data[name]) for name in MonodromyPoint.FIELDS})

    def clean(self):
        cleaned_data = super().clean()
        if self.errors:
            return cleaned_data
        point = cleaned_data.get('monodromy')
        case = Case(cleaned_data['case']) if cleaned_data.get('case') else None
        s00 = cleaned_data.get('s00')
        g11, g22 = cleaned_data.get('g11'), cleaned_data.get('g22')
        if point is None and case is not None and (g11 is not None or g22 is not None):
            if self.params is None:
                raise ValidationError('completing a monodromy point needs the parameter a')
            a = self.params.a
            try:
                if case == Case.CASE_II_KPLUS and g11 is not None:
                    point = MonodromyService.complete_case2(a, s00 or 0j, g11)
                elif case == Case.CASE_III_KMINUS and g22 is not None:
                    point = MonodromyService.complete_case3(a, s00 or 0j, g22)
                else:
                    raise ValidationError(
                        f'{case.value} is completed from s00 and '
                        f'{"g11" if case == Case.CASE_II_KPLUS else "g22"}; '
                        'case I needs a full --monodromy point'
                    )
            except Dp3Error as exc:
                raise ValidationError(str(exc)) from exc
        cleaned_data['point'] = point
        cleaned_data['case_value'] = case
        return cleaned_data


class TauSpecForm(forms.Form):
    """A single τ or a geometric ladder tau_start → tau_stop with tau_count points."""
    tau = ComplexField(required=False)
    tau_start = ComplexField(required=False)
    tau_stop = ComplexField(required=False)
    tau_count = forms.IntegerField(required=False, min_value=1)

    def clean(self):
        cleaned_data = super().clean()
        if self.errors:
            return cleaned_data
        tau, start = cleaned_data.get('tau'), cleaned_data.get('tau_start')
        if tau is not None and start is not None:
            raise ValidationError('give either tau or tau_start/tau_stop, not both')
        spec = None
        if tau is not None:
            spec = TauSpec(tau)
        elif start is not None:
            stop = cleaned_data.get('tau_stop')
            count = cleaned_data.get('tau_count') or (1 if stop is None else 2)
            spec = TauSpec(start, stop, count)
        for value in (spec.values() if spec else ()):
            if value == 0:
                raise ValidationError('tau must be nonzero')
        cleaned_data['tau_spec'] = spec
        return cleaned_data


class RunConfigForm(forms.Form):
    """
    Complete run configuration.

    The sub-forms see the same data; their errors are merged into this
    form's errors, prefixed with the sub-form name.
    """
    command = forms.ChoiceField(choices=[(name, name) for name in COMMANDS])
    N = OrderField(required=False)
    output = forms.CharField(required=False)
    format = forms.ChoiceField(choices=[('json', 'json'), ('csv', 'csv')], required=False)
    seed = forms.IntegerField(required=False, min_value=0)
    tolerances = forms.JSONField(required=False)

    family = forms.CharField(required=False)
    quantity = ListField(required=False)
    check = forms.ChoiceField(choices=[(name, name) for name in CHECKS], required=False)
    label = forms.CharField(required=False)
    enumerate = forms.BooleanField(required=False)
    compositions = forms.BooleanField(required=False)
    regimes = forms.JSONField(required=False)
    workers = forms.IntegerField(required=False, min_value=1)
    rel_tol = forms.FloatField(required=False, min_value=1e-15, max_value=1e-2)
    samples = forms.IntegerField(required=False, min_value=1)
    composition_points = forms.IntegerField(required=False, min_value=1)

    def __init__(self, data=None, **kwargs):
        super().__init__(data, **kwargs)
        self.parameters_form = ParametersForm(data)
        self.tau_form = TauSpecForm(data)
        self.regime_form = None
        self.monodromy_form = None

    def _needs_parameters(self):
        data = self.data or {}
        return data.get('command') in PARAMETER_COMMANDS or data.get('a') is not None

    def _merge(self, name, form):
        for field, messages in form.errors.items():
            key = name if field == '__all__' else f'{name}.{field}'
            for message in messages:
                self.add_error(None, f'{key}: {message}')

    def clean_quantity(self):
        names = self.cleaned_data.get('quantity') or [Quantity.U.value]
        valid = {quantity.value for quantity in Quantity}
        unknown = [name for name in names if name not in valid]
        if unknown:
            raise ValidationError(f'unknown quantity {", ".join(unknown)}; choose from {", ".join(sorted(valid))}')
        return names

    def clean_tolerances(self):
        tolerances = self.cleaned_data.get('tolerances') or {}
        if not isinstance(tolerances, dict):
            raise ValidationError('tolerances must be an object')
        unknown = set(tolerances) - set(settings.DP3_TOLERANCES)
        if unknown:
            raise ValidationError(f'unknown tolerance {", ".join(sorted(unknown))}')
        try:
            return {key: float(value) for key, value in tolerances.items()}
        except (TypeError, ValueError) as exc:
            raise ValidationError('tolerances must be numbers') from exc

    def clean(self):
        cleaned_data = super().clean()
        params = None
        if self._needs_parameters():
            if self.parameters_form.is_valid():
                params = self.parameters_form.cleaned_data['parameters']
            else:
                self._merge('params', self.parameters_form)
        self.regime_form = RegimeForm(self.data, params=params)
        self.monodromy_form = MonodromyForm(self.data, params=params)
        for name, form in (('regime', self.regime_form), ('monodromy', self.monodromy_form),
                           ('tau', self.tau_form)):
            if not form.is_valid():
                self._merge(name, form)
        cleaned_data['parameters'] = params

        regimes = []
        for j, entry in enumerate(cleaned_data.get('regimes') or []):
            if not isinstance(entry, dict):
                self.add_error('regimes', f'entry {j} must be an object')
                continue
            form = RegimeForm(entry, params=params)
            if form.is_valid():
                regimes.append(form.cleaned_data['regime'])
            else:
                self._merge(f'regimes[{j}]', form)
        cleaned_data['regime_list'] = regimes
        return cleaned_data

    def build(self):
        """
        RunConfig from a valid form.

        Raises:
            ValidationError: when the form is not valid
        """
        if not self.is_valid():
            raise ValidationError(list(self.non_field_errors()) + [
                f'{field}: {message}'
                for field, messages in self.errors.items() if field != '__all__'
                for message in messages
            ])
        data = self.cleaned_data
        monodromy = self.monodromy_form.cleaned_data
        point = monodromy['point']
        if point is not None and data['parameters'] is not None:
            if abs(point.a - data['parameters'].a) > 1e-12 * max(1.0, abs(point.a)):
                raise ValidationError(
                    f'monodromy point has a={point.a}, parameters have a={data["parameters"].a}'
                )
        options = {
            'family': data.get('family') or 'U',
            'quantity': data['quantity'],
            'check': data.get('check') or None,
            'label': data.get('label') or None,
            'enumerate': bool(data.get('enumerate')),
            'compositions': bool(data.get('compositions')),
            'regimes': data['regime_list'],
            'workers': data.get('workers'),
            'rel_tol': data.get('rel_tol'),
            'samples': data.get('samples') or 100,
            'composition_points': data.get('composition_points') or 10,
        }
        if data['command'] == 'sweep':
            options['quantity'] = data['quantity'][0]
        return RunConfig(
            command=data['command'],
            params=data['parameters'],
            regime=self.regime_form.cleaned_data['regime'],
            monodromy=point,
            case=monodromy['case_value'],
            s00=monodromy.get('s00'),
            N=12 if data.get('N') is None else data['N'],
            tau_spec=self.tau_form.cleaned_data['tau_spec'],
            output_path=data.get('output') or None,
            output_format=data.get('format') or 'json',
            seed=data.get('seed') or 0,
            tolerances=data['tolerances'],
            options=options,
        )
