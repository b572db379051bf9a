"""
Run configuration
JSON documents with a flat `params` object, an `integrator` object, a
`spectrum` object and one object per command. Every section is validated
by a Django form; unknown keys anywhere are rejected.
"""

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from django import forms
from django.conf import settings
from django.core.exceptions import ValidationError
from django.core.validators import MinValueValidator

from .dynamics import METHODS, IntegratorConfig
from .exceptions import ConfigError
from .mean_field import SystemParams
from .spectrum import COMMON_AMPLITUDES

UNITS = ('gm', 'omega')


# ========== FIELDS ==========

class GridField(forms.Field):
    """
    Ascending grid given as a list, or as {start, stop, step} / {start, stop, num}
    (stop included)
    """
    default_error_messages = {
        'invalid': 'Grade inválida: use uma lista ou {start, stop, step|num}.',
        'empty': 'A grade não pode ser vazia.',
        'unsorted': 'A grade deve ser estritamente crescente.',
        'not_finite': 'A grade deve conter apenas valores finitos.',
    }

    def to_python(self, value):
        if value in self.empty_values:
            return None
        try:
            if isinstance(value, dict):
                grid = self._expand(value)
            elif isinstance(value, (list, tuple)):
                grid = np.array([float(v) for v in value])
            else:
                raise TypeError(type(value).__name__)
        except (TypeError, ValueError, KeyError):
            raise ValidationError(self.error_messages['invalid'], code='invalid')
        return tuple(float(v) for v in grid)

    def _expand(self, spec):
        keys = set(spec)
        start, stop = float(spec['start']), float(spec['stop'])
        if keys == {'start', 'stop', 'step'}:
            step = float(spec['step'])
            if not step > 0 or stop < start:
                raise ValueError('bad step')
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            return start + step * np.arange(count)
        if keys == {'start', 'stop', 'num'}:
            num = int(spec['num'])
            if num < 1:
                raise ValueError('bad num')
            return np.linspace(start, stop, num)
        raise KeyError('grid keys')

    def validate(self, value):
        super().validate(value)
        if value is None:
            return
        if len(value) == 0:
            raise ValidationError(self.error_messages['empty'], code='empty')
        if not all(math.isfinite(v) for v in value):
            raise ValidationError(self.error_messages['not_finite'], code='not_finite')
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValidationError(self.error_messages['unsorted'], code='unsorted')


def _non_negative():
    return [MinValueValidator(0.0)]


def _positive(form, name):
    value = form.cleaned_data.get(name)
    if value is not None and value <= 0:
        raise ValidationError('Deve ser maior que zero.', code='min_value')
    return value


# ========== SECTION FORMS ==========

class ParamsForm(forms.Form):
    delta_1 = forms.FloatField()
    delta_2 = forms.FloatField()
    g_m = forms.FloatField(validators=_non_negative())
    eta = forms.FloatField()
    kappa = forms.FloatField()
    gamma_m = forms.FloatField(validators=_non_negative())
    j_m = forms.FloatField(validators=_non_negative())
    alpha_in = forms.FloatField(validators=_non_negative())
    omega_m = forms.FloatField()

    def clean_kappa(self):
        return _positive(self, 'kappa')

    def clean_omega_m(self):
        value = self.cleaned_data.get('omega_m')
        if value != 1.0:
            raise ValidationError('omega_m é a unidade de frequência e deve ser 1.', code='invalid')
        return value


class IntegratorForm(forms.Form):
    method = forms.ChoiceField(choices=[(m, m) for m in METHODS])
    dt = forms.FloatField()
    rel_tol = forms.FloatField()
    abs_tol = forms.FloatField()
    t_end = forms.FloatField()
    sample_stride = forms.FloatField()
    transient_fraction = forms.FloatField(validators=_non_negative())
    max_step = forms.FloatField()
    min_step = forms.FloatField()
    max_evaluations = forms.IntegerField(min_value=0)

    def clean(self):
        cleaned = super().clean()
        for name in ('dt', 'rel_tol', 'abs_tol', 't_end', 'sample_stride', 'max_step', 'min_step'):
            value = cleaned.get(name)
            if value is not None and value <= 0:
                self.add_error(name, 'Deve ser maior que zero.')
        return cleaned


class SpectrumForm(forms.Form):
    common_amplitude = forms.ChoiceField(choices=[(c, c) for c in COMMON_AMPLITUDES])
    symmetrize = forms.BooleanField(required=False)


class KickMixin(forms.Form):
    kick = forms.FloatField()


class SimulateForm(KickMixin):
    pass


class SteadyForm(forms.Form):
    alpha_grid = GridField(required=False)


class EPScanForm(forms.Form):
    alpha_grid = GridField()


class EigenSurfaceForm(forms.Form):
    alpha_grid = GridField()
    eta_grid = GridField()


class AmplitudeScanForm(KickMixin):
    alpha_grid = GridField()
    batch_size = forms.IntegerField(min_value=0)


class LyapunovForm(KickMixin):
    renorm_interval = forms.FloatField()
    n_renorms = forms.IntegerField(min_value=1)
    separation = forms.FloatField()
    warmup = forms.IntegerField(min_value=0)

    def clean_renorm_interval(self):
        return _positive(self, 'renorm_interval')

    def clean_separation(self):
        return _positive(self, 'separation')


class BifurcationForm(LyapunovForm):
    eta_grid = GridField()
    batch_size = forms.IntegerField(min_value=0)
    fixed_point_tol = forms.FloatField()
    n_renorms = forms.IntegerField(min_value=0)

    def clean_fixed_point_tol(self):
        return _positive(self, 'fixed_point_tol')


class PoincareForm(KickMixin):
    rule = forms.ChoiceField(choices=[('strobe', 'strobe'), ('hyperplane', 'hyperplane')])
    period = forms.FloatField()
    phase = forms.FloatField()
    min_points = forms.IntegerField(min_value=1)

    def clean_period(self):
        return _positive(self, 'period')


class BeatsForm(KickMixin):
    eta_grid = GridField()
    batch_size = forms.IntegerField(min_value=0)
    start = forms.ChoiceField(choices=[('steady', 'steady'), ('rest', 'rest')])
    min_samples = forms.IntegerField(min_value=16)
    peak_ratio = forms.FloatField()

    def clean_peak_ratio(self):
        return _positive(self, 'peak_ratio')


SECTION_FORMS = {
    'simulate': SimulateForm,
    'steady': SteadyForm,
    'ep_scan': EPScanForm,
    'eigen_surface': EigenSurfaceForm,
    'amplitude_scan': AmplitudeScanForm,
    'bifurcation': BifurcationForm,
    'lyapunov': LyapunovForm,
    'poincare': PoincareForm,
    'beats': BeatsForm,
}
EXTRA_FORMS = {'params': ParamsForm, 'integrator': IntegratorForm, 'spectrum': SpectrumForm}
TOP_LEVEL_KEYS = {'units', *EXTRA_FORMS, *SECTION_FORMS}
ETA_GRID_SECTIONS = ('eigen_surface', 'bifurcation', 'beats')


# ========== DEFAULTS ==========

def _section_defaults(name):
    d = settings.EPOM_DEFAULTS
    common = {'kick': d['kick'], 'batch_size': d['batch_size'],
              'alpha_grid': d['alpha_grid'], 'eta_grid': d['eta_grid']}
    defaults = {
        'params': dict(d['params']),
        'integrator': dict(d['integrator']),
        'spectrum': {'common_amplitude': 'cavity1', 'symmetrize': False},
        'bifurcation': {**d['lyapunov'], 'fixed_point_tol': d['fixed_point_tol']},
        'lyapunov': dict(d['lyapunov']),
        'poincare': dict(d['poincare']),
        'beats': dict(d['beats']),
        'steady': {'alpha_grid': None},
    }.get(name, {})
    form_class = {**SECTION_FORMS, **EXTRA_FORMS}.get(name)
    fields = form_class.base_fields if form_class else {}
    merged = {key: value for key, value in common.items() if key in fields}
    merged.update(defaults)
    return merged


# ========== RUN CONFIG ==========

@dataclass(frozen=True)
class RunConfig:
    params: SystemParams
    integrator: IntegratorConfig
    units: str
    spectrum: dict
    sections: dict
    output_dir: Path = None
    deterministic: bool = True
    eta_scale: float = 1.0
    raw: dict = field(default_factory=dict)

    def section(self, name):
        return self.sections[name]

    def to_eta_units(self, eta):
        """eta expressed in the configured units"""
        return eta / self.eta_scale

    def as_dict(self):
        sections = {
            name: {key: list(value) if isinstance(value, tuple) else value
                   for key, value in cleaned.items()}
            for name, cleaned in self.sections.items()
        }
        return {
            'units': self.units,
            'params': self.params.as_dict(),
            'integrator': asdict(self.integrator),
            'spectrum': dict(self.spectrum),
            **sections,
        }


def _clean(form_class, section, data, diagnostics):
    if data is None:
        data = {}
    if not isinstance(data, dict):
        diagnostics.append(f'{section}: deve ser um objeto JSON')
        return None
    unknown = sorted(set(data) - set(form_class.base_fields))
    for key in unknown:
        diagnostics.append(f'{section}.{key}: chave desconhecida')

    form = form_class(data={**_section_defaults(section), **data})
    if not form.is_valid():
        for name, errors in form.errors.items():
            label = section if name == '__all__' else f'{section}.{name}'
            for error in errors:
                diagnostics.append(f'{label}: {error}')
        return None
    return None if unknown else form.cleaned_data


def parse_config(data, units=None, output_dir=None) -> RunConfig:
    """Validate a decoded JSON document; raises ConfigError with all diagnostics"""
    if not isinstance(data, dict):
        raise ConfigError('config: o documento deve ser um objeto JSON')

    diagnostics = [f'{key}: chave desconhecida' for key in sorted(set(data) - TOP_LEVEL_KEYS)]
    defaults = settings.EPOM_DEFAULTS

    units = units or data.get('units', defaults['units'])
    if units not in UNITS:
        diagnostics.append(f'units: deve ser um de {", ".join(UNITS)}')
        units = 'gm'

    raw_params = data.get('params') or {}
    params = _clean(ParamsForm, 'params', raw_params, diagnostics)
    integrator = _clean(IntegratorForm, 'integrator', data.get('integrator'), diagnostics)
    spectrum = _clean(SpectrumForm, 'spectrum', data.get('spectrum'), diagnostics)
    sections = {name: _clean(form_class, name, data.get(name), diagnostics)
                for name, form_class in SECTION_FORMS.items()}

    if params is not None and units == 'gm' and params['g_m'] == 0:
        diagnostics.append('units: gm mede eta em unidades de g_m e exige g_m > 0')

    if diagnostics:
        raise ConfigError(diagnostics)

    eta_scale = params['g_m'] if units == 'gm' else 1.0
    eta = params['eta'] * eta_scale if 'eta' in raw_params else params['eta']
    for name in ETA_GRID_SECTIONS:
        grid = sections[name]['eta_grid']
        sections[name] = {**sections[name], 'eta_grid_rel': grid,
                          'eta_grid': tuple(e * eta_scale for e in grid)}

    try:
        system = SystemParams(
            delta=(params['delta_1'], params['delta_2']),
            g_m=params['g_m'], eta=eta, kappa=params['kappa'], gamma_m=params['gamma_m'],
            j_m=params['j_m'], alpha_in=params['alpha_in'], omega_m=params['omega_m'],
        )
        integrator_config = IntegratorConfig(**integrator)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f'params: {exc}')

    return RunConfig(
        params=system,
        integrator=integrator_config,
        units=units,
        spectrum=spectrum,
        sections=sections,
        output_dir=Path(output_dir) if output_dir else None,
        eta_scale=eta_scale,
        raw=data,
    )


def load_config(path, units=None, output_dir=None) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as exc:
        raise ConfigError(f'{path}: não foi possível ler o arquivo ({exc.strerror})')
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f'{path}:{exc.lineno}:{exc.colno}: {exc.msg}')
    return parse_config(data, units=units, output_dir=output_dir)
