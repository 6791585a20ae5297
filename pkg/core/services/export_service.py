"""
Business Logic Layer: Export Service
This module turns results into canonical JSON and CSV text. Complex
numbers are written as [re, im]; floats keep 17 significant digits so that
doubles survive a write/read cycle unchanged.
"""
import dataclasses
from enum import Enum
import io
import json
import math
from pathlib import Path

import numpy as np
import pandas as pd
from django.conf import settings

from core.exceptions import ExportError
from core.models import RegimeLabel, SymmetryLabel

TOOL_NAME = 'dp3asym'


class ExportService:
    """
    Service class for serialization of reports, tables and trajectories.
    """

    @staticmethod
    def _number(x):
        x = float(x)
        if math.isnan(x):
            return None
        if math.isinf(x):
            return 'inf' if x > 0 else '-inf'
        return float(f'{x:.17g}')

    @staticmethod
    def encode(value):
        """
        Convert a result into plain JSON-compatible data.

        Args:
            value: any combination of dataclasses, enums, numpy values,
                complex numbers and containers

        Returns:
            object: made of dict, list, str, int, float, bool and None only
        """
        encode = ExportService.encode
        if value is None or isinstance(value, (str, bool)):
            return value
        if isinstance(value, np.bool_):
            return bool(value)
        if isinstance(value, Enum):
            return value.value
        if isinstance(value, (SymmetryLabel, RegimeLabel)):
            return str(value)
        if isinstance(value, (int, np.integer)):
            return int(value)
        if isinstance(value, (float, np.floating)):
            return ExportService._number(value)
        if isinstance(value, (complex, np.complexfloating)):
            return [ExportService._number(value.real), ExportService._number(value.imag)]
        if isinstance(value, np.ndarray):
            return [encode(item) for item in value.tolist()]
        if isinstance(value, dict):
            return {str(encode(key)): encode(item) for key, item in value.items()}
        if isinstance(value, (list, tuple)):
            return [encode(item) for item in value]
        if hasattr(value, 'as_dict'):
            return encode(value.as_dict())
        if dataclasses.is_dataclass(value):
            return {f.name: encode(getattr(value, f.name)) for f in dataclasses.fields(value)
                    if f.metadata.get('export', True)}
        raise ExportError(f'cannot serialize {type(value).__name__}')

    @staticmethod
    def header(command, params=None, regime=None, N=None, **extra):
        """Header block shared by every artifact."""
        block = {
            'tool': TOOL_NAME,
            'version': settings.DP3_TOOL_VERSION,
            'command': command,
            'params': params,
            'regime': regime,
            'N': N,
        }
        block.update(extra)
        return ExportService.encode(block)

    @staticmethod
    def to_json(document):
        """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
        return json.dumps(ExportService.encode(document), indent=2, sort_keys=True) + '\n'

    @staticmethod
    def canonicalize(text):
        """Re-emit JSON text in canonical form."""
        try:
            return ExportService.to_json(json.loads(text))
        except ValueError as exc:
            raise ExportError(f'not a JSON document: {exc}') from exc

    @staticmethod
    def flatten_row(row):
        """Split complex cells into re_/im_ columns."""
        flat = {}
        for key, value in row.items():
            if isinstance(value, (complex, np.complexfloating)):
                flat[f're_{key}'] = float(value.real)
                flat[f'im_{key}'] = float(value.imag)
            elif isinstance(value, Enum):
                flat[key] = value.value
            else:
                flat[key] = value
        return flat

    @staticmethod
    def to_csv(header, rows):
        """
        CSV text: '# key: value' header lines, then one row per record with
        '.' as decimal separator and 17 significant digits.
        """
        buffer = io.StringIO()
        for key in sorted(header):
            buffer.write(f'# {key}: {json.dumps(header[key], sort_keys=True)}\n')
        frame = pd.DataFrame([ExportService.flatten_row(row) for row in rows])
        frame.to_csv(buffer, index=False, float_format='%.17g', lineterminator='\n')
        return buffer.getvalue()

    @staticmethod
    def trajectory_rows(trajectory, residuals=None):
        """
        Rows tau, u, up, phi, H, f_minus, f_plus, sigma of a Trajectory; tau
        stays a single real column on the real axis. Per-point residuals are
        appended when given.
        """
        grid = np.asarray(trajectory.tau_grid)
        taus = grid.real if np.all(grid.imag == 0) else grid
        columns = {
            'u': trajectory.u,
            'up': trajectory.u_prime,
            'phi': trajectory.phi,
            'H': trajectory.H,
            'f_minus': trajectory.f_minus,
            'f_plus': trajectory.f_plus,
            'sigma': trajectory.sigma,
        }
        rows = []
        for j, tau in enumerate(taus):
            row = {'tau': tau.item()}
            row.update({name: complex(values[j]) for name, values in columns.items()})
            if residuals is not None:
                row['residual'] = float(residuals[j])
            rows.append(row)
        return rows

    @staticmethod
    def write(path, text):
        try:
            target = Path(path)
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(text, encoding='utf-8')
        except OSError as exc:
            raise ExportError(f'cannot write {path}: {exc}') from exc

    @staticmethod
    def read_json(path):
        try:
            return json.loads(Path(path).read_text(encoding='utf-8'))
        except (OSError, ValueError) as exc:
            raise ExportError(f'cannot read {path}: {exc}') from exc
