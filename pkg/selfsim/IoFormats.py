#!/usr/bin/env python3
"""
File contracts shared by the CLI and the tests.

CSV files start with '# key=value' header lines followed by one column-name
line. Floats are written with %.17g so doubles survive a round trip; NaN is
an empty cell. JSON documents carry a top-level 'schema' version and are
written with sorted keys so identical runs give identical bytes.
"""
# pylint: disable=invalid-name,broad-exception-caught
import os
import math
import json
import dataclasses
from io import StringIO
from pathlib import Path
import numpy as np
import send2trash
from ruamel.yaml import YAML
from .Errors import ProfileParseError
from .Models import ProfileFile, ShootResult, AsymptoticsReport, LOG_CHART
from .OdeCore import diagnostic_columns
from .RotatingLogger import RotatingLogger

lg = RotatingLogger('selfsim')

SCHEMA = 1
PROFILE_COLUMNS = ['rho', 'u', 'du', 'v', 'w', 'theta', 'H', 'Hv']
SCAN_COLUMNS = ['c', 'u1', 'zeros', 'theta', 'hv_floor']
GROUND_COLUMNS = ['r', 'Q', 'dQ', 'V', 'E']

yaml = YAML()
yaml.default_flow_style = False


def fmt(value):
    """ %.17g for floats, '' for NaN, str() otherwise """
    if isinstance(value, (float, np.floating)):
        return '' if math.isnan(value) else f'{float(value):.17g}'
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return str(value)


def _parse_meta_value(text):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def prepare_output(path, keep_backup=False):
    """ Move an existing file out of the way: ORIG.<name> when keeping backups, else the trash """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if not path.exists():
        return path
    if keep_backup:
        backup = path.with_name(f'ORIG.{path.name}')
        os.replace(path, backup)
        lg.lg(f'renamed {str(path)!r} {str(backup)!r}')
    else:
        try:
            send2trash.send2trash(str(path))
            lg.lg(f'trashed {str(path)!r}')
        except Exception as exc:
            os.unlink(path)
            lg.lg(f'removed {str(path)!r} (trash unavailable: {exc})')
    return path


def _write_table(path, meta, names, columns, keep_backup=False):
    path = prepare_output(path, keep_backup)
    lines = [f'# {k}={fmt(v)}' for k, v in meta.items()]
    lines.append(','.join(names))
    n = len(columns[names[0]]) if names[0] in columns else 0
    for i in range(n):
        lines.append(','.join(fmt(columns[name][i]) for name in names))
    with open(path, 'w', encoding='utf-8') as fh:
        fh.write('\n'.join(lines) + '\n')
    return path


def _read_table(path, expected=None):
    meta, names, rows = {}, None, []
    with open(path, encoding='utf-8') as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip('\n')
            if not line:
                continue
            if line.startswith('#'):
                if names is not None:
                    raise ProfileParseError('header line after the column line', line_no)
                body = line[1:].strip()
                if '=' in body:
                    key, _, val = body.partition('=')
                    meta[key.strip()] = _parse_meta_value(val.strip())
                continue
            cells = line.split(',')
            if names is None:
                names = cells
                if expected is not None and names != expected:
                    raise ProfileParseError(f'columns {names} != {expected}', line_no)
                continue
            if len(cells) != len(names):
                raise ProfileParseError(f'{len(cells)} cells, expected {len(names)}', line_no)
            try:
                rows.append([float(c) if c else math.nan for c in cells])
            except ValueError as exc:
                raise ProfileParseError(f'bad number: {exc}', line_no) from exc
    if names is None:
        raise ProfileParseError('missing column line', 0)
    data = np.array(rows, dtype=float).reshape(len(rows), len(names))
    return ProfileFile(meta=meta, columns={name: data[:, i] for i, name in enumerate(names)})


def profile_columns(params, rho, u, du, theta=None):
    """ The full profile column block; theta blank when absent, Hv blank past rho=1 """
    rho, u, du = (np.asarray(x, dtype=float) for x in (rho, u, du))
    diag = diagnostic_columns(params, rho, u, du) if len(rho) else {
        k: np.array([]) for k in ('H', 'Hv', 'v', 'w')}
    th = np.full(len(rho), np.nan) if theta is None else np.asarray(theta, dtype=float)
    return {'rho': rho, 'u': u, 'du': du, 'v': diag['v'], 'w': diag['w'],
            'theta': th, 'H': diag['H'], 'Hv': diag['Hv']}


def trajectory_columns(params, traj, trace=None):
    """ Profile columns for a Trajectory (either chart), theta from an attached trace """
    rho = np.asarray(traj.rho, dtype=float)
    du = np.asarray(traj.du_rho, dtype=float)
    theta = None
    if trace is not None and trace.angle_fn is not None and len(rho):
        lo, hi = trace.span
        inside = (rho >= lo) & (rho <= hi)
        theta = np.full(len(rho), np.nan)
        if inside.any():
            theta[inside] = trace.angle_fn(rho[inside])
    return profile_columns(params, rho, np.asarray(traj.u, dtype=float), du, theta)


def profile_meta(params, tol=None, chart=None, **family):
    """ Header metadata: N, p, tol, chart and family parameters """
    meta = {'N': params.N, 'p': float(params.p)}
    if tol is not None:
        meta['tol'] = float(tol)
    if chart is not None:
        meta['chart'] = chart
    meta.update(family)
    return meta


def write_profile(path, columns, meta, keep_backup=False):
    """ Profile CSV `rho,u,du,v,w,theta,H,Hv` """
    return _write_table(path, meta, PROFILE_COLUMNS, columns, keep_backup)


def read_profile(path):
    """ ProfileFile from a profile CSV; ProfileParseError carries the line number """
    return _read_table(path, PROFILE_COLUMNS)


def write_scan(path, rows, meta, keep_backup=False):
    """ Scan CSV `c,u1,zeros,theta,hv_floor`; failed rows have blank values """
    cols = {'c': [r.c for r in rows], 'u1': [r.u1 for r in rows],
            'zeros': [r.zeros if r.ok else math.nan for r in rows],
            'theta': [r.theta for r in rows], 'hv_floor': [r.hv_floor for r in rows]}
    return _write_table(path, meta, SCAN_COLUMNS, cols, keep_backup)


def scan_text(rows, meta):
    """ Scan CSV as a string (stdout form) """
    lines = [f'# {k}={fmt(v)}' for k, v in meta.items()] + [','.join(SCAN_COLUMNS)]
    for r in rows:
        vals = [r.c, r.u1, r.zeros if r.ok else math.nan, r.theta, r.hv_floor]
        lines.append(','.join(fmt(v) for v in vals))
    return '\n'.join(lines) + '\n'


def read_scan(path):
    """ ProfileFile view of a scan CSV """
    return _read_table(path, SCAN_COLUMNS)


def write_ground_state(path, gs, meta, keep_backup=False):
    """ Ground-state CSV `r,Q,dQ,V,E` """
    cols = {'r': gs.r, 'Q': gs.Q, 'dQ': gs.dQ, 'V': gs.V, 'E': gs.E}
    return _write_table(path, meta, GROUND_COLUMNS, cols, keep_backup)


def read_ground_state(path):
    """ ProfileFile view of a ground-state CSV """
    return _read_table(path, GROUND_COLUMNS)


def _jsonable(value):
    if isinstance(value, (float, np.floating)):
        return float(value) if math.isfinite(value) else None
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, np.integer):
        return int(value)
    return value


def dumps(doc):
    """ Canonical JSON text: schema tag, sorted keys, two-space indent """
    doc = dict(doc)
    doc['schema'] = SCHEMA
    return json.dumps(_jsonable(doc), indent=2, sort_keys=True) + '\n'


def result_to_json(result):
    """ ShootResult fields plus solver metadata """
    doc = {f.name: getattr(result, f.name) for f in dataclasses.fields(ShootResult)}
    doc['solver'] = {'tol': result.tol, 'rho0': result.rho0,
                     'grid': {'c_lo': result.c_lo, 'c_hi': result.c_hi,
                              'per_decade': result.grid_per_decade}}
    return dumps(doc)


def _nan_if_none(v):
    return math.nan if v is None else v


def result_from_json(text):
    """ ShootResult back from result_to_json output """
    doc = json.loads(text)
    kwargs = {}
    for f in dataclasses.fields(ShootResult):
        if f.name in doc:
            v = doc[f.name]
            kwargs[f.name] = [_nan_if_none(x) for x in v] if isinstance(v, list) else _nan_if_none(v)
    return ShootResult(**kwargs)


def report_to_json(report, params, right_param, extra=None):
    """ AsymptoticsReport with the (N, p, right_param) it belongs to """
    doc = {f.name: getattr(report, f.name) for f in dataclasses.fields(AsymptoticsReport)}
    doc.update({'N': params.N, 'p': params.p, 'right_param': right_param,
                'regime': params.regime.value})
    if extra:
        doc.update(extra)
    return dumps(doc)


def report_from_json(text):
    """ AsymptoticsReport back from report_to_json output """
    doc = json.loads(text)
    kwargs = {f.name: _nan_if_none(doc.get(f.name)) for f in dataclasses.fields(AsymptoticsReport)
              if f.name in doc}
    if 'fit_window' in kwargs:
        kwargs['fit_window'] = tuple(_nan_if_none(x) for x in kwargs['fit_window'])
    return AsymptoticsReport(**kwargs)


def write_text(path, text, keep_backup=False):
    """ Write a text document after moving any previous file aside """
    path = prepare_output(path, keep_backup)
    with open(path, 'w', encoding='utf-8') as fh:
        fh.write(text)
    return path


def yaml_dump(data):
    """ YAML text of plain data (dicts, lists, scalars) """
    stream = StringIO()
    yaml.dump(_jsonable(data), stream)
    return stream.getvalue()


def exterior_meta(params, right_param, tol):
    """ Header metadata for an exterior-run CSV """
    return profile_meta(params, tol=tol, chart=LOG_CHART, right_param=float(right_param))
