"""
Profile/scan/ground-state CSV and JSON contracts.
"""
# pylint: disable=invalid-name
import math
import numpy as np
import pytest
from selfsim.Errors import ProfileParseError
from selfsim.Models import (ShootResult, ScanRow, AsymptoticsReport, Trajectory, RHO_CHART,
                            GLOBAL_ALPHA)
from selfsim.Params import u_inf
from selfsim import IoFormats as io


def same(a, b):
    return np.array_equal(np.asarray(a), np.asarray(b), equal_nan=True)


def test_fmt():
    assert io.fmt(0.1) == '0.10000000000000001'
    assert io.fmt(math.nan) == ''
    assert io.fmt(np.int64(3)) == '3'
    assert io.fmt(True) == 'True'
    assert io.fmt('RhoChart') == 'RhoChart'


def test_empty_trajectory_is_header_only(tmp_path, p37):
    cols = io.profile_columns(p37, [], [], [])
    path = io.write_profile(tmp_path / 'empty.csv', cols, io.profile_meta(p37, tol=1e-10))
    lines = path.read_text(encoding='utf-8').splitlines()
    assert lines[-1] == ','.join(io.PROFILE_COLUMNS)
    back = io.read_profile(path)
    assert back.meta == {'N': 3, 'p': 7.0, 'tol': 1e-10}
    assert all(len(back.column(name)) == 0 for name in io.PROFILE_COLUMNS)


def test_singular_solution_round_trip(tmp_path, p37):
    rho = np.linspace(0.05, 0.95, 100)
    u, du, _ = u_inf(p37, rho)
    cols = io.profile_columns(p37, rho, u, du)
    meta = io.profile_meta(p37, tol=1e-10, chart=RHO_CHART, b=float(p37.b_inf))
    back = io.read_profile(io.write_profile(tmp_path / 'uinf.csv', cols, meta))
    assert back.meta['chart'] == RHO_CHART
    assert back.meta['b'] == p37.b_inf
    for name in io.PROFILE_COLUMNS:
        assert same(back.column(name), cols[name]), name
    assert np.all(np.isnan(back.column('theta')))


def test_random_columns_round_trip(tmp_path, p37):
    rng = np.random.default_rng(11)
    for k in range(5):
        n = int(rng.integers(1, 60))
        rho = np.sort(rng.uniform(0.01, 3.0, n))
        u = rng.normal(size=n) * 10.0**rng.uniform(-8, 8, n)
        du = rng.normal(size=n)
        theta = rng.uniform(-10, 10, n)
        cols = io.profile_columns(p37, rho, u, du, theta)
        back = io.read_profile(io.write_profile(tmp_path / f'r{k}.csv', cols,
                                                io.profile_meta(p37)))
        for name in io.PROFILE_COLUMNS:
            assert same(back.column(name), cols[name]), name


def test_trajectory_columns_blank_hv_past_one(p37):
    rho = np.array([0.5, 0.9, 1.5, 2.0])
    traj = Trajectory(chart=RHO_CHART, x=rho, u=np.full(4, 0.3), du=np.full(4, -0.1))
    cols = io.trajectory_columns(p37, traj)
    assert np.isfinite(cols['Hv'][:2]).all() and np.isnan(cols['Hv'][2:]).all()
    assert np.isnan(cols['theta']).all()


def test_writes_are_deterministic(tmp_path, p37):
    rho = np.linspace(0.1, 0.9, 20)
    u, du, _ = u_inf(p37, rho)
    cols = io.profile_columns(p37, rho, u, du)
    a = io.write_profile(tmp_path / 'a.csv', cols, io.profile_meta(p37, tol=1e-10))
    b = io.write_profile(tmp_path / 'b.csv', cols, io.profile_meta(p37, tol=1e-10))
    assert a.read_bytes() == b.read_bytes()


def test_parse_errors_carry_line_numbers(tmp_path):
    path = tmp_path / 'bad.csv'
    header = ','.join(io.PROFILE_COLUMNS)
    path.write_text(f'# N=3\n{header}\n' + ','.join(['1'] * 8) + '\n'
                    + ','.join(['1'] * 7 + ['x']) + '\n', encoding='utf-8')
    with pytest.raises(ProfileParseError) as info:
        io.read_profile(path)
    assert info.value.line_no == 4
    path.write_text('# N=3\nrho,u\n', encoding='utf-8')
    with pytest.raises(ProfileParseError) as info:
        io.read_profile(path)
    assert info.value.line_no == 2
    path.write_text(f'{header}\n1,2\n', encoding='utf-8')
    with pytest.raises(ProfileParseError) as info:
        io.read_profile(path)
    assert info.value.line_no == 2
    path.write_text('# N=3\n', encoding='utf-8')
    with pytest.raises(ProfileParseError):
        io.read_profile(path)


def test_keep_backup_renames(tmp_path, p37):
    cols = io.profile_columns(p37, [0.5], [0.3], [-0.1])
    path = tmp_path / 'prof.csv'
    io.write_profile(path, cols, {'N': 3})
    first = path.read_bytes()
    io.write_profile(path, cols, {'N': 4}, keep_backup=True)
    assert (tmp_path / 'ORIG.prof.csv').read_bytes() == first
    assert io.read_profile(path).meta['N'] == 4


def test_scan_table(tmp_path, p37):
    rows = [ScanRow(c=0.5, u1=0.6, zeros=0, theta=3.0, hv_floor=-0.01),
            ScanRow(c=2.0, u1=math.nan, zeros=-1, theta=math.nan, hv_floor=math.nan,
                    ok=False, error='IntegrationError: x')]
    meta = io.profile_meta(p37, tol=1e-10)
    path = io.write_scan(tmp_path / 'scan.csv', rows, meta)
    assert path.read_text(encoding='utf-8') == io.scan_text(rows, meta)
    back = io.read_scan(path)
    assert same(back.column('c'), [0.5, 2.0])
    assert back.column('zeros')[0] == 0 and math.isnan(back.column('zeros')[1])


def test_shoot_result_json_round_trip():
    res = ShootResult(regime='SubcriticalRange', n_index=1, zero_count=2, c=12.345678901234567,
                      right_param=0.8123456789012345, u_at_one=0.8123456789012345,
                      mismatch_norm=3.2e-11, rho0=0.9, tol=1e-10, grid_per_decade=64,
                      c_lo=0.05, c_hi=1e4, other_roots=[20.5])
    text = io.result_to_json(res)
    assert '"schema": 1' in text
    assert io.result_from_json(text) == res
    assert io.result_to_json(io.result_from_json(text)) == text


def test_report_json_round_trip(p37):
    rep = AsymptoticsReport(classification=GLOBAL_ALPHA, L=0.61, fit_window=(22.7, 25.0),
                            fit_residual=1e-9, secondary_check=2e-10, note='ok')
    text = io.report_to_json(rep, p37, 0.7, {'u_at_one': 0.7})
    back = io.report_from_json(text)
    assert back.classification == GLOBAL_ALPHA
    assert back.L == 0.61 and back.fit_window == (22.7, 25.0)
    assert math.isnan(back.rho_plus_estimate)


def test_yaml_dump():
    text = io.yaml_dump({'passed': True, 'checks': [{'name': 'x', 'value': math.nan}]})
    assert 'passed: true' in text
    assert 'name: x' in text
