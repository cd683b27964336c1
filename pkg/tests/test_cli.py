"""
Command-line surface: exit codes, output files, saved defaults.
Global flags go before the subcommand; search and exterior flags may follow it.
"""
# pylint: disable=invalid-name
import json
import pytest
from ruamel.yaml import YAML
from selfsim.selfsim import main, EXIT_OK, EXIT_NO_RESULT, EXIT_USAGE
from selfsim.IniManager import IniManager
from selfsim.selfsim import DEFAULTS
from selfsim.Models import BLOWUP
from selfsim import IoFormats as io


def run(tmp_path, *args):
    return main(['-o', str(tmp_path / 'out'), *args])


@pytest.mark.parametrize('args', [
    ['solve', '--N', '3'],
    ['solve', '--N', '3', '--p', '7'],
    ['--tol', 'abc', 'verify', '--N', '3', '--p', '7'],
    ['extend', '--N', '3', '--p', '7', '--b', '0.5', '--a', '1'],
    ['bogus'],
])
def test_argument_errors_are_usage(tmp_path, args):
    assert run(tmp_path, *args) == EXIT_USAGE


def test_missing_command_is_usage(tmp_path):
    assert run(tmp_path) == EXIT_USAGE


def test_bad_dimension_is_usage(tmp_path):
    assert run(tmp_path, 'verify', '--N', '2', '--p', '7') == EXIT_USAGE
    assert run(tmp_path, 'extend', '--N', '3', '--p', '1', '--b', '0.5') == EXIT_USAGE


def test_wrong_family_parameter_is_usage(tmp_path):
    assert run(tmp_path, 'extend', '--N', '5', '--p', '3', '--b', '1.0') == EXIT_USAGE
    assert run(tmp_path, 'extend', '--N', '3', '--p', '7', '--a', '1.0') == EXIT_USAGE


def test_logs(tmp_path, capsys):
    assert main(['logs']) == EXIT_OK
    out = capsys.readouterr().out
    assert str(tmp_path / 'logs') in out


def test_extend_blowup(tmp_path, capsys):
    assert run(tmp_path, 'extend', '--N', '3', '--p', '7', '--b', '1.05') == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc['classification'] == BLOWUP
    assert doc['u_at_one'] == 1.05 and doc['schema'] == 1
    assert (tmp_path / 'out' / 'N3_p7_ext_1.05.json').exists()
    prof = io.read_profile(tmp_path / 'out' / 'N3_p7_ext_1.05.csv')
    assert prof.meta['right_param'] == 1.05
    assert prof.column('rho')[0] == pytest.approx(1.0, abs=1e-4)


def test_keep_backup_flag(tmp_path):
    args = ('extend', '--N', '3', '--p', '7', '--b', '1.05')
    assert run(tmp_path, *args) == EXIT_OK
    assert run(tmp_path, '-B', *args) == EXIT_OK
    assert (tmp_path / 'out' / 'ORIG.N3_p7_ext_1.05.json').exists()


def test_scan_csv(tmp_path):
    assert run(tmp_path, 'scan', '--N', '3', '--p', '7', '--c-grid', '0.5,2') == EXIT_OK
    table = io.read_scan(tmp_path / 'out' / 'N3_p7_scan.csv')
    assert list(table.column('c')) == [0.5, 2.0]
    assert table.meta['N'] == 3


def test_scan_json(tmp_path):
    assert run(tmp_path, 'scan', '--N', '3', '--p', '7', '--c-grid', '0.5',
               '--format', 'json') == EXIT_OK
    doc = json.loads((tmp_path / 'out' / 'N3_p7_scan.json').read_text(encoding='utf-8'))
    assert [row['c'] for row in doc['rows']] == [0.5]


def test_save_defaults(tmp_path):
    assert main(['--tol', '1e-9', '--jobs', '3', '-S']) == EXIT_OK
    vals = IniManager('selfsim', **DEFAULTS).vals
    assert vals.tol == 1e-9 and vals.jobs == 3
    assert (tmp_path / 'config' / 'selfsim' / 'config.ini').exists()


def test_solve_without_root_writes_table(tmp_path):
    code = run(tmp_path, '--c-lo', '0.05', '--c-hi', '0.2',
               'solve', '--N', '3', '--p', '7', '--n', '0')
    assert code == EXIT_NO_RESULT
    table = io.read_scan(tmp_path / 'out' / 'N3_p7_n0_scan.csv')
    assert len(table.column('c')) > 0
    assert not (tmp_path / 'out' / 'N3_p7_n0.json').exists()


@pytest.mark.slow
def test_solve_then_extend_closed_form(tmp_path, capsys):
    assert run(tmp_path, '--c-lo', '1', '--c-hi', '20',
               'solve', '--N', '5', '--p', '3', '--n', '0') == EXIT_OK
    saved = tmp_path / 'out' / 'N5_p3_n0.json'
    result = io.result_from_json(saved.read_text(encoding='utf-8'))
    assert result.c == pytest.approx(4 * 2**0.5, rel=1e-6)
    prof = io.read_profile(tmp_path / 'out' / 'N5_p3_n0_profile.csv')
    assert prof.meta['max_residual'] < 1e-7
    capsys.readouterr()
    code = run(tmp_path, '--s-max', '8', 'extend', '--N', '5', '--p', '3',
               '--from-json', str(saved))
    assert code in (EXIT_OK, EXIT_NO_RESULT)
    doc = json.loads(capsys.readouterr().out)
    assert doc['recorded_u_at_one'] == doc['u_at_one']


def test_search_flags_after_subcommand(tmp_path):
    code = run(tmp_path, 'solve', '--N', '3', '--p', '7', '--n', '0',
               '--c-lo', '0.05', '--c-hi', '0.2')
    assert code == EXIT_NO_RESULT
    assert (tmp_path / 'out' / 'N3_p7_n0_scan.csv').exists()


def test_subcommand_search_flags_override_global(tmp_path, capsys):
    assert run(tmp_path, '--c-lo', '0.05', '--c-hi', '0.2', 'solve', '--N', '3', '--p', '7',
               '--n', '0', '--c-lo', '0.5', '--c-hi', '1.5', '--no-profile') == EXIT_OK
    capsys.readouterr()
    assert run(tmp_path, '--c-lo', '0.5', '--c-hi', '1.5', 'solve', '--N', '3', '--p', '7',
               '--n', '0', '--c-lo', '0.05', '--c-hi', '0.2') == EXIT_NO_RESULT


def test_exterior_flag_after_subcommand(tmp_path, capsys):
    assert run(tmp_path, 'extend', '--N', '3', '--p', '7', '--b', '1.05',
               '--s-max', '10') == EXIT_OK
    assert json.loads(capsys.readouterr().out)['classification'] == BLOWUP


@pytest.mark.slow
@pytest.mark.parametrize('N,p', [(5, 3), (3, 7)])
def test_verify_passes(tmp_path, N, p):
    code = run(tmp_path, 'verify', '--N', str(N), '--p', str(p))
    doc = YAML(typ='safe').load(tmp_path / 'out' / f'N{N}_p{p}_verify.yaml')
    names = {check['name'] for check in doc['checks']}
    assert {'lyapunov_increments', 'alpha_identity'} <= names
    if (N, p) == (5, 3):
        assert {'closed_form_residual', 'closed_form_integration'} <= names
    assert doc['passed'] and code == EXIT_OK
