"""
Ini/env defaults and the rotating run log.
"""
import pytest
from selfsim.IniManager import IniManager, cast_like
from selfsim.RotatingLogger import RotatingLogger, format_field


@pytest.mark.parametrize('default,text,expected', [
    (1.0, '1e-9', 1e-9),
    (3, '8', 8),
    (False, 'yes', True),
    (True, 'off', False),
    ('.', '/tmp/x', '/tmp/x'),
    ([], '\na\nb', ['a', 'b']),
])
def test_cast_like(default, text, expected):
    assert cast_like(default, text) == expected


def test_cast_like_rejects():
    with pytest.raises(ValueError):
        cast_like(False, 'maybe')
    with pytest.raises(ValueError):
        cast_like(1, '1.5')


def test_precedence(tmp_path, monkeypatch):
    mgr = IniManager('app', tol=1e-10, jobs=1)
    assert mgr.vals.tol == 1e-10
    mgr.vals.tol = 1e-12
    mgr.vals.jobs = 4
    path = mgr.write()
    assert path == tmp_path / 'config' / 'app' / 'config.ini'
    again = IniManager('app', tol=1e-10, jobs=1)
    assert again.vals.tol == 1e-12 and again.vals.jobs == 4
    monkeypatch.setenv('SELFSIM_JOBS', '7')
    monkeypatch.setenv('SELFSIM_TOL', 'tiny')
    env = IniManager('app', tol=1e-10, jobs=1)
    assert env.vals.jobs == 7 and env.vals.tol == 1e-12


def test_bad_ini_value_is_ignored(tmp_path):
    cfg = tmp_path / 'config' / 'app' / 'config.ini'
    cfg.parent.mkdir(parents=True)
    cfg.write_text('[options]\njobs = many\ntol = 1e-6\n', encoding='utf-8')
    mgr = IniManager('app', tol=1e-10, jobs=2)
    assert mgr.vals.jobs == 2 and mgr.vals.tol == 1e-6


def test_format_field():
    assert format_field(0.1) == '0.10000000000000001'
    assert format_field(3) == '3'
    assert format_field('x') == 'x'


def test_logger_writes_fields(tmp_path, capsys):
    log = RotatingLogger('selfsim')
    assert log.paths[0] == tmp_path / 'logs' / 'selfsim' / 'log_0.txt'
    log.put('shoot', 'root', c=0.1, n=2)
    log.lg(['first', 'second'])
    log.err('went wrong')
    text = log.paths[0].read_text(encoding='utf-8')
    assert '[SHOOT]' in text and 'root c=0.10000000000000001 n=2' in text
    assert '    second' in text
    assert '[ERR]' in text
    assert 'went wrong' in capsys.readouterr().err


def test_logger_rotates(tmp_path):
    log = RotatingLogger('rot', log_dir=str(tmp_path / 'own'))
    log.MAX_BYTES = 200
    for i in range(20):
        log.lg(f'entry {i} ' + 'x' * 40)
    active, backup = log.paths
    assert backup.exists() and active.exists()
    assert 'entry 19' in active.read_text(encoding='utf-8')
