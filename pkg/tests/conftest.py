"""
Shared fixtures. Config and log directories point into a temp tree before
the package is imported so test runs never touch ~/.config.
"""
# pylint: disable=invalid-name,redefined-outer-name
import os
import tempfile

_SANDBOX = tempfile.mkdtemp(prefix='selfsim-tests-')
os.environ.setdefault('SELFSIM_CONFIG_DIR', os.path.join(_SANDBOX, 'config'))
os.environ.setdefault('SELFSIM_LOG_DIR', os.path.join(_SANDBOX, 'logs'))

import pytest   # noqa: E402  pylint: disable=wrong-import-position
from selfsim.Params import derive_params   # noqa: E402  pylint: disable=wrong-import-position


@pytest.fixture(autouse=True)
def isolated_env(tmp_path, monkeypatch):
    """ Fresh config/log dirs per test; no stray SELFSIM_<KEY> overrides """
    for key in list(os.environ):
        if key.startswith('SELFSIM_') and key not in ('SELFSIM_CONFIG_DIR', 'SELFSIM_LOG_DIR'):
            monkeypatch.delenv(key)
    monkeypatch.setenv('SELFSIM_CONFIG_DIR', str(tmp_path / 'config'))
    monkeypatch.setenv('SELFSIM_LOG_DIR', str(tmp_path / 'logs'))
    return tmp_path


@pytest.fixture
def p37():
    """ N=3, p=7: subcritical range """
    return derive_params(3, 7)


@pytest.fixture
def p53():
    """ N=5, p=3: critical range with the explicit profile """
    return derive_params(5, 3)
