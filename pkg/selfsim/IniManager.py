#!/usr/bin/env python3
"""
Persistent run defaults in {config_dir}/selfsim/config.ini, section [options].

Values land in a SimpleNamespace (cfg.vals.tol ...) cast to the type of their
constructor default. Precedence, lowest first: constructor defaults, the ini
file, SELFSIM_<KEY> environment variables; the CLI applies its flags last.
"""
# pylint: disable=broad-exception-caught
import os
import sys
import types
import configparser
from pathlib import Path

CONFIG_DIR_ENV = 'SELFSIM_CONFIG_DIR'
ENV_PREFIX = 'SELFSIM_'


def _note(msg):
    print(f'selfsim: {msg}', file=sys.stderr)


def cast_like(default, text):
    """ Convert text to the type of default; raises ValueError on bad input """
    if isinstance(default, bool):
        low = str(text).strip().lower()
        if low in ('1', 'yes', 'true', 'on'):
            return True
        if low in ('0', 'no', 'false', 'off'):
            return False
        raise ValueError(f'not a boolean: {text!r}')
    if isinstance(default, int):
        return int(text)
    if isinstance(default, float):
        return float(text)
    if isinstance(default, list):
        return [line.strip() for line in str(text).split('\n') if line.strip()]
    return str(text)


class IniManager:
    """ Config file plus environment overrides for one application """
    SECTION = 'options'

    def __init__(self, app_name, **defaults):
        if not app_name:
            raise ValueError('app_name must be provided.')
        self.app_name = app_name
        self._defaults = defaults
        self.config_file_path = self._determine_config_path()
        self.vals = types.SimpleNamespace(**defaults)

        config = self._read_config_file()
        if self.SECTION in config:
            self._update_vals_from_config(config)
        self._update_vals_from_env()

    def _determine_config_path(self):
        base = os.environ.get(CONFIG_DIR_ENV)
        base_dir = Path(base) if base else Path.home() / '.config'
        return base_dir / self.app_name / 'config.ini'

    def _read_config_file(self):
        config = configparser.ConfigParser()
        if self.config_file_path.exists():
            try:
                config.read(self.config_file_path)
            except Exception as e:
                _note(f'cannot read {self.config_file_path}: {e}; using defaults')
        return config

    def _update_vals_from_config(self, config):
        for key, default in self._defaults.items():
            if key in config[self.SECTION]:
                try:
                    setattr(self.vals, key, cast_like(default, config[self.SECTION][key]))
                except ValueError:
                    _note(f'bad value for {key!r} in {self.config_file_path};'
                          f' keeping {getattr(self.vals, key)!r}')

    def _update_vals_from_env(self):
        for key, default in self._defaults.items():
            text = os.environ.get(ENV_PREFIX + key.upper())
            if text is None:
                continue
            try:
                setattr(self.vals, key, cast_like(default, text))
            except ValueError:
                _note(f'bad value {text!r} for {ENV_PREFIX}{key.upper()}; ignored')

    def read(self):
        """ Reload values from the ini file (env overrides re-applied) """
        config = self._read_config_file()
        if self.SECTION in config:
            self._update_vals_from_config(config)
        self._update_vals_from_env()

    def write(self):
        """ Save the current vals to the ini file; returns the path """
        config = configparser.ConfigParser()
        config[self.SECTION] = {}
        for key in self._defaults:
            value = getattr(self.vals, key)
            if isinstance(value, list):
                config[self.SECTION][key] = '\n' + '\n'.join(str(item) for item in value)
            elif isinstance(value, float):
                config[self.SECTION][key] = repr(value)
            else:
                config[self.SECTION][key] = str(value)
        self.config_file_path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.config_file_path, 'w', encoding='utf-8') as fh:
            config.write(fh)
        _note(f'defaults saved to {self.config_file_path}')
        return self.config_file_path
