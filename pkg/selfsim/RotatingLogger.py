#!/usr/bin/env python3
"""
Two-file rotating run log for selfsim.

The active file is always log_0.txt; at MAX_BYTES it becomes log_1.txt and a
fresh log_0.txt is started. Every entry carries a timestamp, a tag and the
caller's file:line. put() also takes key=value fields, which are written
with full float precision so runs can be compared bit for bit.
"""
# pylint: disable=broad-exception-caught,invalid-name
import os
import sys
import inspect
from pathlib import Path
from datetime import datetime

LOG_DIR_ENV = 'SELFSIM_LOG_DIR'


def format_field(value):
    """ Floats as %.17g, everything else via str() """
    if isinstance(value, float):
        return f'{value:.17g}'
    return str(value)


class RotatingLogger:
    """ Rotating log under {log_dir}/{app_name}/ (default ~/.config/{app_name}/) """
    MAX_BYTES = 4 * 1024 * 1024
    LOG_FILES = ['log_0.txt', 'log_1.txt']
    INDENT = '    '

    def __init__(self, app_name='selfsim', log_dir=None):
        self.app_name = app_name
        self.log_dir_override = log_dir
        self.log_paths = None

    def _setup_paths(self):
        """ Resolved lazily so SELFSIM_LOG_DIR set after import still applies """
        base = self.log_dir_override or os.environ.get(LOG_DIR_ENV)
        base_dir = Path(base) if base else Path.home() / '.config'
        try:
            log_dir = base_dir / self.app_name
            log_dir.mkdir(parents=True, exist_ok=True)
            self.log_paths = [log_dir / name for name in self.LOG_FILES]
        except OSError as e:
            print(f'selfsim: cannot create log dir {base_dir}: {e}; using cwd', file=sys.stderr)
            self.log_paths = [Path(name) for name in self.LOG_FILES]

    @property
    def paths(self):
        """ [active, backup] log paths """
        base = self.log_dir_override or os.environ.get(LOG_DIR_ENV)
        if self.log_paths is None or (base and Path(base) / self.app_name != self.log_paths[0].parent):
            self._setup_paths()
        return self.log_paths

    def _rotate(self):
        active, backup = self.paths
        try:
            if backup.exists():
                backup.unlink()
            if active.exists():
                active.rename(backup)
            self._write('MSG', [f'--- rotated {active.name} -> {backup.name} ---'], caller_depth=1)
        except OSError as e:
            print(f'selfsim: log rotation failed: {e}', file=sys.stderr)

    @staticmethod
    def _caller(depth):
        try:
            frame = inspect.currentframe()
            for _ in range(depth + 1):
                frame = frame.f_back if frame else None
            if frame:
                return f'({Path(frame.f_code.co_filename).name}:{frame.f_lineno})'
        except Exception:
            pass
        return '(unknown)'

    def _write(self, tag, messages, caller_depth=2):
        active = self.paths[0]
        try:
            if active.exists() and os.path.getsize(active) >= self.MAX_BYTES:
                self._rotate()
        except OSError:
            pass
        stamp = datetime.now().strftime('%Y-%m-%d %H:%M:%S.%f')[:-3]
        lines = ''.join(str(m) for m in messages).split('\n')
        entry = f'[{stamp}] [{tag}] {self._caller(caller_depth)} {lines[0]}\n'
        entry += ''.join(f'{self.INDENT}{line}\n' for line in lines[1:])
        try:
            with open(active, 'a', encoding='utf-8') as f:
                f.write(entry)
        except OSError as e:
            print(f'selfsim: cannot write {active}: {e}', file=sys.stderr)

    @staticmethod
    def _prepare(args):
        if args and isinstance(args[0], list):
            return ['\n'.join(str(item) for item in args[0])] + list(args[1:])
        return list(args)

    def put(self, tag, *args, **fields):
        """ Entry with an arbitrary tag; keyword fields are appended as key=value """
        msgs = self._prepare(args)
        if fields:
            kv = ' '.join(f'{k}={format_field(v)}' for k, v in fields.items())
            msgs.append((' ' if msgs else '') + kv)
        self._write(str(tag).upper(), msgs, caller_depth=2)

    def lg(self, *args):
        """ Ordinary MSG entry """
        self._write('MSG', self._prepare(args), caller_depth=2)

    def err(self, *args):
        """ ERR entry, echoed to stderr """
        msgs = self._prepare(args)
        print(f"selfsim: ERROR: {''.join(str(m) for m in msgs)}", file=sys.stderr)
        self._write('ERR', msgs, caller_depth=2)


Log = RotatingLogger
