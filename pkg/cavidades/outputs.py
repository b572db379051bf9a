"""
Result files
Tables are tablib datasets written as CSV with 17 significant digits, so
identical runs give identical bytes and every number parses back exactly.
Every file is written to a temporary name and renamed into place.
"""

import hashlib
import json
import logging
import math
import os
import tempfile
from pathlib import Path

import tablib

from . import __version__

logger = logging.getLogger(__name__)


def format_value(value):
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float) or hasattr(value, 'dtype'):
        return format(float(value), '.17g')
    return str(value)


def parse_value(text):
    if text == '':
        return None
    if text in ('true', 'false'):
        return text == 'true'
    try:
        number = float(text)
    except ValueError:
        return text
    if text.lstrip('-').isdigit():
        return int(text)
    return number


class Table:
    """Named result table with a fixed header row"""

    def __init__(self, name, headers, rows=()):
        self.name = name
        self.headers = list(headers)
        self.rows = []
        for row in rows:
            self.append(row)

    def append(self, row):
        row = list(row)
        if len(row) != len(self.headers):
            raise ValueError(f'{self.name}: row has {len(row)} values, header has {len(self.headers)}')
        self.rows.append(row)

    def __len__(self):
        return len(self.rows)

    @property
    def filename(self):
        return f'{self.name}.csv'

    def dataset(self):
        data = tablib.Dataset(headers=self.headers)
        for row in self.rows:
            data.append([format_value(v) for v in row])
        return data

    def to_csv(self):
        return self.dataset().export('csv')

    @classmethod
    def from_csv(cls, name, text):
        data = tablib.Dataset().load(text, format='csv', headers=True)
        return cls(name, data.headers, ([parse_value(v) for v in row] for row in data))

    def same_values(self, other):
        """Exact equality, NaN matching NaN"""
        if self.headers != other.headers or len(self) != len(other):
            return False
        for mine, theirs in zip(self.rows, other.rows):
            for a, b in zip(mine, theirs):
                if isinstance(a, float) and isinstance(b, float) and math.isnan(a) and math.isnan(b):
                    continue
                if a != b:
                    return False
        return True


def write_atomic(path, content):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = content.encode('utf-8') if isinstance(content, str) else content
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f'.{path.name}.', suffix='.tmp')
    try:
        with os.fdopen(fd, 'wb') as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return data


def file_info(data, rows=None):
    return {
        'sha256': hashlib.sha256(data).hexdigest(),
        'bytes': len(data),
        'rows': rows,
    }


def write_table(table, directory):
    path = Path(directory) / table.filename
    data = write_atomic(path, table.to_csv())
    logger.info(f'Wrote {path} ({len(table)} rows)')
    return path, file_info(data, len(table))


def read_table(path):
    path = Path(path)
    return Table.from_csv(path.stem, path.read_text(encoding='utf-8'))


def write_manifest(directory, command, config, wall_time, files, summary=None):
    manifest = {
        'command': command,
        'version': __version__,
        'config': config,
        'wall_time_s': wall_time,
        'deterministic': True,
        'files': files,
        'summary': summary or {},
    }
    path = Path(directory) / 'manifest.json'
    write_atomic(path, json.dumps(manifest, indent=2, sort_keys=True, default=_json_default) + '\n')
    return path


def _json_default(value):
    if isinstance(value, complex):
        return [value.real, value.imag]
    if hasattr(value, 'tolist'):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f'{type(value).__name__} is not JSON serialisable')
