import json
import math
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from cavidades.outputs import (
    Table, format_value, parse_value, read_table, write_atomic, write_manifest, write_table,
)


class FormatValueTest(SimpleTestCase):

    def test_formats(self):
        self.assertEqual(format_value(True), 'true')
        self.assertEqual(format_value(3), '3')
        self.assertEqual(format_value(0.1), '0.10000000000000001')
        self.assertEqual(format_value(np.float64(2.5)), '2.5')
        self.assertEqual(format_value(math.nan), 'nan')
        self.assertEqual(format_value(None), '')
        self.assertEqual(format_value('broken'), 'broken')

    def test_seventeen_digits_parse_back_exactly(self):
        for value in (math.pi, 1.076e-4, -2.0 ** -40, 1e300):
            self.assertEqual(parse_value(format_value(value)), value)

    def test_parse_value(self):
        self.assertIs(parse_value('false'), False)
        self.assertEqual(parse_value('-7'), -7)
        self.assertIsNone(parse_value(''))
        self.assertEqual(parse_value('ok'), 'ok')
        self.assertTrue(math.isnan(parse_value('nan')))


class TableTest(SimpleTestCase):

    def test_row_length_is_checked(self):
        table = Table('t', ['a', 'b'])
        with self.assertRaises(ValueError):
            table.append([1.0])

    def test_written_file_reads_back(self):
        table = Table('sample', ['alpha_in', 'sigma', 'converged', 'status'])
        table.append([1.5, math.nan, True, 'ok'])
        table.append([2.0, 1e-7 / 3, False, 'not-converged'])
        with tempfile.TemporaryDirectory() as tmp:
            path, info = write_table(table, tmp)
            self.assertEqual(path.name, 'sample.csv')
            self.assertEqual(info['rows'], 2)
            self.assertEqual(info['bytes'], path.stat().st_size)
            again = read_table(path)
        self.assertTrue(table.same_values(again))
        self.assertEqual(again.headers, table.headers)

    def test_same_content_same_bytes(self):
        table = Table('x', ['t', 'x1'], [[k * 0.1, math.sin(k)] for k in range(50)])
        with tempfile.TemporaryDirectory() as a, tempfile.TemporaryDirectory() as b:
            _, first = write_table(table, a)
            _, second = write_table(table, b)
        self.assertEqual(first['sha256'], second['sha256'])


class AtomicWriteTest(SimpleTestCase):

    def test_no_temporary_files_are_left(self):
        with tempfile.TemporaryDirectory() as tmp:
            target = Path(tmp) / 'nested' / 'file.txt'
            write_atomic(target, 'first')
            write_atomic(target, 'second')
            self.assertEqual(target.read_text(), 'second')
            self.assertEqual(sorted(p.name for p in target.parent.iterdir()), ['file.txt'])

    def test_manifest(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = write_manifest(tmp, 'steady', {'units': 'gm'}, 0.5,
                                  {'steady.csv': {'sha256': 'ab', 'bytes': 2, 'rows': 1}},
                                  {'sigma': 1 + 2j, 'grid': np.arange(2.0)})
            manifest = json.loads(path.read_text())
        self.assertEqual(manifest['command'], 'steady')
        self.assertTrue(manifest['deterministic'])
        self.assertEqual(manifest['summary']['sigma'], [1.0, 2.0])
        self.assertEqual(manifest['summary']['grid'], [0.0, 1.0])
