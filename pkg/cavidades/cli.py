"""
Command-line entry points
`epom <command> --config FILE [--out DIR] ...` is a thin alias for the
management commands; `manage.py` keeps the usual Django surface.
"""

import os
import sys

ALIASES = {
    'ep-scan': 'ep_scan',
    'eigen-surface': 'eigen_surface',
    'amplitude-scan': 'amplitude_scan',
    'export-runs': 'export_runs',
}


def _execute(argv):
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'EPOMSYSTEM.settings')
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Couldn't import Django. Are you sure it's installed and "
            "available on your PYTHONPATH environment variable?"
        ) from exc
    execute_from_command_line(argv)


def manage(argv=None):
    _execute(list(argv if argv is not None else sys.argv))


def main(argv=None):
    argv = list(argv if argv is not None else sys.argv)
    if len(argv) > 1:
        argv[1] = ALIASES.get(argv[1], argv[1])
    _execute(argv)
