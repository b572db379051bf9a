"""
Shared plumbing of the simulation commands
Config loading, exit codes, atomic CSV output, manifest, optional ledger
entry and PDF summary.
"""

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from cavidades import __version__
from cavidades.config import UNITS, load_config
from cavidades.exceptions import ConfigError, EpomError
from cavidades.models import SimulationRun
from cavidades.outputs import write_manifest, write_table
from cavidades.reports import build_run_report

logger = logging.getLogger(__name__)

EXIT_CONFIG = 2
EXIT_NUMERIC = 3


@dataclass
class CommandResult:
    tables: list
    summary: dict = field(default_factory=dict)


class EpomCommand(BaseCommand):
    """Subclasses set `name` and implement run(cfg, workers) -> CommandResult"""
    name = None

    def add_arguments(self, parser):
        parser.add_argument('--config', required=True, help='Arquivo JSON de configuração')
        parser.add_argument('--out', default='out', help='Diretório de saída (padrão: out)')
        parser.add_argument('--units', choices=UNITS, help='Convenção para eta: gm (η/g_m) ou omega (η/ω_m)')
        parser.add_argument('--threads', type=int, help='Threads para varreduras (padrão: EPOM_THREADS)')
        parser.add_argument('--record', action='store_true', help='Registrar a execução no banco de dados')
        parser.add_argument('--pdf', action='store_true', help='Gerar report.pdf com o resumo')

    def handle(self, *args, **options):
        started = time.perf_counter()
        out = Path(options['out'])

        try:
            cfg = load_config(options['config'], units=options['units'], output_dir=out)
        except ConfigError as exc:
            for diagnostic in exc.diagnostics:
                logger.error(f'Config error: {diagnostic}')
            raise CommandError(f'Configuração inválida: {exc}', returncode=EXIT_CONFIG)

        workers = settings.EPOM_THREADS if options['threads'] is None else options['threads']
        if workers < 1:
            raise CommandError('--threads deve ser >= 1', returncode=EXIT_CONFIG)

        run = None
        if options['record']:
            run = SimulationRun.start(self.name, cfg.as_dict(), out, __version__)

        logger.info(f'Starting {self.name} (units={cfg.units}, threads={workers}, out={out})')
        try:
            out.mkdir(parents=True, exist_ok=True)
            result = self.run(cfg, workers)
        except EpomError as exc:
            wall_time = time.perf_counter() - started
            code = EXIT_CONFIG if isinstance(exc, ConfigError) else EXIT_NUMERIC
            logger.error(f'{self.name} failed: {exc}')
            if run is not None:
                run.mark_failed(code, str(exc), wall_time)
            label = 'Configuração inválida' if code == EXIT_CONFIG else 'Falha numérica'
            raise CommandError(f'{label}: {exc}', returncode=code)

        files = {}
        for table in result.tables:
            path, info = write_table(table, out)
            files[path.name] = info

        if options['pdf']:
            build_run_report(out / 'report.pdf', self.name, cfg.params.as_dict(), result.summary, files)

        wall_time = time.perf_counter() - started
        write_manifest(out, self.name, cfg.as_dict(), wall_time, files, result.summary)
        if run is not None:
            run.mark_completed(wall_time, files)

        logger.info(f'{self.name} finished in {wall_time:.2f}s')
        self.stdout.write(self.style.SUCCESS(
            f'{self.name}: {len(files)} arquivo(s) gravado(s) em {out}'
        ))
        for label, value in result.summary.items():
            self.stdout.write(f'  {label}: {value}')
