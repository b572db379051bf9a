import logging
from pathlib import Path

from django.core.management.base import BaseCommand

from cavidades.models import SimulationRun
from cavidades.outputs import write_atomic
from cavidades.resources import SimulationRunResource

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = 'Exporta o registro de execuções para CSV'

    def add_arguments(self, parser):
        parser.add_argument('--out', default='runs.csv', help='Arquivo CSV de saída')
        parser.add_argument('--command', help='Filtrar por comando')
        parser.add_argument('--status', choices=[s for s, _ in SimulationRun.STATUS_CHOICES])

    def handle(self, *args, **options):
        queryset = SimulationRun.objects.prefetch_related('artifacts').order_by('created_at', 'id')
        if options['command']:
            queryset = queryset.filter(command=options['command'])
        if options['status']:
            queryset = queryset.filter(status=options['status'])

        dataset = SimulationRunResource().export(queryset=queryset)
        path = Path(options['out'])
        write_atomic(path, dataset.csv)
        logger.info(f'Exported {len(dataset)} runs to {path}')
        self.stdout.write(self.style.SUCCESS(f'{len(dataset)} execução(ões) exportada(s) para {path}'))
