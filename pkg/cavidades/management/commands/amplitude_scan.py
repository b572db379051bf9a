from cavidades.dynamics import amplitude_scan
from cavidades.tables import amplitude_table

from ._base import CommandResult, EpomCommand


class Command(EpomCommand):
    help = 'Número de fótons e deslocamento mecânico ao longo de uma rampa de alpha_in'
    name = 'amplitude_scan'

    def run(self, cfg, workers):
        section = cfg.section('amplitude_scan')
        scan = amplitude_scan(
            cfg.params,
            section['alpha_grid'],
            cfg.integrator,
            kick=section['kick'],
            batch_size=section['batch_size'],
            workers=workers,
        )
        flagged = sum(row.status != 'ok' for row in scan.rows)
        return CommandResult(
            tables=[amplitude_table(scan)],
            summary={'threshold': scan.threshold, 'flagged_rows': flagged},
        )
