from cavidades.dynamics import integrate
from cavidades.mean_field import FieldState
from cavidades.tables import timeseries_table

from ._base import CommandResult, EpomCommand


class Command(EpomCommand):
    help = 'Integra a dinâmica de campo médio e grava timeseries.csv'
    name = 'simulate'

    def run(self, cfg, workers):
        section = cfg.section('simulate')
        ts = integrate(cfg.params, FieldState.kicked(section['kick']), cfg.integrator)
        final = ts.final_state()
        return CommandResult(
            tables=[timeseries_table(ts)],
            summary={
                'samples': len(ts),
                'x1_final': final.x[0],
                'n1_final': final.photon_number[0],
            },
        )
