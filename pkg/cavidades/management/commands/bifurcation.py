from collections import Counter

from cavidades.analysis import LyapunovConfig, bifurcation_diagram
from cavidades.tables import bifurcation_tables

from ._base import CommandResult, EpomCommand


class Command(EpomCommand):
    help = 'Diagrama de bifurcação de x1 em função de eta, com rótulo de regime'
    name = 'bifurcation'

    def run(self, cfg, workers):
        section = cfg.section('bifurcation')
        lyap = LyapunovConfig(
            renorm_interval=section['renorm_interval'],
            n_renorms=section['n_renorms'],
            separation=section['separation'],
            warmup=section['warmup'],
        )
        rows = bifurcation_diagram(
            cfg.params,
            section['eta_grid'],
            cfg.integrator,
            lyap=lyap,
            kick=section['kick'],
            fixed_point_tol=section['fixed_point_tol'],
            batch_size=section['batch_size'],
            workers=workers,
        )
        extrema, zones = bifurcation_tables(rows, cfg.to_eta_units)
        labels = Counter(row.label for row in rows)
        return CommandResult(tables=[extrema, zones], summary=dict(sorted(labels.items())))
