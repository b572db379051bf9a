from cavidades.analysis import SectionRule, count_clusters, poincare_section
from cavidades.dynamics import integrate
from cavidades.mean_field import FieldState
from cavidades.tables import poincare_table

from ._base import CommandResult, EpomCommand


class Command(EpomCommand):
    help = 'Seção de Poincaré da trajetória após o transiente'
    name = 'poincare'

    def run(self, cfg, workers):
        section = cfg.section('poincare')
        ts = integrate(cfg.params, FieldState.kicked(section['kick']), cfg.integrator,
                       discard_transient=True)
        rule = SectionRule(kind=section['rule'], period=section['period'],
                           phase=section['phase'], min_points=section['min_points'])
        data = poincare_section(ts, rule)
        scale = max(float(abs(data.points).max()), 1.0)
        return CommandResult(
            tables=[poincare_table(data)],
            summary={
                'points': len(data),
                'spread': data.spread,
                'clusters': count_clusters(data.points, 1e-3 * scale),
            },
        )
