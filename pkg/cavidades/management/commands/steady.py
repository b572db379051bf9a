from cavidades.steady_state import continuation, solve_steady
from cavidades.tables import steady_table

from ._base import CommandResult, EpomCommand


class Command(EpomCommand):
    help = 'Resolve o estado estacionário (opcionalmente ao longo de uma rampa de alpha_in)'
    name = 'steady'

    def run(self, cfg, workers):
        grid = cfg.section('steady')['alpha_grid']
        if grid is None:
            points = [cfg.params]
            states = [solve_steady(cfg.params)]
        else:
            points = [cfg.params.with_changes(alpha_in=a) for a in grid]
            states = continuation(cfg.params, grid)

        failed = sum(not ss.converged for ss in states)
        return CommandResult(
            tables=[steady_table(points, states)],
            summary={'points': len(states), 'not_converged': failed,
                     'max_residual': max(ss.residual for ss in states)},
        )
