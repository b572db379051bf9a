from dataclasses import replace

from cavidades.analysis import LyapunovConfig, lyapunov_max
from cavidades.dynamics import integrate
from cavidades.mean_field import FieldState
from cavidades.tables import lyapunov_table

from ._base import CommandResult, EpomCommand


class Command(EpomCommand):
    help = 'Maior expoente de Lyapunov (método de duas trajetórias)'
    name = 'lyapunov'

    def run(self, cfg, workers):
        section = cfg.section('lyapunov')
        integrator = cfg.integrator
        start = FieldState.kicked(section['kick'])

        # the estimate starts where the transient ends
        transient = integrator.t_end * integrator.transient_fraction
        if transient >= integrator.sample_stride:
            warm = replace(integrator, t_end=transient, transient_fraction=0.0)
            start = integrate(cfg.params, start, warm).final_state()

        lyap = LyapunovConfig(
            renorm_interval=section['renorm_interval'],
            n_renorms=section['n_renorms'],
            separation=section['separation'],
            warmup=section['warmup'],
        )
        estimate = lyapunov_max(cfg.params, start, integrator, lyap)
        return CommandResult(
            tables=[lyapunov_table(estimate)],
            summary={'lambda_max': estimate.lambda_max, 'converged': estimate.converged,
                     'status': estimate.status},
        )
