from cavidades.spectrum import eigen_surface
from cavidades.tables import surface_tables

from ._base import CommandResult, EpomCommand


class Command(EpomCommand):
    help = 'Autofrequências e amortecimentos no plano (alpha_in, eta) e o lugar dos pontos excepcionais'
    name = 'eigen_surface'

    def run(self, cfg, workers):
        section = cfg.section('eigen_surface')
        surface = eigen_surface(
            cfg.params,
            section['alpha_grid'],
            section['eta_grid'],
            common_amplitude_mode=cfg.spectrum['common_amplitude'],
            symmetrize=cfg.spectrum['symmetrize'],
            workers=workers,
        )
        rows, locus = surface_tables(surface, cfg.to_eta_units)
        return CommandResult(
            tables=[rows, locus],
            summary={f'alpha_ep(eta={cfg.to_eta_units(eta):g})': report.alpha_ep
                     for eta, report in surface.locus},
        )
