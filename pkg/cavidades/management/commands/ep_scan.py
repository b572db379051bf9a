from cavidades.spectrum import ep_scan
from cavidades.tables import ep_scan_table, ep_summary

from ._base import CommandResult, EpomCommand


class Command(EpomCommand):
    help = 'Localiza o ponto excepcional numa varredura de alpha_in'
    name = 'ep_scan'

    def run(self, cfg, workers):
        report = ep_scan(
            cfg.params,
            cfg.section('ep_scan')['alpha_grid'],
            common_amplitude_mode=cfg.spectrum['common_amplitude'],
            symmetrize=cfg.spectrum['symmetrize'],
        )
        return CommandResult(tables=[ep_scan_table(report)], summary=ep_summary(report))
