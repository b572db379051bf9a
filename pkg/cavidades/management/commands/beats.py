from cavidades.analysis import beat_spectrum, beat_start_state
from cavidades.dynamics import TimeSeries, integrate_batch, run_batched
from cavidades.exceptions import InsufficientDataError
from cavidades.tables import beats_table

from ._base import CommandResult, EpomCommand


class Command(EpomCommand):
    help = 'Espectro de batimentos de x1 para cada eta da grade'
    name = 'beats'

    def run(self, cfg, workers):
        section = cfg.section('beats')

        def task(etas):
            points = [cfg.params.with_changes(eta=eta) for eta in etas]
            starts = [beat_start_state(p, section['kick'], section['start']) for p in points]
            outcomes = integrate_batch(points, starts, cfg.integrator, discard_transient=True)
            rows = []
            for eta, outcome in zip(etas, outcomes):
                if not isinstance(outcome, TimeSeries):
                    rows.append((eta, None, 'integration-failed'))
                    continue
                try:
                    spectrum = beat_spectrum(outcome, min_samples=section['min_samples'],
                                             peak_ratio=section['peak_ratio'])
                except InsufficientDataError as exc:
                    rows.append((eta, None, f'insufficient-data: {exc}'))
                    continue
                rows.append((eta, spectrum, 'ok'))
            return rows

        rows = run_batched(section['eta_grid'], task, batch_size=section['batch_size'], workers=workers)
        return CommandResult(
            tables=[beats_table(rows, cfg.to_eta_units)],
            summary={f'splitting(eta={cfg.to_eta_units(eta):g})': s.splitting
                     for eta, s, _ in rows if s is not None},
        )
