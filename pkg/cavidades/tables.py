"""
Result tables
One builder per result type; the management commands only glue these to
the numerical modules.
"""

import math

import numpy as np

from .outputs import Table
from .steady_state import sextic_discrepancy

STATE_HEADERS = ['re_alpha_1', 'im_alpha_1', 're_alpha_2', 'im_alpha_2',
                 're_beta_1', 'im_beta_1', 're_beta_2', 'im_beta_2']


def _split(z):
    return [z.real, z.imag]


def timeseries_table(ts, name='timeseries'):
    table = Table(name, ['t', *STATE_HEADERS, 'x1', 'x2', 'n1', 'n2'])
    real = np.ascontiguousarray(ts.states).view(np.float64)
    x, photon = ts.x, ts.photon
    for k in range(len(ts)):
        table.append([ts.t[k], *real[k], x[k, 0], x[k, 1], photon[k, 0], photon[k, 1]])
    return table


def steady_table(params_list, states):
    table = Table('steady', ['alpha_in', *STATE_HEADERS, 'n1', 'n2', 'residual', 'iterations',
                             'converged', 'sextic_residual_1', 'sextic_residual_2', 'status'])
    for p, ss in zip(params_list, states):
        sextic = [math.nan, math.nan]
        if p.g_m > 0 and ss.converged:
            sextic = [sextic_discrepancy(p, ss, cavity) for cavity in (1, 2)]
        values = [v for z in ss.alpha_bar + ss.beta_bar for v in _split(z)]
        table.append([p.alpha_in, *values, *ss.photon_number, ss.residual, ss.iterations,
                      ss.converged, *sextic, 'ok' if ss.converged else 'not-converged'])
    return table


def ep_scan_table(report):
    table = Table('ep_scan', [
        'alpha_in', 'omega_eff_1', 'omega_eff_2', 'gamma_eff_1', 'gamma_eff_2',
        'omega_eff_imag_1', 'omega_eff_imag_2', 'gamma_eff_imag_1', 'gamma_eff_imag_2',
        'Gamma', 're_lambda_plus', 'im_lambda_plus', 're_lambda_minus', 'im_lambda_minus',
        're_sigma', 'im_sigma', 'abs_sigma', 'phase', 'status',
    ])
    for pt in report.points:
        if pt.spectrum is None:
            table.append([pt.alpha_in] + [math.nan] * 16 + ['', pt.status])
            continue
        ep, spec = pt.effective, pt.spectrum
        table.append([
            pt.alpha_in, *ep.omega_eff, *ep.gamma_eff, *ep.omega_eff_imag, *ep.gamma_eff_imag,
            ep.Gamma, *_split(spec.lambda_plus), *_split(spec.lambda_minus),
            *_split(spec.sigma), abs(spec.sigma), spec.phase, pt.status,
        ])
    return table


def ep_summary(report):
    return {
        'alpha_ep': report.alpha_ep,
        'alpha_ep_grid': report.alpha_grid_min,
        'abs_sigma_ep': abs(report.sigma_ep),
        'omega_gap_ep': report.omega_gap_ep,
        'gamma_gap_ep': report.gamma_gap_ep,
        'boundary_minimum': report.boundary_minimum,
    }


def surface_tables(surface, to_units):
    rows = Table('eigen_surface', ['alpha_in', 'eta', 'eta_rel', 'omega_plus', 'omega_minus',
                                   'gamma_plus', 'gamma_minus', 'abs_sigma', 'phase', 'status'])
    for r in surface.rows:
        rows.append([r.alpha_in, r.eta, to_units(r.eta), r.omega_plus, r.omega_minus,
                     r.gamma_plus, r.gamma_minus, r.abs_sigma, r.phase, r.status])

    locus = Table('ep_locus', ['eta', 'eta_rel', 'alpha_ep', 'alpha_ep_grid', 'abs_sigma_ep',
                               'omega_gap_ep', 'gamma_gap_ep', 'boundary_minimum'])
    for eta, report in surface.locus:
        locus.append([eta, to_units(eta), report.alpha_ep, report.alpha_grid_min,
                      abs(report.sigma_ep), report.omega_gap_ep, report.gamma_gap_ep,
                      report.boundary_minimum])
    return rows, locus


def amplitude_table(scan):
    table = Table('amplitude_scan', [
        'alpha_in', 'n1_mean', 'n2_mean', 'n1_max', 'n2_max',
        'abs_x1_mean', 'abs_x2_mean', 'abs_x1_max', 'abs_x2_max', 'status', 'last_good_time',
    ])
    for row in scan.rows:
        table.append([row.alpha_in, *row.photon_mean, *row.photon_max, *row.x_mean, *row.x_max,
                      row.status, row.last_good_time])
    return table


def bifurcation_tables(rows, to_units):
    extrema = Table('bifurcation', ['eta', 'eta_rel', 'x1_max'])
    zones = Table('zones', ['eta', 'eta_rel', 'label', 'lambda_max', 'n_frequencies',
                            'n_extrema', 'status'])
    for row in rows:
        for value in row.extrema:
            extrema.append([row.eta, to_units(row.eta), value])
        zones.append([row.eta, to_units(row.eta), row.label, row.lambda_max,
                      row.n_frequencies, len(row.extrema), row.status])
    return extrema, zones


def poincare_table(data):
    first, second = data.rule.coordinates
    table = Table('poincare', ['t', first, second])
    for t, (a, b) in zip(data.times, data.points):
        table.append([t, a, b])
    return table


def lyapunov_table(estimate):
    table = Table('lyapunov', ['renorm', 't', 'lambda_running'])
    for k, value in enumerate(estimate.convergence_trace, start=1):
        table.append([k, k * estimate.renorm_interval, value])
    return table


def beats_table(rows, to_units):
    table = Table('beats', ['eta', 'eta_rel', 'f_peak_1', 'f_peak_2', 'splitting',
                            'splitting_bins', 'resolution', 'envelope_frequency', 'status'])
    for eta, spectrum, status in rows:
        if spectrum is None:
            table.append([eta, to_units(eta)] + [math.nan] * 6 + [status])
            continue
        peaks = list(spectrum.peak_frequencies) + [math.nan]
        table.append([eta, to_units(eta), peaks[0], peaks[1], spectrum.splitting,
                      spectrum.splitting_bins, spectrum.resolution,
                      spectrum.envelope_frequency, status])
    return table
