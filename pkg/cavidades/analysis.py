"""
Regime analysis
Bifurcation diagrams over the dissipative coupling, Poincare sections,
the largest Lyapunov exponent and the beat spectrum of the two coupled
resonators.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.signal import find_peaks, periodogram
from scipy.spatial import ConvexHull, QhullError

from .dynamics import IntegratorConfig, TimeSeries, integrate_batch, rk4_advance, run_batched
from .exceptions import InsufficientDataError, IntegrationError
from .mean_field import FieldState, SystemParams, pack_params
from .steady_state import solve_steady

logger = logging.getLogger(__name__)

LABELS = ('chaotic', 'quasi-periodic', 'regular', 'fixed-point')
CHAOS_THRESHOLD = 1e-4
SPREAD_CHAOTIC = 0.1


# ========== CLASSIFICATION ==========

def classify_regime(lambda_max, n_frequencies, is_fixed_point=False, noise=CHAOS_THRESHOLD):
    if is_fixed_point:
        return 'fixed-point'
    if lambda_max is not None and lambda_max > noise:
        return 'chaotic'
    if n_frequencies >= 3:
        return 'quasi-periodic'
    return 'regular'


def local_maxima(x):
    """Values of the interior samples larger than the previous and not smaller than the next"""
    x = np.asarray(x, dtype=float)
    if x.size < 3:
        return np.empty(0)
    mask = (x[1:-1] > x[:-2]) & (x[1:-1] >= x[2:])
    return x[1:-1][mask]


def is_fixed_point(x, tol=1e-6):
    x = np.asarray(x, dtype=float)
    return bool(np.ptp(x) <= tol * (1.0 + abs(float(np.mean(x)))))


def spectral_peaks(signal, dt, rel_height=1e-3):
    """Frequencies (cycles per unit time) of the significant periodogram peaks, strongest first"""
    signal = np.asarray(signal, dtype=float)
    if signal.size < 16:
        return np.empty(0), math.nan
    freqs, power = periodogram(signal, fs=1.0 / dt, window='hann', detrend='constant',
                               scaling='spectrum')
    power[0] = 0.0
    top = float(power.max())
    if top <= 0:
        return np.empty(0), freqs[1] - freqs[0]
    peaks, _ = find_peaks(power, height=rel_height * top, prominence=rel_height * top)
    order = np.argsort(power[peaks])[::-1]
    return freqs[peaks][order], freqs[1] - freqs[0]


def independent_frequencies(freqs, resolution, tolerance_bins=2.0):
    """
    1 for the strongest peak plus every peak that is not one of its harmonics
    """
    freqs = np.asarray(freqs, dtype=float)
    if freqs.size == 0:
        return 0
    base = freqs[0]
    count = 1
    for f in freqs[1:]:
        order = round(f / base)
        if order < 1 or abs(f - order * base) > tolerance_bins * resolution:
            count += 1
    return count


# ========== LYAPUNOV ==========

@dataclass(frozen=True)
class LyapunovConfig:
    renorm_interval: float = 1.0
    n_renorms: int = 10000
    separation: float = 1e-8
    warmup: int = 100
    accept_variation: float = 0.2


@dataclass(frozen=True, eq=False)
class LyapunovEstimate:
    lambda_max: float
    renorm_interval: float
    n_renorms: int
    convergence_trace: np.ndarray
    converged: bool
    status: str = 'ok'


def _trace_converged(trace, accept_variation, noise=CHAOS_THRESHOLD):
    """The last decade of running estimates varies by less than accept_variation"""
    if trace.size < 10:
        return False
    tail = trace[-max(1, trace.size // 10):]
    spread = float(np.ptp(tail))
    return spread < accept_variation * max(abs(float(np.mean(tail))), noise)


def _benettin(params, starts, dt, lyap):
    """
    Largest exponent of several systems at once by the two-trajectory method
    Returns one LyapunovEstimate per system
    """
    params = list(params)
    batch = len(params)
    coef = pack_params(params + params)
    reference = np.array([s.to_vector() for s in starts], dtype=complex)

    direction = np.full(8, 1.0 / math.sqrt(8.0)).view(np.complex128)
    d0 = lyap.separation * np.maximum(1.0, np.linalg.norm(reference, axis=1))
    z = np.concatenate((reference, reference + d0[:, None] * direction))

    steps = max(1, int(round(lyap.renorm_interval / dt)))
    interval = steps * dt
    log_sum = np.zeros(batch)
    trace = np.empty((lyap.n_renorms, batch))
    failed = np.zeros(batch, dtype=bool)
    failed_at = np.full(batch, math.nan)

    for k in range(lyap.warmup + lyap.n_renorms):
        z = rk4_advance(z, coef, dt, steps)
        diff = z[batch:] - z[:batch]
        dist = np.sqrt(np.sum(diff.real ** 2 + diff.imag ** 2, axis=1))
        bad = ~np.isfinite(dist) | (dist == 0) | ~np.all(np.isfinite(z[:batch]), axis=1)
        newly = bad & ~failed
        failed_at[newly] = (k + 1) * interval
        failed |= bad
        dist = np.where(failed, d0, dist)
        diff = np.where(failed[:, None], d0[:, None] * direction, diff)
        z[:batch][failed] = 0.0

        if k >= lyap.warmup:
            j = k - lyap.warmup
            log_sum += np.log(dist / d0)
            trace[j] = log_sum / ((j + 1) * interval)
        z[batch:] = z[:batch] + diff * (d0 / dist)[:, None]

    estimates = []
    for b in range(batch):
        if failed[b]:
            estimates.append(LyapunovEstimate(
                lambda_max=math.nan, renorm_interval=interval, n_renorms=lyap.n_renorms,
                convergence_trace=np.empty(0), converged=False,
                status=f'integration-failed at t={failed_at[b]:g}',
            ))
            continue
        column = trace[:, b].copy()
        converged = _trace_converged(column, lyap.accept_variation)
        if not converged:
            logger.warning(f'Lyapunov trace not converged for eta={params[b].eta:g}, '
                           f'alpha_in={params[b].alpha_in:g}')
        estimates.append(LyapunovEstimate(
            lambda_max=float(column[-1]) if column.size else math.nan,
            renorm_interval=interval,
            n_renorms=lyap.n_renorms,
            convergence_trace=column,
            converged=converged,
            status='ok' if converged else 'not-converged',
        ))
    return estimates


def lyapunov_max(p: SystemParams, s0: FieldState, cfg: IntegratorConfig,
                 lyap: LyapunovConfig = None) -> LyapunovEstimate:
    """Largest Lyapunov exponent from a (post-transient) start state, RK4 at cfg.dt"""
    lyap = lyap or LyapunovConfig()
    if lyap.n_renorms < 1:
        raise ValueError('n_renorms deve ser >= 1')
    return _benettin([p], [s0], cfg.dt, lyap)[0]


# ========== BIFURCATION ==========

@dataclass(frozen=True)
class BifurcationData:
    eta: float
    extrema: tuple
    label: str
    lambda_max: float = math.nan
    n_frequencies: int = 0
    status: str = 'ok'


def _bifurcation_point(p, series, lyapunov, fixed_point_tol):
    x1 = series.x[:, 0]
    if is_fixed_point(x1, fixed_point_tol):
        return BifurcationData(eta=p.eta, extrema=(), label='fixed-point')
    freqs, resolution = spectral_peaks(x1, series.dt)
    n_freq = independent_frequencies(freqs, resolution)
    lam = lyapunov.lambda_max if lyapunov is not None else None
    status = 'ok' if lyapunov is None or lyapunov.converged else lyapunov.status
    return BifurcationData(
        eta=p.eta,
        extrema=tuple(float(v) for v in local_maxima(x1)),
        label=classify_regime(lam, n_freq),
        lambda_max=math.nan if lam is None else lam,
        n_frequencies=n_freq,
        status=status,
    )


def bifurcation_diagram(p: SystemParams, eta_grid, cfg: IntegratorConfig, lyap=None,
                        kick=1e-3, fixed_point_tol=1e-6, batch_size=16, workers=1):
    """
    Local maxima of x_1 after the transient, one row per eta, with a regime label
    The drive alpha_in is taken from the template `p`.
    """
    lyap = lyap or LyapunovConfig()
    s0 = FieldState.kicked(kick)
    etas = [float(e) for e in eta_grid]

    def task(chunk):
        points = [p.with_changes(eta=e) for e in chunk]
        outcomes = integrate_batch(points, s0, cfg, discard_transient=True)

        moving = [k for k, o in enumerate(outcomes)
                  if isinstance(o, TimeSeries) and not is_fixed_point(o.x[:, 0], fixed_point_tol)]
        estimates = {}
        if moving and lyap.n_renorms > 0:
            found = _benettin([points[k] for k in moving],
                              [outcomes[k].final_state() for k in moving], cfg.dt, lyap)
            estimates = dict(zip(moving, found))

        rows = []
        for k, (point, outcome) in enumerate(zip(points, outcomes)):
            if isinstance(outcome, IntegrationError):
                logger.warning(f'Flagging eta={point.eta:g}: {outcome}')
                rows.append(BifurcationData(eta=point.eta, extrema=(), label='',
                                            status='integration-failed'))
                continue
            rows.append(_bifurcation_point(point, outcome, estimates.get(k), fixed_point_tol))
        return rows

    rows = run_batched(etas, task, batch_size=batch_size, workers=workers)
    for row in rows:
        logger.debug(f'eta={row.eta:g}: {row.label} ({len(row.extrema)} maxima)')
    return rows


# ========== POINCARE ==========

@dataclass(frozen=True)
class SectionRule:
    """
    strobe: sample at t_k = phase + k * period
    hyperplane: upward crossings of x_2 = 0, recording (x_1, p_1)
    """
    kind: str = 'strobe'
    period: float = 2 * math.pi
    phase: float = 0.0
    min_points: int = 100

    def __post_init__(self):
        if self.kind not in ('strobe', 'hyperplane'):
            raise ValueError(f'Unknown section rule {self.kind!r}')
        if not self.period > 0:
            raise ValueError('period deve ser > 0')

    @property
    def coordinates(self):
        return ('x1', 'x2') if self.kind == 'strobe' else ('x1', 'p1')


@dataclass(frozen=True, eq=False)
class PoincareData:
    points: np.ndarray
    rule: SectionRule
    times: np.ndarray = field(default=None)

    def __len__(self):
        return len(self.points)

    @property
    def spread(self):
        return section_spread(self.points)


def poincare_section(ts: TimeSeries, rule: SectionRule = None) -> PoincareData:
    rule = rule or SectionRule()
    if len(ts) < 4:
        raise InsufficientDataError('time series too short for a Poincare section')

    x = ts.x
    if rule.kind == 'strobe':
        k0 = math.ceil((ts.t[0] - rule.phase) / rule.period - 1e-9)
        k1 = math.floor((ts.t[-1] - rule.phase) / rule.period + 1e-9)
        times = rule.phase + np.arange(k0, k1 + 1) * rule.period
        times = times[(times >= ts.t[0]) & (times <= ts.t[-1])]
        spline = CubicSpline(ts.t, x, axis=0)
        points = spline(times)
    else:
        x1, x2 = x[:, 0], x[:, 1]
        p1 = 2.0 * ts.states[:, 2].imag
        idx = np.flatnonzero((x2[:-1] < 0) & (x2[1:] >= 0))
        s = -x2[idx] / (x2[idx + 1] - x2[idx])
        times = ts.t[idx] + s * (ts.t[idx + 1] - ts.t[idx])
        points = np.column_stack((
            x1[idx] + s * (x1[idx + 1] - x1[idx]),
            p1[idx] + s * (p1[idx + 1] - p1[idx]),
        ))

    if len(points) < rule.min_points:
        raise InsufficientDataError(
            f'Poincare section has {len(points)} points, {rule.min_points} required'
        )
    return PoincareData(points=np.asarray(points), rule=rule, times=np.asarray(times))


def section_spread(points):
    """Convex-hull area over bounding-box area; 0 for degenerate point sets"""
    points = np.asarray(points, dtype=float)
    if len(points) < 3:
        return 0.0
    box = np.ptp(points, axis=0)
    if np.any(box <= 0):
        return 0.0
    try:
        hull = ConvexHull(points)
    except QhullError:
        return 0.0
    return float(hull.volume / (box[0] * box[1]))


def count_clusters(points, tol):
    """Number of occupied cells of side tol"""
    points = np.asarray(points, dtype=float)
    if len(points) == 0:
        return 0
    cells = np.floor((points - points.min(axis=0)) / tol).astype(np.int64)
    return len(np.unique(cells, axis=0))


# ========== BEATS ==========

@dataclass(frozen=True, eq=False)
class BeatSpectrum:
    frequencies: np.ndarray
    magnitude: np.ndarray
    peak_frequencies: tuple
    splitting: float
    resolution: float
    envelope_frequency: float

    @property
    def splitting_bins(self):
        return self.splitting / self.resolution


def beat_start_state(p: SystemParams, kick=1e-3, start='steady') -> FieldState:
    """
    Steady state plus a kick on beta_1, which rings both mechanical
    supermodes with equal weight; 'rest' kicks the undriven zero state
    """
    kicked = FieldState.kicked(kick)
    if start == 'rest':
        return kicked
    steady = solve_steady(p)
    if not steady.converged:
        logger.warning(f'Beats start from rest at eta={p.eta:g}: no steady state')
        return kicked
    return steady.as_field_state() + kicked


def beat_spectrum(ts: TimeSeries, min_samples=2 ** 14, peak_ratio=0.1) -> BeatSpectrum:
    """
    Hann-windowed magnitude spectrum of x_1 and the separation of its two
    dominant peaks; the envelope frequency is the strongest line of the x_1^2
    spectrum below half the dominant frequency
    """
    n = len(ts)
    if n < min_samples:
        raise InsufficientDataError(f'beat spectrum needs {min_samples} samples, got {n}')
    dt = ts.dt
    if not np.allclose(np.diff(ts.t), dt, rtol=1e-9, atol=0.0):
        raise InsufficientDataError('beat spectrum needs uniform sampling')

    freqs, power = periodogram(ts.x[:, 0], fs=1.0 / dt, window='hann', detrend='constant',
                               scaling='spectrum')
    magnitude = np.sqrt(power)
    resolution = float(freqs[1] - freqs[0])

    peaks, _ = find_peaks(magnitude)
    if peaks.size == 0:
        peaks = np.array([int(np.argmax(magnitude))])
    peaks = peaks[np.argsort(magnitude[peaks])[::-1]]
    dominant = peaks[0]
    chosen = [dominant]
    if peaks.size > 1 and magnitude[peaks[1]] >= peak_ratio * magnitude[dominant]:
        chosen.append(peaks[1])
    peak_frequencies = tuple(float(freqs[k]) for k in chosen)
    splitting = abs(peak_frequencies[1] - peak_frequencies[0]) if len(chosen) == 2 else 0.0

    intensity = ts.x[:, 0] ** 2
    envelope = 0.0
    if np.ptp(intensity) > 1e-9 * max(float(np.mean(intensity)), 1e-300):
        f_env, p_env = periodogram(intensity, fs=1.0 / dt, window='hann', detrend='constant',
                                   scaling='spectrum')
        band = (f_env > 0) & (f_env < 0.5 * freqs[dominant])
        if np.any(band):
            envelope = float(f_env[band][np.argmax(p_env[band])])

    return BeatSpectrum(
        frequencies=freqs,
        magnitude=magnitude,
        peak_frequencies=peak_frequencies,
        splitting=splitting,
        resolution=resolution,
        envelope_frequency=envelope,
    )
