"""
Time integration of the mean-field equations
Fixed-step RK4 runs in the compiled kernels, one row per system; the adaptive
path steps scipy's RK45 pair itself and reads the uniform output grid off the
dense output, under a minimum step and an evaluation budget.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.integrate import RK45

from . import kernels
from .exceptions import ConfigError, IntegrationError
from .mean_field import FieldState, pack_params, rhs_real

logger = logging.getLogger(__name__)

METHODS = ('fixed-rk4', 'adaptive-rk45')

# RK45 evaluations per minimal step (6 stages, first-same-as-last)
_EVALUATIONS_PER_STEP = 6
_AUTO_BUDGET_FACTOR = 10

@dataclass(frozen=True)
class IntegratorConfig:
    method: str = 'fixed-rk4'
    dt: float = 0.05
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    t_end: float = 2e5
    sample_stride: float = 1.0
    transient_fraction: float = 0.5
    max_step: float = 0.1
    min_step: float = 1e-6
    max_evaluations: int = 0  # 0: ten times what max_step alone would cost

    def __post_init__(self):
        problems = []
        if self.method not in METHODS:
            problems.append(f'integrator.method: método desconhecido {self.method!r}')
        for name in ('dt', 'rel_tol', 'abs_tol', 't_end', 'sample_stride', 'max_step', 'min_step'):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                problems.append(f'integrator.{name}: deve ser > 0, recebeu {value}')
        if not problems and self.min_step >= self.max_step:
            problems.append('integrator.min_step: deve ser menor que max_step')
        if int(self.max_evaluations) != self.max_evaluations or self.max_evaluations < 0:
            problems.append(f'integrator.max_evaluations: deve ser inteiro >= 0, recebeu {self.max_evaluations}')
        if not 0 <= self.transient_fraction < 1:
            problems.append(f'integrator.transient_fraction: deve estar em [0, 1), recebeu {self.transient_fraction}')
        if not problems and self.t_end < self.sample_stride:
            problems.append('integrator.t_end: deve cobrir ao menos um sample_stride')
        if self.method == 'fixed-rk4' and not problems:
            ratio = self.sample_stride / self.dt
            if abs(ratio - round(ratio)) > 1e-9 * ratio or round(ratio) < 1:
                problems.append('integrator.sample_stride: deve ser múltiplo inteiro de dt')
        if problems:
            raise ConfigError(problems)

    @property
    def stride_steps(self):
        return int(round(self.sample_stride / self.dt))

    @property
    def n_samples(self):
        """Samples on the uniform output grid, t = 0 included"""
        return int(math.floor(self.t_end / self.sample_stride + 1e-9)) + 1

    @property
    def first_kept_sample(self):
        return int(math.ceil(self.transient_fraction * (self.n_samples - 1) - 1e-9))

    @property
    def evaluation_budget(self):
        """Right-hand-side evaluations one adaptive run may spend"""
        if self.max_evaluations:
            return int(self.max_evaluations)
        minimal_steps = math.ceil(self.t_end / self.max_step) + 1
        return _AUTO_BUDGET_FACTOR * _EVALUATIONS_PER_STEP * minimal_steps

@dataclass(frozen=True, eq=False)
class TimeSeries:
    """
    Trajectory on a uniform time grid
    states: complex array (N, 4) in the mean-field layout
    """
    t: np.ndarray
    states: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        states = np.asarray(self.states, dtype=complex)
        if states.shape != (t.size, 4):
            raise ValueError(f'states com forma {states.shape} não corresponde a {t.size} amostras')
        if t.size > 1 and np.any(np.diff(t) <= 0):
            raise ValueError('a grade de tempo deve ser estritamente crescente')
        t.flags.writeable = False
        states.flags.writeable = False
        object.__setattr__(self, 't', t)
        object.__setattr__(self, 'states', states)

    def __len__(self):
        return self.t.size

    @property
    def x(self):
        """Mechanical positions, shape (N, 2)"""
        return 2.0 * self.states[:, 2:].real

    @property
    def photon(self):
        """Photon numbers, shape (N, 2)"""
        alpha = self.states[:, :2]
        return alpha.real ** 2 + alpha.imag ** 2

    @property
    def dt(self):
        return float(self.t[1] - self.t[0]) if self.t.size > 1 else math.nan

    def state(self, k):
        return FieldState.from_vector(self.states[k])

    def final_state(self):
        return self.state(-1)

    def after_transient(self, fraction):
        start = int(math.ceil(fraction * (len(self) - 1) - 1e-9))
        return TimeSeries(self.t[start:], self.states[start:])

# ========== FIXED STEP ==========

def rk4_advance(z, coef, dt, n_steps):
    """
    Advance a (B, 4) batch by n_steps RK4 steps and return the new states
    coef: rows from mean_field.pack_params; `z` itself is left untouched
    """
    z = np.array(z, dtype=np.complex128, ndmin=2, order='C')
    kernels.advance(z, np.ascontiguousarray(coef, dtype=float), float(dt), int(n_steps))
    return z

def _march_fixed(params, initial, cfg, discard_transient):
    coef = pack_params(params)
    z = np.array([s.to_vector() for s in initial], dtype=np.complex128)
    batch = z.shape[0]

    n_samples = cfg.n_samples
    first = cfg.first_kept_sample if discard_transient else 0
    times = np.arange(first, n_samples) * cfg.sample_stride
    samples = np.zeros((batch, n_samples - first, 4), dtype=np.complex128)
    last_good = np.zeros(batch, dtype=np.int64)
    kernels.march(z, coef, float(cfg.dt), cfg.stride_steps, n_samples, first, samples, last_good)

    results = []
    for b in range(batch):
        if last_good[b] < n_samples - 1:
            t_good = float(last_good[b] * cfg.sample_stride)
            logger.warning(f'Non-finite state in batch member {b} after t={t_good:g}')
            results.append(IntegrationError('Non-finite state during RK4 integration',
                                            last_good_time=t_good))
        else:
            results.append(TimeSeries(times, samples[b]))
    return results

# ========== ADAPTIVE ==========

def _integrate_adaptive(p, s0, cfg, discard_transient):
    n_samples = cfg.n_samples
    first = cfg.first_kept_sample if discard_transient else 0
    times = np.arange(first, n_samples) * cfg.sample_stride
    t_final = float(times[-1])
    budget = cfg.evaluation_budget

    solver = RK45(rhs_real(p), 0.0, s0.to_real(), t_final,
                  max_step=cfg.max_step, rtol=cfg.rel_tol, atol=cfg.abs_tol)
    out = np.empty((times.size, 8))
    k = 0
    if times[0] == 0.0:
        out[0] = solver.y
        k = 1

    while k < times.size:
        message = solver.step()
        if solver.status == 'failed':
            raise IntegrationError(f'RK45 failed: {message}', last_good_time=float(solver.t))
        if not np.all(np.isfinite(solver.y)):
            raise IntegrationError('Non-finite state during RK45 integration',
                                   last_good_time=float(solver.t_old))
        if solver.status == 'running' and solver.step_size < cfg.min_step:
            raise IntegrationError(f'RK45 step {solver.step_size:.3g} fell below min_step={cfg.min_step:g}',
                                   last_good_time=float(solver.t))
        if solver.nfev > budget:
            raise IntegrationError(f'RK45 exceeded {budget} right-hand-side evaluations',
                                   last_good_time=float(solver.t))
        if times[k] <= solver.t:
            stop = int(np.searchsorted(times, solver.t, side='right'))
            out[k:stop] = solver.dense_output()(times[k:stop]).T
            k = stop

    return TimeSeries(times, out.view(np.complex128))

# ========== PUBLIC API ==========

def integrate_batch(params, initial, cfg: IntegratorConfig, discard_transient=False):
    """
    Integrate several systems with the same configuration
    Returns one TimeSeries per system, or the IntegrationError that stopped it.
    Results do not depend on how systems are grouped into batches.
    """
    params = list(params)
    if isinstance(initial, FieldState):
        initial = [initial] * len(params)
    initial = list(initial)
    if len(initial) != len(params):
        raise ValueError('é preciso um estado inicial por conjunto de parâmetros')
    if not params:
        return []

    if cfg.method == 'fixed-rk4':
        return _march_fixed(params, initial, cfg, discard_transient)

    results = []
    for p, s0 in zip(params, initial):
        try:
            results.append(_integrate_adaptive(p, s0, cfg, discard_transient))
        except IntegrationError as exc:
            logger.warning(f'Adaptive integration failed at alpha_in={p.alpha_in:g}: {exc}')
            results.append(exc)
    return results

def integrate(p, s0: FieldState, cfg: IntegratorConfig, discard_transient=False) -> TimeSeries:
    result = integrate_batch([p], [s0], cfg, discard_transient)[0]
    if isinstance(result, IntegrationError):
        raise result
    return result

def run_batched(items, task, batch_size=16, workers=1):
    """
    Apply `task` to fixed-size chunks of `items` on a thread pool
    Chunk boundaries depend only on batch_size, and results come back in
    input order. batch_size 0 splits the items evenly over the workers.
    """
    items = list(items)
    workers = max(1, workers)
    if not batch_size:
        batch_size = max(1, math.ceil(len(items) / workers))
    chunks = [items[k:k + batch_size] for k in range(0, len(items), batch_size)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(task, chunks))
    return [r for chunk in results for r in chunk]

# ========== AMPLITUDE SCAN ==========

@dataclass(frozen=True)
class AmplitudeRow:
    alpha_in: float
    photon_mean: tuple
    photon_max: tuple
    x_mean: tuple
    x_max: tuple
    status: str = 'ok'
    last_good_time: float = math.nan

@dataclass(frozen=True)
class AmplitudeScan:
    rows: tuple
    threshold: float  # nan when no point exceeds the reference level
    threshold_index: int

def detect_threshold(alpha_grid, x_max, factor=10.0):
    """
    First grid point whose max |x_1| exceeds `factor` times the median of all
    finite values below it; (nan, -1) if none does
    """
    values = np.asarray(x_max, dtype=float)
    for k in range(1, values.size):
        below = values[:k][np.isfinite(values[:k])]
        if below.size == 0 or not math.isfinite(values[k]):
            continue
        reference = float(np.median(below))
        if reference > 0 and values[k] > factor * reference:
            return float(alpha_grid[k]), k
    return math.nan, -1

def amplitude_scan(p, alpha_grid, cfg: IntegratorConfig, kick=1e-3, batch_size=16,
                   workers=1) -> AmplitudeScan:
    """Post-transient photon numbers and displacements along a drive ramp"""
    grid = [float(a) for a in alpha_grid]
    if np.any(np.diff(grid) < 0):
        raise ValueError('alpha_grid deve estar em ordem crescente')
    s0 = FieldState.kicked(kick)

    def task(chunk):
        points = [p.with_changes(alpha_in=a) for a in chunk]
        return integrate_batch(points, s0, cfg, discard_transient=True)

    outcomes = run_batched(grid, task, batch_size=batch_size, workers=workers)

    rows = []
    for alpha_in, outcome in zip(grid, outcomes):
        if isinstance(outcome, IntegrationError):
            logger.warning(f'Flagging alpha_in={alpha_in:g}: {outcome}')
            nan2 = (math.nan, math.nan)
            rows.append(AmplitudeRow(alpha_in, nan2, nan2, nan2, nan2,
                                     status='integration-failed',
                                     last_good_time=outcome.last_good_time))
            continue
        photon = outcome.photon
        x = np.abs(outcome.x)
        rows.append(AmplitudeRow(
            alpha_in=alpha_in,
            photon_mean=tuple(photon.mean(axis=0)),
            photon_max=tuple(photon.max(axis=0)),
            x_mean=tuple(x.mean(axis=0)),
            x_max=tuple(x.max(axis=0)),
        ))

    threshold, index = detect_threshold(grid, [row.x_max[0] for row in rows])
    if index >= 0:
        logger.info(f'Amplification threshold detected at alpha_in={threshold:g}')
    else:
        logger.info('No amplification threshold on the scanned grid')
    return AmplitudeScan(rows=tuple(rows), threshold=threshold, threshold_index=index)
