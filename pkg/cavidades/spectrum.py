"""
Effective mechanical spectrum
Adiabatic elimination of both cavities leaves two mechanical modes with
light-induced gain/loss; their 2x2 non-Hermitian Hamiltonian has the
eigenvalues below, and the exceptional point sits where sigma vanishes.
"""

import cmath
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .exceptions import ConvergenceError
from .mean_field import SystemParams
from .steady_state import continuation, solve_steady

logger = logging.getLogger(__name__)

COMMON_AMPLITUDES = ('cavity1', 'cavity2', 'mean')


@dataclass(frozen=True)
class EffectiveParams:
    """
    Effective rates of the two resonators
    Real parts of the printed (complex) expressions; the discarded imaginary
    parts are kept for diagnostics.
    """
    gamma_eff: tuple
    omega_eff: tuple
    Gamma: float
    G: complex
    gamma_eff_imag: tuple = (0.0, 0.0)
    omega_eff_imag: tuple = (0.0, 0.0)


@dataclass(frozen=True)
class EffectiveSpectrum:
    lambda_plus: complex
    lambda_minus: complex
    sigma: complex
    omega_pm: tuple
    gamma_pm: tuple

    @property
    def phase(self):
        """'unbroken' while the splitting sits in the frequencies, 'broken' once it moves to the dampings"""
        return 'unbroken' if abs(self.sigma.real) >= abs(self.sigma.imag) else 'broken'

    @property
    def omega_gap(self):
        return abs(self.omega_pm[0] - self.omega_pm[1])

    @property
    def gamma_gap(self):
        return abs(self.gamma_pm[0] - self.gamma_pm[1])

    def swapped(self):
        return EffectiveSpectrum(
            lambda_plus=self.lambda_minus,
            lambda_minus=self.lambda_plus,
            sigma=-self.sigma,
            omega_pm=self.omega_pm[::-1],
            gamma_pm=self.gamma_pm[::-1],
        )


# ========== EFFECTIVE MODEL ==========

def common_amplitude(ss, mode='cavity1'):
    if mode == 'cavity1':
        return ss.alpha_bar[0]
    if mode == 'cavity2':
        return ss.alpha_bar[1]
    if mode == 'mean':
        return 0.5 * (ss.alpha_bar[0] + ss.alpha_bar[1])
    raise ValueError(f'Unknown common amplitude {mode!r}; use one of {COMMON_AMPLITUDES}')


def effective_params(p: SystemParams, ss, common_amplitude_mode='cavity1',
                     symmetrize=False) -> EffectiveParams:
    if not ss.converged:
        raise ConvergenceError(
            f'Steady state at alpha_in={p.alpha_in:g} did not converge '
            f'(residual={ss.residual:.3e})', steady_state=ss,
        )

    a = complex(common_amplitude(ss, common_amplitude_mode))
    G = p.g_m * a
    Gamma = 4 * abs(G) ** 2 / p.kappa
    sk = math.sqrt(p.kappa)
    a_in = p.alpha_in

    # cavity 1 sees the conjugate amplitude, cavity 2 the amplitude itself
    a1, a2 = (a.real, a.real) if symmetrize else (a.conjugate(), a)
    gamma_1 = Gamma - p.gamma_m - 2 * p.eta ** 2 * a_in * (a1 * sk - a_in)
    gamma_2 = -(Gamma + p.gamma_m) + 2 * p.eta ** 2 * a_in * (a2 * sk - a_in)
    shift = 0.5 * p.eta * math.sqrt(Gamma)
    omega_1 = p.omega_m + shift * (a1 * sk + a_in)
    omega_2 = p.omega_m + shift * (a2 * sk + a_in)

    gamma_1, gamma_2, omega_1, omega_2 = (complex(v) for v in (gamma_1, gamma_2, omega_1, omega_2))
    return EffectiveParams(
        gamma_eff=(gamma_1.real, gamma_2.real),
        omega_eff=(omega_1.real, omega_2.real),
        Gamma=Gamma,
        G=G,
        gamma_eff_imag=(gamma_1.imag, gamma_2.imag),
        omega_eff_imag=(omega_1.imag, omega_2.imag),
    )


def effective_hamiltonian(ep: EffectiveParams, j_m: float) -> np.ndarray:
    (w1, w2), (g1, g2) = ep.omega_eff, ep.gamma_eff
    return np.array([[w1 + 0.5j * g1, -j_m], [-j_m, w2 + 0.5j * g2]])


def eigenvalues(ep: EffectiveParams, j_m: float) -> EffectiveSpectrum:
    (w1, w2), (g1, g2) = ep.omega_eff, ep.gamma_eff
    sigma = cmath.sqrt((2 * (w1 - w2) + 1j * (g1 - g2)) ** 2 + 16 * j_m ** 2)
    center = 0.5 * (w1 + w2) + 0.25j * (g1 + g2)
    plus = center + 0.25 * sigma
    minus = center - 0.25 * sigma
    return EffectiveSpectrum(
        lambda_plus=plus,
        lambda_minus=minus,
        sigma=sigma,
        omega_pm=(plus.real, minus.real),
        gamma_pm=(plus.imag, minus.imag),
    )


def direct_eigenvalues(ep: EffectiveParams, j_m: float):
    """Generic eigensolver on the effective Hamiltonian, for cross-checks"""
    return np.linalg.eigvals(effective_hamiltonian(ep, j_m))


def match_branches(spectra):
    """
    Relabel +/- along a scan so each branch continues to its nearest neighbour
    None entries (failed points) are passed through and do not break the chain
    """
    matched = []
    previous = None
    for spec in spectra:
        if spec is not None and previous is not None:
            keep = abs(spec.lambda_plus - previous.lambda_plus) + abs(spec.lambda_minus - previous.lambda_minus)
            swap = abs(spec.lambda_plus - previous.lambda_minus) + abs(spec.lambda_minus - previous.lambda_plus)
            if swap < keep:
                spec = spec.swapped()
        matched.append(spec)
        if spec is not None:
            previous = spec
    return matched


def spectrum_at(p: SystemParams, ss=None, common_amplitude_mode='cavity1', symmetrize=False):
    ss = ss if ss is not None else solve_steady(p)
    ep = effective_params(p, ss, common_amplitude_mode, symmetrize)
    return ep, eigenvalues(ep, p.j_m)


# ========== EP LOCALISATION ==========

@dataclass(frozen=True)
class ScanPoint:
    alpha_in: float
    steady: object
    effective: object = None
    spectrum: object = None
    status: str = 'ok'


@dataclass(frozen=True)
class EPReport:
    """Result of an exceptional-point scan over the drive strength"""
    points: tuple
    index: int
    alpha_grid_min: float
    sigma_grid_min: float
    omega_gap: float
    gamma_gap: float
    alpha_ep: float
    sigma_ep: complex
    omega_gap_ep: float
    gamma_gap_ep: float
    boundary_minimum: bool
    warnings: tuple = field(default_factory=tuple)


def _scan_points(p, alpha_grid, common_amplitude_mode, symmetrize):
    grid = [float(a) for a in alpha_grid]
    states = continuation(p, grid)
    points = []
    for alpha_in, ss in zip(grid, states):
        point = p.with_changes(alpha_in=alpha_in)
        if not ss.converged:
            logger.warning(f'Flagging alpha_in={alpha_in:g}: steady state not converged')
            points.append(ScanPoint(alpha_in, ss, status='not-converged'))
            continue
        ep = effective_params(point, ss, common_amplitude_mode, symmetrize)
        points.append(ScanPoint(alpha_in, ss, ep, eigenvalues(ep, p.j_m)))
    return points


def ep_scan(p: SystemParams, alpha_grid, common_amplitude_mode='cavity1',
            symmetrize=False) -> EPReport:
    """
    Locate the exceptional point along a drive-strength grid
    Grid argmin of |sigma|, refined by golden-section search between the
    neighbouring grid points.
    """
    grid = np.asarray(alpha_grid, dtype=float)
    if grid.size == 0:
        raise ValueError('alpha_grid is empty')
    if np.any(np.diff(grid) <= 0):
        raise ValueError('alpha_grid deve ser estritamente crescente')

    points = _scan_points(p, grid, common_amplitude_mode, symmetrize)
    valid = [k for k, pt in enumerate(points) if pt.spectrum is not None]
    if not valid:
        raise ConvergenceError('No converged steady state on the scan grid')

    best = min(valid, key=lambda k: abs(points[k].spectrum.sigma))
    best_spec = points[best].spectrum
    warnings = []

    boundary = best in (valid[0], valid[-1])
    if boundary:
        message = (f'|sigma| minimum on the grid boundary (alpha_in={grid[best]:g}); '
                   'the exceptional point may lie outside the scanned range')
        logger.warning(message)
        warnings.append(message)
        alpha_ep, refined = float(grid[best]), best_spec
    else:
        lo = max(k for k in valid if k < best)
        hi = min(k for k in valid if k > best)
        alpha_ep, refined = _refine(p, points[lo], points[best], points[hi],
                                    common_amplitude_mode, symmetrize)

    logger.info(f'EP estimate alpha_in={alpha_ep:.6g} (grid {grid[best]:g}, |sigma|={abs(refined.sigma):.3e})')
    return EPReport(
        points=tuple(points),
        index=best,
        alpha_grid_min=float(grid[best]),
        sigma_grid_min=abs(best_spec.sigma),
        omega_gap=best_spec.omega_gap,
        gamma_gap=best_spec.gamma_gap,
        alpha_ep=alpha_ep,
        sigma_ep=refined.sigma,
        omega_gap_ep=refined.omega_gap,
        gamma_gap_ep=refined.gamma_gap,
        boundary_minimum=boundary,
        warnings=tuple(warnings),
    )


def _refine(p, lo, mid, hi, common_amplitude_mode, symmetrize):
    cache = {}

    def spectrum_for(alpha_in):
        if alpha_in not in cache:
            seed = min((lo, mid, hi), key=lambda pt: abs(pt.alpha_in - alpha_in))
            point = p.with_changes(alpha_in=float(alpha_in))
            ss = solve_steady(point, guess=seed.steady.as_field_state())
            if not ss.converged:
                cache[alpha_in] = None
            else:
                cache[alpha_in] = spectrum_at(point, ss, common_amplitude_mode, symmetrize)[1]
        return cache[alpha_in]

    def objective(alpha_in):
        spec = spectrum_for(alpha_in)
        return math.inf if spec is None else abs(spec.sigma)

    try:
        result = minimize_scalar(objective, bracket=(lo.alpha_in, mid.alpha_in, hi.alpha_in),
                                 method='golden')
    except ValueError:
        result = minimize_scalar(objective, bounds=(lo.alpha_in, hi.alpha_in), method='bounded',
                                 options={'xatol': 1e-10})

    alpha_ep = float(result.x)
    spec = spectrum_for(alpha_ep)
    if spec is None or not lo.alpha_in <= alpha_ep <= hi.alpha_in or abs(spec.sigma) > abs(mid.spectrum.sigma):
        return mid.alpha_in, mid.spectrum
    return alpha_ep, spec


# ========== SURFACES ==========

@dataclass(frozen=True)
class SurfaceRow:
    alpha_in: float
    eta: float
    omega_plus: float
    omega_minus: float
    gamma_plus: float
    gamma_minus: float
    abs_sigma: float
    phase: str
    status: str


@dataclass(frozen=True)
class EigenSurface:
    rows: tuple
    locus: tuple  # (eta, EPReport) per eta


def _surface_for_eta(p, alpha_grid, eta, common_amplitude_mode, symmetrize):
    template = p.with_changes(eta=float(eta))
    report = ep_scan(template, alpha_grid, common_amplitude_mode, symmetrize)
    matched = match_branches([pt.spectrum for pt in report.points])
    rows = []
    for pt, spec in zip(report.points, matched):
        if spec is None:
            nan = math.nan
            rows.append(SurfaceRow(pt.alpha_in, float(eta), nan, nan, nan, nan, nan, '', pt.status))
            continue
        rows.append(SurfaceRow(
            alpha_in=pt.alpha_in,
            eta=float(eta),
            omega_plus=spec.omega_pm[0],
            omega_minus=spec.omega_pm[1],
            gamma_plus=spec.gamma_pm[0],
            gamma_minus=spec.gamma_pm[1],
            abs_sigma=abs(spec.sigma),
            phase=spec.phase,
            status=pt.status,
        ))
    return rows, report


def eigen_surface(p: SystemParams, alpha_grid, eta_grid, common_amplitude_mode='cavity1',
                  symmetrize=False, workers=1) -> EigenSurface:
    """
    Eigenfrequencies and dampings over the (alpha_in, eta) plane, plus the
    EP locus (one refined |sigma| minimum per eta)
    """
    eta_grid = [float(e) for e in eta_grid]
    if not eta_grid or len(alpha_grid) == 0:
        raise ValueError('eigen_surface needs non-empty grids')

    def task(eta):
        return _surface_for_eta(p, alpha_grid, eta, common_amplitude_mode, symmetrize)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = list(pool.map(task, eta_grid))

    rows = []
    locus = []
    for eta, (eta_rows, report) in zip(eta_grid, results):
        rows.extend(eta_rows)
        locus.append((eta, report))
    return EigenSurface(rows=tuple(rows), locus=tuple(locus))
