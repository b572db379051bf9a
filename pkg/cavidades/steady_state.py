"""
Steady state of the mean-field equations
Damped Newton iteration on the 8-real-dimensional steady conditions, with
the mechanical amplitudes re-projected at every iterate, plus the sextic
amplitude polynomial kept as an independent cross-check.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .exceptions import DomainError
from .mean_field import FieldState, SystemParams, field_derivative, jacobian_matrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NewtonSettings:
    step_tol: float = 1e-12
    residual_tol: float = 1e-10
    max_iterations: int = 200
    min_damping: float = 2.0 ** -30


@dataclass(frozen=True)
class SteadyState:
    """
    Solution of the steady-state conditions
    `converged` is False whenever the residual gate was not met
    """
    alpha_bar: tuple
    beta_bar: tuple
    residual: float
    iterations: int
    converged: bool
    tolerance: float = 1e-10
    message: str = ''

    def as_field_state(self):
        return FieldState(alpha=self.alpha_bar, beta=self.beta_bar)

    def to_vector(self):
        return np.array(self.alpha_bar + self.beta_bar, dtype=complex)

    @property
    def photon_number(self):
        return tuple(abs(a) ** 2 for a in self.alpha_bar)


# ========== NEWTON SOLVER ==========

def _mechanical_matrix(p):
    damping = 1j * p.omega_m + 0.5 * p.gamma_m
    return np.array([[damping, -1j * p.j_m], [-1j * p.j_m, damping]])


def _check_mechanics(p):
    matrix = _mechanical_matrix(p)
    det = abs(np.linalg.det(matrix))
    if det <= 1e-14 * max(1.0, p.omega_m ** 2 + p.j_m ** 2):
        raise DomainError(
            f'Degenerate mechanical system (J_m={p.j_m}, gamma_m={p.gamma_m}): '
            'the steady mechanical amplitudes are undetermined'
        )
    return matrix


def _check_coupling(p):
    om = omega_factor(p)
    if p.g_m * om == 0:
        raise DomainError(
            f'Degenerate coupling (g_m={p.g_m}, Omega={om:g}): the amplitude equation has no leading term'
        )


def mechanical_amplitudes(p: SystemParams, alpha, matrix=None):
    """
    Steady mechanical amplitudes for given optical amplitudes
    (i w + g/2) b_j - i J b_{3-j} = eta sqrt(k) (a_j* - a_j) a_in + i g |a_j|^2
    """
    alpha = np.asarray(alpha, dtype=complex)
    if matrix is None:
        matrix = _check_mechanics(p)
    force = (p.eta * math.sqrt(p.kappa) * (alpha.conj() - alpha) * p.alpha_in
             + 1j * p.g_m * np.abs(alpha) ** 2)
    return np.linalg.solve(matrix, force)


def decoupled_guess(p: SystemParams):
    """Closed-form optical amplitudes with every coupling switched off"""
    delta = np.asarray(p.delta)
    return -math.sqrt(p.kappa) * p.alpha_in / (1j * delta - 0.5 * p.kappa)


def _residual(p, c, z):
    return float(np.max(np.abs(field_derivative(z, c).view(np.float64))))


def solve_steady(p: SystemParams, guess=None, settings=None) -> SteadyState:
    """
    Root of the steady-state conditions by damped Newton iteration
    Seeded from `guess` (FieldState) or from the decoupled closed form.
    Never raises on non-convergence: the result is flagged instead.
    """
    settings = settings or NewtonSettings()
    matrix = _check_mechanics(p)
    _check_coupling(p)
    c = p.coefficients()

    alpha = guess.to_vector()[:2] if guess is not None else decoupled_guess(p)
    z = np.concatenate((alpha, mechanical_amplitudes(p, alpha, matrix)))
    residual = _residual(p, c, z)

    iterations = 0
    message = ''
    while iterations < settings.max_iterations and residual > 0.0:
        jac = jacobian_matrix(p, z)
        rhs = field_derivative(z, c).view(np.float64)
        try:
            step = np.linalg.solve(jac, -rhs).view(np.complex128)
        except np.linalg.LinAlgError:
            message = 'Singular Jacobian'
            break
        iterations += 1

        scale = 1.0 + float(np.max(np.abs(z)))
        if residual <= settings.residual_tol and float(np.max(np.abs(step))) <= settings.step_tol * scale:
            break

        damping = 1.0
        while True:
            trial_alpha = z[:2] + damping * step[:2]
            trial = np.concatenate((trial_alpha, mechanical_amplitudes(p, trial_alpha, matrix)))
            trial_residual = _residual(p, c, trial)
            if trial_residual < residual:
                break
            damping *= 0.5
            if damping < settings.min_damping:
                break

        if damping < settings.min_damping:
            # residual floor reached, or no descent direction left
            message = 'Line search stalled'
            break

        z = trial
        residual = trial_residual
    else:
        if residual > 0.0:
            message = f'No convergence after {settings.max_iterations} iterations'

    converged = residual <= settings.residual_tol and bool(np.all(np.isfinite(z)))
    if converged:
        message = ''
    else:
        message = message or 'Residual above tolerance'
        logger.warning(f'Steady state not converged at alpha_in={p.alpha_in:g}: '
                       f'{message} (residual={residual:.3e})')

    return SteadyState(
        alpha_bar=(complex(z[0]), complex(z[1])),
        beta_bar=(complex(z[2]), complex(z[3])),
        residual=residual,
        iterations=iterations,
        converged=converged,
        tolerance=settings.residual_tol,
        message=message,
    )


def continuation(p: SystemParams, alpha_grid, settings=None):
    """
    Steady states along an ascending drive ramp
    Each point is seeded by the previous solution, which keeps the solver on
    the branch connected to the undriven state.
    """
    states = []
    seed = None
    for alpha_in in alpha_grid:
        point = p.with_changes(alpha_in=float(alpha_in))
        state = solve_steady(point, guess=seed, settings=settings)
        if state.converged:
            seed = state.as_field_state()
        states.append(state)
    return states


# ========== SEXTIC POLYNOMIAL ==========

@dataclass(frozen=True)
class SexticCoefficients:
    """
    |a|^6 + a0 |a|^5 + a1 |a|^4 + a2 |a|^3 + a3 |a|^2 + a4 |a| + a5 = 0
    for the steady amplitude of one cavity
    """
    a: tuple
    b: tuple
    c: float
    omega_big: float
    cavity: int

    def monic(self):
        """Coefficients highest power first, leading 1 included"""
        return np.array((1.0,) + self.a)

    def evaluate(self, u):
        return np.polyval(self.monic(), u)

    def scale(self, u):
        """Natural magnitude of the polynomial terms at u"""
        return np.polyval(np.abs(self.monic()), np.abs(u))


def omega_factor(p: SystemParams):
    """Mechanical response factor; zero at J_m = omega_m"""
    w, j, gamma = p.omega_m, p.j_m, p.gamma_m
    return (w ** 2 - j ** 2) * (w + j) / ((j ** 2 - w ** 2) ** 2 + w * gamma)


def sextic_coefficients(p: SystemParams, cavity: int = 1) -> SexticCoefficients:
    if p.g_m == 0:
        raise DomainError('sextic needs g_m > 0 (c vanishes)')
    if cavity not in (1, 2):
        raise ValueError(f'cavity deve ser 1 ou 2, recebeu {cavity}')

    g, eta, kappa, a_in = p.g_m, p.eta, p.kappa, p.alpha_in
    delta = p.delta[cavity - 1]
    sk = math.sqrt(kappa)
    om = omega_factor(p)
    c = (g * om) ** 2 * ((eta * kappa) ** 2 + 4)
    if c == 0:
        raise DomainError(f'sextic degenerate: Omega={om} makes c vanish')

    b0 = -4 * g * om ** 2 * eta * sk * a_in * (eta ** 2 * kappa ** 2 + 4)
    b1 = (4 * om ** 2 * eta ** 2 * kappa * a_in * (eta ** 2 * kappa ** 2 + 4)
          - kappa * (g * om * eta * a_in) ** 2
          + g * om * (4 * delta + eta * kappa ** 2))
    b2 = (4 * om ** 2 * g * (eta * a_in) ** 3 * kappa * sk
          - 2 * om * sk * a_in * (4 * delta + eta * kappa ** 2))
    b3 = (2 * om * eta * kappa * g * a_in ** 2
          - (2 * om * kappa) ** 2 * (eta * a_in) ** 4
          + delta ** 2 + kappa ** 2 / 4)
    b4 = -4 * eta * kappa * a_in ** 3
    b5 = -kappa * a_in

    b = (b0, b1, b2, b3, b4, b5)
    return SexticCoefficients(
        a=tuple(bk / c for bk in b), b=b, c=c, omega_big=om, cavity=cavity,
    )


@dataclass(frozen=True)
class SexticRoots:
    roots: tuple
    physical: tuple

    @property
    def candidates(self):
        return tuple(r.real for r, ok in zip(self.roots, self.physical) if ok)

    def __iter__(self):
        return iter(self.roots)

    def __len__(self):
        return len(self.roots)


def polynomial_roots(monic):
    """All roots of a monic polynomial (highest power first) via its companion matrix"""
    monic = np.asarray(monic, dtype=float)
    if monic[0] != 1.0:
        raise ValueError('o polinômio deve ser mônico')
    return linalg.eigvals(linalg.companion(monic))


def sextic_roots(c: SexticCoefficients, imag_tol: float = 1e-8) -> SexticRoots:
    roots = polynomial_roots(c.monic())
    roots = sorted((complex(r) for r in roots), key=lambda r: (r.real, r.imag))
    physical = tuple(
        abs(r.imag) < imag_tol * max(1.0, abs(r)) and r.real > 0 for r in roots
    )
    return SexticRoots(roots=tuple(roots), physical=physical)


def sextic_discrepancy(p: SystemParams, ss: SteadyState, cavity: int = 1) -> float:
    """
    Relative residual of the sextic at the Newton amplitude of one cavity
    Logged when large; the printed coefficients are not asserted against
    """
    coeffs = sextic_coefficients(p, cavity)
    u = abs(ss.alpha_bar[cavity - 1])
    value = abs(coeffs.evaluate(u))
    scale = coeffs.scale(u)
    discrepancy = float(value / scale) if scale > 0 else 0.0
    if discrepancy > 1e-6:
        logger.warning(f'Sextic and Newton disagree for cavity {cavity} at '
                       f'alpha_in={p.alpha_in:g}: relative residual {discrepancy:.3e}')
    return discrepancy
