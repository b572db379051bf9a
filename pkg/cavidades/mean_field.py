"""
Mean-field model
Two optomechanical cavities, each with dispersive (g_m) and dissipative
(eta) coupling, whose mechanical resonators exchange phonons at rate J_m.
All rates are in units of the mechanical frequency omega_m = 1.

Complex state layout (last axis): alpha_1, alpha_2, beta_1, beta_2.
Real layout (8 numbers): Re/Im interleaved in the same order, which is the
memory layout of the complex array, so the two views convert for free.
"""

import math
from dataclasses import asdict, dataclass, field, replace
from typing import NamedTuple

import numpy as np

from .exceptions import InvalidStateError

REAL_LAYOUT = (
    're_alpha_1', 'im_alpha_1', 're_alpha_2', 'im_alpha_2',
    're_beta_1', 'im_beta_1', 're_beta_2', 'im_beta_2',
)


# ========== PARAMETERS ==========

@dataclass(frozen=True)
class SystemParams:
    """
    Physical parameters in omega_m-normalised units
    Defaults are the two-cavity PT-symmetric set (blue cavity 1, red cavity 2)
    """
    delta: tuple = (1.0, -1.0)
    g_m: float = 1.076e-4
    eta: float = 1.076e-5
    kappa: float = 7.3e-2
    gamma_m: float = 1.076e-5
    j_m: float = 4e-4
    alpha_in: float = 0.0
    omega_m: float = 1.0

    def __post_init__(self):
        delta = tuple(float(d) for d in self.delta)
        if len(delta) != 2:
            raise ValueError(f'delta precisa de duas dessintonias, recebeu {len(delta)}')
        object.__setattr__(self, 'delta', delta)

        values = [*delta, self.g_m, self.eta, self.kappa, self.gamma_m,
                  self.j_m, self.alpha_in, self.omega_m]
        if not all(math.isfinite(v) for v in values):
            raise ValueError('Parâmetros devem ser finitos')
        if self.kappa <= 0:
            raise ValueError(f'kappa deve ser > 0, recebeu {self.kappa}')
        if self.gamma_m < 0:
            raise ValueError(f'gamma_m deve ser >= 0, recebeu {self.gamma_m}')
        if self.j_m < 0:
            raise ValueError(f'j_m deve ser >= 0, recebeu {self.j_m}')
        if self.alpha_in < 0:
            raise ValueError(f'alpha_in deve ser >= 0, recebeu {self.alpha_in}')
        if self.omega_m != 1.0:
            raise ValueError('omega_m é a unidade de frequência e deve ser 1')

    def with_changes(self, **changes):
        return replace(self, **changes)

    def swapped(self):
        """Same system with the cavity labels exchanged"""
        return replace(self, delta=self.delta[::-1])

    def as_dict(self):
        data = asdict(self)
        data['delta'] = list(self.delta)
        return data

    def coefficients(self):
        return Coefficients(
            delta=np.asarray(self.delta, dtype=float),
            g_m=self.g_m,
            eta=self.eta,
            kappa=self.kappa,
            sqrt_kappa=math.sqrt(self.kappa),
            gamma_m=self.gamma_m,
            j_m=self.j_m,
            alpha_in=self.alpha_in,
            omega_m=self.omega_m,
        )


class Coefficients(NamedTuple):
    """Array form of SystemParams used by the vectorised right-hand sides"""
    delta: np.ndarray
    g_m: object
    eta: object
    kappa: object
    sqrt_kappa: object
    gamma_m: object
    j_m: object
    alpha_in: object
    omega_m: object


def pack_params(params):
    """(B, 10) coefficient rows for the compiled kernels, column order of kernels.DELTA_1..OMEGA_M"""
    return np.array([
        [p.delta[0], p.delta[1], p.g_m, p.eta, p.kappa, math.sqrt(p.kappa),
         p.gamma_m, p.j_m, p.alpha_in, p.omega_m]
        for p in params
    ], dtype=float).reshape(-1, 10)


# ========== STATE ==========

@dataclass(frozen=True)
class FieldState:
    """
    Mean-field amplitudes of both cavities
    Also used for derivatives and fluctuation vectors, which share the layout
    """
    alpha: tuple = (0j, 0j)
    beta: tuple = (0j, 0j)

    def __post_init__(self):
        alpha = tuple(complex(a) for a in self.alpha)
        beta = tuple(complex(b) for b in self.beta)
        if len(alpha) != 2 or len(beta) != 2:
            raise InvalidStateError('FieldState precisa de duas amplitudes alpha e duas beta')
        if not all(np.isfinite(v) for v in alpha + beta):
            raise InvalidStateError(f'Estado não finito: alpha={alpha}, beta={beta}')
        object.__setattr__(self, 'alpha', alpha)
        object.__setattr__(self, 'beta', beta)

    @classmethod
    def zeros(cls):
        return cls()

    @classmethod
    def kicked(cls, kick=1e-3):
        """Zero state with a small real displacement of the first resonator"""
        return cls(beta=(complex(kick), 0j))

    @classmethod
    def from_vector(cls, z):
        z = np.asarray(z, dtype=complex).reshape(4)
        return cls(alpha=(z[0], z[1]), beta=(z[2], z[3]))

    @classmethod
    def from_real(cls, v):
        v = np.ascontiguousarray(v, dtype=float).reshape(8)
        return cls.from_vector(v.view(np.complex128))

    def to_vector(self):
        return np.array(self.alpha + self.beta, dtype=complex)

    def to_real(self):
        return self.to_vector().view(np.float64).copy()

    def swapped(self):
        return FieldState(alpha=self.alpha[::-1], beta=self.beta[::-1])

    @property
    def x(self):
        """Mechanical positions x_j = beta_j + beta_j*"""
        return tuple(2.0 * b.real for b in self.beta)

    @property
    def photon_number(self):
        return tuple(abs(a) ** 2 for a in self.alpha)

    def norm(self):
        return float(np.linalg.norm(self.to_vector()))

    def __add__(self, other):
        return FieldState.from_vector(self.to_vector() + other.to_vector())

    def __sub__(self, other):
        return FieldState.from_vector(self.to_vector() - other.to_vector())

    def __mul__(self, factor):
        return FieldState.from_vector(self.to_vector() * factor)

    __rmul__ = __mul__


def _require_finite(*arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise InvalidStateError('Entrada não finita nas equações de movimento')


# ========== RIGHT-HAND SIDES (array level) ==========

def field_derivative(z, c):
    """
    Mean-field equations of motion
    z: complex array (..., 4); c: Coefficients broadcastable against z[..., :2]
    """
    alpha = z[..., :2]
    beta = z[..., 2:]
    x = 2.0 * beta.real

    dispersive = c.g_m + 0.5j * c.eta * c.kappa
    d_alpha = ((1j * (c.delta + dispersive * x) - 0.5 * c.kappa) * alpha
               + c.sqrt_kappa * (1.0 + 0.5 * c.eta * x) * c.alpha_in)
    d_beta = (-(1j * c.omega_m + 0.5 * c.gamma_m) * beta
              + 1j * c.j_m * beta[..., ::-1]
              + c.eta * c.sqrt_kappa * (alpha.conj() - alpha) * c.alpha_in
              + 1j * c.g_m * (alpha.real ** 2 + alpha.imag ** 2))
    return np.concatenate((d_alpha, d_beta), axis=-1)


def fluctuation_derivative(dz, z0, c):
    """
    Linear evolution of fluctuations dz about the mean field z0
    Exact Jacobian of field_derivative applied to dz (noise inputs zero)
    """
    alpha0 = z0[..., :2]
    beta0 = z0[..., 2:]
    d_alpha = dz[..., :2]
    d_beta = dz[..., 2:]
    d_x = 2.0 * d_beta.real

    dispersive = c.g_m + 0.5j * c.eta * c.kappa
    delta_tilde = c.delta + dispersive * (2.0 * beta0.real)
    position_coupling = 1j * alpha0 * dispersive + 0.5 * c.eta * c.sqrt_kappa * c.alpha_in

    dd_alpha = (1j * delta_tilde - 0.5 * c.kappa) * d_alpha + position_coupling * d_x
    dd_beta = (-(1j * c.omega_m + 0.5 * c.gamma_m) * d_beta
               + 1j * c.j_m * d_beta[..., ::-1]
               + c.eta * c.sqrt_kappa * c.alpha_in * (d_alpha.conj() - d_alpha)
               + 1j * c.g_m * (alpha0.conj() * d_alpha + alpha0 * d_alpha.conj()))
    return np.concatenate((dd_alpha, dd_beta), axis=-1)


# ========== RIGHT-HAND SIDES (typed API) ==========

def nonlinear_rhs(p: SystemParams, s: FieldState) -> FieldState:
    z = s.to_vector()
    _require_finite(z)
    return FieldState.from_vector(field_derivative(z, p.coefficients()))


def linearized_rhs(p: SystemParams, fixed: FieldState, d: FieldState) -> FieldState:
    z0 = fixed.to_vector()
    dz = d.to_vector()
    _require_finite(z0, dz)
    return FieldState.from_vector(fluctuation_derivative(dz, z0, p.coefficients()))


def jacobian_matrix(p: SystemParams, fixed) -> np.ndarray:
    """
    8x8 real Jacobian of the mean-field equations in REAL_LAYOUT order
    `fixed` may be a FieldState or a complex 4-vector
    """
    z0 = fixed.to_vector() if isinstance(fixed, FieldState) else np.asarray(fixed, dtype=complex)
    basis = np.eye(8).view(np.complex128)  # row k: unit vector k as 4 complex
    columns = fluctuation_derivative(basis, z0, p.coefficients())
    return np.ascontiguousarray(columns).view(np.float64).T.copy()


def rhs_real(p: SystemParams):
    """Right-hand side f(t, y) on the 8-real layout, for generic integrators"""
    c = p.coefficients()

    def f(t, y):
        z = np.ascontiguousarray(y).view(np.complex128)
        return field_derivative(z, c).view(np.float64)

    return f


def residual_norm(p: SystemParams, s) -> float:
    """Max-norm of the steady-state conditions (all derivatives zero)"""
    z = s.to_vector() if isinstance(s, FieldState) else np.asarray(s, dtype=complex)
    return float(np.max(np.abs(field_derivative(z, p.coefficients()).view(np.float64))))
