"""
Compiled fixed-step kernels
Classical RK4 on one system at a time. Rows of a batch never interact, so a
system's trajectory does not depend on the batch it is marched in.

Coefficient rows come from mean_field.pack_params, columns in the order below.
"""

import numba
import numpy as np

DELTA_1, DELTA_2, G_M, ETA, KAPPA, SQRT_KAPPA, GAMMA_M, J_M, ALPHA_IN, OMEGA_M = range(10)
N_COEFFICIENTS = 10


@numba.njit(cache=True, nogil=True)
def _derivative(z, k, out):
    kappa = k[KAPPA]
    eta = k[ETA]
    g_m = k[G_M]
    drive = k[SQRT_KAPPA] * k[ALPHA_IN]
    dispersive = g_m + 0.5j * eta * kappa
    rotation = 1j * k[OMEGA_M] + 0.5 * k[GAMMA_M]

    for j in range(2):
        a = z[j]
        b = z[2 + j]
        x = 2.0 * b.real
        out[j] = (1j * (k[DELTA_1 + j] + dispersive * x) - 0.5 * kappa) * a + drive * (1.0 + 0.5 * eta * x)
        out[2 + j] = (-rotation * b
                      + 1j * k[J_M] * z[3 - j]
                      + eta * drive * (a.conjugate() - a)
                      + 1j * g_m * (a.real * a.real + a.imag * a.imag))


@numba.njit(cache=True, nogil=True)
def _rk4_row(z, k, dt, n_steps, k1, k2, k3, k4, tmp):
    half = 0.5 * dt
    sixth = dt / 6.0
    for _ in range(n_steps):
        _derivative(z, k, k1)
        for i in range(4):
            tmp[i] = z[i] + half * k1[i]
        _derivative(tmp, k, k2)
        for i in range(4):
            tmp[i] = z[i] + half * k2[i]
        _derivative(tmp, k, k3)
        for i in range(4):
            tmp[i] = z[i] + dt * k3[i]
        _derivative(tmp, k, k4)
        for i in range(4):
            z[i] = z[i] + sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])


@numba.njit(cache=True, nogil=True)
def _finite(z):
    for i in range(z.shape[0]):
        if not (np.isfinite(z[i].real) and np.isfinite(z[i].imag)):
            return False
    return True


@numba.njit(cache=True, nogil=True)
def advance(z, coef, dt, n_steps):
    """Advance every row of the (B, 4) batch `z` in place by n_steps RK4 steps"""
    k1 = np.empty(4, dtype=np.complex128)
    k2 = np.empty(4, dtype=np.complex128)
    k3 = np.empty(4, dtype=np.complex128)
    k4 = np.empty(4, dtype=np.complex128)
    tmp = np.empty(4, dtype=np.complex128)
    for b in range(z.shape[0]):
        _rk4_row(z[b], coef[b], dt, n_steps, k1, k2, k3, k4, tmp)


@numba.njit(cache=True, nogil=True)
def march(z, coef, dt, stride, n_samples, first, samples, last_good):
    """
    Sample every row of `z` on a uniform grid of n_samples points, `stride`
    RK4 steps apart, keeping samples from index `first` on
    samples: (B, n_samples - first, 4) output; last_good: (B,) output, the
    last sample index with a finite state. A row stops at its first
    non-finite state.
    """
    k1 = np.empty(4, dtype=np.complex128)
    k2 = np.empty(4, dtype=np.complex128)
    k3 = np.empty(4, dtype=np.complex128)
    k4 = np.empty(4, dtype=np.complex128)
    tmp = np.empty(4, dtype=np.complex128)
    for b in range(z.shape[0]):
        row = z[b]
        last_good[b] = 0
        if first == 0:
            samples[b, 0, :] = row
        for s in range(1, n_samples):
            _rk4_row(row, coef[b], dt, stride, k1, k2, k3, k4, tmp)
            if not _finite(row):
                break
            last_good[b] = s
            if s >= first:
                samples[b, s - first, :] = row
