import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from cavidades.exceptions import InvalidStateError
from cavidades.mean_field import (
    FieldState, SystemParams, field_derivative, fluctuation_derivative, jacobian_matrix,
    linearized_rhs, nonlinear_rhs, residual_norm, rhs_real,
)
from cavidades.steady_state import solve_steady

finite = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False)


def random_state(rng, scale=1.0):
    v = rng.normal(size=8) * scale
    return FieldState.from_real(v)


class SystemParamsTest(SimpleTestCase):

    def test_defaults_are_the_pt_symmetric_set(self):
        p = SystemParams()
        self.assertEqual(p.delta, (1.0, -1.0))
        self.assertAlmostEqual(p.eta / p.g_m, 0.1)

    def test_rejects_non_positive_kappa(self):
        with self.assertRaises(ValueError):
            SystemParams(kappa=0.0)

    def test_rejects_other_frequency_unit(self):
        with self.assertRaises(ValueError):
            SystemParams(omega_m=2.0)

    def test_rejects_negative_drive(self):
        with self.assertRaises(ValueError):
            SystemParams(alpha_in=-1.0)

    def test_messages_are_in_portuguese(self):
        with self.assertRaisesMessage(ValueError, 'kappa deve ser > 0'):
            SystemParams(kappa=0.0)
        with self.assertRaisesMessage(ValueError, 'delta precisa de duas dessintonias'):
            SystemParams(delta=(1.0,))

    def test_swapped_exchanges_detunings(self):
        self.assertEqual(SystemParams().swapped().delta, (-1.0, 1.0))


class FieldStateTest(SimpleTestCase):

    def test_rejects_non_finite_values(self):
        with self.assertRaises(InvalidStateError):
            FieldState(alpha=(np.nan, 0j))
        with self.assertRaises(InvalidStateError):
            FieldState(beta=(0j, complex(np.inf, 0)))

    def test_real_layout_is_interleaved(self):
        s = FieldState(alpha=(1 + 2j, 3 + 4j), beta=(5 + 6j, 7 + 8j))
        np.testing.assert_array_equal(s.to_real(), np.arange(1.0, 9.0))
        self.assertEqual(FieldState.from_real(s.to_real()), s)

    def test_positions_and_photon_numbers(self):
        s = FieldState(alpha=(3 + 4j, 1j), beta=(0.5 + 2j, -0.25))
        self.assertEqual(s.x, (1.0, -0.5))
        self.assertEqual(s.photon_number, (25.0, 1.0))

    def test_arithmetic(self):
        a = FieldState.kicked(1.0)
        self.assertEqual((a + a).beta[0], 2.0)
        self.assertEqual((2 * a - a), a)


class RightHandSideTest(SimpleTestCase):

    def setUp(self):
        self.p = SystemParams(alpha_in=20.0)

    def test_undriven_zero_state_is_stationary(self):
        d = nonlinear_rhs(SystemParams(alpha_in=0.0), FieldState.zeros())
        self.assertEqual(d.norm(), 0.0)
        self.assertEqual(residual_norm(SystemParams(alpha_in=0.0), FieldState.zeros()), 0.0)

    def test_drive_enters_the_optical_equations(self):
        d = nonlinear_rhs(self.p, FieldState.zeros())
        expected = np.sqrt(self.p.kappa) * self.p.alpha_in
        np.testing.assert_allclose(d.alpha, (expected, expected))
        self.assertEqual(d.beta, (0j, 0j))

    def test_nan_state_cannot_reach_the_rhs(self):
        z = np.array([np.nan, 0, 0, 0], dtype=complex)
        with self.assertRaises(InvalidStateError):
            nonlinear_rhs(self.p, FieldState.from_vector(z))

    def test_cavity_exchange_symmetry(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            s = random_state(rng)
            direct = nonlinear_rhs(self.p, s)
            mirrored = nonlinear_rhs(self.p.swapped(), s.swapped())
            np.testing.assert_allclose(mirrored.to_vector(), direct.swapped().to_vector(),
                                       rtol=1e-14, atol=1e-14)

    def test_jacobian_matches_central_differences(self):
        p = SystemParams(alpha_in=20.0, eta=1e-3, g_m=1e-2)
        rng = np.random.default_rng(3)
        for _ in range(10):
            s = random_state(rng)
            f = rhs_real(p)
            y = s.to_real()
            jac = jacobian_matrix(p, s)
            h = 1e-6
            for k in range(8):
                e = np.zeros(8)
                e[k] = h
                column = (f(0.0, y + e) - f(0.0, y - e)) / (2 * h)
                np.testing.assert_allclose(jac[:, k], column, rtol=1e-6, atol=1e-6)

    def test_linearized_rhs_matches_finite_differences_at_the_fixed_point(self):
        eps = 1e-6
        for alpha_in in (5.0, 20.0, 50.0):
            p = SystemParams(alpha_in=alpha_in)
            fixed = solve_steady(p).as_field_state()
            for k in range(8):
                direction = np.zeros(8)
                direction[k] = eps
                d = FieldState.from_real(direction)
                central = 0.5 * (nonlinear_rhs(p, fixed + d) - nonlinear_rhs(p, fixed - d)).to_real()
                linear = linearized_rhs(p, fixed, d).to_real()
                error = np.linalg.norm(central - linear) / np.linalg.norm(linear)
                self.assertLessEqual(error, 1e-4, (alpha_in, k))

    def test_linearized_rhs_is_the_jacobian_action(self):
        rng = np.random.default_rng(11)
        fixed = random_state(rng)
        d = random_state(rng, scale=1e-3)
        expected = jacobian_matrix(self.p, fixed) @ d.to_real()
        np.testing.assert_allclose(linearized_rhs(self.p, fixed, d).to_real(), expected,
                                   rtol=1e-12, atol=1e-15)

    @settings(deadline=None, max_examples=50)
    @given(st.lists(finite, min_size=8, max_size=8), st.lists(finite, min_size=8, max_size=8),
           finite, finite)
    def test_fluctuations_evolve_real_linearly(self, u, v, a, b):
        c = self.p.coefficients()
        z0 = np.array([0.3 + 0.1j, -0.2j, 1e-3, 2e-3j])
        du = np.array(u).view(np.complex128)
        dv = np.array(v).view(np.complex128)
        combined = fluctuation_derivative(a * du + b * dv, z0, c)
        separate = a * fluctuation_derivative(du, z0, c) + b * fluctuation_derivative(dv, z0, c)
        np.testing.assert_allclose(combined, separate, rtol=1e-10, atol=1e-10)

