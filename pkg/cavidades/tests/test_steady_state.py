import math

import numpy as np
from django.test import SimpleTestCase

from cavidades.exceptions import ConvergenceError, DomainError
from cavidades.mean_field import SystemParams, residual_norm
from cavidades.spectrum import effective_params
from cavidades.steady_state import (
    NewtonSettings, SexticCoefficients, continuation, decoupled_guess, mechanical_amplitudes,
    omega_factor, polynomial_roots, sextic_coefficients, sextic_discrepancy, sextic_roots, solve_steady,
)


class SolveSteadyTest(SimpleTestCase):

    def test_undriven_system_rests_at_zero(self):
        ss = solve_steady(SystemParams(alpha_in=0.0))
        self.assertTrue(ss.converged)
        self.assertEqual(ss.residual, 0.0)
        self.assertEqual(ss.iterations, 0)
        self.assertEqual(ss.photon_number, (0.0, 0.0))

    def test_driven_system_converges(self):
        p = SystemParams(alpha_in=20.0)
        ss = solve_steady(p)
        self.assertTrue(ss.converged, ss.message)
        self.assertLessEqual(residual_norm(p, ss.as_field_state()), 1e-10)
        # weak optomechanics: close to the decoupled cavity response
        np.testing.assert_allclose(ss.alpha_bar, decoupled_guess(p), rtol=1e-3)

    def test_mechanical_amplitudes_follow_the_optical_ones(self):
        p = SystemParams(alpha_in=50.0)
        ss = solve_steady(p)
        np.testing.assert_allclose(mechanical_amplitudes(p, np.array(ss.alpha_bar)), ss.beta_bar,
                                   rtol=1e-9, atol=1e-15)

    def test_degenerate_mechanics_raise(self):
        with self.assertRaises(DomainError):
            solve_steady(SystemParams(alpha_in=10.0, j_m=1.0, gamma_m=0.0))

    def test_vanishing_mechanical_response_raises(self):
        # J_m = omega_m zeroes the response factor even with damping present
        p = SystemParams(alpha_in=10.0, j_m=1.0, gamma_m=1e-3)
        self.assertEqual(omega_factor(p), 0.0)
        with self.assertRaises(DomainError):
            solve_steady(p)

    def test_dispersive_fixed_point_matches_a_scalar_iteration(self):
        p = SystemParams(alpha_in=20.0, eta=0.0)
        ss = solve_steady(p)
        self.assertTrue(ss.converged, ss.message)

        delta = np.array(p.delta)
        rotation = 1j * p.omega_m + 0.5 * p.gamma_m
        mechanics = np.array([[rotation, -1j * p.j_m], [-1j * p.j_m, rotation]])
        photons = np.zeros(2)
        for _ in range(200):
            x = 2 * np.linalg.solve(mechanics, 1j * p.g_m * photons).real
            updated = p.kappa * p.alpha_in ** 2 / ((delta + p.g_m * x) ** 2 + p.kappa ** 2 / 4)
            if np.max(np.abs(updated - photons)) <= 1e-14 * np.max(updated):
                photons = updated
                break
            photons = updated
        x = 2 * np.linalg.solve(mechanics, 1j * p.g_m * photons).real
        alpha = -np.sqrt(p.kappa) * p.alpha_in / (1j * (delta + p.g_m * x) - 0.5 * p.kappa)

        np.testing.assert_allclose(ss.photon_number, photons, rtol=1e-9)
        np.testing.assert_allclose(ss.alpha_bar, alpha, rtol=1e-9)

    def test_unreachable_tolerance_is_flagged_not_raised(self):
        p = SystemParams(alpha_in=20.0)
        ss = solve_steady(p, settings=NewtonSettings(residual_tol=1e-300, max_iterations=5))
        self.assertFalse(ss.converged)
        self.assertTrue(ss.message)
        with self.assertRaises(ConvergenceError) as ctx:
            effective_params(p, ss)
        self.assertIs(ctx.exception.steady_state, ss)

    def test_continuation_covers_the_grid(self):
        grid = np.arange(0.0, 201.0, 20.0)
        states = continuation(SystemParams(), grid)
        self.assertEqual(len(states), grid.size)
        self.assertTrue(all(ss.converged for ss in states))
        photons = [ss.photon_number[0] for ss in states]
        self.assertEqual(photons, sorted(photons))


class SexticTest(SimpleTestCase):

    def test_companion_roots_of_known_polynomial(self):
        expected = np.arange(1.0, 7.0)
        roots = np.sort(polynomial_roots(np.poly(expected)).real)
        np.testing.assert_allclose(roots, expected, rtol=1e-8)

    def test_sixth_roots_of_unity(self):
        coeffs = SexticCoefficients(a=(0.0, 0.0, 0.0, 0.0, 0.0, -1.0), b=(0.0,) * 5 + (-1.0,),
                                    c=1.0, omega_big=1.0, cavity=1)
        roots = sextic_roots(coeffs)
        self.assertEqual(len(roots), 6)
        for k in range(6):
            expected = np.exp(2j * math.pi * k / 6)
            self.assertLess(min(abs(r - expected) for r in roots), 1e-12)
        self.assertEqual(len(roots.candidates), 1)
        self.assertAlmostEqual(roots.candidates[0], 1.0, delta=1e-12)

    def test_double_root_is_returned_twice(self):
        # (u - 2)^2 (u^4 + 1)
        monic = np.polymul([1.0, -4.0, 4.0], [1.0, 0.0, 0.0, 0.0, 1.0])
        coeffs = SexticCoefficients(a=tuple(monic[1:]), b=tuple(monic[1:]), c=1.0,
                                    omega_big=1.0, cavity=1)
        roots = sextic_roots(coeffs)
        near_two = [r for r in roots if abs(r - 2.0) < 1e-6]
        self.assertEqual(len(near_two), 2)
        for k in (1, 3, 5, 7):
            expected = np.exp(1j * math.pi * k / 4)
            self.assertLess(min(abs(r - expected) for r in roots), 1e-9)

    def test_undriven_coefficients(self):
        p = SystemParams(alpha_in=0.0)
        om = omega_factor(p)
        for cavity in (1, 2):
            coeffs = sextic_coefficients(p, cavity)
            delta = p.delta[cavity - 1]
            b0, b1, b2, b3, b4, b5 = coeffs.b
            self.assertEqual((b0, b2, b4, b5), (0.0, 0.0, 0.0, 0.0))
            self.assertAlmostEqual(b1, p.g_m * om * (4 * delta + p.eta * p.kappa ** 2), delta=1e-18)
            self.assertAlmostEqual(b3, delta ** 2 + p.kappa ** 2 / 4, delta=1e-15)

    def test_polynomial_must_be_monic(self):
        with self.assertRaises(ValueError):
            polynomial_roots([2.0, 1.0, 1.0])

    def test_roots_are_sorted_and_filtered(self):
        coeffs = sextic_coefficients(SystemParams(alpha_in=20.0), cavity=1)
        roots = sextic_roots(coeffs)
        self.assertEqual(len(roots), 6)
        keys = [(r.real, r.imag) for r in roots]
        self.assertEqual(keys, sorted(keys))
        for r, physical in zip(roots, roots.physical):
            if physical:
                self.assertGreater(r.real, 0)
        self.assertEqual(len(roots.candidates), sum(roots.physical))

    def test_normalisation(self):
        coeffs = sextic_coefficients(SystemParams(alpha_in=20.0), cavity=2)
        np.testing.assert_allclose(np.array(coeffs.a) * coeffs.c, coeffs.b)
        self.assertEqual(coeffs.monic()[0], 1.0)

    def test_vanishing_dispersive_coupling_is_outside_the_domain(self):
        with self.assertRaises(DomainError):
            sextic_coefficients(SystemParams(g_m=0.0))

    def test_cavity_index_is_checked(self):
        with self.assertRaises(ValueError):
            sextic_coefficients(SystemParams(), cavity=3)

    def test_discrepancy_is_a_relative_residual(self):
        p = SystemParams(alpha_in=20.0)
        value = sextic_discrepancy(p, solve_steady(p), cavity=1)
        self.assertTrue(math.isfinite(value))
        self.assertGreaterEqual(value, 0.0)
