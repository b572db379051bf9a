import math
from unittest import skipUnless

import numpy as np
from django.conf import settings
from django.test import SimpleTestCase, tag

from cavidades.dynamics import (
    IntegratorConfig, TimeSeries, amplitude_scan, detect_threshold, integrate, integrate_batch,
    rk4_advance, run_batched,
)
from cavidades.exceptions import ConfigError, IntegrationError
from cavidades.mean_field import FieldState, SystemParams, field_derivative, pack_params
from cavidades.spectrum import ep_scan
from cavidades.steady_state import solve_steady


def free_resonators(t, j_m, gamma_m, kick=1.0):
    """Exact beta_1, beta_2 of the uncoupled-light system started from beta_1 = kick"""
    decay = kick * np.exp((-1j - 0.5 * gamma_m) * t)
    return decay * np.cos(j_m * t), 1j * decay * np.sin(j_m * t)


class IntegratorConfigTest(SimpleTestCase):

    def assertDiagnostic(self, prefix, **kwargs):
        with self.assertRaises(ConfigError) as ctx:
            IntegratorConfig(**kwargs)
        self.assertTrue(any(d.startswith(prefix) for d in ctx.exception.diagnostics),
                        ctx.exception.diagnostics)

    def test_stride_must_be_a_multiple_of_dt(self):
        self.assertDiagnostic('integrator.sample_stride', dt=0.3, sample_stride=1.0)

    def test_adaptive_stride_is_free(self):
        cfg = IntegratorConfig(method='adaptive-rk45', dt=0.3, sample_stride=1.0)
        self.assertEqual(cfg.method, 'adaptive-rk45')

    def test_horizon_must_cover_one_stride(self):
        self.assertDiagnostic('integrator.t_end', t_end=0.5, sample_stride=1.0)

    def test_rejects_bad_values(self):
        self.assertDiagnostic('integrator.dt', dt=-1.0)
        self.assertDiagnostic('integrator.method', method='euler')
        self.assertDiagnostic('integrator.transient_fraction', transient_fraction=1.0)

    def test_sample_bookkeeping(self):
        cfg = IntegratorConfig(dt=0.1, t_end=10.0, sample_stride=1.0, transient_fraction=0.5)
        self.assertEqual(cfg.stride_steps, 10)
        self.assertEqual(cfg.n_samples, 11)
        self.assertEqual(cfg.first_kept_sample, 5)


class TimeSeriesTest(SimpleTestCase):

    def test_shape_is_checked(self):
        with self.assertRaises(ValueError):
            TimeSeries(np.arange(3.0), np.zeros((2, 4)))

    def test_arrays_are_read_only(self):
        ts = TimeSeries(np.arange(3.0), np.zeros((3, 4)))
        with self.assertRaises(ValueError):
            ts.t[0] = 1.0

    def test_after_transient(self):
        ts = TimeSeries(np.arange(11.0), np.zeros((11, 4)))
        tail = ts.after_transient(0.5)
        self.assertEqual(len(tail), 6)
        self.assertEqual(tail.t[0], 5.0)


class FixedStepTest(SimpleTestCase):

    def test_rk4_is_fourth_order(self):
        p = SystemParams(alpha_in=20.0)
        coef = pack_params([p])
        z0 = FieldState.kicked(1e-3).to_vector()
        horizon = 200.0
        finals = {dt: rk4_advance(z0, coef, dt, int(round(horizon / dt))) for dt in (0.1, 0.05, 0.025)}
        coarse = np.max(np.abs(finals[0.1] - finals[0.05]))
        fine = np.max(np.abs(finals[0.05] - finals[0.025]))
        ratio = coarse / fine
        self.assertTrue(12.0 < ratio < 20.0, ratio)

    def test_compiled_step_matches_the_array_equations(self):
        params = [SystemParams(alpha_in=20.0), SystemParams(alpha_in=5.0, eta=0.0),
                  SystemParams(alpha_in=50.0, delta=(0.5, -2.0), j_m=1e-2)]
        z = np.random.default_rng(5).normal(size=(3, 8)).view(np.complex128)
        dt = 0.01
        stepped = rk4_advance(z, pack_params(params), dt, 1)
        for row, p in enumerate(params):
            c = p.coefficients()
            y = z[row]
            k1 = field_derivative(y, c)
            k2 = field_derivative(y + 0.5 * dt * k1, c)
            k3 = field_derivative(y + 0.5 * dt * k2, c)
            k4 = field_derivative(y + dt * k3, c)
            expected = y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            np.testing.assert_allclose(stepped[row], expected, rtol=1e-13, atol=1e-13)

    def test_undriven_zero_state_stays_at_zero(self):
        cfg = IntegratorConfig(dt=0.1, t_end=20.0, sample_stride=1.0)
        ts = integrate(SystemParams(alpha_in=0.0), FieldState.zeros(), cfg)
        self.assertEqual(len(ts), 21)
        self.assertFalse(np.any(ts.states))

    def test_matches_the_exact_linear_solution(self):
        p = SystemParams(g_m=0.0, eta=0.0, alpha_in=0.0)
        cfg = IntegratorConfig(dt=0.05, t_end=100.0, sample_stride=1.0)
        ts = integrate(p, FieldState.kicked(1.0), cfg)
        beta_1, beta_2 = free_resonators(ts.t, p.j_m, p.gamma_m)
        np.testing.assert_allclose(ts.states[:, 2], beta_1, atol=2e-5)
        np.testing.assert_allclose(ts.states[:, 3], beta_2, atol=2e-5)
        self.assertFalse(np.any(ts.states[:, :2]))

    def test_batching_does_not_change_trajectories(self):
        cfg = IntegratorConfig(dt=0.1, t_end=50.0, sample_stride=1.0)
        params = [SystemParams(alpha_in=a) for a in (5.0, 10.0, 20.0)]
        batch = integrate_batch(params, FieldState.kicked(), cfg)
        for p, ts in zip(params, batch):
            alone = integrate(p, FieldState.kicked(), cfg)
            np.testing.assert_allclose(ts.states, alone.states, rtol=1e-12, atol=1e-15)

    def test_discarding_the_transient(self):
        cfg = IntegratorConfig(dt=0.1, t_end=10.0, sample_stride=1.0, transient_fraction=0.5)
        full = integrate(SystemParams(alpha_in=5.0), FieldState.kicked(), cfg)
        tail = integrate(SystemParams(alpha_in=5.0), FieldState.kicked(), cfg, discard_transient=True)
        np.testing.assert_array_equal(tail.t, np.arange(5.0, 11.0))
        np.testing.assert_array_equal(tail.states, full.states[5:])

    def test_unstable_step_reports_the_last_good_time(self):
        cfg = IntegratorConfig(dt=5.0, t_end=5000.0, sample_stride=5.0)
        with np.errstate(all='ignore'):
            outcome = integrate_batch([SystemParams(alpha_in=0.0)], FieldState.kicked(), cfg)[0]
            with self.assertRaises(IntegrationError):
                integrate(SystemParams(alpha_in=0.0), FieldState.kicked(), cfg)
        self.assertIsInstance(outcome, IntegrationError)
        self.assertGreater(outcome.last_good_time, 0.0)
        self.assertIn('last good time', str(outcome))

    def test_steady_photon_number_is_reached(self):
        p = SystemParams(alpha_in=20.0)
        cfg = IntegratorConfig(dt=0.1, t_end=2000.0, sample_stride=1.0, transient_fraction=0.5)
        ts = integrate(p, FieldState.kicked(), cfg, discard_transient=True)
        ss = solve_steady(p)
        np.testing.assert_allclose(ts.photon.mean(axis=0), ss.photon_number, rtol=1e-3)


class AdaptiveTest(SimpleTestCase):

    def test_matches_the_exact_linear_solution(self):
        p = SystemParams(g_m=0.0, eta=0.0, alpha_in=0.0)
        cfg = IntegratorConfig(method='adaptive-rk45', t_end=100.0, sample_stride=1.0)
        ts = integrate(p, FieldState.kicked(1.0), cfg)
        beta_1, beta_2 = free_resonators(ts.t, p.j_m, p.gamma_m)
        np.testing.assert_allclose(ts.states[:, 2], beta_1, atol=1e-6)
        np.testing.assert_allclose(ts.states[:, 3], beta_2, atol=1e-6)

    def test_agrees_with_fixed_step(self):
        p = SystemParams(alpha_in=20.0)
        fixed = integrate(p, FieldState.kicked(), IntegratorConfig(dt=0.02, t_end=50.0))
        adaptive = integrate(p, FieldState.kicked(),
                             IntegratorConfig(method='adaptive-rk45', t_end=50.0))
        np.testing.assert_allclose(adaptive.states, fixed.states, atol=5e-6)

    def test_evaluation_budget_stops_the_run(self):
        cfg = IntegratorConfig(method='adaptive-rk45', t_end=100.0, max_evaluations=100)
        with self.assertRaises(IntegrationError) as ctx:
            integrate(SystemParams(alpha_in=20.0), FieldState.kicked(), cfg)
        self.assertIn('evaluations', str(ctx.exception))
        self.assertLess(ctx.exception.last_good_time, 100.0)

    def test_runaway_dissipative_drive_fails_instead_of_hanging(self):
        p = SystemParams(alpha_in=1e4, eta=0.01)
        cfg = IntegratorConfig(method='adaptive-rk45', t_end=20.0, sample_stride=1.0)
        outcome = integrate_batch([p], FieldState.kicked(), cfg)[0]
        self.assertIsInstance(outcome, IntegrationError)
        self.assertLessEqual(outcome.last_good_time, 20.0)

    def test_automatic_budget_scales_with_the_horizon(self):
        short = IntegratorConfig(method='adaptive-rk45', t_end=10.0)
        long = IntegratorConfig(method='adaptive-rk45', t_end=100.0)
        self.assertGreater(long.evaluation_budget, 9 * short.evaluation_budget)


class BatchingTest(SimpleTestCase):

    def test_results_come_back_in_input_order(self):
        result = run_batched(range(10), lambda chunk: [2 * x for x in chunk], batch_size=3, workers=3)
        self.assertEqual(result, [2 * x for x in range(10)])

    def test_zero_batch_size_splits_evenly_over_the_workers(self):
        sizes = []

        def task(chunk):
            sizes.append(len(chunk))
            return chunk

        self.assertEqual(run_batched(range(10), task, batch_size=0, workers=3), list(range(10)))
        self.assertEqual(sorted(sizes), [2, 4, 4])
        sizes.clear()
        run_batched(range(10), task, batch_size=0, workers=1)
        self.assertEqual(sizes, [10])


class AmplitudeScanTest(SimpleTestCase):

    def test_threshold_detection(self):
        self.assertEqual(detect_threshold([1.0, 2.0, 3.0, 4.0], [1.0, 1.1, 0.9, 50.0]), (4.0, 3))
        threshold, index = detect_threshold([1.0, 2.0, 3.0], [1.0, 1.0, 1.0])
        self.assertTrue(math.isnan(threshold))
        self.assertEqual(index, -1)

    def test_rows_follow_the_grid(self):
        cfg = IntegratorConfig(dt=0.1, t_end=100.0, sample_stride=1.0)
        scan = amplitude_scan(SystemParams(), [0.0, 10.0, 20.0], cfg, batch_size=2)
        self.assertEqual([row.alpha_in for row in scan.rows], [0.0, 10.0, 20.0])
        self.assertTrue(all(row.status == 'ok' for row in scan.rows))
        self.assertLess(scan.rows[0].photon_mean[0], scan.rows[2].photon_mean[0])

    @tag('slow')
    @skipUnless(settings.EPOM_SLOW_TESTS, 'set EPOM_SLOW_TESTS=1')
    def test_amplification_sets_in_at_the_exceptional_point(self):
        p = SystemParams()
        grid = np.arange(90.0, 181.0, 10.0)
        cfg = IntegratorConfig(dt=0.1, t_end=2e5, sample_stride=1.0)
        scan = amplitude_scan(p, grid, cfg, workers=2)
        report = ep_scan(p, np.arange(100.0, 161.0, 1.0))
        self.assertLessEqual(abs(scan.threshold - report.alpha_ep), 10.0,
                             (scan.threshold, report.alpha_ep))
        self.assertTrue(all(row.status == 'ok' for row in scan.rows))
