import math
import unittest
import warnings

import numpy as np

from analysis import metrology
from analysis.netlib import phase_shifter, qft_matrix, unitarity_residual
from analysis.permanent import permanent_fast
from analysis.tests.fixtures import seeded_rng
from tools import UndefinedSensitivityError, relative_error


def phi_grid(points=25):
    return np.linspace(-math.pi + 0.05, math.pi - 0.05, points)


class ErrorPropagationTest(unittest.TestCase):

    def test_mzi_runs_give_shotnoise(self):
        for n in (1, 4, 9):
            for phi in (0.3, 1.1, 2.5):
                delta = metrology.error_propagation((1 - math.cos(phi)) / 2, math.sin(phi) / 2, runs=n)
                self.assertAlmostEqual(1 / math.sqrt(n), delta, places=12)

    def test_half_probability(self):
        self.assertEqual(1.0, metrology.error_propagation(0.5, 0.5))

    def test_zero_slope(self):
        with self.assertRaises(UndefinedSensitivityError):
            metrology.error_propagation(0.3, 0.0)

    def test_boundary_probability_warns(self):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            self.assertEqual(0.0, metrology.error_propagation(1.0, 0.2))
        self.assertEqual(1, len(caught))

    def test_invalid_inputs(self):
        with self.assertRaises(ValueError):
            metrology.error_propagation(1.5, 0.2)
        with self.assertRaises(ValueError):
            metrology.error_propagation(0.5, 0.2, runs=0)


class MziTest(unittest.TestCase):

    def test_special_phases(self):
        self.assertLessEqual(metrology.mzi_matrix(0).max_distance([[0, 1j], [1j, 0]]), 1e-15)
        self.assertLessEqual(metrology.mzi_matrix(math.pi).max_distance([[1, 0], [0, -1]]), 1e-15)

    def test_unitary_everywhere(self):
        for phi in np.linspace(0, 2 * math.pi, 50):
            self.assertLessEqual(unitarity_residual(metrology.mzi_matrix(phi)), 1e-12)


class MordorTest(unittest.TestCase):

    def test_coefficient_identity(self):
        for n in range(2, 31):
            a, b = metrology.mordor_coefficients(n)
            self.assertTrue(np.all(a + b == n * n))

    def test_product_form_identities(self):
        self.assertLessEqual(metrology.mordor_unitary_product(5, 0.0).max_distance(np.eye(5)), 1e-12)
        self.assertLessEqual(metrology.mordor_unitary_product(5, 0.8, -0.8).max_distance(np.eye(5)), 1e-12)

    def test_closed_form_equals_conjugated_product(self):
        for n, phi in ((2, math.pi / 2), (4, 0.7), (5, 0.3), (7, -1.9)):
            v = np.asarray(qft_matrix(n))
            d = np.diag(np.exp(-2j * np.pi * np.arange(n) / n))
            expected = d @ v.conj().T @ np.asarray(phase_shifter(np.arange(n) * phi)) @ v @ d.conj().T
            closed = metrology.mordor_unitary_closed(n, phi)
            self.assertLessEqual(closed.max_distance(expected), 1e-10)
            product = np.asarray(metrology.mordor_unitary_product(n, phi))
            self.assertTrue(np.allclose(np.abs(np.asarray(closed)), np.abs(product.T), atol=1e-12))
            self.assertLessEqual(relative_error(permanent_fast(closed), permanent_fast(product)), 1e-10)

    def test_closed_form_singularities(self):
        with self.assertRaises(ValueError):
            metrology.mordor_unitary_closed(3, 2 * math.pi / 3)
        with self.assertRaises(ValueError):
            metrology.mordor_unitary_closed(4, 0.0)

    def test_two_mode_permanent(self):
        for phi in phi_grid():
            expected = complex(math.cos(phi), math.sin(phi)) * math.cos(phi)
            self.assertLessEqual(abs(metrology.mordor_permanent_analytic(2, phi) - expected), 1e-14)

    def test_permanent_at_zero_phase(self):
        for n in range(2, 13):
            self.assertAlmostEqual(1, metrology.mordor_permanent_analytic(n, 0.0), places=14)
            self.assertAlmostEqual(1, metrology.mordor_coincidence(n, 0.0), places=14)

    def test_analytic_permanent_matches_numeric(self):
        for n in range(2, 13):
            for phi in phi_grid():
                analytic = metrology.mordor_permanent_analytic(n, phi)
                numeric = permanent_fast(metrology.mordor_unitary_product(n, phi))
                self.assertLessEqual(relative_error(analytic, numeric), 1e-9, f"n={n}, phi={phi}")

    def test_coincidence_is_squared_permanent(self):
        for n in range(2, 13):
            for phi in phi_grid():
                self.assertAlmostEqual(abs(metrology.mordor_permanent_analytic(n, phi)) ** 2,
                                       metrology.mordor_coincidence(n, phi), delta=1e-12)

    def test_two_mode_coincidence(self):
        for phi in phi_grid():
            self.assertAlmostEqual(math.cos(phi) ** 2, metrology.mordor_coincidence(2, phi), delta=1e-14)

    def test_periodicity(self):
        for n in (3, 5, 8):
            for phi in phi_grid(10):
                self.assertAlmostEqual(metrology.mordor_coincidence(n, phi),
                                       metrology.mordor_coincidence(n, phi + 2 * math.pi / n), delta=1e-12)

    def test_slope_matches_finite_difference(self):
        h = 1e-6
        for n, phi in ((3, 0.1), (4, 0.37), (6, -0.2), (9, 0.05)):
            numeric = (metrology.mordor_coincidence(n, phi + h) - metrology.mordor_coincidence(n, phi - h)) / (2 * h)
            self.assertLessEqual(abs(abs(numeric) - metrology.mordor_dP(n, phi)) / abs(numeric), 1e-5)

    def test_slope_special_values(self):
        self.assertEqual(0.0, metrology.mordor_dP(5, 0.0))
        self.assertAlmostEqual(1.0, metrology.mordor_dP(2, math.pi / 4), places=12)

    def test_small_angle_sensitivity(self):
        self.assertAlmostEqual(0.5, metrology.mordor_delta_phi_small_angle(2), places=15)
        self.assertAlmostEqual(0.25, metrology.mordor_delta_phi_small_angle(3), places=15)
        for n in range(2, 11):
            numeric = metrology.error_propagation(metrology.mordor_coincidence(n, 1e-4), metrology.mordor_dP(n, 1e-4))
            self.assertLessEqual(relative_error(numeric, metrology.mordor_delta_phi_small_angle(n)), 1e-3)

    def test_model_uses_combined_phase(self):
        model = metrology.MordorModel(4, 0.3, 0.2)
        self.assertAlmostEqual(0.5, model.effective_phase, places=15)
        self.assertEqual(metrology.mordor_coincidence(4, 0.5), model.coincidence())
        self.assertLessEqual(relative_error(permanent_fast(model.unitary()), model.permanent()), 1e-10)


class QuftiTest(unittest.TestCase):

    def test_unitary_special_cases(self):
        self.assertLessEqual(metrology.qufti_unitary(4, 0.0).max_distance(np.eye(4)), 1e-15)
        self.assertLessEqual(metrology.qufti_unitary(2, math.pi).max_distance([[0, -1], [-1, 0]]), 1e-15)

    def test_unitary_matches_product(self):
        for n, phi in ((5, 0.33), (3, 2.0)):
            v = np.asarray(qft_matrix(n))
            x = np.asarray(phase_shifter([phi] + [0.0] * (n - 1)))
            self.assertLessEqual(metrology.qufti_unitary(n, phi).max_distance(v @ x @ v.conj().T), 1e-12)

    def test_rencontres(self):
        self.assertEqual(2, metrology.rencontres(3, 0))
        self.assertEqual(1, metrology.rencontres(5, 5))
        for n in range(1, 11):
            self.assertEqual(0, metrology.rencontres(n, n - 1))
            self.assertEqual(math.factorial(n), sum(metrology.rencontres(n, k) for k in range(n + 1)))
        with self.assertRaises(ValueError):
            metrology.rencontres(3, 4)

    def test_two_mode_permanent(self):
        for phi in phi_grid():
            expected = complex(math.cos(phi), math.sin(phi)) * math.cos(phi)
            self.assertLessEqual(abs(metrology.qufti_permanent_analytic(2, phi) - expected), 1e-14)

    def test_analytic_permanent_matches_numeric(self):
        for n in range(2, 13):
            for phi in phi_grid():
                analytic = metrology.qufti_permanent_analytic(n, phi)
                numeric = permanent_fast(metrology.qufti_unitary(n, phi))
                self.assertLessEqual(relative_error(analytic, numeric), 1e-9, f"n={n}, phi={phi}")

    def test_periodicity(self):
        for n in (3, 6):
            for phi in phi_grid(10):
                self.assertAlmostEqual(metrology.qufti_coincidence(n, phi),
                                       metrology.qufti_coincidence(n, phi + 2 * math.pi), delta=1e-12)

    def test_slope_matches_finite_difference(self):
        h = 1e-6
        for n, phi in ((3, 0.4), (5, 1.2), (8, -0.6)):
            numeric = (metrology.qufti_coincidence(n, phi + h) - metrology.qufti_coincidence(n, phi - h)) / (2 * h)
            self.assertLessEqual(abs(abs(numeric) - metrology.qufti_dP(n, phi)) / abs(numeric), 1e-5)

    def test_small_angle_sensitivity(self):
        for n in range(2, 11):
            numeric = metrology.qufti_sensitivity(n, 1e-4).delta_phi
            closed = metrology.qufti_delta_phi(n)
            self.assertLessEqual(abs(numeric - closed) / closed, 1e-3)

    def test_sub_shotnoise_window(self):
        for n in range(2, 7):
            self.assertLess(metrology.qufti_delta_phi(n), 1 / math.sqrt(n))
        for n in range(7, 13):
            self.assertGreaterEqual(metrology.qufti_delta_phi(n), 1 / math.sqrt(n))

    def test_asymptote(self):
        self.assertAlmostEqual(0.5, metrology.qufti_delta_phi(2), places=15)
        self.assertLessEqual(abs(metrology.qufti_delta_phi(10 ** 6) - 1 / math.sqrt(8)), 1e-6)


class BaselinesTest(unittest.TestCase):

    def test_models(self):
        self.assertEqual((0.5, 0.25), metrology.snl_hl_baselines(4, "qufti_global"))
        snl, _ = metrology.snl_hl_baselines(3, metrology.BaselineModel.MORDOR_GRADIENT)
        self.assertAlmostEqual(1 / math.sqrt(5), snl, places=15)
        self.assertEqual(4, metrology.resource_count(3, "orc"))
        self.assertEqual((0.5, 0.25), metrology.snl_hl_baselines(3, "orc"))

    def test_shotnoise_above_heisenberg(self):
        for model in metrology.BaselineModel:
            for n in range(2, 40):
                snl, hl = metrology.snl_hl_baselines(n, model)
                self.assertGreaterEqual(snl, hl)

    def test_unknown_model(self):
        with self.assertRaises(ValueError):
            metrology.snl_hl_baselines(3, "classical")


class PhaseStrategyTest(unittest.TestCase):

    def test_named_strategies_are_normalized(self):
        for name in metrology.PhaseStrategy.names():
            for n in (2, 5):
                strategy = metrology.PhaseStrategy.named(name, n)
                self.assertEqual(n, strategy.size)
                self.assertAlmostEqual(1.0, math.fsum(strategy.weights), places=12)
                if name != "delta" and n > 2:
                    self.assertTrue(all(f < 1 for f in strategy.weights))

    def test_invalid_weights(self):
        with self.assertRaises(ValueError):
            metrology.PhaseStrategy((0.0, 0.0))
        with self.assertRaises(ValueError):
            metrology.PhaseStrategy((1.0, -0.5))
        with self.assertRaises(ValueError):
            metrology.PhaseStrategy.named("cubic", 3)

    def test_delta_strategy_matches_single_phase_closed_forms(self):
        for n in range(2, 7):
            report = metrology.strategy_sensitivity(n, metrology.PhaseStrategy.named("delta", n), 0.01,
                                                    exact_slope=True)
            expected = metrology.qufti_sensitivity(n, 0.01)
            self.assertLessEqual(abs(report.P - expected.P), 1e-12)
            self.assertLessEqual(abs(report.delta_phi - expected.delta_phi) / expected.delta_phi, 1e-6)

    def test_delta_strategy_finite_difference_matches_closed_forms(self):
        for n in range(2, 7):
            report = metrology.strategy_sensitivity(n, metrology.PhaseStrategy.named("delta", n), 0.01)
            expected = metrology.qufti_sensitivity(n, 0.01)
            self.assertTrue(report.is_defined)
            self.assertLessEqual(abs(report.P - expected.P), 1e-12)
            self.assertLessEqual(abs(report.delta_phi - expected.delta_phi) / expected.delta_phi, 1e-5)

    def test_finite_difference_slope_close_to_exact(self):
        strategy = metrology.PhaseStrategy.named("quadratic", 4)
        exact = metrology.strategy_sensitivity(4, strategy, 0.2, exact_slope=True)
        numeric = metrology.strategy_sensitivity(4, strategy, 0.2)
        self.assertLessEqual(abs(exact.dP_dphi - numeric.dP_dphi) / exact.dP_dphi, 1e-5)

    def test_linear_equals_delta_for_two_modes(self):
        linear = metrology.strategy_sensitivity(2, metrology.PhaseStrategy.named("linear", 2), 0.3, exact_slope=True)
        delta = metrology.strategy_sensitivity(2, metrology.PhaseStrategy.named("delta", 2), 0.3, exact_slope=True)
        self.assertAlmostEqual(delta.P, linear.P, places=12)
        self.assertAlmostEqual(delta.delta_phi, linear.delta_phi, places=9)

    def test_constant_strategy_is_undefined(self):
        for n in (2, 3, 4):
            report = metrology.strategy_sensitivity(n, metrology.PhaseStrategy.named("constant", n), 0.2,
                                                    exact_slope=True)
            self.assertAlmostEqual(1.0, report.P, places=12)
            self.assertFalse(report.is_defined)
            self.assertFalse(report.is_sub_shotnoise)
            self.assertTrue(math.isinf(report.delta_phi))

    def test_constant_strategy_is_undefined_with_finite_difference(self):
        for n in range(2, 7):
            report = metrology.strategy_sensitivity(n, metrology.PhaseStrategy.named("constant", n), 0.2)
            self.assertFalse(report.is_defined, f"n={n}")
            self.assertFalse(report.is_sub_shotnoise)
            self.assertTrue(math.isinf(report.delta_phi))

    def test_pinned_probability_is_undefined(self):
        report = metrology.mordor_sensitivity(4, 0.0)
        self.assertAlmostEqual(1.0, report.P, places=14)
        self.assertFalse(report.is_defined)
        self.assertFalse(report.is_sub_shotnoise)

    def test_size_mismatch(self):
        with self.assertRaises(ValueError):
            metrology.strategy_sensitivity(3, metrology.PhaseStrategy.named("linear", 4), 0.1)


class DephasingTest(unittest.TestCase):

    def test_no_dephasing(self):
        for phi in (0.01, 0.4):
            self.assertAlmostEqual(metrology.mordor_coincidence(5, phi), metrology.dephased_coincidence(5, phi, 0.0),
                                   delta=1e-14)
            self.assertAlmostEqual(metrology.mordor_dP(5, phi), metrology.dephased_dP(5, phi, 0.0), delta=1e-12)

    def test_bracketed_by_plateau(self):
        n, phi = 3, 0.01
        _, b = metrology.mordor_coefficients(n)
        plateau = float(np.prod(b / n ** 2))
        undamped = metrology.mordor_coincidence(n, phi)
        damped = metrology.dephased_coincidence(n, phi, 2.5e-5)
        self.assertTrue(plateau <= damped <= undamped)
        self.assertAlmostEqual(plateau, metrology.dephased_coincidence(n, phi, 1e6), delta=1e-14)

    def test_dephased_delta_phi(self):
        for n, phi in ((3, 0.01), (5, 0.2)):
            undamped = metrology.error_propagation(metrology.mordor_coincidence(n, phi), metrology.mordor_dP(n, phi))
            self.assertAlmostEqual(undamped, metrology.dephased_delta_phi(n, phi, 0.0), delta=1e-12 * undamped)
            damped = metrology.dephased_delta_phi(n, phi, 1e-3)
            self.assertEqual(metrology.dephased_sensitivity(n, phi, 1e-3).delta_phi, damped)

    def test_negative_dephasing(self):
        with self.assertRaises(ValueError):
            metrology.dephased_coincidence(3, 0.1, -1.0)


class EfficiencyTest(unittest.TestCase):

    def test_values(self):
        value = metrology.efficiency(10, 0.42, 0.98)
        self.assertTrue(1.35e-4 <= value <= 1.45e-4)
        self.assertEqual(1.0, metrology.efficiency(7, 1.0, 1.0))
        self.assertEqual(0.25, metrology.efficiency(1, 0.5, 0.5))
        with self.assertRaises(ValueError):
            metrology.efficiency(2, 1.2, 0.5)


class OptimalitySearchTest(unittest.TestCase):

    def test_fourier_network_is_optimal(self):
        rng = seeded_rng(2024)
        for n in range(2, 6):
            report = metrology.qft_optimality_search(n, 300, rng)
            self.assertEqual(300, len(report.values))
            self.assertLessEqual(report.qft_delta_phi, report.sample_min * (1 + 1e-6))

    def test_average_network_not_sub_shotnoise(self):
        report = metrology.qft_optimality_search(4, 300, seeded_rng(99))
        self.assertGreater(report.sample_mean, 1 / math.sqrt(4))

    def test_independent_of_threads(self):
        single = metrology.qft_optimality_search(3, 40, seeded_rng(5), threads=1)
        parallel = metrology.qft_optimality_search(3, 40, seeded_rng(5), threads=4)
        self.assertListEqual(list(single.values), list(parallel.values))

    def test_no_trials(self):
        report = metrology.qft_optimality_search(3, 0, seeded_rng())
        self.assertIsNone(report.sample_min)
        self.assertTrue(report.qft_is_optimal)

    def test_limits(self):
        with self.assertRaises(ValueError):
            metrology.qft_optimality_search(7, 10, seeded_rng())
        with self.assertRaises(ValueError):
            metrology.qft_optimality_search(3, 10 ** 5, seeded_rng())
