import math
import unittest

import numpy as np

from analysis import netlib
from analysis.tests.fixtures import fifty_fifty, haar_batch, seeded_rng
from tools import UnitarityError


class ComplexMatrixTest(unittest.TestCase):

    def test_entries_are_read_only(self):
        m = netlib.ComplexMatrix([[1, 2j], [3, 4]])
        with self.assertRaises(ValueError):
            m.array[0, 0] = 5

    def test_json_round_trip_keeps_every_bit(self):
        u = haar_batch(4, 1)[0]
        restored = netlib.UnitaryMatrix.from_json(u.to_json())
        self.assertEqual(u, restored)

    def test_malformed_record(self):
        with self.assertRaises(ValueError):
            netlib.ComplexMatrix.from_dict({"rows": 2, "cols": 2, "re": [1, 0, 0], "im": [0, 0, 0]})
        with self.assertRaises(ValueError):
            netlib.ComplexMatrix.from_dict({"rows": 2, "re": [1, 0, 0, 1]})

    def test_non_finite_entries_rejected(self):
        with self.assertRaises(ValueError):
            netlib.ComplexMatrix([[math.nan, 0], [0, 1]])


class UnitaryMatrixTest(unittest.TestCase):

    def test_non_unitary_rejected(self):
        with self.assertRaises(UnitarityError):
            netlib.UnitaryMatrix([[1, 1], [0, 1]])

    def test_rectangular_rejected(self):
        with self.assertRaises(UnitarityError):
            netlib.UnitaryMatrix(np.ones((2, 3)))

    def test_unitarity_error_is_value_error(self):
        self.assertTrue(issubclass(UnitarityError, ValueError))

    def test_qft_entries(self):
        for n in range(1, 9):
            f = np.asarray(netlib.qft_matrix(n))
            self.assertTrue(np.allclose(np.abs(f), 1 / math.sqrt(n), atol=1e-15))
            self.assertLessEqual(netlib.unitarity_residual(f), 1e-12)
        f3 = np.asarray(netlib.qft_matrix(3))
        self.assertAlmostEqual(f3[1, 1], np.exp(2j * np.pi / 3) / math.sqrt(3), places=15)

    def test_phase_shifter(self):
        p = np.asarray(netlib.phase_shifter([0.0, math.pi / 2]))
        self.assertAlmostEqual(p[1, 1], 1j, places=15)
        self.assertEqual(0, p[0, 1])

    def test_compose_order(self):
        a = netlib.beamsplitter_unitary(netlib.BeamsplitterElement(0, 1, 0.3, 0.4), 3)
        b = netlib.beamsplitter_unitary(netlib.BeamsplitterElement(1, 2, 0.6, 1.1), 3)
        product = netlib.compose(a, b)
        self.assertIsInstance(product, netlib.UnitaryMatrix)
        self.assertLessEqual(product.max_distance(np.asarray(a) @ np.asarray(b)), 1e-15)
        self.assertIsInstance(netlib.compose(netlib.ComplexMatrix(np.eye(3)), a), netlib.ComplexMatrix)


class BeamsplitterTest(unittest.TestCase):

    def test_fifty_fifty_block(self):
        expected = np.array([[1, 1j], [1j, 1]]) / math.sqrt(2)
        self.assertLessEqual(fifty_fifty().max_distance(expected), 1e-15)

    def test_parameter_validation(self):
        with self.assertRaises(ValueError):
            netlib.BeamsplitterElement(0, 0, 0.5)
        with self.assertRaises(ValueError):
            netlib.BeamsplitterElement(0, 1, 1.2)
        with self.assertRaises(ValueError):
            netlib.BeamsplitterElement(-1, 1, 0.5)

    def test_tau_wrapped(self):
        elem = netlib.BeamsplitterElement(0, 1, 0.5, -math.pi / 2)
        self.assertAlmostEqual(1.5 * math.pi, elem.tau, places=12)

    def test_embedding_out_of_range(self):
        with self.assertRaises(ValueError):
            netlib.beamsplitter_unitary(netlib.BeamsplitterElement(0, 3, 0.5), 3)

    def test_fully_transmitting_element_is_identity(self):
        u = netlib.beamsplitter_unitary(netlib.BeamsplitterElement(1, 2, 1.0, 0.7), 4)
        self.assertLessEqual(u.max_distance(np.eye(4)), 1e-15)


class ReckDecompositionTest(unittest.TestCase):

    def test_round_trip_haar(self):
        rng = seeded_rng(11)
        for n in range(1, 9):
            for _ in range(5):
                u = netlib.haar_unitary(n, rng)
                d = netlib.reck_decompose(u)
                self.assertLessEqual(len(d.elements), n * (n - 1) // 2)
                self.assertLessEqual(netlib.recompose(d).max_distance(u), 1e-10)

    def test_identity_needs_no_elements(self):
        d = netlib.reck_decompose(netlib.identity(5))
        self.assertEqual(0, len(d.elements))
        self.assertLessEqual(netlib.recompose(d).max_distance(np.eye(5)), 1e-15)

    def test_single_mode_phase(self):
        u = netlib.UnitaryMatrix([[np.exp(0.3j)]])
        d = netlib.reck_decompose(u)
        self.assertEqual((), d.elements)
        self.assertAlmostEqual(0.3, d.output_phases[0], places=12)

    def test_elements_validated_against_dimension(self):
        with self.assertRaises(ValueError):
            netlib.ReckDecomposition(2, (netlib.BeamsplitterElement(0, 2, 0.5),), (0.0, 0.0))
        with self.assertRaises(ValueError):
            netlib.ReckDecomposition(2, (), (0.0,))

    def test_random_mesh_is_unitary(self):
        rng = seeded_rng(5)
        u = netlib.reck_random_unitary(6, rng)
        self.assertLessEqual(netlib.unitarity_residual(u), 1e-12)


class RandomUnitaryTest(unittest.TestCase):

    def test_seeded_generation_is_reproducible(self):
        self.assertEqual(netlib.haar_unitary(5, seeded_rng(3)), netlib.haar_unitary(5, seeded_rng(3)))

    def test_haar_second_moment(self):
        # E|U_ij|^2 = 1/n under the Haar measure
        n, count = 4, 4000
        values = [abs(np.asarray(u)[0, 1]) ** 2 for u in haar_batch(n, count, seed=17)]
        self.assertAlmostEqual(1 / n, float(np.mean(values)), delta=0.01)

    def test_haar_phases_are_not_biased(self):
        # without the phase fix of the R diagonal the mean of U_00 is biased away from 0
        values = [np.asarray(u)[0, 0] for u in haar_batch(3, 4000, seed=23)]
        self.assertLess(abs(np.mean(values)), 0.03)

    def test_orthogonal_is_real(self):
        o = netlib.haar_orthogonal(5, seeded_rng(9))
        self.assertTrue(o.is_real())
        self.assertLessEqual(netlib.unitarity_residual(o), 1e-12)

    def test_invalid_size(self):
        with self.assertRaises(ValueError):
            netlib.haar_unitary(0, seeded_rng())


class EmbeddingTest(unittest.TestCase):

    def test_embedding_is_orthogonal(self):
        rng = seeded_rng(13)
        for m in range(1, 7):
            o = netlib.embed_su_in_so(netlib.haar_unitary(m, rng))
            self.assertEqual((2 * m, 2 * m), o.shape)
            self.assertTrue(o.is_real())
            self.assertLessEqual(netlib.unitarity_residual(o), 1e-12)

    def test_embedding_preserves_products(self):
        rng = seeded_rng(19)
        for m in range(1, 7):
            a, b = netlib.haar_unitary(m, rng), netlib.haar_unitary(m, rng)
            left = netlib.embed_su_in_so(netlib.UnitaryMatrix(np.asarray(a) @ np.asarray(b)))
            right = np.asarray(netlib.embed_su_in_so(a)) @ np.asarray(netlib.embed_su_in_so(b))
            self.assertLessEqual(left.max_distance(right), 1e-10)

    def test_real_matrix_embeds_block_diagonally(self):
        o = np.asarray(netlib.embed_su_in_so(netlib.identity(2)))
        self.assertTrue(np.array_equal(np.eye(4), o))
