import math
import unittest

import numpy as np

from analysis import metrology, netlib, presets
from analysis.tests.fixtures import MatrixFixtureDir, fifty_fifty
from tools import UnitarityError


class LoadMatrixTest(unittest.TestCase):

    def setUp(self):
        self.files = MatrixFixtureDir()

    def tearDown(self):
        self.files.remove()

    def test_identity(self):
        self.assertEqual(netlib.identity(2), presets.load_matrix('identity'))
        self.assertEqual(netlib.identity(5), presets.load_matrix('identity', modes=5))
        self.assertEqual(netlib.identity(3), presets.load_matrix('identity:3'))

    def test_named_networks(self):
        self.assertEqual(fifty_fifty(), presets.load_matrix('bs5050'))
        self.assertEqual(metrology.mzi_matrix(0.7), presets.load_matrix('mzi:0.7'))
        self.assertEqual(netlib.qft_matrix(4), presets.load_matrix('qft:4'))
        self.assertEqual(metrology.mordor_unitary_product(3, 0.2), presets.load_matrix('mordor:3:0.2'))
        self.assertEqual(metrology.qufti_unitary(3, math.pi), presets.load_matrix(f'qufti:3:{math.pi!r}'))

    def test_seeded_generators(self):
        self.assertEqual(presets.load_matrix('haar:4:11'), presets.load_matrix('haar:4:11'))
        self.assertNotEqual(presets.load_matrix('haar:4:11'), presets.load_matrix('haar:4:12'))
        self.assertTrue(presets.load_matrix('orth:3:1').is_real())
        self.assertEqual(netlib.haar_unitary(3, np.random.default_rng(5)), presets.load_matrix('haar:3:5'))

    def test_matrix_file(self):
        u = netlib.haar_unitary(3, np.random.default_rng(2))
        path = self.files.write('u.json', u)
        self.assertEqual(u, presets.load_matrix(path))

    def test_corrupted_file_rejected(self):
        path = self.files.write_corrupted('broken.json')
        with self.assertRaises(UnitarityError):
            presets.load_matrix(path)
        self.assertEqual((3, 3), presets.load_complex_matrix(path).shape)

    def test_malformed_file(self):
        path = self.files.write_raw('bad.json', {"rows": 2, "cols": 2, "re": [1, 0]})
        with self.assertRaises(ValueError):
            presets.load_matrix(path)

    def test_bad_sources(self):
        for source in ('unknown', 'qft', 'qft:x', 'mordor:3', 'haar:3', 'mzi:phase', 'bs5050:1'):
            with self.subTest(source=source), self.assertRaises(ValueError):
                presets.load_matrix(source)
