import os
import json
import shutil
import tempfile

import numpy as np

from analysis import netlib


def seeded_rng(seed: int = 2020):
    return np.random.default_rng(seed)


def random_complex_matrix(n: int, rng: np.random.Generator):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def haar_batch(n: int, count: int, seed: int = 2020):
    rng = seeded_rng(seed)
    return [netlib.haar_unitary(n, rng) for _ in range(count)]


def fifty_fifty():
    return netlib.beamsplitter_unitary(netlib.BeamsplitterElement(0, 1, 0.5, np.pi / 2), 2)


class MatrixFixtureDir:
    """
    Temporary directory of matrix files in the {"rows", "cols", "re", "im"} format
    """

    def __init__(self):
        self.location = tempfile.mkdtemp(prefix='fockstat-test-')

    def write(self, filename: str, matrix):
        path = os.path.join(self.location, filename)
        with open(path, 'w') as f:
            f.write(netlib.ComplexMatrix(matrix).to_json())
        return path

    def write_raw(self, filename: str, record):
        path = os.path.join(self.location, filename)
        with open(path, 'w') as f:
            f.write(record if isinstance(record, str) else json.dumps(record))
        return path

    def write_corrupted(self, filename: str, n: int = 3, seed: int = 7):
        """
        Haar unitary with one entry perturbed far beyond the unitarity tolerance
        """
        entries = np.array(netlib.haar_unitary(n, seeded_rng(seed)))
        entries[0, 0] += 0.1
        return self.write(filename, entries)

    def path(self, filename: str):
        return os.path.join(self.location, filename)

    def remove(self):
        shutil.rmtree(self.location, ignore_errors=True)
