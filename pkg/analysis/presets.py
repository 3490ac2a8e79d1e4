"""
Named network matrices for the command line.

Accepted sources: identity[:n], bs5050, mzi:<phi>, qft:<n>, mordor:<n>:<phi>,
qufti:<n>:<phi>, haar:<n>:<seed>, orth:<n>:<seed>, reck:<n>:<seed>, or a path
to a matrix file in the {"rows", "cols", "re", "im"} format.
"""
import math
import os

import numpy as np

from analysis import metrology, netlib


def _int(text, what):
    try:
        return int(text)
    except ValueError:
        raise ValueError(f"{what} must be an integer, got '{text}'")


def _float(text, what):
    try:
        return float(text)
    except ValueError:
        raise ValueError(f"{what} must be a number, got '{text}'")


def load_complex_matrix(path: str) -> netlib.ComplexMatrix:
    with open(os.path.expanduser(path)) as f:
        return netlib.ComplexMatrix.from_json(f.read())


def load_matrix(source: str, modes: int = None) -> netlib.UnitaryMatrix:
    """
    :param source: preset name with parameters or a matrix file path
    :param modes: size used by presets that do not carry one (identity)
    """
    name, *params = source.split(':')

    def expect(count):
        if len(params) != count:
            raise ValueError(f"Preset '{name}' takes {count} parameter(s), got '{source}'")

    if name == 'identity':
        if params:
            expect(1)
            return netlib.identity(_int(params[0], "mode count"))
        return netlib.identity(modes or 2)
    if name == 'bs5050':
        expect(0)
        return netlib.beamsplitter_unitary(netlib.BeamsplitterElement(0, 1, 0.5, math.pi / 2), 2)
    if name == 'mzi':
        expect(1)
        return metrology.mzi_matrix(_float(params[0], "phase"))
    if name == 'qft':
        expect(1)
        return netlib.qft_matrix(_int(params[0], "mode count"))
    if name == 'mordor':
        expect(2)
        return metrology.mordor_unitary_product(_int(params[0], "mode count"), _float(params[1], "phase"))
    if name == 'qufti':
        expect(2)
        return metrology.qufti_unitary(_int(params[0], "mode count"), _float(params[1], "phase"))
    generators = {'haar': netlib.haar_unitary, 'orth': netlib.haar_orthogonal, 'reck': netlib.reck_random_unitary}
    if name in generators:
        expect(2)
        rng = np.random.default_rng(_int(params[1], "seed"))
        return generators[name](_int(params[0], "mode count"), rng)
    if os.path.isfile(os.path.expanduser(source)):
        return netlib.UnitaryMatrix(load_complex_matrix(source))
    raise ValueError(f"'{source}' is neither a known preset nor a readable matrix file")
