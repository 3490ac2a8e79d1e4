"""
Complex matrices describing passive linear-optical networks.

A network on n modes maps input creation operators to output ones as
a_i^+ -> sum_j U[i, j] b_j^+, so rows of a matrix are indexed by input modes
and columns by output modes. The Fourier matrix uses the positive-sign root of
unity omega = exp(2*pi*i/n) with entries omega^(j*k)/sqrt(n) for 0-based j, k;
every observable computed downstream is a squared modulus, which is invariant
under the opposite sign convention.
"""
import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import qr

from tools import UnitarityError, wrap_phase

UNITARITY_TOLERANCE = 1e-10
# below this magnitude an entry counts as already nulled during decomposition
_NULL_TOLERANCE = 1e-15


def unitarity_residual(matrix) -> float:
    """
    Max-norm of (U^+ U - I)
    """
    array = np.asarray(matrix, dtype=complex)
    if array.ndim != 2 or array.shape[0] != array.shape[1]:
        raise ValueError(f"Unitarity is defined for square matrices only, got shape {array.shape}")
    return float(np.max(np.abs(array.conj().T @ array - np.eye(array.shape[0]))))


class ComplexMatrix:
    """
    Immutable dense complex matrix
    """

    def __init__(self, entries):
        data = np.array(entries, dtype=complex)
        if data.ndim != 2 or data.shape[0] < 1 or data.shape[1] < 1:
            raise ValueError(f"A matrix needs a positive number of rows and columns, got shape {data.shape}")
        if not np.all(np.isfinite(data)):
            raise ValueError("Matrix entries must be finite")
        data.setflags(write=False)
        self._data = data

    @property
    def rows(self) -> int:
        return self._data.shape[0]

    @property
    def cols(self) -> int:
        return self._data.shape[1]

    @property
    def shape(self):
        return self._data.shape

    @property
    def array(self) -> np.ndarray:
        # read-only view
        return self._data

    @property
    def entries(self):
        return tuple(self._data.ravel())

    def is_square(self) -> bool:
        return self.rows == self.cols

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._data.copy() if copy else self._data
        return self._data.astype(dtype)

    def __getitem__(self, item):
        return self._data[item]

    def __eq__(self, other):
        if not isinstance(other, ComplexMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self._data, other._data)

    def __hash__(self):
        return hash((self.shape, self._data.tobytes()))

    def __repr__(self):
        return f"{self.__class__.__name__}({self._data.tolist()!r})"

    def max_distance(self, other) -> float:
        return float(np.max(np.abs(self._data - np.asarray(other, dtype=complex))))

    def to_dict(self):
        flat = self._data.ravel()
        return {"rows": self.rows,
                "cols": self.cols,
                "re": flat.real.tolist(),
                "im": flat.imag.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict):
        try:
            rows, cols = int(data["rows"]), int(data["cols"])
            re, im = data["re"], data["im"]
        except (KeyError, TypeError) as e:
            raise ValueError(f"Malformed matrix record: {e}")
        if len(re) != rows * cols or len(im) != rows * cols:
            raise ValueError(f"Matrix record holds {len(re)}/{len(im)} entries, expected {rows * cols}")
        entries = (np.array(re, dtype=float) + 1j * np.array(im, dtype=float)).reshape(rows, cols)
        return cls(entries)

    @classmethod
    def from_json(cls, text: str):
        return cls.from_dict(json.loads(text))


class UnitaryMatrix(ComplexMatrix):

    def __init__(self, entries, tolerance: float = UNITARITY_TOLERANCE):
        super().__init__(entries)
        if not self.is_square():
            raise UnitarityError(f"Unitary matrix must be square, got shape {self.shape}")
        residual = unitarity_residual(self._data)
        if residual > tolerance:
            raise UnitarityError(f"Matrix violates unitarity: max|U^+U - I| = {residual:.3e} > {tolerance:.0e}")

    @property
    def dimension(self) -> int:
        return self.rows

    def is_real(self) -> bool:
        return bool(np.all(self._data.imag == 0))


def compose(*matrices):
    """
    Network made of the given stages in the order the light traverses them.
    Rows index input modes, so the stage met first is the leftmost factor.
    :param matrices: first matrix acts first
    :return: UnitaryMatrix if every factor is unitary, ComplexMatrix otherwise
    """
    if not matrices:
        raise ValueError("Nothing to compose")
    product = np.asarray(matrices[0], dtype=complex)
    for m in matrices[1:]:
        product = product @ np.asarray(m, dtype=complex)
    if all(isinstance(m, UnitaryMatrix) for m in matrices):
        return UnitaryMatrix(product)
    return ComplexMatrix(product)


def identity(n: int) -> UnitaryMatrix:
    _check_mode_count(n)
    return UnitaryMatrix(np.eye(n))


def phase_shifter(phases: Sequence[float]) -> UnitaryMatrix:
    return UnitaryMatrix(np.diag(np.exp(1j * np.asarray(phases, dtype=float))))


def qft_matrix(n: int) -> UnitaryMatrix:
    _check_mode_count(n)
    index = np.arange(n)
    # reduce the exponent modulo n before exponentiating to keep the roots exact
    exponents = np.outer(index, index) % n
    return UnitaryMatrix(np.exp(2j * np.pi * exponents / n) / np.sqrt(n))


@dataclass(frozen=True)
class BeamsplitterElement:
    """
    Two-mode block [[t, r], [-r*, t]] acting on modes (mode_p, mode_q),
    with t = sqrt(eta) and r = sqrt(1 - eta) exp(i tau).
    The 50:50 element (eta=1/2, tau=pi/2) is (1/sqrt 2)[[1, i], [i, 1]].
    """
    mode_p: int
    mode_q: int
    eta: float
    tau: float = 0.0

    def __post_init__(self):
        if self.mode_p < 0 or self.mode_q < 0:
            raise ValueError(f"Negative mode index in ({self.mode_p}, {self.mode_q})")
        if self.mode_p == self.mode_q:
            raise ValueError(f"Beamsplitter needs two distinct modes, got {self.mode_p} twice")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"Transmissivity {self.eta} outside [0, 1]")
        object.__setattr__(self, 'tau', wrap_phase(float(self.tau)))

    @property
    def t(self) -> float:
        return math.sqrt(self.eta)

    @property
    def r(self) -> complex:
        return math.sqrt(1.0 - self.eta) * complex(math.cos(self.tau), math.sin(self.tau))

    def block(self) -> np.ndarray:
        t, r = self.t, self.r
        return np.array([[t, r], [-r.conjugate(), t]], dtype=complex)

    def to_dict(self):
        return {"mode_p": self.mode_p, "mode_q": self.mode_q, "eta": self.eta, "tau": self.tau}


def beamsplitter_unitary(elem: BeamsplitterElement, n: int) -> UnitaryMatrix:
    _check_mode_count(n)
    if max(elem.mode_p, elem.mode_q) >= n:
        raise ValueError(f"Modes ({elem.mode_p}, {elem.mode_q}) out of range for {n} modes")
    matrix = np.eye(n, dtype=complex)
    index = [elem.mode_p, elem.mode_q]
    matrix[np.ix_(index, index)] = elem.block()
    return UnitaryMatrix(matrix)


def _apply_element(elem: BeamsplitterElement, matrix: np.ndarray):
    """Left-multiplies matrix in place by the element block"""
    index = [elem.mode_p, elem.mode_q]
    matrix[index, :] = elem.block() @ matrix[index, :]


@dataclass(frozen=True)
class ReckDecomposition:
    """
    Triangular mesh as a matrix identity u = D B_N ... B_1: recompose
    multiplies the elements onto the identity from the left in list order,
    then the diagonal phase layer D.
    """
    dimension: int
    elements: tuple
    output_phases: tuple

    def __post_init__(self):
        _check_mode_count(self.dimension)
        if len(self.elements) > self.dimension * (self.dimension - 1) // 2:
            raise ValueError(f"{len(self.elements)} elements exceed the triangular mesh size for n={self.dimension}")
        if len(self.output_phases) != self.dimension:
            raise ValueError(f"Expected {self.dimension} output phases, got {len(self.output_phases)}")
        for e in self.elements:
            if max(e.mode_p, e.mode_q) >= self.dimension:
                raise ValueError(f"Element {e} does not fit {self.dimension} modes")

    def to_dict(self):
        return {"dimension": self.dimension,
                "elements": [e.to_dict() for e in self.elements],
                "output_phases": list(self.output_phases)}


def recompose(d: ReckDecomposition) -> UnitaryMatrix:
    matrix = np.eye(d.dimension, dtype=complex)
    for e in d.elements:
        _apply_element(e, matrix)
    matrix = np.exp(1j * np.asarray(d.output_phases, dtype=float))[:, None] * matrix
    return UnitaryMatrix(matrix)


def reck_decompose(u: UnitaryMatrix) -> ReckDecomposition:
    """
    Nulls the sub-diagonal column by column with adjacent-mode elements,
    leaving a diagonal phase layer, then commutes that layer to the output.
    :param u: unitary to decompose
    :return: decomposition such that recompose() reproduces u
    """
    if not isinstance(u, UnitaryMatrix):
        u = UnitaryMatrix(u)
    n = u.dimension
    w = np.array(u, dtype=complex)

    nulling = []
    for c in range(n - 1):
        for q in range(n - 1, c, -1):
            p = q - 1
            a, b = w[p, c], w[q, c]
            if abs(b) < _NULL_TOLERANCE:
                continue
            eta = abs(a) ** 2 / (abs(a) ** 2 + abs(b) ** 2)
            elem = BeamsplitterElement(p, q, min(1.0, max(0.0, eta)), np.angle(a) - np.angle(b))
            _apply_element(elem, w)
            nulling.append(elem)

    # w is now diagonal; u = B_1^+ ... B_N^+ D = D (D^+ B_1^+ D) ... (D^+ B_N^+ D)
    delta = [wrap_phase(float(np.angle(w[j, j]))) for j in range(n)]
    elements = [BeamsplitterElement(e.mode_p, e.mode_q, e.eta, e.tau + math.pi + delta[e.mode_q] - delta[e.mode_p])
                for e in reversed(nulling)]
    return ReckDecomposition(n, tuple(elements), tuple(delta))


def _triangular_pairs(n: int):
    for c in range(n - 1):
        for q in range(n - 1, c, -1):
            yield q - 1, q


def reck_random_unitary(n: int, rng: np.random.Generator) -> UnitaryMatrix:
    """
    Triangular mesh of n(n-1)/2 elements with eta ~ U[0, 1] and tau ~ U[0, 2pi),
    followed by uniformly drawn output phases.
    """
    _check_mode_count(n)
    elements = tuple(BeamsplitterElement(p, q, float(rng.uniform(0.0, 1.0)), float(rng.uniform(0.0, 2 * math.pi)))
                     for p, q in _triangular_pairs(n))
    phases = tuple(float(x) for x in rng.uniform(0.0, 2 * math.pi, size=n))
    return recompose(ReckDecomposition(n, elements, phases))


def haar_unitary(n: int, rng: np.random.Generator) -> UnitaryMatrix:
    _check_mode_count(n)
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = qr(z)
    d = np.diag(r)
    return UnitaryMatrix(q * (d / np.abs(d)))


def haar_orthogonal(n: int, rng: np.random.Generator) -> UnitaryMatrix:
    _check_mode_count(n)
    q, r = qr(rng.standard_normal((n, n)))
    signs = np.where(np.diag(r) < 0, -1.0, 1.0)
    return UnitaryMatrix(q * signs)


def embed_su_in_so(u: UnitaryMatrix) -> UnitaryMatrix:
    """
    Realification U -> [[Re U, -Im U], [Im U, Re U]] of size 2m
    """
    array = np.asarray(u, dtype=complex)
    re, im = array.real, array.imag
    return UnitaryMatrix(np.block([[re, -im], [im, re]]).astype(complex))


def _check_mode_count(n: int):
    if int(n) != n or n < 1:
        raise ValueError(f"Mode count must be a positive integer, got {n}")
