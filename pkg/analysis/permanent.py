import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from tqdm.contrib.concurrent import thread_map

from analysis.netlib import ComplexMatrix
from tools import check_cap

MAX_DEFINITIONAL_SIZE = 9
MAX_LAPLACE_SIZE = 11
MAX_FAST_SIZE = 30
# Gray-code indices per work unit; the split depends on n only, so the
# summation order (and thus every bit of the result) is independent of threads
_RYSER_CHUNK = 1 << 14


def _square_array(m) -> np.ndarray:
    array = np.asarray(m, dtype=complex)
    if array.ndim != 2 or array.shape[0] != array.shape[1]:
        raise ValueError(f"Permanent is defined for square matrices only, got shape {array.shape}")
    return array


def permanent_definitional(m, max_size: int = MAX_DEFINITIONAL_SIZE) -> complex:
    """
    Sum over all permutations of the products m[i, sigma(i)]
    """
    a = _square_array(m)
    n = check_cap("permanent_definitional matrix size", a.shape[0], max_size)
    if n == 0:
        return 1 + 0j
    permutations = np.array(list(itertools.permutations(range(n))), dtype=np.intp)
    return complex(np.sum(np.prod(a[np.arange(n), permutations], axis=1)))


def permanent_laplace(m, max_size: int = MAX_LAPLACE_SIZE) -> complex:
    """
    Expansion along the first row, perm(M) = sum_j m[0, j] perm(M'_{0j}),
    memoized over the set of columns already used.
    """
    a = _square_array(m)
    n = check_cap("permanent_laplace matrix size", a.shape[0], max_size)
    entries = a.tolist()

    @lru_cache(maxsize=None)
    def minor(row, used_columns):
        if row == n:
            return 1 + 0j
        total = 0j
        for j in range(n):
            if not used_columns & (1 << j):
                total += entries[row][j] * minor(row + 1, used_columns | (1 << j))
        return total

    return complex(minor(0, 0))


def _ryser_chunk(a: np.ndarray, start: int, stop: int) -> complex:
    """
    Partial Ryser sum over Gray-code indices [start, stop).
    Consecutive Gray codes differ in one column, so row sums are updated by a
    cumulative sum of signed column vectors.
    """
    n = a.shape[0]
    k = np.arange(start, stop, dtype=np.int64)
    gray = k ^ (k >> 1)
    bits = np.arange(n, dtype=np.int64)

    first_columns = ((gray[0] >> bits) & 1).astype(bool)
    row_sums = np.empty((len(k), n), dtype=complex)
    row_sums[0] = a[:, first_columns].sum(axis=1)
    if len(k) > 1:
        following = k[1:]
        changed = np.log2(following & -following).astype(np.int64)
        added = ((gray[1:] >> changed) & 1).astype(bool)
        deltas = np.where(added, 1.0, -1.0)[:, None] * a[:, changed].T
        row_sums[1:] = row_sums[0] + np.cumsum(deltas, axis=0)

    parity = np.zeros(len(k), dtype=np.int64)
    for b in bits:
        parity ^= (gray >> b) & 1
    signs = np.where(parity == 1, -1.0, 1.0)
    return complex(np.sum(signs * np.prod(row_sums, axis=1)))


def permanent_fast(m, threads: int = 1, max_size: int = MAX_FAST_SIZE) -> complex:
    """
    Ryser's inclusion-exclusion formula with Gray-code ordering, O(2^n n).
    :param m: square matrix
    :param threads: worker count for the subset-range split
    :param max_size: guard on the matrix size
    :return: permanent of m
    """
    a = _square_array(m)
    n = check_cap("permanent_fast matrix size", a.shape[0], max_size)
    if n == 0:
        return 1 + 0j
    if n == 1:
        return complex(a[0, 0])

    subsets = 1 << n
    bounds = [(start, min(start + _RYSER_CHUNK, subsets)) for start in range(0, subsets, _RYSER_CHUNK)]
    if len(bounds) == 1 or threads <= 1:
        partial = [_ryser_chunk(a, start, stop) for start, stop in bounds]
    else:
        partial = thread_map(lambda bound: _ryser_chunk(a, *bound), bounds,
                             max_workers=threads, disable=True)
    total = 0j
    for value in partial:
        total += value
    return -total if n % 2 else total


def permanent(m, threads: int = 1) -> complex:
    a = _square_array(m)
    if a.shape[0] <= 1:
        return complex(a[0, 0]) if a.shape[0] else 1 + 0j
    return permanent_fast(a, threads=threads)


def permanent_derivative(m, dm) -> complex:
    """
    Derivative of perm(M(t)) given M and dM/dt: sum_ij dM[i, j] perm(M without row i, column j)
    """
    a = _square_array(m)
    da = _square_array(dm)
    if a.shape != da.shape:
        raise ValueError(f"Matrix shape {a.shape} and derivative shape {da.shape} differ")
    n = a.shape[0]
    if n == 1:
        return complex(da[0, 0])
    total = 0j
    for i in range(n):
        rows = [r for r in range(n) if r != i]
        for j in range(n):
            if da[i, j] != 0:
                cols = [c for c in range(n) if c != j]
                total += da[i, j] * permanent_fast(a[np.ix_(rows, cols)])
    return total


@dataclass(frozen=True)
class RepeatedRowSpec:
    input_occupation: tuple
    output_occupation: tuple

    def __post_init__(self):
        k = tuple(int(x) for x in self.input_occupation)
        s = tuple(int(x) for x in self.output_occupation)
        if len(k) != len(s):
            raise ValueError(f"Occupation lengths differ: {len(k)} != {len(s)}")
        if min(k + s, default=0) < 0:
            raise ValueError("Photon counts must be nonnegative")
        if sum(k) != sum(s):
            raise ValueError(f"Photon number not conserved: {sum(k)} in, {sum(s)} out")
        object.__setattr__(self, 'input_occupation', k)
        object.__setattr__(self, 'output_occupation', s)

    @property
    def photon_total(self) -> int:
        return sum(self.input_occupation)


def repeated_array(u, k: Sequence[int], s: Sequence[int]) -> np.ndarray:
    """
    K x K array with row i of u repeated k[i] times and column j repeated s[j] times
    """
    a = np.asarray(u, dtype=complex)
    if a.shape != (len(k), len(s)):
        raise ValueError(f"Occupations of length ({len(k)}, {len(s)}) do not match matrix shape {a.shape}")
    if sum(k) != sum(s):
        raise ValueError(f"Photon number not conserved: {sum(k)} in, {sum(s)} out")
    rows = np.repeat(np.arange(len(k)), k)
    cols = np.repeat(np.arange(len(s)), s)
    return a[np.ix_(rows, cols)]


def build_repeated_matrix(u: ComplexMatrix, spec: RepeatedRowSpec) -> ComplexMatrix:
    if spec.photon_total == 0:
        raise ValueError("A repeated matrix needs at least one photon")
    return ComplexMatrix(repeated_array(u, spec.input_occupation, spec.output_occupation))
