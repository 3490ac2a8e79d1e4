"""
Fock-state transitions through passive networks.

Amplitudes use the normalized-ket convention
<s|U|k> = perm(U_{k,s}) / sqrt(prod k_i! prod s_j!),
which is correct for bunched inputs and outputs alike.
"""
import itertools
import json
import math
import operator
from collections import defaultdict
from typing import Mapping, NamedTuple, Sequence

import numpy as np
import pandas as pd
from tqdm import tqdm
from tqdm.contrib.concurrent import thread_map

from analysis.netlib import UnitaryMatrix
from analysis.permanent import permanent_fast, repeated_array
from tools import check_cap

MAX_CONFIGURATIONS = 10 ** 7
MAX_SECTOR_SIZE = 10 ** 5
MAX_ORACLE_PHOTONS = 6
MAX_ORACLE_MODES = 8
NORMALIZATION_TOLERANCE = 1e-9
PRUNE_TOLERANCE = 1e-15


class OccupationVector(tuple):
    """
    Photon counts per mode
    """

    def __new__(cls, counts):
        values = tuple(counts)
        if not values:
            raise ValueError("Occupation vector needs at least one mode")
        converted = tuple(int(c) for c in values)
        if converted != values or min(converted) < 0:
            raise ValueError(f"Photon counts must be nonnegative integers, got {values}")
        return super().__new__(cls, converted)

    @classmethod
    def parse(cls, text: str):
        try:
            return cls(int(part) for part in text.split(','))
        except ValueError as e:
            raise ValueError(f"Cannot read occupation '{text}': {e}")

    @property
    def total(self) -> int:
        return sum(self)

    @property
    def mode_count(self) -> int:
        return len(self)

    def factorial_product(self) -> int:
        return math.prod(math.factorial(c) for c in self)

    def __repr__(self):
        return f"OccupationVector({tuple(self)})"


def configuration_count(m: int, K: int) -> int:
    return math.comb(m + K - 1, K)


def enumerate_configurations(m: int, K: int, max_configurations: int = MAX_CONFIGURATIONS):
    """
    All placements of K photons into m modes in ascending lexicographic order.
    Bars positions are drawn in lexicographic order, which orders the counts the same way.
    """
    if m < 1 or K < 0:
        raise ValueError(f"Need m >= 1 and K >= 0, got m={m}, K={K}")
    check_cap(f"configuration count C({m + K - 1},{K})", configuration_count(m, K), max_configurations)
    size = m + K - 1
    configurations = []
    for bars in itertools.combinations(range(size), m - 1):
        starts = (0,) + tuple(b + 1 for b in bars)
        stops = bars + (size,)
        configurations.append(OccupationVector(map(operator.sub, stops, starts)))
    return configurations


class FockDistribution:
    """
    Normalized probabilities over configurations with fixed mode count and photon total,
    stored in lexicographic order.
    """

    def __init__(self, mode_count: int, photon_total: int, entries: Mapping,
                 tolerance: float = NORMALIZATION_TOLERANCE):
        self.mode_count = mode_count
        self.photon_total = photon_total
        checked = {}
        for key, p in entries.items():
            s = OccupationVector(key)
            if len(s) != mode_count or s.total != photon_total:
                raise ValueError(f"Configuration {tuple(s)} does not match m={mode_count}, n={photon_total}")
            p = float(p)
            if not -tolerance <= p <= 1 + tolerance:
                raise ValueError(f"Probability {p} of {tuple(s)} outside [0, 1]")
            checked[s] = min(1.0, max(0.0, p))
        total = math.fsum(checked.values())
        if abs(total - 1.0) > tolerance:
            raise ValueError(f"Probabilities sum to {total!r}, not 1 within {tolerance}")
        self._entries = dict(sorted(checked.items()))

    @property
    def entries(self):
        return dict(self._entries)

    @property
    def configurations(self):
        return list(self._entries.keys())

    @property
    def probabilities(self) -> np.ndarray:
        return np.fromiter(self._entries.values(), dtype=float, count=len(self._entries))

    def probability(self, s) -> float:
        return self._entries.get(OccupationVector(s), 0.0)

    def support(self):
        return [s for s, p in self._entries.items() if p > 0]

    def items(self):
        return self._entries.items()

    def __len__(self):
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries)

    def map_outcomes(self, mapping) -> dict:
        """
        Coarse-grains the distribution, e.g. onto parity outcomes
        """
        coarse = defaultdict(float)
        for s, p in self._entries.items():
            coarse[mapping(s)] += p
        return dict(coarse)

    @classmethod
    def from_samples(cls, samples: Sequence, mode_count: int, photon_total: int):
        if not samples:
            raise ValueError("No samples to build a distribution from")
        counts = defaultdict(int)
        for s in samples:
            counts[OccupationVector(s)] += 1
        return cls(mode_count, photon_total, {s: c / len(samples) for s, c in counts.items()})

    def as_dataframe(self) -> pd.DataFrame:
        columns = [f"s{j + 1}" for j in range(self.mode_count)]
        df = pd.DataFrame([tuple(s) for s in self._entries], columns=columns)
        df["p"] = self.probabilities
        return df

    def to_dict(self):
        return {"m": self.mode_count,
                "n": self.photon_total,
                "entries": [{"s": list(s), "p": p} for s, p in self._entries.items()]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict):
        return cls(data["m"], data["n"], {tuple(e["s"]): e["p"] for e in data["entries"]})


def _check_occupation(u, occupation, what: str) -> OccupationVector:
    occupation = OccupationVector(occupation)
    if len(occupation) != np.shape(u)[0]:
        raise ValueError(f"{what} occupation has {len(occupation)} modes, network has {np.shape(u)[0]}")
    return occupation


def amplitude(u: UnitaryMatrix, input_occupation, output_occupation) -> complex:
    k = _check_occupation(u, input_occupation, "Input")
    s = _check_occupation(u, output_occupation, "Output")
    if k.total != s.total:
        raise ValueError(f"Photon number not conserved: {k.total} in, {s.total} out")
    if k.total == 0:
        return 1 + 0j
    perm = permanent_fast(repeated_array(u, k, s))
    return perm / math.sqrt(k.factorial_product() * s.factorial_product())


def output_distribution(u: UnitaryMatrix, input_occupation, threads: int = 1, progress: bool = False,
                        max_configurations: int = MAX_CONFIGURATIONS) -> FockDistribution:
    """
    Exact output distribution; configurations are processed independently and
    assembled in lexicographic order.
    """
    k = _check_occupation(u, input_occupation, "Input")
    configurations = enumerate_configurations(len(k), k.total, max_configurations)

    def probability(s):
        return abs(amplitude(u, k, s)) ** 2

    if threads > 1:
        probabilities = thread_map(probability, configurations, max_workers=threads,
                                   disable=not progress, desc="Configurations")
    else:
        probabilities = [probability(s) for s in tqdm(configurations, disable=not progress, desc="Configurations")]
    return FockDistribution(len(k), k.total, dict(zip(configurations, probabilities)))


def sample(dist: FockDistribution, count: int, rng: np.random.Generator):
    """
    Inverse-CDF sampling over the lexicographically ordered configurations
    """
    if count < 0:
        raise ValueError(f"Negative draw count {count}")
    configurations = dist.configurations
    cdf = np.cumsum(dist.probabilities)
    cdf /= cdf[-1]
    picks = np.searchsorted(cdf, rng.random(count), side='right')
    picks = np.minimum(picks, len(configurations) - 1)
    return [configurations[i] for i in picks]


class CreationPolynomial:
    """
    Polynomial in output creation operators: exponent vector -> coefficient
    """

    def __init__(self, terms: Mapping = None, prune: float = PRUNE_TOLERANCE):
        self.prune = prune
        self.terms = {tuple(e): complex(c) for e, c in (terms or {}).items() if abs(c) >= prune}

    @classmethod
    def constant(cls, mode_count: int, value: complex = 1.0):
        return cls({(0,) * mode_count: value})

    @classmethod
    def linear_form(cls, coefficients: Sequence[complex]):
        m = len(coefficients)
        return cls({tuple(int(i == j) for i in range(m)): c for j, c in enumerate(coefficients)})

    def __mul__(self, other):
        product = defaultdict(complex)
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                product[tuple(a + b for a, b in zip(e1, e2))] += c1 * c2
        return CreationPolynomial(product, self.prune)

    def __len__(self):
        return len(self.terms)

    def coefficient(self, exponents) -> complex:
        return self.terms.get(tuple(exponents), 0j)

    def amplitude(self, input_occupation, output_occupation) -> complex:
        """
        Ket amplitude of the output configuration: b^s|0> = sqrt(s!)|s>, and the
        input ket carries 1/sqrt(k!)
        """
        k = OccupationVector(input_occupation)
        s = OccupationVector(output_occupation)
        return self.coefficient(s) * math.sqrt(s.factorial_product() / k.factorial_product())


def polynomial_oracle(u: UnitaryMatrix, input_occupation, max_photons: int = MAX_ORACLE_PHOTONS,
                      max_modes: int = MAX_ORACLE_MODES) -> CreationPolynomial:
    """
    Expands prod_i (sum_j U[i, j] b_j^+)^{k_i} term by term, without permanents.
    """
    k = _check_occupation(u, input_occupation, "Input")
    check_cap("polynomial oracle photon total", k.total, max_photons)
    check_cap("polynomial oracle mode count", len(k), max_modes)
    a = np.asarray(u, dtype=complex)
    polynomial = CreationPolynomial.constant(len(k))
    for i, k_i in enumerate(k):
        row = CreationPolynomial.linear_form(a[i, :])
        for _ in range(k_i):
            polynomial = polynomial * row
    return polynomial


class _SectorEvolution:
    """
    Monomial-basis images of Fock states under a network.

    Levels 0..max_total of configurations are enumerated once, together with
    lookup tables for raising by b_j^+. The image of prod_i L_i^{k_i}|0>, with
    L_i = sum_j a[i, j] b_j^+, is built from the image of k - e_i and cached.
    """

    def __init__(self, a: np.ndarray, max_total: int, max_sector_size: int):
        self.a = a
        m = a.shape[0]
        self.levels = [enumerate_configurations(m, K, max_sector_size) for K in range(max_total + 1)]
        index = [{s: i for i, s in enumerate(level)} for level in self.levels]
        # raise_maps[K][j][i]: position in level K of (level K-1 configuration i) + e_j
        self.raise_maps = [None]
        for K in range(1, max_total + 1):
            self.raise_maps.append([np.array([index[K][s[:j] + (s[j] + 1,) + s[j + 1:]] for s in self.levels[K - 1]],
                                             dtype=np.intp)
                                    for j in range(m)])
        self.sqrt_factorials = [np.sqrt(np.array([float(s.factorial_product()) for s in level]))
                                for level in self.levels]
        self._cache = {(0,) * m: np.ones(1, dtype=complex)}

    def monomials(self, k: tuple) -> np.ndarray:
        if k in self._cache:
            return self._cache[k]
        i = max(j for j, c in enumerate(k) if c > 0)
        previous = self.monomials(k[:i] + (k[i] - 1,) + k[i + 1:])
        level = sum(k)
        out = np.zeros(len(self.levels[level]), dtype=complex)
        for j in range(self.a.shape[0]):
            # raising indices are distinct for a fixed j
            out[self.raise_maps[level][j]] += self.a[i, j] * previous
        self._cache[k] = out
        return out

    def evolve(self, sector_state: dict, total: int) -> dict:
        vector = np.zeros(len(self.levels[total]), dtype=complex)
        for k, c in sector_state.items():
            vector += (c / math.sqrt(k.factorial_product())) * self.monomials(tuple(k))
        vector *= self.sqrt_factorials[total]
        return dict(zip(self.levels[total], vector))


def truncated_evolution(u: UnitaryMatrix, state: Mapping, cutoff: int,
                        max_sector_size: int = MAX_SECTOR_SIZE) -> dict:
    """
    Applies the network to a superposition of Fock states, sector by sector.
    :param u: network matrix
    :param state: configuration -> complex amplitude, every total <= cutoff
    :param cutoff: maximal photon total kept
    :param max_sector_size: guard on configurations per photon-number sector
    :return: configuration -> amplitude for every configuration of the occupied sectors
    """
    a = np.asarray(u, dtype=complex)
    sectors = defaultdict(dict)
    for key, c in state.items():
        k = _check_occupation(a, key, "State")
        if k.total > cutoff:
            raise ValueError(f"State component {tuple(k)} exceeds the cutoff {cutoff}")
        sectors[k.total][k] = complex(c)
    if not sectors:
        return {}
    top = max(sectors)
    check_cap(f"sector size for {top} photons", configuration_count(a.shape[0], top), max_sector_size)
    evolution = _SectorEvolution(a, top, max_sector_size)
    evolved = {}
    for total in sorted(sectors):
        evolved.update(evolution.evolve(sectors[total], total))
    return evolved


def total_variation(p: FockDistribution, q: FockDistribution) -> float:
    if (p.mode_count, p.photon_total) != (q.mode_count, q.photon_total):
        raise ValueError(f"Distributions over (m={p.mode_count}, n={p.photon_total}) "
                         f"and (m={q.mode_count}, n={q.photon_total}) are not comparable")
    support = set(p.configurations) | set(q.configurations)
    return 0.5 * math.fsum(abs(p.probability(s) - q.probability(s)) for s in support)


class BosonSamplingRegime(NamedTuple):
    mode_count: int
    photon_count: int
    birthday_ok: bool
    hiding_ok: object
    messages: tuple

    @property
    def is_ok(self):
        return self.birthday_ok and self.hiding_ok is not False


def validate_bs_instance(m: int, n: int, strict: bool = False) -> BosonSamplingRegime:
    """
    Advisory check of the collision-free (m >= n^2) and, if strict, the
    hiding (n <= m^(1/6)) regimes. Never raises for valid counts.
    """
    if m < 1 or n < 1:
        raise ValueError(f"Need m, n >= 1, got m={m}, n={n}")
    messages = []
    birthday_ok = m >= n * n
    if not birthday_ok:
        messages.append(f"m={m} < n^2={n * n}: photon collisions are not suppressed")
    hiding_ok = None
    if strict:
        # n <= m^(1/6) compared in integers
        hiding_ok = n ** 6 <= m
        if not hiding_ok:
            messages.append(f"n={n} > m^(1/6)={m ** (1 / 6):.4g}: outside the hiding regime")
    return BosonSamplingRegime(m, n, birthday_ok, hiding_ok, tuple(messages))
