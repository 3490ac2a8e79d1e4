"""
Non-Fock inputs: coherent and squeezed-vacuum expansions, displaced inputs,
photon-added coherent states and parity sampling with photon-added or
photon-subtracted squeezed vacua.
"""
import cmath
import math
from collections.abc import Mapping
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np
import pandas as pd
from scipy.special import eval_laguerre, gammaln

from analysis.fock import FockDistribution, OccupationVector, output_distribution, truncated_evolution
from analysis.netlib import UnitaryMatrix
from tools import check_cap, wrap_phase

PASSV_MAX_MODES = 3
PASSV_MAX_ADDED = 2
PASSV_MAX_CUTOFF = 20
REAL_TOLERANCE = 1e-12


@dataclass(frozen=True)
class CoherentAmplitude:
    alpha: complex

    def __post_init__(self):
        alpha = complex(self.alpha)
        if not cmath.isfinite(alpha):
            raise ValueError(f"Coherent amplitude must be finite, got {alpha}")
        object.__setattr__(self, 'alpha', alpha)

    @property
    def mean_photon_number(self) -> float:
        return abs(self.alpha) ** 2


@dataclass(frozen=True)
class SqueezingParameter:
    """
    xi = r e^{i theta}
    """
    r: float
    theta: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.r) or self.r < 0:
            raise ValueError(f"Squeezing magnitude must be finite and nonnegative, got {self.r}")
        object.__setattr__(self, 'r', float(self.r))
        object.__setattr__(self, 'theta', wrap_phase(float(self.theta)))

    @property
    def xi(self) -> complex:
        return cmath.rect(self.r, self.theta)

    @property
    def mean_photon_number(self) -> float:
        return math.sinh(self.r) ** 2


class TruncatedCoefficients:
    """
    Fock coefficients c_0..c_cutoff of a single-mode state
    """

    def __init__(self, coefficients):
        data = np.array(coefficients, dtype=complex)
        data.setflags(write=False)
        self._data = data

    @property
    def cutoff(self) -> int:
        return len(self._data) - 1

    @property
    def coefficients(self) -> np.ndarray:
        return self._data

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self._data) ** 2

    @property
    def norm_deficit(self) -> float:
        return 1.0 - math.fsum(self.probabilities)

    @property
    def mean_photon_number(self) -> float:
        return float(np.dot(np.arange(len(self._data)), self.probabilities))

    @property
    def photon_number_std(self) -> float:
        numbers = np.arange(len(self._data))
        p = self.probabilities
        mean = np.dot(numbers, p)
        return math.sqrt(max(0.0, np.dot(numbers ** 2, p) - mean ** 2))

    def __len__(self):
        return len(self._data)

    def __getitem__(self, item):
        return self._data[item]

    def __iter__(self):
        return iter(self._data)


def _check_cutoff(cutoff: int):
    if int(cutoff) != cutoff or cutoff < 0:
        raise ValueError(f"Cutoff must be a nonnegative integer, got {cutoff}")


def coherent_coefficients(alpha: CoherentAmplitude, cutoff: int) -> TruncatedCoefficients:
    """
    c_n = e^{-|alpha|^2/2} alpha^n / sqrt(n!), built by the ratio c_n = c_{n-1} alpha / sqrt(n)
    """
    _check_cutoff(cutoff)
    a = alpha.alpha
    c = np.empty(cutoff + 1, dtype=complex)
    c[0] = math.exp(-abs(a) ** 2 / 2)
    for n in range(1, cutoff + 1):
        c[n] = c[n - 1] * a / math.sqrt(n)
    return TruncatedCoefficients(c)


def squeezed_vacuum_coefficients(xi: SqueezingParameter, cutoff: int) -> TruncatedCoefficients:
    """
    c_{2m} = (-1)^m sqrt((2m)!) / (2^m m!) e^{im theta} tanh^m r / sqrt(cosh r); odd entries are zero
    """
    _check_cutoff(cutoff)
    c = np.zeros(cutoff + 1, dtype=complex)
    c[0] = 1 / math.sqrt(math.cosh(xi.r))
    ratio = -cmath.rect(math.tanh(xi.r), xi.theta)
    for n in range(2, cutoff + 1, 2):
        c[n] = c[n - 2] * ratio * math.sqrt((n - 1) / n)
    return TruncatedCoefficients(c)


def displace_through_network(u: UnitaryMatrix, alphas: Sequence[CoherentAmplitude]):
    """
    Output displacements beta_j = sum_i U[i, j] alpha_i
    """
    a = np.asarray(u, dtype=complex)
    if len(alphas) != a.shape[0]:
        raise ValueError(f"{len(alphas)} amplitudes for a {a.shape[0]}-mode network")
    beta = a.T @ np.array([x.alpha for x in alphas], dtype=complex)
    return tuple(CoherentAmplitude(b) for b in beta)


class DisplacedSamplingProblem(NamedTuple):
    beta: tuple
    distribution: FockDistribution


def dspfs_residual_problem(u: UnitaryMatrix, alphas: Sequence[CoherentAmplitude],
                           input_occupation) -> DisplacedSamplingProblem:
    """
    Displaced single-photon inputs leave the network displaced by beta; after
    counter-displacing the outputs by -beta what remains is plain boson sampling.
    """
    beta = displace_through_network(u, alphas)
    return DisplacedSamplingProblem(beta, output_distribution(u, input_occupation))


def pacs_postselection(n: int, alpha_sq, i: int, exact: bool = None):
    """
    Probability of detecting i photons in total from n single-photon-added coherent states:
    C(n, i) alpha_sq^(n-i) / (1 + alpha_sq)^n.
    Fraction inputs are evaluated exactly; floats go through logarithms.
    """
    if n < 0 or not 0 <= i <= n:
        raise ValueError(f"Need 0 <= i <= n, got n={n}, i={i}")
    if alpha_sq < 0:
        raise ValueError(f"|alpha|^2 must be nonnegative, got {alpha_sq}")
    if exact is None:
        exact = isinstance(alpha_sq, Fraction)
    if exact:
        alpha_sq = Fraction(alpha_sq)
        return math.comb(n, i) * alpha_sq ** (n - i) / (1 + alpha_sq) ** n
    if alpha_sq == 0:
        return 1.0 if i == n else 0.0
    log_p = (gammaln(n + 1) - gammaln(i + 1) - gammaln(n - i + 1)
             + (n - i) * math.log(alpha_sq) - n * math.log1p(alpha_sq))
    return math.exp(log_p)


def pacs_normalization(alpha_sq: float, k: int = 1) -> float:
    """
    Normalization 1/sqrt(k! L_k(-|alpha|^2)) of a k-photon-added coherent state
    """
    if k < 0 or alpha_sq < 0:
        raise ValueError(f"Need k >= 0 and alpha_sq >= 0, got k={k}, alpha_sq={alpha_sq}")
    return 1 / math.sqrt(math.factorial(k) * float(eval_laguerre(k, -alpha_sq)))


class PacsRegime(str, Enum):
    BS_HARD = "bs_hard"
    INTERMEDIATE = "intermediate"
    CLASSICALLY_TRIVIAL = "classically_trivial"


def pacs_regime(n: int, alpha_sq: float) -> PacsRegime:
    if n < 1:
        raise ValueError(f"Need n >= 1, got {n}")
    if alpha_sq <= 1 / n:
        return PacsRegime.BS_HARD
    if alpha_sq >= n * n:
        return PacsRegime.CLASSICALLY_TRIVIAL
    return PacsRegime.INTERMEDIATE


def spacs_wigner(alpha: CoherentAmplitude, z: complex) -> float:
    a = alpha.alpha
    return (2 * (abs(2 * z - a) ** 2 - 1) / (math.pi * (1 + abs(a) ** 2))) * math.exp(-2 * abs(z - a) ** 2)


def spacs_wigner_grid(alpha: CoherentAmplitude, extent: float = 3.0, points: int = 61) -> pd.DataFrame:
    """
    Wigner function on a square grid [-extent, extent]^2 centred at the origin
    """
    if points < 1 or extent <= 0:
        raise ValueError(f"Need points >= 1 and extent > 0, got {points}, {extent}")
    axis = np.linspace(-extent, extent, points)
    x, y = np.meshgrid(axis, axis, indexing='ij')
    z = x + 1j * y
    a = alpha.alpha
    w = 2 * (np.abs(2 * z - a) ** 2 - 1) / (np.pi * (1 + abs(a) ** 2)) * np.exp(-2 * np.abs(z - a) ** 2)
    return pd.DataFrame({"x": x.ravel(), "y": y.ravel(), "W": w.ravel()})


class ParityOutcome(tuple):
    """
    Per-mode parity signs: +1 even, -1 odd
    """

    def __new__(cls, signs):
        values = tuple(int(s) for s in signs)
        if not values or any(s not in (1, -1) for s in values):
            raise ValueError(f"Parity signs must be +1 or -1, got {values}")
        return super().__new__(cls, values)

    def __repr__(self):
        return f"ParityOutcome({tuple(self)})"


def occupation_to_parity(s) -> ParityOutcome:
    return ParityOutcome(-1 if c % 2 else 1 for c in OccupationVector(s))


class ParityDistribution(Mapping):
    """
    Parity outcome -> probability, with the input probability lost to truncation
    """

    def __init__(self, entries: dict, truncation_deficit: float):
        self._entries = dict(sorted(entries.items(), reverse=True))
        self.truncation_deficit = truncation_deficit

    def __getitem__(self, key):
        return self._entries[ParityOutcome(key)]

    def __iter__(self):
        return iter(self._entries)

    def __len__(self):
        return len(self._entries)

    def probability(self, signs) -> float:
        return self._entries.get(ParityOutcome(signs), 0.0)

    def distance(self, other) -> float:
        keys = set(self) | set(other)
        return max((abs(self.get(k, 0.0) - other.get(k, 0.0)) for k in keys), default=0.0)

    def to_list(self):
        return [{"signs": list(s), "p": p} for s, p in self._entries.items()]

    def as_dataframe(self) -> pd.DataFrame:
        if not self._entries:
            return pd.DataFrame(columns=["p"])
        m = len(next(iter(self._entries)))
        df = pd.DataFrame([tuple(s) for s in self._entries], columns=[f"sign{j + 1}" for j in range(m)])
        df["p"] = list(self._entries.values())
        return df


def _ladder(coefficients: np.ndarray, subtracted: bool):
    """
    Applies a^+ (or a) to a single-mode coefficient vector, unnormalized
    """
    numbers = np.arange(len(coefficients))
    if subtracted:
        return coefficients[1:] * np.sqrt(numbers[1:])
    return np.concatenate([[0], coefficients * np.sqrt(numbers + 1)])


def _product_state(modes: Sequence[np.ndarray], cutoff: int) -> dict:
    state = {(): 1 + 0j}
    for coefficients in modes:
        grown = {}
        for key, c in state.items():
            budget = cutoff - sum(key)
            for count in range(min(budget, len(coefficients) - 1) + 1):
                if coefficients[count] != 0:
                    grown[key + (count,)] = c * coefficients[count]
        state = grown
    return {OccupationVector(k): c for k, c in state.items()}


def passv_parity_distribution(o: UnitaryMatrix, n: int, xi: SqueezingParameter, cutoff: int,
                              subtracted: bool = False) -> ParityDistribution:
    """
    Parity statistics of squeezed vacua with a photon added to (or subtracted from)
    each of the first n modes, sent through a real orthogonal network.
    The product input is truncated at total photon number <= cutoff, evolved
    exactly within that space and renormalized; the lost probability is reported.
    """
    a = np.asarray(o, dtype=complex)
    m = a.shape[0]
    if np.max(np.abs(a.imag)) > REAL_TOLERANCE:
        raise ValueError("Parity sampling is defined for real orthogonal networks only")
    check_cap("parity sampling mode count", m, PASSV_MAX_MODES)
    check_cap("parity sampling added photons", n, PASSV_MAX_ADDED)
    check_cap("parity sampling cutoff", cutoff, PASSV_MAX_CUTOFF)
    if not 0 <= n <= m:
        raise ValueError(f"Cannot modify {n} of {m} modes")
    if subtracted and xi.r == 0:
        raise ValueError("Photon subtraction from vacuum (r=0) gives the null vector")
    _check_cutoff(cutoff)

    base = squeezed_vacuum_coefficients(xi, cutoff + 1).coefficients
    modes, exact_norm = [], 1.0
    for j in range(m):
        if j < n:
            modes.append(_ladder(base, subtracted)[:cutoff + 1])
            exact_norm *= math.sinh(xi.r) ** 2 if subtracted else math.cosh(xi.r) ** 2
        else:
            modes.append(base[:cutoff + 1])
    state = _product_state(modes, cutoff)
    retained = math.fsum(abs(c) ** 2 for c in state.values())

    evolved = truncated_evolution(o, state, cutoff)
    parities = {}
    for s, amplitude in evolved.items():
        key = occupation_to_parity(s)
        parities[key] = parities.get(key, 0.0) + abs(amplitude) ** 2 / retained
    return ParityDistribution(parities, max(0.0, 1.0 - retained / exact_norm))


def passv_normalization(n: int, xi: SqueezingParameter) -> float:
    """
    (1 + sinh^2 r)^(-n/2)
    """
    if n < 0:
        raise ValueError(f"Need n >= 0, got {n}")
    return (1 + math.sinh(xi.r) ** 2) ** (-n / 2)
