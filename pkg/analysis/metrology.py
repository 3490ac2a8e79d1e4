"""
Phase-estimation analytics for Fourier-conjugated interferometers.

Two families are covered. In the linear-gradient interferometer mode j picks up
(j-1)*phi between a Fourier matrix and its inverse. In the single-phase
interferometer only the first mode does. For each family there are closed forms
of the coincidence permanent, the coincidence probability P(phi) and the
sensitivity obtained by error propagation. These are complemented by a
numeric path through permanents and by shotnoise and Heisenberg baselines.
"""
import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

import numpy as np
from tqdm.contrib.concurrent import thread_map

from analysis.netlib import UnitaryMatrix, haar_unitary, phase_shifter, qft_matrix
from analysis.permanent import permanent_derivative, permanent_fast
from tools import UndefinedSensitivityError

MAX_ANALYTIC_SIZE = 30
SINGULARITY_RADIUS = 1e-8
DEGENERATE_SLOPE = 1e-14
BOUNDARY_PROBABILITY = 1e-12
MAX_SEARCH_TRIALS = 10 ** 4


def error_propagation(P: float, dP: float, runs: int = 1) -> float:
    """
    Phase uncertainty sqrt(P - P^2) / (sqrt(runs) |dP/dphi|).
    :raises UndefinedSensitivityError: when the slope vanishes
    """
    if not -1e-12 <= P <= 1 + 1e-12:
        raise ValueError(f"Probability {P} outside [0, 1]")
    if runs < 1:
        raise ValueError(f"Need at least one run, got {runs}")
    if dP == 0:
        raise UndefinedSensitivityError("Zero slope dP/dphi: phase sensitivity diverges")
    P = min(1.0, max(0.0, P))
    if P in (0.0, 1.0):
        warnings.warn(f"Boundary probability P={P}: uncertainty numerator vanishes, reporting 0")
        return 0.0
    return math.sqrt(P * (1 - P)) / (math.sqrt(runs) * abs(dP))


def mzi_matrix(phi: float) -> UnitaryMatrix:
    e = complex(math.cos(phi), math.sin(phi))
    return UnitaryMatrix(0.5 * np.array([[1 - e, 1j * (1 + e)],
                                         [1j * (1 + e), -(1 - e)]]))


def _check_analytic_size(n: int):
    if not 2 <= n <= MAX_ANALYTIC_SIZE:
        raise ValueError(f"Closed forms are provided for 2 <= n <= {MAX_ANALYTIC_SIZE}, got n={n}")


def mordor_coefficients(n: int):
    """
    a_n(j) = 2j(n-j) and b_n(j) = n^2 - 2jn + 2j^2 for j = 1..n-1
    """
    j = np.arange(1, n, dtype=np.int64)
    return 2 * j * (n - j), n * n - 2 * j * n + 2 * j * j


def mordor_unitary_product(n: int, phi: float, theta: float = 0.0) -> UnitaryMatrix:
    v = np.asarray(qft_matrix(n))
    gradient = np.arange(n)
    Phi = np.asarray(phase_shifter(gradient * phi))
    Theta = np.asarray(phase_shifter(gradient * theta))
    return UnitaryMatrix(v @ Phi @ Theta @ v.conj().T)


def mordor_unitary_closed(n: int, phi: float) -> UnitaryMatrix:
    """
    Entries (1 - e^{in phi}) / (n (omega^{j-k} - e^{i phi})).

    This matrix equals D (V^+ Phi V) D^+ with D = diag(omega^{-j}), that is the
    transpose of the product form V Phi V^+ up to diagonal phase conjugations.
    Permanents coincide; entry moduli agree after transposition.
    """
    if n < 2:
        raise ValueError(f"Need n >= 2, got {n}")
    index = np.arange(n)
    roots = np.exp(2j * np.pi * (np.subtract.outer(index, index) % n) / n)
    e = complex(math.cos(phi), math.sin(phi))
    distance = np.min(np.abs(np.exp(2j * np.pi * index / n) - e))
    if distance < SINGULARITY_RADIUS:
        raise ValueError(f"phi={phi} is within {SINGULARITY_RADIUS:.0e} of a removable singularity "
                         f"of the closed form; use mordor_unitary_product instead")
    return UnitaryMatrix((1 - np.exp(1j * n * phi)) / (n * (roots - e)))


def mordor_permanent_analytic(n: int, phi: float) -> complex:
    _check_analytic_size(n)
    e_n = complex(math.cos(n * phi), math.sin(n * phi))
    product = 1 + 0j
    for j in range(1, n):
        product *= (j * e_n + n - j) / n
    return product


def _mordor_factors(n: int, phi: float, damping: float = 1.0):
    """
    g_j / n^2 with g_j = a_n(j) cos(n phi) damping + b_n(j), evaluated as n^2 - a_n(j)(1 - damping cos)
    """
    a, b = mordor_coefficients(n)
    if damping == 1.0:
        # 1 - cos(x) = 2 sin^2(x/2) keeps small angles accurate
        deficit = 2 * math.sin(n * phi / 2) ** 2
        return (n * n - a * deficit) / (n * n), a / (n * n)
    return (a * math.cos(n * phi) * damping + b) / (n * n), a / (n * n)


def mordor_coincidence(n: int, phi: float) -> float:
    _check_analytic_size(n)
    g, _ = _mordor_factors(n, phi)
    return float(np.prod(g))


def _leave_one_out_sum(g: np.ndarray, a: np.ndarray) -> float:
    # sum_j a_j prod_{i != j} g_i, without dividing by g_j (which may vanish)
    return float(sum(a[j] * np.prod(np.delete(g, j)) for j in range(len(g))))


def mordor_dP(n: int, phi: float) -> float:
    """
    Magnitude of dP/dphi: n |sin(n phi)| sum_j a_n(j) prod_{i != j} g_i / n^{2n-2}
    """
    _check_analytic_size(n)
    g, a = _mordor_factors(n, phi)
    return n * abs(math.sin(n * phi)) * _leave_one_out_sum(g, a)


def mordor_delta_phi_small_angle(n: int) -> float:
    if n < 2:
        raise ValueError(f"Need n >= 2, got {n}")
    return 1 / (2 * math.sqrt(math.comb(n + 1, 3)))


@dataclass(frozen=True)
class MordorModel:
    n: int
    varphi: float
    theta: float = 0.0

    def __post_init__(self):
        _check_analytic_size(self.n)

    @property
    def a(self):
        return mordor_coefficients(self.n)[0]

    @property
    def b(self):
        return mordor_coefficients(self.n)[1]

    @property
    def effective_phase(self) -> float:
        # Phi and Theta are both linear gradients, so only their sum matters
        return self.varphi + self.theta

    def unitary(self) -> UnitaryMatrix:
        return mordor_unitary_product(self.n, self.varphi, self.theta)

    def permanent(self) -> complex:
        return mordor_permanent_analytic(self.n, self.effective_phase)

    def coincidence(self) -> float:
        return mordor_coincidence(self.n, self.effective_phase)

    def dP(self) -> float:
        return mordor_dP(self.n, self.effective_phase)


def qufti_unitary(n: int, phi: float) -> UnitaryMatrix:
    """
    V X V^+ with X the identity except X[0, 0] = e^{i phi}: entries (e^{i phi} + n delta_jk - 1)/n
    """
    if n < 2:
        raise ValueError(f"Need n >= 2, got {n}")
    e = complex(math.cos(phi), math.sin(phi))
    return UnitaryMatrix((np.full((n, n), e - 1) + n * np.eye(n)) / n)


def rencontres(n: int, k: int) -> int:
    """
    Number of permutations of n elements with exactly k fixed points
    """
    if not 0 <= k <= n:
        raise ValueError(f"Need 0 <= k <= n, got n={n}, k={k}")
    alternating = sum((Fraction((-1) ** j, math.factorial(j)) for j in range(n - k + 1)), Fraction(0))
    count = Fraction(math.factorial(n), math.factorial(k)) * alternating
    assert count.denominator == 1
    return int(count)


def _qufti_terms(n: int, phi: float):
    e = complex(math.cos(phi), math.sin(phi))
    # e^{i phi} - 1 = 2i sin(phi/2) e^{i phi/2}, accurate at small angles
    lowered = 2j * math.sin(phi / 2) * complex(math.cos(phi / 2), math.sin(phi / 2))
    raised = lowered + n
    return e, raised, lowered, [rencontres(n, k) for k in range(n + 1)]


def qufti_permanent_analytic(n: int, phi: float) -> complex:
    _check_analytic_size(n)
    _, raised, lowered, counts = _qufti_terms(n, phi)
    return sum(counts[k] * raised ** k * lowered ** (n - k) for k in range(n + 1)) / n ** n


def qufti_coincidence(n: int, phi: float) -> float:
    return abs(qufti_permanent_analytic(n, phi)) ** 2


def qufti_dP(n: int, phi: float) -> float:
    """
    Magnitude of dP/dphi from the derivative of the rencontres expansion
    """
    _check_analytic_size(n)
    e, raised, lowered, counts = _qufti_terms(n, phi)
    value = sum(counts[k] * raised ** k * lowered ** (n - k) for k in range(n + 1)) / n ** n
    slope = 0j
    for k in range(n + 1):
        if k > 0:
            slope += counts[k] * k * raised ** (k - 1) * lowered ** (n - k)
        if k < n:
            slope += counts[k] * (n - k) * raised ** k * lowered ** (n - k - 1)
    slope *= 1j * e / n ** n
    return abs(2 * (value.conjugate() * slope).real)


def qufti_delta_phi(n: int) -> float:
    if n < 2:
        raise ValueError(f"Need n >= 2, got {n}")
    return 1 / (2 * math.sqrt(2) * math.sqrt((n - 1) / n))


class BaselineModel(str, Enum):
    QUFTI_GLOBAL = "qufti_global"
    MORDOR_GRADIENT = "mordor_gradient"
    ORC = "orc"


def resource_count(n: int, model) -> float:
    """
    Photon-equivalent resources N behind the baselines of a model
    """
    model = BaselineModel(model)
    if n < 2:
        raise ValueError(f"Need n >= 2, got {n}")
    if model is BaselineModel.QUFTI_GLOBAL:
        return n
    if model is BaselineModel.MORDOR_GRADIENT:
        return n * (n - 1) * (2 * n - 1) // 6
    return 1 + n * (n - 1) // 2


def snl_hl_baselines(n: int, model=BaselineModel.QUFTI_GLOBAL):
    """
    :return: (shotnoise limit 1/sqrt(N), Heisenberg limit 1/N)
    """
    resources = resource_count(n, model)
    return 1 / math.sqrt(resources), 1 / resources


@dataclass(frozen=True)
class PhaseStrategy:
    """
    Per-mode weights f_j of the unknown phase, compared fairly once sum f_j = 1
    """
    weights: tuple
    name: str = field(default="custom", compare=False)

    def __post_init__(self):
        weights = tuple(float(w) for w in self.weights)
        if not weights:
            raise ValueError("A strategy needs at least one weight")
        if min(weights) < 0 or not all(math.isfinite(w) for w in weights):
            raise ValueError(f"Weights must be finite and nonnegative, got {weights}")
        if sum(weights) == 0:
            raise ValueError("Weights must not all vanish")
        object.__setattr__(self, 'weights', weights)

    @property
    def size(self) -> int:
        return len(self.weights)

    def normalize(self):
        total = math.fsum(self.weights)
        normalized = tuple(w / total for w in self.weights)
        # f_j < 1 holds unless one mode carries all the weight (the delta strategy)
        assert all(0 <= f <= 1 for f in normalized)
        return PhaseStrategy(normalized, self.name)

    @classmethod
    def named(cls, name: str, n: int):
        j = np.arange(1, n + 1, dtype=float)
        table = {
            "constant": np.full(n, 1.0 / n),
            "sub-linear": np.sqrt(j - 1),
            "linear": j - 1,
            "quadratic": (j - 1) ** 2,
            "exponential": 2.0 ** j,
            "delta": (j == 1).astype(float),
        }
        if name not in table:
            raise ValueError(f"Unknown strategy '{name}', expected one of {sorted(table)}")
        return cls(tuple(table[name]), name).normalize()

    @staticmethod
    def names():
        return ["constant", "sub-linear", "linear", "quadratic", "exponential", "delta"]


@dataclass(frozen=True)
class SensitivityReport:
    n: int
    varphi: float
    P: float
    dP_dphi: float
    delta_phi: float
    snl: float
    hl: float
    is_defined: bool = True

    def __post_init__(self):
        assert -1e-12 <= self.P <= 1 + 1e-12
        assert self.hl <= self.snl

    @property
    def is_sub_shotnoise(self) -> bool:
        return self.is_defined and self.delta_phi < self.snl

    def as_dict(self):
        return {"n": self.n, "phi": self.varphi, "P": self.P, "dP": self.dP_dphi, "delta_phi": self.delta_phi,
                "snl": self.snl, "hl": self.hl, "defined": self.is_defined}


def _strategy_network(w: np.ndarray, weights: np.ndarray, phi: float) -> np.ndarray:
    return (w * np.exp(1j * weights * phi)) @ w.conj().T


def _sensitivity(n, phi, P, dP, baseline, slope_floor: float = DEGENERATE_SLOPE) -> SensitivityReport:
    snl, hl = snl_hl_baselines(n, baseline)
    # a flat slope or a pinned probability carries no phase information
    if abs(dP) < slope_floor or not BOUNDARY_PROBABILITY < P < 1 - BOUNDARY_PROBABILITY:
        return SensitivityReport(n, phi, P, dP, math.inf, snl, hl, is_defined=False)
    return SensitivityReport(n, phi, P, dP, error_propagation(P, dP), snl, hl)


def strategy_sensitivity(n: int, strategy: PhaseStrategy, phi: float, network: Optional[UnitaryMatrix] = None,
                         exact_slope: bool = False, baseline=BaselineModel.QUFTI_GLOBAL) -> SensitivityReport:
    """
    Sensitivity of U = W diag(e^{i f_j phi}) W^+, W the Fourier matrix unless given.
    The slope is a central difference with step 1e-6 max(1, |phi|), or the exact
    first-order permanent expansion when exact_slope is set.
    """
    if strategy.size != n:
        raise ValueError(f"Strategy has {strategy.size} weights for {n} modes")
    w = np.asarray(network if network is not None else qft_matrix(n), dtype=complex)
    if w.shape != (n, n):
        raise ValueError(f"Network shape {w.shape} does not match n={n}")
    weights = np.asarray(strategy.normalize().weights)

    perm = permanent_fast(_strategy_network(w, weights, phi))
    P = abs(perm) ** 2
    slope_floor = DEGENERATE_SLOPE
    if exact_slope:
        du = (w * (1j * weights * np.exp(1j * weights * phi))) @ w.conj().T
        dP = 2 * (perm.conjugate() * permanent_derivative(_strategy_network(w, weights, phi), du)).real
    else:
        h = 1e-6 * max(1.0, abs(phi))
        upper = abs(permanent_fast(_strategy_network(w, weights, phi + h))) ** 2
        lower = abs(permanent_fast(_strategy_network(w, weights, phi - h))) ** 2
        dP = (upper - lower) / (2 * h)
        # rounding in the Ryser sum over 2^n subsets, amplified by 1/h
        slope_floor += n * n * 2 ** n * np.finfo(float).eps / h
    return _sensitivity(n, phi, min(1.0, P), abs(dP), baseline, slope_floor)


def mordor_sensitivity(n: int, phi: float, baseline=BaselineModel.MORDOR_GRADIENT) -> SensitivityReport:
    return _sensitivity(n, phi, mordor_coincidence(n, phi), mordor_dP(n, phi), baseline)


def qufti_sensitivity(n: int, phi: float, baseline=BaselineModel.QUFTI_GLOBAL) -> SensitivityReport:
    return _sensitivity(n, phi, min(1.0, qufti_coincidence(n, phi)), qufti_dP(n, phi), baseline)


def _damping(n: int, chi_sq: float) -> float:
    if chi_sq < 0:
        raise ValueError(f"Mean-square dephasing must be nonnegative, got {chi_sq}")
    return math.exp(-n * n * chi_sq / 2)


def dephased_coincidence(n: int, phi: float, chi_sq: float) -> float:
    """
    Gradient-interferometer coincidence with cos(n phi) damped by exp(-n^2 chi_sq / 2)
    """
    _check_analytic_size(n)
    g, _ = _mordor_factors(n, phi, _damping(n, chi_sq))
    return float(np.prod(g))


def dephased_dP(n: int, phi: float, chi_sq: float) -> float:
    _check_analytic_size(n)
    damping = _damping(n, chi_sq)
    g, a = _mordor_factors(n, phi, damping)
    return n * damping * abs(math.sin(n * phi)) * _leave_one_out_sum(g, a)


def dephased_delta_phi(n: int, phi: float, chi_sq: float) -> float:
    return error_propagation(dephased_coincidence(n, phi, chi_sq), dephased_dP(n, phi, chi_sq))


def dephased_sensitivity(n: int, phi: float, chi_sq: float,
                         baseline=BaselineModel.MORDOR_GRADIENT) -> SensitivityReport:
    return _sensitivity(n, phi, dephased_coincidence(n, phi, chi_sq), dephased_dP(n, phi, chi_sq), baseline)


def efficiency(n: int, eta_source: float, eta_detector: float) -> float:
    for name, rate in (("source", eta_source), ("detector", eta_detector)):
        if not 0.0 <= rate <= 1.0:
            raise ValueError(f"{name} efficiency {rate} outside [0, 1]")
    return (eta_source * eta_detector) ** n


class OptimalitySearchReport(NamedTuple):
    n: int
    trials: int
    phi: float
    qft_delta_phi: float
    sample_min: Optional[float]
    sample_mean: Optional[float]
    values: Sequence[float]

    @property
    def qft_is_optimal(self) -> bool:
        return self.sample_min is None or self.qft_delta_phi <= self.sample_min


def _delta_strategy_delta_phi(w: np.ndarray, phi: float) -> float:
    n = w.shape[0]
    delta = PhaseStrategy.named("delta", n)
    return strategy_sensitivity(n, delta, phi, network=w, exact_slope=True).delta_phi


def qft_optimality_search(n: int, trials: int, rng: np.random.Generator, phi: float = 1e-4,
                          threads: int = 1, progress: bool = False) -> OptimalitySearchReport:
    """
    Delta-strategy sensitivity of the Fourier matrix against Haar-random networks W.
    Every trial draws from its own generator seeded from rng, so the sample does
    not depend on the worker count.
    """
    if not 2 <= n <= 6:
        raise ValueError(f"Optimality search supports 2 <= n <= 6, got {n}")
    if not 0 <= trials <= MAX_SEARCH_TRIALS:
        raise ValueError(f"Trial count {trials} outside [0, {MAX_SEARCH_TRIALS}]")
    seeds = rng.integers(0, 2 ** 62, size=trials)

    def trial(seed):
        w = np.asarray(haar_unitary(n, np.random.default_rng(int(seed))))
        return _delta_strategy_delta_phi(w, phi)

    values = list(thread_map(trial, seeds, max_workers=max(1, threads), disable=not progress,
                             desc="Random networks")) if trials else []
    qft = _delta_strategy_delta_phi(np.asarray(qft_matrix(n)), phi)
    if not values:
        return OptimalitySearchReport(n, 0, phi, qft, None, None, [])
    return OptimalitySearchReport(n, trials, phi, qft, float(np.min(values)), float(np.mean(values)), values)
