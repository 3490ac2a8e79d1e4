"""
Cross-oracle suites: closed forms and independent algorithms checked against each other.
"""
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import pandas as pd
from tqdm import tqdm

from analysis import fock, metrology, netlib, permanent, variants
from analysis.presets import load_complex_matrix
from tools import relative_error
from tools.timeit import Timeit

SUITES = ("permanents", "amplitudes", "mordor", "qufti", "passv", "pacs", "optimality")

DEFAULT_CAPS = {
    "verify_matrices": 500,
    "verify_max_n": 12,
    "verify_phi_points": 25,
    "verify_unitaries": 100,
    "optimality_trials": 300,
}


@dataclass
class CheckRecord:
    suite: str
    case: str
    residual: float
    tolerance: float
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance)

    def as_dict(self):
        return {"suite": self.suite, "case": self.case, "residual": self.residual,
                "tolerance": self.tolerance, "passed": self.passed, **self.details}


class VerificationReport:

    def __init__(self, records=None):
        self.records = list(records or [])

    def extend(self, records):
        self.records.extend(records)
        return self

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def failures(self):
        return [r for r in self.records if not r.passed]

    def suites(self):
        return sorted({r.suite for r in self.records})

    def max_residual(self, suite: str = None) -> float:
        residuals = [r.residual for r in self.records if suite is None or r.suite == suite]
        return max(residuals, default=0.0)

    def summary(self):
        return {suite: {"checks": sum(1 for r in self.records if r.suite == suite),
                        "max_residual": self.max_residual(suite),
                        "passed": all(r.passed for r in self.records if r.suite == suite)}
                for suite in self.suites()}

    def as_dataframe(self) -> pd.DataFrame:
        return pd.DataFrame([r.as_dict() for r in self.records])

    def to_dict(self):
        return {"passed": self.passed,
                "summary": self.summary(),
                "failures": [r.as_dict() for r in self.failures()],
                "records": [r.as_dict() for r in self.records]}


def _random_complex(rng, n):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


@Timeit("Verifying permanent algorithms")
def verify_permanents(rng: np.random.Generator, matrices: int = 500, tolerance: float = 1e-10):
    records = []
    sizes = rng.integers(2, 8, size=matrices)
    for index, n in enumerate(tqdm(sizes, desc="permanents")):
        m = _random_complex(rng, int(n))
        definitional = permanent.permanent_definitional(m)
        laplace = permanent.permanent_laplace(m)
        fast = permanent.permanent_fast(m)
        residual = max(relative_error(definitional, laplace), relative_error(definitional, fast),
                       relative_error(laplace, fast))
        records.append(CheckRecord("permanents", f"random-{index}-n{n}", residual, tolerance, {"n": int(n)}))
    for n in range(1, 13):
        value = permanent.permanent_fast(np.ones((n, n)))
        records.append(CheckRecord("permanents", f"all-ones-n{n}",
                                   relative_error(value, math.factorial(n)), tolerance, {"n": n}))
    return records


def phi_grid(points: int):
    return np.linspace(-math.pi + 0.05, math.pi - 0.05, points)


def _closed_form_records(suite, analytic, numeric, coincidence, max_n, points, tolerance):
    records = []
    for n in tqdm(range(2, max_n + 1), desc=suite):
        for phi in phi_grid(points):
            phi = float(phi)
            expected = analytic(n, phi)
            value = permanent.permanent_fast(numeric(n, phi))
            rel_err = relative_error(expected, value)
            records.append(CheckRecord(suite, f"permanent-n{n}-phi{phi:.6f}", rel_err, tolerance,
                                       {"n": n, "phi": phi, "analytic": [expected.real, expected.imag],
                                        "numeric": [value.real, value.imag], "rel_err": rel_err}))
            records.append(CheckRecord(suite, f"coincidence-n{n}-phi{phi:.6f}",
                                       abs(abs(expected) ** 2 - coincidence(n, phi)), 1e-12,
                                       {"n": n, "phi": phi}))
    return records


@Timeit("Verifying gradient interferometer closed forms")
def verify_mordor(max_n: int = 12, points: int = 25, tolerance: float = 1e-9):
    return _closed_form_records("mordor", metrology.mordor_permanent_analytic, metrology.mordor_unitary_product,
                                metrology.mordor_coincidence, max_n, points, tolerance)


@Timeit("Verifying single-phase interferometer closed forms")
def verify_qufti(max_n: int = 12, points: int = 25, tolerance: float = 1e-9):
    return _closed_form_records("qufti", metrology.qufti_permanent_analytic, metrology.qufti_unitary,
                                metrology.qufti_coincidence, max_n, points, tolerance)


@Timeit("Verifying squeezing independence of parity sampling")
def verify_passv(cutoff: int = 20, tolerance: float = 1e-6):
    records = []
    for eta in (0.3, 0.5, 0.8):
        o = netlib.beamsplitter_unitary(netlib.BeamsplitterElement(0, 1, eta, 0.0), 2)
        reference = fock.output_distribution(o, (1, 0)).map_outcomes(variants.occupation_to_parity)
        for r in (0.0, 0.2, 0.4):
            parity = variants.passv_parity_distribution(o, 1, variants.SqueezingParameter(r), cutoff)
            records.append(CheckRecord("passv", f"eta{eta}-r{r}", parity.distance(reference), tolerance,
                                       {"eta": eta, "r": r, "truncation_deficit": parity.truncation_deficit}))
    return records


@Timeit("Verifying post-selection statistics")
def verify_pacs(max_exact_n: int = 20, tolerance: float = 1e-5):
    records = []
    for alpha_sq in (Fraction(1, 3), Fraction(2), Fraction(7, 5)):
        for n in range(1, max_exact_n + 1):
            total = sum(variants.pacs_postselection(n, alpha_sq, i) for i in range(n + 1))
            records.append(CheckRecord("pacs", f"normalization-n{n}-alpha_sq{alpha_sq}",
                                       float(abs(total - 1)), 0.0, {"n": n}))
    n = 10 ** 6
    records.append(CheckRecord("pacs", "all-detected-at-1/n",
                               abs(variants.pacs_postselection(n, 1 / n, n) - 1 / math.e), tolerance, {"n": n}))
    records.append(CheckRecord("pacs", "vacuum-at-n^2",
                               abs(variants.pacs_postselection(n, float(n) ** 2, 0) - 1.0), tolerance, {"n": n}))
    return records


@Timeit("Verifying amplitudes against the polynomial expansion")
def verify_amplitudes(rng: np.random.Generator, unitaries: int = 100, tolerance: float = 1e-10):
    records = []
    for index in tqdm(range(unitaries), desc="amplitudes"):
        m = int(rng.integers(2, 6))
        n = int(rng.integers(1, 4))
        u = netlib.haar_unitary(m, rng)
        k = fock.enumerate_configurations(m, n)[int(rng.integers(0, fock.configuration_count(m, n)))]
        oracle = fock.polynomial_oracle(u, k)
        residual = max(abs(fock.amplitude(u, k, s) - oracle.amplitude(k, s))
                       for s in fock.enumerate_configurations(m, n))
        records.append(CheckRecord("amplitudes", f"haar-{index}-m{m}-k{','.join(map(str, k))}", residual, tolerance,
                                   {"m": m, "n": n}))
    return records


@Timeit("Comparing the Fourier network against random networks")
def verify_optimality(rng: np.random.Generator, trials: int = 300, tolerance: float = 1e-6, threads: int = 1):
    records = []
    for n in range(2, 6):
        search = metrology.qft_optimality_search(n, trials, rng, threads=threads)
        excess = 0.0 if search.sample_min is None else max(0.0, search.qft_delta_phi / search.sample_min - 1)
        records.append(CheckRecord("optimality", f"qft-delta-strategy-n{n}", excess, tolerance,
                                   {"n": n, "qft": search.qft_delta_phi, "sample_min": search.sample_min,
                                    "sample_mean": search.sample_mean}))
    return records


def verify_matrix_file(path: str, tolerance: float = netlib.UNITARITY_TOLERANCE):
    """
    Unitarity of a user-supplied matrix and normalization of its one-photon distributions
    """
    matrix = load_complex_matrix(path)
    if not matrix.is_square():
        return [CheckRecord("matrix", f"matrix-unitarity:{path}", math.inf, tolerance, {"shape": list(matrix.shape)})]
    residual = netlib.unitarity_residual(matrix)
    records = [CheckRecord("matrix", f"matrix-unitarity:{path}", residual, tolerance)]
    if residual <= tolerance:
        u = netlib.UnitaryMatrix(matrix)
        for mode in range(u.dimension):
            occupation = tuple(int(j == mode) for j in range(u.dimension))
            total = math.fsum(abs(fock.amplitude(u, occupation, s)) ** 2
                              for s in fock.enumerate_configurations(u.dimension, 1))
            records.append(CheckRecord("matrix", f"matrix-normalization:{path}:mode{mode}", abs(total - 1),
                                       fock.NORMALIZATION_TOLERANCE))
    return records


def run_suites(names, rng: np.random.Generator, caps: dict = None, matrix_path: str = None,
               threads: int = 1) -> VerificationReport:
    """
    Runs the named suites in order; every suite consumes the shared generator,
    so a fixed seed and suite list reproduce the report.
    """
    caps = {**DEFAULT_CAPS, **(caps or {})}
    report = VerificationReport()
    for name in names:
        if name == "permanents":
            report.extend(verify_permanents(rng, caps["verify_matrices"]))
        elif name == "amplitudes":
            report.extend(verify_amplitudes(rng, caps["verify_unitaries"]))
        elif name == "optimality":
            report.extend(verify_optimality(rng, caps["optimality_trials"], threads=threads))
        elif name == "mordor":
            report.extend(verify_mordor(caps["verify_max_n"], caps["verify_phi_points"]))
        elif name == "qufti":
            report.extend(verify_qufti(caps["verify_max_n"], caps["verify_phi_points"]))
        elif name == "passv":
            report.extend(verify_passv())
        elif name == "pacs":
            report.extend(verify_pacs())
        else:
            raise ValueError(f"Unknown suite '{name}', expected one of {SUITES}")
    if matrix_path is not None:
        report.extend(verify_matrix_file(matrix_path))
    return report
