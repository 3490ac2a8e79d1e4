import math
import warnings

import numpy as np
import pandas as pd

from analysis import fock, metrology, netlib, variants, verification
from analysis.fock import OccupationVector
from analysis.presets import load_matrix
from tools import check_cap, parse_int_range
from tools.configuration import Configuration
from tools import packages_info

from .resultfile import ResultFile

SENSITIVITY_COLUMNS = ["n", "phi", "P", "dP", "delta_phi", "snl", "hl", "delta_phi_closed", "sub_shotnoise",
                       "defined"]


def parse_alpha_sq_sweep(text: str):
    """
    'lo:hi:count' gives count log-spaced values, otherwise a comma separated list
    """
    if ':' in text:
        parts = text.split(':')
        if len(parts) != 3:
            raise ValueError(f"Expected lo:hi:count, got '{text}'")
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
        if not 0 < lo <= hi or count < 1:
            raise ValueError(f"Need 0 < lo <= hi and count >= 1, got '{text}'")
        return [float(x) for x in np.logspace(math.log10(lo), math.log10(hi), count)]
    values = [float(part) for part in text.split(',') if part.strip()]
    if not values:
        raise ValueError(f"No |alpha|^2 values in '{text}'")
    return values


class ReportCreator:

    def __init__(self, config: Configuration):
        self.configuration = config
        self.subcommand = config.subcommand
        self.parameters = config.get_parameters()
        self.rng = np.random.default_rng(config.get_seed())
        self._threads = 1
        self._show_progress = False
        self.verification = None

    def set_threads(self, threads: int):
        self._threads = max(1, int(threads))
        return self

    def show_progress(self, do_show: bool = True):
        self._show_progress = do_show
        return self

    @property
    def has_failures(self) -> bool:
        return self.verification is not None and not self.verification.passed

    def _meta(self):
        release = self.configuration.get_release_data_info()
        return {
            "tool": "fockstat",
            "version": release['develop_version'],
            "subcommand": self.subcommand,
            "seed": self.configuration.get_seed(),
            "parameters": self.parameters,
            "caps": self.configuration.get_caps(),
            "libraries": packages_info.get_libraries_info(),
        }

    def create(self) -> ResultFile:
        makers = {
            'sample': self.make_sample_report,
            'distribution': self.make_distribution_report,
            'sensitivity': self.make_sensitivity_report,
            'verify': self.make_verify_report,
            'wigner': self.make_wigner_report,
            'pacs': self.make_pacs_report,
            'baselines': self.make_baselines_report,
            'reck': self.make_reck_report,
            'embed': self.make_embed_report,
        }
        table, document = makers[self.subcommand]()
        return ResultFile(self._meta(), table, document).stamp()

    def _load_instance(self):
        args = self.configuration.args
        k = OccupationVector.parse(args.input)
        u = load_matrix(args.matrix, modes=len(k))
        check_cap("photon number", k.total, self.configuration.get_cap("max_fast_permanent_size"))
        regime = fock.validate_bs_instance(len(k), max(1, k.total), strict=self.configuration.do_strict_validation())
        if self.configuration.do_strict_validation() and not regime.is_ok:
            raise ValueError("; ".join(regime.messages))
        for message in regime.messages:
            warnings.warn(message)
        return u, k

    def _distribution(self, u, k):
        return fock.output_distribution(u, k, threads=self._threads, progress=self._show_progress,
                                        max_configurations=self.configuration.get_cap("max_configurations"))

    def make_sample_report(self):
        u, k = self._load_instance()
        dist = self._distribution(u, k)
        draws = fock.sample(dist, self.configuration.args.count, self.rng)
        columns = [f"s{j + 1}" for j in range(len(k))]
        table = pd.DataFrame([tuple(s) for s in draws], columns=columns, dtype=int)
        return table, {"input": list(k), "samples": [list(s) for s in draws]}

    def make_distribution_report(self):
        u, k = self._load_instance()
        dist = self._distribution(u, k)
        return dist.as_dataframe(), {"input": list(k), **dist.to_dict()}

    def _sensitivity_rows(self, family: str, ns, phi: float, baseline, chi_sq: float):
        if family == 'mordor':
            baseline = baseline or metrology.BaselineModel.MORDOR_GRADIENT
            for n in ns:
                if chi_sq > 0:
                    report = metrology.dephased_sensitivity(n, phi, chi_sq, baseline)
                    closed = math.nan
                else:
                    report = metrology.mordor_sensitivity(n, phi, baseline)
                    closed = metrology.mordor_delta_phi_small_angle(n)
                yield report, closed
        elif family == 'qufti':
            baseline = baseline or metrology.BaselineModel.QUFTI_GLOBAL
            for n in ns:
                yield metrology.qufti_sensitivity(n, phi, baseline), metrology.qufti_delta_phi(n)
        elif family.startswith('strategy:'):
            name = family.split(':', 1)[1]
            baseline = baseline or metrology.BaselineModel.QUFTI_GLOBAL
            for n in ns:
                check_cap("strategy network size", n, self.configuration.get_cap("max_fast_permanent_size"))
                strategy = metrology.PhaseStrategy.named(name, n)
                yield metrology.strategy_sensitivity(n, strategy, phi, exact_slope=True, baseline=baseline), math.nan
        else:
            raise ValueError(f"Unknown family '{family}', expected mordor, qufti or strategy:<name>")

    def make_sensitivity_report(self):
        args = self.configuration.args
        ns = parse_int_range(args.n)
        if not ns or min(ns) < 2:
            raise ValueError(f"Photon numbers must be >= 2, got '{args.n}'")
        check_cap("photon number", max(ns), metrology.MAX_ANALYTIC_SIZE)
        if args.chi_sq and args.family != 'mordor':
            raise ValueError("Dephasing is modelled for the mordor family only")
        baseline = metrology.BaselineModel(args.baselines) if args.baselines else None

        rows = []
        for report, closed in self._sensitivity_rows(args.family, ns, args.phi, baseline, args.chi_sq):
            row = report.as_dict()
            row.update({"delta_phi_closed": closed, "sub_shotnoise": report.is_sub_shotnoise})
            rows.append(row)
        table = pd.DataFrame(rows, columns=SENSITIVITY_COLUMNS)
        return table, table.to_dict(orient='records')

    def make_verify_report(self):
        args = self.configuration.args
        names = verification.SUITES if 'all' in args.suite else tuple(dict.fromkeys(args.suite))
        self.verification = verification.run_suites(names, self.rng, caps=self.configuration.get_caps(),
                                                    matrix_path=args.matrix_file, threads=self._threads)
        return self.verification.as_dataframe(), self.verification.to_dict()

    def make_wigner_report(self):
        args = self.configuration.args
        table = variants.spacs_wigner_grid(variants.CoherentAmplitude(args.alpha), args.extent, args.points)
        return table, None

    def make_pacs_report(self):
        args = self.configuration.args
        rows = []
        for alpha_sq in parse_alpha_sq_sweep(args.alpha_sq):
            rows.append({
                "n": args.n,
                "alpha_sq": alpha_sq,
                "regime": variants.pacs_regime(args.n, alpha_sq).value,
                "p_all_detected": variants.pacs_postselection(args.n, alpha_sq, args.n),
                "p_vacuum": variants.pacs_postselection(args.n, alpha_sq, 0),
                "normalization": variants.pacs_normalization(alpha_sq),
            })
        return pd.DataFrame(rows), None

    def make_baselines_report(self):
        args = self.configuration.args
        model = metrology.BaselineModel(args.model)
        rows = []
        for n in parse_int_range(args.n):
            snl, hl = metrology.snl_hl_baselines(n, model)
            rows.append({"n": n, "model": model.value, "N": metrology.resource_count(n, model), "snl": snl, "hl": hl})
        return pd.DataFrame(rows), None

    def make_reck_report(self):
        u = load_matrix(self.configuration.args.matrix)
        decomposition = netlib.reck_decompose(u)
        residual = netlib.recompose(decomposition).max_distance(u)

        rows = [{"kind": "beamsplitter", "mode_p": e.mode_p, "mode_q": e.mode_q, "eta": e.eta, "tau": e.tau}
                for e in decomposition.elements]
        rows += [{"kind": "phase", "mode_p": j, "mode_q": j, "eta": math.nan, "tau": phase}
                 for j, phase in enumerate(decomposition.output_phases)]
        table = pd.DataFrame(rows, columns=["kind", "mode_p", "mode_q", "eta", "tau"])
        return table, {"decomposition": decomposition.to_dict(), "recompose_residual": residual}

    def make_embed_report(self):
        u = load_matrix(self.configuration.args.matrix)
        o = netlib.embed_su_in_so(u)
        real = np.asarray(o).real
        rows, cols = np.indices(real.shape)
        table = pd.DataFrame({"row": rows.ravel(), "col": cols.ravel(), "value": real.ravel()})
        return table, {"matrix": o.to_dict(), "orthogonality_residual": netlib.unitarity_residual(o)}
