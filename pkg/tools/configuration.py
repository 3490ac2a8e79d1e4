import os
import sys
import argparse
import json
import warnings

here = os.path.dirname(os.path.abspath(__file__))

SUBCOMMANDS = ('sample', 'distribution', 'sensitivity', 'verify', 'wigner', 'pacs', 'baselines', 'reck', 'embed')
SUITES = ('permanents', 'amplitudes', 'mordor', 'qufti', 'passv', 'pacs', 'optimality')
BASELINE_MODELS = ('qufti_global', 'mordor_gradient', 'orc')

# subcommands whose natural output is a nested document rather than a table
JSON_DEFAULT_SUBCOMMANDS = ('verify', 'reck', 'embed')

MAX_SEED = 2 ** 64 - 1


class WritableFile(argparse.Action):

    def __call__(self, parser, namespace, values, option_string=None):
        file_name = os.path.abspath(os.path.expanduser(values))
        if os.path.isdir(file_name):
            raise argparse.ArgumentError(self, "{0} is a directory.".format(file_name))
        parent_dir = os.path.dirname(file_name)
        if not os.path.isdir(parent_dir):
            raise argparse.ArgumentError(self, "Directory {0} does not exist.".format(parent_dir))
        if not os.access(parent_dir, os.W_OK):
            raise argparse.ArgumentError(self, "Directory {0} is not writable.".format(parent_dir))

        setattr(namespace, self.dest, file_name)


class ReadableFile(argparse.Action):
    def __call__(self, parser, namespace, values, option_string=None):
        file_name = os.path.abspath(os.path.expanduser(values))
        if not os.path.exists(file_name):
            raise argparse.ArgumentError(self, "file:{0} does not exists".format(file_name))
        if not os.path.isfile(file_name):
            raise argparse.ArgumentError(self, "{0} is not a file".format(file_name))
        if not os.access(file_name, os.R_OK):
            raise argparse.ArgumentError(self, "file:{0} is not a readable".format(file_name))

        setattr(namespace, self.dest, file_name)


def seed_value(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value <= MAX_SEED:
        raise argparse.ArgumentTypeError(f"seed {text} is not a 64-bit unsigned integer")
    return value


def positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"{text} is not a positive integer")
    return value


class Configuration(dict):
    release_data_dict = None

    @classmethod
    def get_release_data_info(cls):
        if not cls.release_data_dict:
            cls.release_data_dict = cls._read_release_data()
        return cls.release_data_dict

    @classmethod
    def _read_release_data(cls):
        release_data_file_path = os.path.join(here, 'release_data.json')
        with open(release_data_file_path) as release_json_file:
            return json.load(release_json_file)

    @classmethod
    def _read_config_data(cls, path):
        with open(path) as f:
            return json.load(f)

    def __init__(self, args_orig, **kwargs):
        dict.__init__(self, **kwargs)

        self.args = self._parse_sys_argv(args_orig)
        self.subcommand = self.args.subcommand

        self._set_default_configuration()
        if self.args.config_file:
            try:
                read_config = self._read_config_data(self.args.config_file)
            except (OSError, ValueError) as e:
                raise ValueError(f"Cannot read config file {self.args.config_file}: {e}")
            if not isinstance(read_config, dict):
                raise ValueError(f"Config file {self.args.config_file} must hold a JSON object")
            unknown = sorted(set(read_config) - set(self))
            if unknown:
                warnings.warn(f"Unknown configuration keys ignored: {unknown}")
            print("Read config", read_config, file=sys.stderr)
            self.update({k: int(v) for k, v in read_config.items() if k in self})

    def _set_default_configuration(self):
        self.update({
            "max_configurations": 10 ** 7,
            "max_sector_size": 10 ** 5,
            "max_fast_permanent_size": 30,
            "max_oracle_photons": 6,
            "max_oracle_modes": 8,
            "verify_matrices": 500,
            "verify_max_n": 12,
            "verify_phi_points": 25,
            "verify_unitaries": 100,
            "optimality_trials": 300,
        })

    def get_seed(self) -> int:
        return self.args.seed

    def get_threads(self) -> int:
        return self.args.threads

    def get_output_path(self):
        return self.args.out

    def get_format(self) -> str:
        if self.args.format:
            return self.args.format
        return 'json' if self.subcommand in JSON_DEFAULT_SUBCOMMANDS else 'csv'

    def do_strict_validation(self) -> bool:
        return self.args.strict

    def get_cap(self, name: str) -> int:
        return self[name]

    def get_caps(self) -> dict:
        return dict(self)

    def get_parameters(self) -> dict:
        """
        Subcommand parameters echoed into result files; output location and
        worker count do not change the payload and are left out.
        """
        excluded = {'subcommand', 'out', 'threads', 'config_file'}
        return {k: v for k, v in sorted(vars(self.args).items()) if k not in excluded}

    @classmethod
    def _common_parser(cls):
        common = argparse.ArgumentParser(add_help=False)
        common.add_argument('--seed', type=seed_value, default=0, help="Seed of the random generator (u64)")
        common.add_argument('--out', action=WritableFile, help="Result file path (stdout if omitted)")
        common.add_argument('--format', choices=['json', 'csv'], help="Result file format")
        common.add_argument('--threads', type=positive_int, default=os.cpu_count() or 1,
                            help="Worker threads (results do not depend on it)")
        common.add_argument('--strict', action='store_true',
                            help="Also require the hiding regime n <= m^(1/6) for sampling instances")
        common.add_argument('-c', '--config-file', action=ReadableFile, help="JSON file overriding size caps")
        return common

    @classmethod
    def _parse_sys_argv(cls, argv):
        release_info = cls.get_release_data_info()
        parser = argparse.ArgumentParser(prog='fockstat',
                                         description='Linear-optics toolkit: boson sampling distributions, '
                                                     'interferometric phase sensitivity and cross-checked '
                                                     'closed forms, written as CSV or JSON')
        parser.add_argument('-v', '--version', action='version', version='%(prog)s ' + release_info['develop_version'])
        common = cls._common_parser()
        subparsers = parser.add_subparsers(dest='subcommand', metavar='subcommand')
        subparsers.required = True

        matrix_help = ("identity[:n], bs5050, mzi:<phi>, qft:<n>, mordor:<n>:<phi>, qufti:<n>:<phi>, "
                       "haar:<n>:<seed>, orth:<n>:<seed>, reck:<n>:<seed> or a matrix JSON file")

        sample = subparsers.add_parser('sample', parents=[common], help="Draw output configurations")
        sample.add_argument('--matrix', required=True, help=matrix_help)
        sample.add_argument('--input', required=True, help="Input occupation, e.g. 1,1,0")
        sample.add_argument('--count', type=int, default=1000, help="Number of draws")

        distribution = subparsers.add_parser('distribution', parents=[common], help="Exact output distribution")
        distribution.add_argument('--matrix', required=True, help=matrix_help)
        distribution.add_argument('--input', required=True, help="Input occupation, e.g. 1,1,0")

        sensitivity = subparsers.add_parser('sensitivity', parents=[common], help="Phase-sensitivity sweep over n")
        sensitivity.add_argument('--family', required=True,
                                 help="mordor, qufti or strategy:<name> (constant, sub-linear, linear, "
                                      "quadratic, exponential, delta)")
        sensitivity.add_argument('--n', default='2..10', help="Photon numbers: 5, 2..10 or 2,4,8")
        sensitivity.add_argument('--phi', type=float, default=1e-4, help="Working point of the unknown phase")
        sensitivity.add_argument('--baselines', choices=BASELINE_MODELS,
                                 help="Resource model of the shotnoise and Heisenberg columns")
        sensitivity.add_argument('--chi-sq', type=float, default=0.0,
                                 help="Mean-square dephasing of the gradient interferometer")

        verify = subparsers.add_parser('verify', parents=[common], help="Run cross-oracle verification suites")
        verify.add_argument('--suite', nargs='+', choices=SUITES + ('all',), default=['all'])
        verify.add_argument('--matrix-file', action=ReadableFile, help="Also check unitarity of this matrix file")

        wigner = subparsers.add_parser('wigner', parents=[common], help="Photon-added coherent state Wigner grid")
        wigner.add_argument('--alpha', type=complex, default=0j, help="Coherent amplitude, e.g. 0.5+0.2j")
        wigner.add_argument('--extent', type=float, default=3.0, help="Half width of the square grid")
        wigner.add_argument('--points', type=positive_int, default=61, help="Grid points per axis")

        pacs = subparsers.add_parser('pacs', parents=[common], help="Post-selection statistics table")
        pacs.add_argument('--n', type=positive_int, required=True, help="Number of photon-added coherent states")
        pacs.add_argument('--alpha-sq', default='1e-4:1e4:33',
                          help="|alpha|^2 values: lo:hi:count (log spaced) or a comma separated list")

        baselines = subparsers.add_parser('baselines', parents=[common], help="Shotnoise and Heisenberg baselines")
        baselines.add_argument('--model', choices=BASELINE_MODELS, default='qufti_global')
        baselines.add_argument('--n', default='2..10', help="Photon numbers: 5, 2..10 or 2,4,8")

        reck = subparsers.add_parser('reck', parents=[common], help="Beamsplitter mesh of a unitary")
        reck.add_argument('--matrix', required=True, help=matrix_help)

        embed = subparsers.add_parser('embed', parents=[common], help="Real orthogonal embedding of a unitary")
        embed.add_argument('--matrix', required=True, help=matrix_help)

        return parser.parse_args(argv)
