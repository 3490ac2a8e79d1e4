#!/usr/bin/env python3
# fockstat: linear-optics toolkit for boson sampling and interferometric metrology
# GPLv2 / GPLv3
import sys
import time

from report.reportcreator import ReportCreator
from tools import SizeGuardError
from tools.configuration import Configuration

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_USAGE = 2

time_start = time.time()


def get_execution_time():
    time_end = time.time()
    execution_time = time_end - time_start
    return execution_time


def run(argv) -> int:
    """
    :return: process exit code
    """
    try:
        config = Configuration(argv)
    except ValueError as e:
        print(f"fockstat: {e}", file=sys.stderr)
        return EXIT_USAGE

    print('Running %s...' % config.subcommand, file=sys.stderr)
    report = ReportCreator(config)
    report.set_threads(config.get_threads()) \
        .show_progress(sys.stderr.isatty())

    try:
        result = report.create()
        result.save(config.get_output_path(), config.get_format())
    except SizeGuardError as e:
        print(f"fockstat: size guard: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, ArithmeticError, OSError) as e:
        print(f"fockstat: {e}", file=sys.stderr)
        return EXIT_USAGE

    print('Done in %.2f secs.' % get_execution_time(), file=sys.stderr)
    if report.has_failures:
        for failure in report.verification.failures():
            print(f"FAILED {failure.suite}: {failure.case} (residual {failure.residual:.3g} > {failure.tolerance:.3g})",
                  file=sys.stderr)
        return EXIT_VERIFICATION_FAILED
    return EXIT_OK


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == '__main__':
    main()
