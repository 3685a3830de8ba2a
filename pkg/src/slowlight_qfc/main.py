#!/usr/bin/env python
import argparse
import os
import sys
from pathlib import Path
from typing import List, Optional

from dotenv import load_dotenv

from slowlight.analysis import efficiency_profile
from slowlight.config_loader import load_config
from slowlight.error_utils import (
    EXIT_NUMERICAL_FAILURE,
    EXIT_OK,
    ConfigError,
    RegimeError,
    exit_code_for,
    transform_error_for_user,
)
from slowlight.logging_config import configure_logging, get_logger
from slowlight.models import TIERS, SweepSpec
from slowlight.physics import check_regime, derive_params
from slowlight.propagation import export_history_csv
from slowlight.reports import (
    comparison_pairs,
    format_key_values,
    qubit_pairs,
    regime_lines,
    scenario_pairs,
    write_summary,
    write_table_csv,
)
from slowlight.runner import build_input, build_time_grid, pulse_width, run_comparison, run_qubit, run_scenario
from slowlight.signals import save_envelope_csv
from slowlight.sweeps import run_sweep

logger = get_logger(__name__)

DEFAULT_CONFIG = Path(__file__).parent / "config" / "rb87_paper.cfg"


def parse_arguments(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """
    Parse command-line arguments.
    """
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        '--config',
        default=str(DEFAULT_CONFIG),
        help='Scenario file (default: the shipped rb87_paper.cfg)'
    )
    common.add_argument(
        '--tier',
        choices=TIERS,
        help='Override the configured tier'
    )
    common.add_argument(
        '--log-level',
        default=os.getenv('LOG_LEVEL', 'WARNING'),
        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'],
        help='Logging level on stderr (default: LOG_LEVEL or WARNING)'
    )

    parser = argparse.ArgumentParser(
        prog='slowlight_qfc',
        description='Simulate single-photon frequency conversion by slow light in a four-level atomic medium.',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s validate --config rb87_paper.cfg
  %(prog)s simulate --config scenario.cfg --out results --decimate 4
  %(prog)s sweep --config scenario.cfg --param beta_l --range 0 3.141592653589793 33
  %(prog)s sweep --param drive.omega_c_in_gamma --values 4,8,16 --tier full --jobs 4
  %(prog)s qubit --config qubit.cfg
  %(prog)s compare-tiers --config desk.cfg
        """
    )
    commands = parser.add_subparsers(dest='command', required=True)

    validate = commands.add_parser('validate', parents=[common], help='Check the regime conditions')
    validate.add_argument(
        '--lenient',
        action='store_true',
        help='Exit 0 even when a condition fails'
    )

    simulate = commands.add_parser('simulate', parents=[common], help='Propagate the configured photon')
    simulate.add_argument('--out', default='out', help='Output directory (default: out)')
    simulate.add_argument(
        '--decimate',
        type=int,
        default=1,
        help='Keep every k-th z-slice and tau-sample in field_history.csv'
    )

    sweep = commands.add_parser('sweep', parents=[common], help='Sweep one parameter')
    sweep.add_argument('--param', required=True, help='Dotted config key, or beta_l')
    source = sweep.add_mutually_exclusive_group(required=True)
    source.add_argument('--values', help='Comma-separated values')
    source.add_argument(
        '--range',
        nargs=3,
        metavar=('START', 'STOP', 'COUNT'),
        help='Evenly spaced values from START to STOP'
    )
    sweep.add_argument('--log-spacing', action='store_true', help='Geometric spacing for --range')
    sweep.add_argument(
        '--jobs',
        type=int,
        default=int(os.getenv('SLOWLIGHT_JOBS', '1')),
        help='Concurrent sweep points (default: SLOWLIGHT_JOBS or 1)'
    )
    sweep.add_argument('--out', default='sweep.csv', help='Output CSV (default: sweep.csv)')

    qubit = commands.add_parser('qubit', parents=[common], help='Convert a time-bin qubit')
    qubit.add_argument('--out', help='Also write the report to this directory')

    compare = commands.add_parser('compare-tiers', parents=[common], help='Run all tiers and compare')
    compare.add_argument('--out', help='Also write the report to this directory')

    return parser.parse_args(argv)


def build_sweep_spec(args: argparse.Namespace) -> SweepSpec:
    """
    Build the sweep from --values or --range.

    Raises:
        ConfigError: If a value cannot be parsed
    """
    try:
        if args.values is not None:
            values = [float(item) for item in args.values.split(',') if item.strip()]
            return SweepSpec(parameter=args.param, values=values, output=args.out)
        start, stop, count = args.range
        return SweepSpec(
            parameter=args.param,
            start=float(start),
            stop=float(stop),
            count=int(count),
            spacing='log' if args.log_spacing else 'linear',
            output=args.out,
        )
    except ValueError as e:
        raise ConfigError(f"invalid sweep values: {e}", key='--values' if args.values else '--range')


def _write_pairs(pairs, out: Optional[str], name: str) -> None:
    print(format_key_values(pairs))
    if out:
        directory = Path(out)
        directory.mkdir(parents=True, exist_ok=True)
        write_summary(pairs, directory / name)


def cmd_validate(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    params = derive_params(config.atoms, config.drive, config.convention_prefactor)
    tier = args.tier or config.tier
    source = build_input(config, build_time_grid(config, tier) if config.pulse.shape != 'file' else None)
    report = check_regime(params, pulse_width(config, source), config.atoms, config.thresholds, config.drive)

    print("\n".join(regime_lines(report)))
    if not report.all_ok and not args.lenient:
        failed = ", ".join(c.name for c in report.conditions if not c.passed)
        raise RegimeError(f"regime conditions failed: {failed}")
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    run = run_scenario(config, args.tier)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    export_history_csv(run.history, out / 'field_history.csv', decimate=args.decimate)
    for carrier in (1, 2):
        save_envelope_csv(run.history.envelope(carrier, 0), out / f'envelope_z0_carrier{carrier}.csv')
        save_envelope_csv(run.history.envelope(carrier, -1), out / f'envelope_zL_carrier{carrier}.csv')
    write_table_csv(efficiency_profile(run.history, run.input_carrier), out / 'efficiency_profile.csv')

    pairs = scenario_pairs(run)
    write_summary(pairs, out / 'summary.txt')
    print(format_key_values(pairs))
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    spec = build_sweep_spec(args)
    frame = run_sweep(config, spec, jobs=args.jobs, tier=args.tier)

    out = Path(spec.output)
    if out.parent != Path('.'):
        out.parent.mkdir(parents=True, exist_ok=True)
    write_table_csv(frame, out)

    failed = int((frame['status'] == 'failed').sum())
    print(f"wrote {len(frame)} row(s) to {out}, {failed} failed")
    return EXIT_NUMERICAL_FAILURE if failed else EXIT_OK


def cmd_qubit(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    run = run_qubit(config, args.tier)
    _write_pairs(qubit_pairs(run), args.out, 'qubit_summary.txt')
    return EXIT_OK


def cmd_compare_tiers(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    comparison = run_comparison(config)
    _write_pairs(comparison_pairs(comparison), args.out, 'comparison_summary.txt')
    return EXIT_OK


COMMANDS = {
    'validate': cmd_validate,
    'simulate': cmd_simulate,
    'sweep': cmd_sweep,
    'qubit': cmd_qubit,
    'compare-tiers': cmd_compare_tiers,
}


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run one subcommand and return its exit code.
    """
    load_dotenv()
    args = parse_arguments(argv)
    configure_logging(log_level=args.log_level, log_file=os.getenv('SLOWLIGHT_LOG_FILE'))

    try:
        return COMMANDS[args.command](args)
    except Exception as e:
        message, error_type = transform_error_for_user(e)
        logger.debug(f"{args.command} failed with {error_type}", exc_info=True)
        print(f"Error: {message}", file=sys.stderr)
        return exit_code_for(e)


def run():
    """
    Entry point for the slowlight_qfc script.
    """
    sys.exit(main())


if __name__ == '__main__':
    run()
