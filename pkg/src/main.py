# File: src/main.py
#!/usr/bin/env python3
"""
Joint measurability of noisy and lossy basis measurements
Main entry point for the command-line tool
"""

import sys
import argparse
from pathlib import Path

# Add src to Python path
sys.path.insert(0, str(Path(__file__).parent))

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_OUTSIDE = 3
EXIT_VERIFY_FAILED = 4


class CliArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with status 1"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_arguments(argv=None):
    """Parse command line arguments"""
    parser = CliArgumentParser(
        prog="jmregion",
        description="Joint measurability region of noisy, lossy projective measurements",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s boundary --dim 3 --samples 200 --format csv --out d3.csv
  %(prog)s membership --dim 2 --eta 0.8 --p 0.6
  %(prog)s verify --dim 3 --suite mc --samples 1000000
  %(prog)s compare --dim 2 --format csv
  %(prog)s simulate --dim 2 --t 0.75 --state maximally-mixed --shots 100000

Exit codes: 0 ok/inside, 1 usage, 2 I/O, 3 outside region, 4 verification failure
        """
    )
    parser.add_argument('--verbose', '-v', action='store_true', help='Enable verbose logging')
    parser.add_argument('--config', '-c', type=str, help='Path to JSON configuration overrides')
    parser.add_argument('--threads', type=int, default=None,
                        help='Worker threads (default: JM_THREADS, then CPU count)')

    commands = parser.add_subparsers(dest='command', required=True, parser_class=CliArgumentParser)

    boundary = commands.add_parser('boundary', help='Export the boundary curve (t, eta, p)')
    boundary.add_argument('--dim', type=int, required=True, help='Dimension d >= 2')
    boundary.add_argument('--samples', type=int, default=101, help='Uniform t-grid size (default: 101)')
    boundary.add_argument('--format', choices=['csv', 'json'], default='csv')
    boundary.add_argument('--mode', choices=['float64', 'extended', 'exact'], default='float64',
                          help='Evaluation mode (default: float64)')
    boundary.add_argument('--out', type=str, help='Output file (default: stdout)')

    membership = commands.add_parser('membership', help='Decide whether (eta, p) lies in JM_d')
    membership.add_argument('--dim', type=int, required=True)
    membership.add_argument('--eta', type=float, required=True, help='Detection efficiency in [0, 1]')
    membership.add_argument('--p', type=float, required=True, help='Visibility in [0, 1]')

    verify = commands.add_parser('verify', help='Run verification suites')
    verify.add_argument('--dim', type=int, default=2)
    verify.add_argument('--samples', type=int, default=None, help='Monte-Carlo samples per check')
    verify.add_argument('--seed', type=int, default=0)
    verify.add_argument('--suite', choices=['closedform', 'mc', 'povm', 'optimality', 'all'],
                        default='all')
    verify.add_argument('--report', type=str, help='Also write a JSON report to this path')

    compare = commands.add_parser('compare', help='PVM boundary against the POVM bound (1-p)^d')
    compare.add_argument('--dim', type=int, required=True)
    compare.add_argument('--samples', type=int, default=101, help='Uniform p-grid size (default: 101)')
    compare.add_argument('--format', choices=['csv', 'json'], default='csv')
    compare.add_argument('--out', type=str, help='Output file (default: stdout)')

    simulate = commands.add_parser('simulate', help='Classically simulate a noisy PVM on a state')
    simulate.add_argument('--dim', type=int, required=True)
    simulate.add_argument('--t', type=float, required=True, help='Threshold in [0, 1)')
    simulate.add_argument('--shots', type=int, default=100_000)
    simulate.add_argument('--seed', type=int, default=0)
    simulate.add_argument('--state', choices=['maximally-mixed', 'basis0', 'random'],
                          default='maximally-mixed')
    simulate.add_argument('--basis', choices=['identity', 'random'], default='identity')
    simulate.add_argument('--format', choices=['text', 'json'], default='text')
    simulate.add_argument('--out', type=str, help='Write counts JSON to this path')

    return parser.parse_args(argv)


def _emit(text: str, out):
    from utils.report_generator import ReportGenerator

    if out:
        ReportGenerator.write(text, out)
    else:
        sys.stdout.write(text)


def run_boundary(args, config, logger) -> int:
    from core.region import export_curve

    curve = export_curve(args.dim, args.samples, args.mode)
    text = curve.to_csv() if args.format == 'csv' else curve.to_json() + "\n"
    _emit(text, args.out)
    if args.out:
        logger.info(f"Boundary curve ({len(curve)} samples) saved to {args.out}")
    return EXIT_OK


def run_membership(args, config, logger) -> int:
    from core.data_models import NoiseParams
    from core.region import is_jointly_measurable

    verdict = is_jointly_measurable(args.dim, NoiseParams(args.eta, args.p))
    label = "inside" if verdict.inside else "outside"
    print(f"{label} eta_max={verdict.eta_max:.17g} margin={verdict.margin:.17g}")
    return EXIT_OK if verdict.inside else EXIT_OUTSIDE


def run_verify(args, config, logger) -> int:
    from core.verification_engine import VerificationEngine
    from utils.report_generator import ReportGenerator

    engine = VerificationEngine(config, threads=args.threads)
    report = engine.run(args.dim, args.suite, args.samples, args.seed)
    sys.stdout.write(ReportGenerator().verification_text(report))
    if args.report:
        report.save(args.report)
        logger.info(f"Verification report saved to {args.report}")
    if not report.passed:
        print(f"[ALERT] {len(report.failures)} checks failed")
        return EXIT_VERIFY_FAILED
    return EXIT_OK


def run_compare(args, config, logger) -> int:
    from core.region import compare_bounds
    from utils.report_generator import ReportGenerator

    rows = compare_bounds(args.dim, args.samples)
    generator = ReportGenerator()
    text = generator.comparison_csv(rows) if args.format == 'csv' else \
        generator.comparison_json(args.dim, rows) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def run_simulate(args, config, logger) -> int:
    import numpy as np

    from analyzers.simulation_analyzer import simulate_measurement
    from core.data_models import Dimension, OperatorMatrix
    from core.measurement import QuantumState, haar_unitary, random_state

    d = Dimension(args.dim)
    if not 0 <= args.t < 1:
        raise ValueError(f"--t must lie in [0, 1), got {args.t}")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([args.seed, 5])))
    if args.state == 'maximally-mixed':
        state = QuantumState.maximally_mixed(d)
    elif args.state == 'basis0':
        state = QuantumState.basis(0, d)
    else:
        state = random_state(d, rng)
    U = OperatorMatrix.identity(d) if args.basis == 'identity' else haar_unitary(d, rng)

    result = simulate_measurement(state, U, args.t, args.shots, args.seed, threads=args.threads,
                                  chunk_size=config.get('monte_carlo', {}).get('chunk_size'))
    exported = result.to_exported()
    if args.format == 'json':
        sys.stdout.write(exported.to_json() + "\n")
    else:
        from utils.report_generator import ReportGenerator
        sys.stdout.write(ReportGenerator().counts_text(result))
    if args.out:
        exported.save(args.out)
        logger.info(f"Counts saved to {args.out}")
    return EXIT_OK


COMMANDS = {
    'boundary': run_boundary,
    'membership': run_membership,
    'verify': run_verify,
    'compare': run_compare,
    'simulate': run_simulate,
}


def main(argv=None) -> int:
    """Main application entry point"""
    args = parse_arguments(argv)

    from core.errors import JointMeasurabilityError
    from utils.config_manager import ConfigManager, reset_config
    from utils.logger import setup_logging

    logger = setup_logging(args.verbose)
    config = ConfigManager(args.config).apply()
    if args.threads is None:
        args.threads = config.get('monte_carlo', {}).get('threads')

    try:
        return COMMANDS[args.command](args, config, logger)
    except OSError as e:
        print(f"[ERROR] I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except ValueError as e:
        print(f"[ERROR] {e}", file=sys.stderr)
        return EXIT_USAGE
    except JointMeasurabilityError as e:
        logger.error(f"{args.command} failed: {e}")
        return EXIT_VERIFY_FAILED
    except Exception as e:
        print(f"[ERROR] Unexpected error: {e}", file=sys.stderr)
        logger.exception(f"{args.command} failed")
        return EXIT_USAGE
    finally:
        reset_config()


if __name__ == "__main__":
    try:
        exit_code = main()
        sys.exit(exit_code)
    except KeyboardInterrupt:
        print("\n[INFO] Interrupted by user", file=sys.stderr)
        sys.exit(EXIT_USAGE)
