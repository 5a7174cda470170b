from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import asdict

import toml

from . import __version__
from .config import Mode, parse_config, parse_grid
from .errors import ConfigError, NumericalRangeError
from .log import LOG_LEVELS, set_logger
from .tasks.models import write_gnuplot
from .tasks.presets import PRESETS
from .tasks.runner import SweepRunner
from .utils import SignalHandler, read_config_file

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _get_args(argv: list[str] | None = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="metaslab",
        description=(
            "Transmission, I-V and traversal time sweeps for ballistic electrons "
            "in negative effective mass slabs"
        ),
    )
    parser.add_argument(
        "--mode",
        type=str,
        choices=[m.value for m in Mode],
        help="Sweep to run (default: from config or preset, else 'transmission')",
    )
    parser.add_argument(
        "--preset",
        type=str,
        help="Named parameter set, see --dump-presets",
    )
    parser.add_argument(
        "--config",
        type=str,
        help="TOML config file; flags override its keys",
    )
    parser.add_argument(
        "--grid",
        type=str,
        help="Independent variable as min:max:n",
    )
    parser.add_argument(
        "--out",
        type=str,
        help="Output CSV path (default: 'metaslab.csv')",
    )
    parser.add_argument(
        "--threads",
        type=str,
        help="Worker threads, a positive integer or 'auto'",
    )
    parser.add_argument(
        "--verify",
        action="store_true",
        help="Check every 100th row against the RK4 oracle",
    )
    parser.add_argument(
        "--gnuplot",
        action="store_true",
        help="Write a gnuplot script next to the CSV",
    )
    parser.add_argument(
        "--log-level",
        type=str,
        choices=list(LOG_LEVELS),
        help="Log level (default: INFO)",
    )
    parser.add_argument(
        "--dump-presets",
        action="store_true",
        help="Print all presets as TOML and exit",
    )
    parser.add_argument(
        "--version",
        action="store_true",
        help="Show the version",
    )
    return parser.parse_args(argv)


def _threads(value: str) -> int | str:
    if value == "auto":
        return value
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"threads must be an integer or 'auto', got '{value}'")


def _overrides(args: argparse.Namespace) -> dict[tuple[str, str], object]:
    """Flags which have been set, keyed by (section, key)."""

    res: dict[tuple[str, str], object] = {}
    if args.mode:
        res[("", "mode")] = args.mode
    if args.preset:
        res[("structure", "preset")] = args.preset
    if args.grid:
        g_min, g_max, g_n = parse_grid(args.grid)
        res[("grid", "min")] = g_min
        res[("grid", "max")] = g_max
        res[("grid", "n_points")] = g_n
    if args.out:
        res[("output", "path")] = args.out
    if args.threads:
        res[("output", "threads")] = _threads(args.threads)
    if args.verify:
        res[("output", "verify")] = True
    if args.gnuplot:
        res[("output", "gnuplot")] = True
    if args.log_level:
        res[("logging", "level")] = args.log_level
    return res


def dump_presets() -> str:
    return toml.dumps({name: p.as_dict() for name, p in PRESETS.items()})


def run(argv: list[str] | None = None) -> int:
    """Runs one sweep and returns the exit code."""

    args = _get_args(argv)
    if args.version:
        print(f"Version: {__version__}")
        return EXIT_OK

    if args.dump_presets:
        print(dump_presets(), end="")
        return EXIT_OK

    try:
        text = read_config_file(args.config) if args.config else ""
        config = parse_config(text, _overrides(args))
    except (ConfigError, FileNotFoundError) as e:
        print(f"metaslab: config error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    set_logger(asdict(config.logging))
    logging.info(f"metaslab {__version__} starting...")

    try:
        runner = SweepRunner(config)

        # Pending points are cancelled on SIGTERM or SIGINT, the finished rows
        # are still written.
        with SignalHandler() as sig_handler:
            sig_handler.add_handler(runner.stop)
            result = runner.run()

        result.write(config.output.path)
        logging.info(f"Wrote {len(result.rows)} rows to {config.output.path}")

        if config.output.gnuplot:
            script = write_gnuplot(result, config.output.path)
            logging.info(f"Wrote gnuplot script {script}")

    except NumericalRangeError as e:
        logging.error(f"Numerical range error: {e}")
        print(f"metaslab: numerical range error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL

    except Exception as e:
        logging.exception("An unexpected error occurred.")
        raise e

    finally:
        logging.info("metaslab finished.")

    return EXIT_OK


def app():
    sys.exit(run())


if __name__ == "__main__":
    app()
