# main.py - Command line entry point for experiment runs
import argparse
import asyncio
import logging
import sys
from typing import List, Optional

from config.app_config import ConfigError, load_config
from config.logging_config import setup_logging
from models.errors import InvariantViolation, WettingError
from runner import __version__
from runner.core import create_runner
from runner.output import write_manifest, write_results

EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_INVARIANT = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wetting", description="Disordered wetting laboratory for the lattice free field")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one verification suite")
    run.add_argument("--config", required=True, help="path to the experiment config file")
    run.add_argument("--suite", help="override [run] suite")
    run.add_argument("--seed", type=int, help="override [run] seed")
    run.add_argument("--out", help="override [run] output_dir")

    sub.add_parser("list-suites", help="list the available suites")
    return parser


async def list_suites() -> int:
    runner = await create_runner(log=logging.getLogger("Wetting"))
    for name, description in runner.list_suites():
        print(f"{name:15s} {description}")
    return 0


async def run(config_path: str, suite: Optional[str], seed: Optional[int], out: Optional[str]) -> int:
    """Load and validate the config, run the suite, write results.csv and manifest.json"""
    overrides = {"suite": suite, "seed": seed, "output_dir": out}
    try:
        config = load_config(config_path, overrides)
    except ConfigError as e:
        logging.basicConfig(level=logging.INFO)
        logging.getLogger("Wetting").error(f"Configuration error: {e}")
        return EXIT_CONFIG

    log = setup_logging(level=getattr(logging, config.log_level.upper()), log_dir=config.output_dir)
    log.info(f"Starting suite {config.suite} (seed={config.seed}, version {__version__})")

    runner = await create_runner(log=log, workers=config.workers)
    try:
        rows = await runner.run(config)
    except InvariantViolation as e:
        log.error(f"Invariant violated ({e.invariant}): {e}")
        return EXIT_INVARIANT
    except WettingError as e:
        log.error(f"Run failed: {e}", exc_info=True)
        return EXIT_ERROR
    except KeyError as e:
        log.error(f"{e}")
        return EXIT_CONFIG

    results = write_results(rows, config.output_dir)
    write_manifest(config.output_dir, __version__, config_path, config.suite, config.seed, config.resolved(), len(rows))
    log.info(f"Wrote {len(rows)} row(s) to {results}")
    return 0


async def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list-suites":
        return await list_suites()
    return await run(args.config, args.suite, args.seed, args.out)


def run_cli() -> None:
    """Run the command line with proper exception handling"""
    try:
        code = asyncio.run(main())
    except KeyboardInterrupt:
        print("\nRun stopped by user.")
        sys.exit(1)
    sys.exit(code)


if __name__ == "__main__":
    run_cli()
