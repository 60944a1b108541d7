import argparse
import sys
from typing import Any, Dict, List, Optional

from dbt.adapters.events.logging import AdapterLogger
from dbt_common.exceptions import DbtConfigError, DbtRuntimeError, DbtValidationError

from orthoqkd.cli.config import OutputFormat, ScenarioConfig, parse_config
from orthoqkd.cli.execute import execute
from orthoqkd.exceptions import ScenarioConfigError


logger = AdapterLogger("orthoqkd")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INTERNAL = 2


def create_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orthoqkd",
        description="Run orthogonal-state QKD scenarios: protocol runs, security sweeps, "
        "tolerable error rates and verification suites.",
    )
    parser.add_argument("--config", required=True, help="Path to the JSON scenario file.")
    parser.add_argument("--out", default=None, help="Output directory; overrides the scenario.")
    parser.add_argument(
        "--format",
        action="append",
        choices=[str(output_format) for output_format in OutputFormat],
        default=None,
        help="Output format; repeat for both. Overrides the scenario.",
    )
    parser.add_argument("--seed", type=int, default=None, help="Overrides the scenario seed.")
    parser.add_argument(
        "--resolution", type=int, default=None, help="Grid points per axis; overrides the scenario."
    )
    return parser


def load_config(args: argparse.Namespace) -> ScenarioConfig:
    try:
        with open(args.config, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ScenarioConfigError(f"cannot read '{args.config}': {exc}")
    overrides: Dict[str, Any] = {}
    if args.out is not None:
        overrides["output_dir"] = args.out
    if args.format:
        overrides["formats"] = list(args.format)
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.resolution is not None:
        overrides["resolution"] = args.resolution
    return parse_config(text, overrides)


def main(argv: Optional[List[str]] = None) -> int:
    args = create_parser().parse_args(argv)
    try:
        config = load_config(args)
    except (ScenarioConfigError, DbtValidationError, DbtConfigError) as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_CONFIG

    try:
        result = execute(config)
    except (DbtRuntimeError, OSError) as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_INTERNAL
    except Exception as exc:
        logger.error(f"Unexpected failure: {exc!r}")
        sys.stderr.write(f"internal error: {exc!r}\n")
        return EXIT_INTERNAL

    for summary in result.summaries:
        print(summary)
    return result.status


if __name__ == "__main__":
    sys.exit(main())
