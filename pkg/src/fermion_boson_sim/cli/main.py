import sys
from typing import List, Optional

from pydantic import ValidationError

from fermion_boson_sim.cli.parser import build_parser
from fermion_boson_sim.core.errors import SimulationError
from fermion_boson_sim.core.logging import configure_logging, get_logger

logger = get_logger(__name__)


def run(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments and dispatch one subcommand

    Args:
        argv: Arguments without the program name (defaults to sys.argv[1:])

    Returns:
        0 on success, 2 for configuration errors, 3 for numeric failures
    """
    configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        return args.handler(args)
    except ValidationError as e:
        logger.error("Invalid configuration", command=args.command, action=args.action, error=str(e))
        sys.stderr.write(f"error: {e}\n")
        return 2
    except SimulationError as e:
        logger.error("Command failed", command=args.command, action=args.action, error=str(e))
        sys.stderr.write(f"error: {e}\n")
        return e.exit_code
    except OSError as e:
        logger.error("Cannot write output", error=str(e))
        sys.stderr.write(f"error: {e}\n")
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
