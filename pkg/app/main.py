import argparse
import logging
import sys

from dotenv import load_dotenv

from app.api.v1 import commands
from app.utils.errors import SftDegreeError
from app.utils.logger import configure_logging, logger

load_dotenv()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sftdegree",
        description="Topological degree and degree spectra of G-SFTs on matrix-presented monoids",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    commands.register(subparsers)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.verbose:
        configure_logging(logging.DEBUG if args.verbose > 1 else logging.INFO)
    try:
        report = args.handler(args)
    except SftDegreeError as e:
        logger.error(f"❌ {args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    print(report.to_json() if args.json else report.render())
    return 0


if __name__ == "__main__":
    sys.exit(main())
