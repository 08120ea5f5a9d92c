"""
Command line front end: hwmlab <subcommand> [--config PATH] [--seed S] [--out DIR]
"""
import argparse
import logging
import sys
from typing import List, Optional

from hwmlab.config import API_HOST, API_PORT, LOG_LEVEL, configure_logging
from hwmlab.errors import ConfigError
from hwmlab.harness import load_config, run_subcommand
from hwmlab.models import SUBCOMMANDS

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hwmlab", description="Half-wave maps numerical laboratory")
    parser.add_argument("--log-level", default=LOG_LEVEL, help="logging level (default from HWMLAB_LOG_LEVEL)")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, help=f"run the {name} suite")
        p.add_argument("--config", help="flat KEY=value experiment file")
        p.add_argument("--seed", type=int, help="base seed (overrides the file)")
        p.add_argument("--out", help="output directory (overrides the file)")
    serve = sub.add_parser("serve", help="expose the harness over HTTP")
    serve.add_argument("--host", default=API_HOST)
    serve.add_argument("--port", type=int, default=API_PORT)
    return parser


def _serve(args) -> int:
    import uvicorn

    uvicorn.run("hwmlab.main:app", host=args.host, port=args.port, reload=False, log_level=args.log_level.lower())
    return EXIT_PASS


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    if args.subcommand == "serve":
        return _serve(args)
    try:
        cfg = load_config(args.config, seed=args.seed, output_dir=args.out)
        report = run_subcommand(args.subcommand, cfg)
    except ConfigError as e:
        print(f"❌ Configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    for row in report.results:
        status = "PASS" if row["passed"] else "FAIL"
        print(f"  [{status}] {row['name']}: {row.get('value', row.get('max_pointwise_error'))}")
    if report.passed:
        print(f"✅ {args.subcommand}: all gates passed")
        return EXIT_PASS
    print(f"❌ {args.subcommand}: some gates failed")
    return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
