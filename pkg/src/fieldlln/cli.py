"""Command line: ``fieldlln run <config> --out DIR`` and ``fieldlln describe <config>``.

Exit status is 0 when every verdict passes, 1 on a verdict failure or an
experiment error, and 2 on a configuration error.
"""

import argparse
import sys

from .models.sampling import MAX_BYTES_ENV
from .verify.config import ConfigError, load
from .verify.runner import describe, run_config

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def build_parser():
    ap = argparse.ArgumentParser(
        prog="fieldlln",
        description="Monte Carlo checks of laws of large numbers for random fields.",
        epilog=f"Set {MAX_BYTES_ENV} to change the memory budget (bytes).",
    )
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run every experiment in a config")
    r.add_argument("config")
    r.add_argument("--out", required=True, help="output directory")
    r.add_argument("--seed", type=int, default=None, help="override every experiment seed")
    r.add_argument("--workers", type=int, default=1, help="threads for path batches")
    r.add_argument("--quiet", action="store_true")
    dsc = sub.add_parser("describe", help="print the plan without sampling")
    dsc.add_argument("config")
    dsc.add_argument("--seed", type=int, default=None)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load(args.config)
    except (ConfigError, OSError) as err:
        errors = err.errors if isinstance(err, ConfigError) else [("", str(err))]
        for ptr, msg in errors:
            print(f"config error at {ptr or '/'}: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    if args.command == "describe":
        print(describe(cfg, args.seed))
        return EXIT_OK
    if args.seed is not None and args.seed < 0:
        print("config error at /seed: seed must be >= 0", file=sys.stderr)
        return EXIT_CONFIG
    log = None if args.quiet else (lambda msg: print(msg, file=sys.stderr))
    manifest = run_config(cfg, args.out, args.seed, max(1, args.workers), args.config, log)
    ok = all(e["status"] == "ok" for e in manifest["experiments"])
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
