"""Command-line entry point.

Exit codes: 0 when every check passes, 1 when any check fails, 2 for usage,
input or I/O errors (no report is written in that case).
"""

from __future__ import annotations

import argparse
import math
import sys
import time

from .report import emit_report
from .suites import ALL_MODELS, InputError, RunConfig, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

COMMANDS = {
    "model": ["info"],
    "verify": ["weil", "lp", "regularity", "atoms", "h1"],
    "estimate": ["mod", "lipschitz", "doubling"],
    "bounds": ["lp", "h1"],
}


def _p_value(text: str) -> float:
    if text.lower() in ("inf", "infinity"):
        return math.inf
    value = float(text)
    if not value >= 1:
        raise argparse.ArgumentTypeError("p must be >= 1 or inf")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", choices=ALL_MODELS, help="model id (default: every applicable model)")
    common.add_argument("--kernel", help="kernel JSON file")
    common.add_argument("--function", help="test-function JSON file")
    common.add_argument("--corpus", default="default", help='atom corpus JSON file or "default"')
    common.add_argument("--p", type=_p_value, help="Lebesgue exponent (>= 1 or inf)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--nodes", type=_positive_int, help="quadrature nodes per axis")
    common.add_argument("--mc-samples", type=_positive_int, help="Monte-Carlo sample count")
    common.add_argument("--box", type=float, help="truncation half-width of linear chart axes")
    common.add_argument("--tol", type=float, help="check tolerance (per-command default otherwise)")
    common.add_argument("--trials", type=int, help="corpus size or number of random trials")
    common.add_argument("--param", type=float, action="append", default=[], help="automorphism parameter (repeatable)")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--format", dest="fmt", choices=["json", "csv"], default="json")
    common.add_argument("--timing", action="store_true", help="include wall-clock seconds (breaks byte-identical reruns)")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hausdorff-lab", description="Hausdorff operators on homogeneous spaces: checks and bounds.")
    groups = parser.add_subparsers(dest="group", required=True)
    common = _common_flags()
    for group, subs in COMMANDS.items():
        gp = groups.add_parser(group)
        leaf = gp.add_subparsers(dest="sub", required=True)
        for sub in subs:
            leaf.add_parser(sub, parents=[common])
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=f"{args.group} {args.sub}",
        model=args.model,
        kernel=args.kernel,
        function=args.function,
        corpus=args.corpus,
        p=args.p,
        seed=args.seed,
        nodes=args.nodes,
        mc_samples=args.mc_samples,
        box=args.box,
        tol=args.tol,
        trials=args.trials,
        params=list(args.param),
        out=args.out,
        fmt=args.fmt,
        timing=args.timing,
    )


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    cfg = config_from_args(args)
    start = time.perf_counter()
    try:
        report = run_suite(cfg)
        if cfg.timing:
            report.wall_clock = time.perf_counter() - start
        emit_report(report, cfg.out, cfg.fmt)
    except (InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
