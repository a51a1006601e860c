"""Command-line entry point: ``rlra <subcommand> [--config file.json] [flags]``.

Exit codes: 0 success, 1 validation error, 2 a solver run did not converge
while ``--require-convergence`` (or ``require_convergence`` in the config)
was set.
"""
import argparse
import json
import logging
import sys

from .errors import EnumerationError, ValidationError
from .experiments.config import load_config
from .experiments.io import read_table_csv
from .experiments.runners import run_experiment

SUBCOMMANDS = {
    "solve": "solve",
    "nonneg": "nonneg",
    "rho-sweep": "rho_sweep",
    "denoise": "denoise",
    "fixed-points": "fixed_points",
    "fsr-sdpr": "fsr_sdpr",
}


def _json_arg(text):
    if text.startswith("@"):
        with open(text[1:]) as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise argparse.ArgumentTypeError(f"invalid JSON: {exc}") from exc


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file; flags override its values")
    common.add_argument("--output-dir", dest="output_dir")
    common.add_argument("--seed", type=int)
    common.add_argument("-m", type=int, dest="m", help="rows")
    common.add_argument("-n", type=int, dest="n", help="columns")
    common.add_argument("-K", "--rank-bound", type=int, dest="rank_bound")
    common.add_argument("--rho", type=float)
    common.add_argument("--order", choices=["convex_first", "rank_first"])
    common.add_argument("--primal-tol", type=float, dest="primal_tol")
    common.add_argument("--dual-change-tol", type=float, dest="dual_change_tol")
    common.add_argument("--max-iters", type=int, dest="max_iters")
    common.add_argument("--require-convergence", action="store_const", const=True,
                        dest="require_convergence")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(
        prog="rlra", description="Restricted low-rank approximation via ADMM.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="solve one RLRA instance from CSV")
    p.add_argument("--target", help="target matrix CSV")
    p.add_argument("--constraint", type=_json_arg,
                   help="constraint as JSON, or @file.json")

    p = sub.add_parser("nonneg", parents=[common], help="non-negative LRA: ADMM vs ADP vs NMF")
    p.add_argument("--ranks", type=int, nargs="+")

    p = sub.add_parser("rho-sweep", parents=[common], help="residual/objective curves per rho")
    p.add_argument("--rho-list", type=float, nargs="+", dest="rho_list")
    p.add_argument("--residual-threshold", type=float, dest="residual_threshold")

    p = sub.add_parser("denoise", parents=[common], help="image denoising with known pixels")
    p.add_argument("--noise-sigma", type=float, dest="noise_sigma")
    p.add_argument("--pin-fraction", type=float, dest="pin_fraction")
    p.add_argument("--input-image", dest="input_image", help="clean image as binary PGM")

    p = sub.add_parser("fixed-points", parents=[common],
                       help="enumerate fixed points of the primal map after a solve")
    p.add_argument("--target", help="target matrix CSV (default: seeded uniform instance)")
    p.add_argument("--constraint", type=_json_arg)

    p = sub.add_parser("fsr-sdpr", parents=[common],
                       help="rank-1 feasible recovery from a relaxed SDP solution")
    p.add_argument("--target", help="symmetric relaxed solution CSV")
    p.add_argument("--constraint", type=_json_arg, help="trace constraint(s) as JSON")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s")
    overrides = {k: v for k, v in vars(args).items()
                 if k not in ("command", "config", "verbose")}
    overrides["experiment"] = SUBCOMMANDS[args.command]
    try:
        cfg = load_config(args.config, **overrides)
        result = run_experiment(cfg)
    except (ValidationError, EnumerationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.command == "fixed-points":
        header, rows = read_table_csv(result.files[0])
        print(",".join(header))
        for row in rows:
            print(",".join(row))
    else:
        for path in result.files:
            print(path)
    if cfg.require_convergence and not result.converged:
        print("error: solver did not converge", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
