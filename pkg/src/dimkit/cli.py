"""Command-line front end.

Subcommands: ``reduce``, ``estimate``, ``generate``, ``bench``. Exit codes
are 0 on success, 1 on algorithm or I/O errors and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import math
import sys

import numpy as np
from threadpoolctl import threadpool_limits

from . import __version__
from .bench import records_to_csv, run_bench, threads_from_env
from .core import PREPROCESS_KINDS
from .csvio import read_labels, read_matrix, write_matrix
from .errors import DimkitError
from .estimate import BOTTOM_UP, ESTIMATORS
from .generate import MODELS, generate
from .graph import SYMMETRIZATIONS
from .kernels import KERNELS, KernelSpec
from .reduce import METHODS, Neighborhood, ReducerConfig, reduce


class UsageError(Exception):
    pass


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    return x


def format_estdim(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def _parse_sizes(text):
    text = text.strip()
    if not text:
        return []
    try:
        sizes = [int(s) for s in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"sizes must be comma-separated integers, got {text!r}") from None
    if any(s < 1 for s in sizes):
        raise argparse.ArgumentTypeError("sizes must be positive")
    return sizes


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dimkit", description="Dimension reduction and intrinsic dimension estimation.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    r = sub.add_parser("reduce", help="embed a data CSV in d dimensions")
    r.add_argument("--method", required=True, choices=sorted(METHODS))
    r.add_argument("--dim", required=True, type=int)
    r.add_argument("--input", required=True)
    r.add_argument("--output", required=True)
    r.add_argument("--preprocess", default="center", choices=PREPROCESS_KINDS)
    nb = r.add_mutually_exclusive_group()
    nb.add_argument("--k", type=int)
    nb.add_argument("--eps", type=float)
    r.add_argument("--sym", default="union", choices=SYMMETRIZATIONS)
    r.add_argument("--kernel", choices=KERNELS)
    r.add_argument("--bandwidth", type=float)
    r.add_argument("--labels")
    r.add_argument("--meta")
    r.add_argument("--header", action="store_true", help="write a y1..yd header row")

    e = sub.add_parser("estimate", help="estimate the intrinsic dimension of a data CSV")
    e.add_argument("--method", required=True, choices=sorted(ESTIMATORS))
    e.add_argument("--input", required=True)
    e.add_argument("--local", help="write per-point estimates here (bottom-up methods only)")
    e.add_argument("--k1", type=int, help="mle: smallest neighborhood size (default 6)")
    e.add_argument("--k2", type=int, help="mle: largest neighborhood size (default 12)")
    e.add_argument("--radii", type=int, help="corrdim: number of radii (default 20)")
    e.add_argument("--threshold", type=float, help="pcadim: variance threshold (default 0.95)")

    g = sub.add_parser("generate", help="sample a synthetic data model")
    g.add_argument("--model", required=True, choices=MODELS)
    g.add_argument("--n", required=True, type=int)
    g.add_argument("--noise", type=float, default=0.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--output", required=True)
    g.add_argument("--truth")

    b = sub.add_parser("bench", help="time covariance-eigen PCA against SVD PCA")
    b.add_argument("--sizes", required=True, type=_parse_sizes)
    b.add_argument("--p", type=_positive_int, default=72)
    b.add_argument("--d", type=_positive_int, default=12)
    b.add_argument("--repeats", type=_positive_int, default=3)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--output", required=True)
    return parser


_METHOD_PARAMS = {"mle": ("k1", "k2"), "corrdim": ("radii",), "pcadim": ("threshold",), "twonn": ()}
_PARAM_NAMES = {"k1": "k1", "k2": "k2", "radii": "num_radii", "threshold": "variance_threshold"}


def cmd_reduce(args) -> int:
    info = METHODS[args.method]
    if args.bandwidth is not None and args.kernel not in ("gaussian", "laplacian", "cauchy"):
        raise UsageError("--bandwidth applies to --kernel gaussian, laplacian or cauchy")
    if args.kernel is not None and not info.uses_kernel:
        raise UsageError(f"--kernel does not apply to method {args.method}")
    if (args.k is not None or args.eps is not None) and not info.needs_neighborhood:
        raise UsageError(f"--k/--eps do not apply to method {args.method}")
    if args.labels is not None and not info.supervised:
        raise UsageError(f"--labels does not apply to unsupervised method {args.method}")
    if info.supervised and args.labels is None:
        raise UsageError(f"method {args.method} needs --labels")
    if info.needs_neighborhood and args.k is None and args.eps is None:
        raise UsageError(f"method {args.method} needs --k or --eps")

    data = read_matrix(args.input)
    labels = read_labels(args.labels) if args.labels else None
    neighborhood = None
    if info.needs_neighborhood:
        neighborhood = Neighborhood(k=args.k, eps=args.eps, symmetrization=args.sym)
    kernel = None
    if info.uses_kernel and args.kernel is not None:
        params = {"bandwidth": args.bandwidth} if args.bandwidth is not None else {}
        kernel = KernelSpec(args.kernel, params)
    config = ReducerConfig(args.method, args.dim, args.preprocess, neighborhood, kernel, labels)
    result = reduce(data, config)

    header = [f"y{j + 1}" for j in range(result.d)] if args.header else None
    write_matrix(args.output, result.embedding, header=header)
    if result.selected_features is not None:
        shown = ",".join(str(i + 1) for i in result.selected_features)
        print(f"selected_features={shown}")
    if args.meta:
        meta = {
            "method": result.method,
            "d": result.d,
            "preprocess": result.preprocess.to_dict(),
            "parameters": {
                "preprocess": args.preprocess,
                "neighborhood": neighborhood.to_dict() if neighborhood else None,
                "kernel": {"kind": kernel.kind, **kernel.params} if kernel else None,
            },
            "info": result.info,
        }
        if result.projection is not None:
            meta["projection"] = result.projection
        if result.selected_features is not None:
            meta["selected_features"] = result.selected_features
        with open(args.meta, "w") as fh:
            json.dump(_jsonable(meta), fh, indent=2)
            fh.write("\n")
    return 0


def cmd_estimate(args) -> int:
    if args.local and args.method not in BOTTOM_UP:
        raise UsageError(f"--local needs a bottom-up method ({', '.join(sorted(BOTTOM_UP))}); {args.method} has no local estimates")
    kwargs = {}
    for name in ("k1", "k2", "radii", "threshold"):
        value = getattr(args, name)
        if value is None:
            continue
        if name not in _METHOD_PARAMS[args.method]:
            raise UsageError(f"--{name} does not apply to method {args.method}")
        kwargs[_PARAM_NAMES[name]] = value
    data = read_matrix(args.input)
    result = ESTIMATORS[args.method](data, **kwargs)
    print(f"estdim={format_estdim(result.estdim)}")
    if args.local:
        write_matrix(args.local, result.local_estimates)
    return 0


def cmd_generate(args) -> int:
    if args.seed < 0:
        raise UsageError("--seed must be nonnegative")
    X, truth = generate(args.model, args.n, noise=args.noise, seed=args.seed)
    write_matrix(args.output, X)
    if args.truth:
        write_matrix(args.truth, truth.latent, comments=[f"intrinsic_dim={truth.intrinsic_dim}"])
    return 0


def cmd_bench(args) -> int:
    records = run_bench(args.sizes, p=args.p, d=args.d, repeats=args.repeats, seed=args.seed)
    with open(args.output, "w", newline="") as fh:
        fh.write(records_to_csv(records))
    return 0


_COMMANDS = {"reduce": cmd_reduce, "estimate": cmd_estimate, "generate": cmd_generate, "bench": cmd_bench}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        threads = threads_from_env()
    except DimkitError as exc:
        print(f"dimkit: error: {exc}", file=sys.stderr)
        return 2
    limit = threadpool_limits(limits=threads) if threads else contextlib.nullcontext()
    try:
        with limit:
            return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"dimkit {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (DimkitError, OSError) as exc:
        print(str(exc), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
