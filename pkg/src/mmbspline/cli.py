"""Command-line interface: ``mmbspline {simulate,fit,predict,bench}``.

Exit codes: 0 success, 2 usage or input error, 3 numerical failure.
"""
import argparse
import json
import logging
import sys

import numpy as np

from . import __version__
from ._backend import BACKEND
from .basis import build_spec
from .bench import BENCH_HEADER, loglog_slope, records_to_columns, run_bench
from .data import grid, read_columns, read_xy, simulate, write_csv, write_xy
from .exceptions import MMBSplineError, NumericalError
from .optimize import DEFAULT_BRACKET, DEFAULT_TOL
from .reml import normalize_kind
from .smoother import FitResult, fit

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3

log = logging.getLogger("mmbspline")


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _write_json(path, payload):
    text = json.dumps(payload, indent=2) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def cmd_simulate(args):
    x, y = simulate(args.n, args.xmin, args.xmax, args.noise_sd, args.seed)
    write_xy(args.out, x, y)
    return EXIT_OK


def _prediction_columns(result, x0):
    return (x0, result.predict(x0, "full"), result.predict(x0, "linear"))


def cmd_fit(args):
    x, y = read_xy(args.input)
    x_min = float(np.min(x)) if args.xmin is None else args.xmin
    x_max = float(np.max(x)) if args.xmax is None else args.xmax
    spec = build_spec(x_min, x_max, args.nseg, args.degree)
    result = fit(x, y, spec, normalize_kind(args.method), args.lam,
                 bracket=tuple(args.log10_bracket), tol=args.tol)
    summary = result.to_dict()
    summary["backend"] = BACKEND
    if not args.coefficients:
        summary.pop("u_hat")
    _write_json(args.out, summary)
    pred_out = args.pred_out
    if pred_out is None and args.out not in (None, "-"):
        pred_out = str(args.out).rsplit(".", 1)[0] + "_pred.csv"
    if pred_out is not None:
        x0 = grid(spec.x_min, spec.x_max, args.grid_step)
        write_csv(pred_out, ("x0", "yhat", "ylin"), _prediction_columns(result, x0))
    log.info("lambda=%.6g loglik=%.6g evaluations=%d", result.lam, result.loglik, result.evaluations)
    return EXIT_OK


def cmd_predict(args):
    with open(args.fit) as fh:
        data = json.load(fh)
    data.setdefault("u_hat", [])
    result = FitResult.from_dict(data)
    if args.x is not None:
        (x0,) = read_columns(args.x, ("x",))
    else:
        x0 = grid(result.spec.x_min, result.spec.x_max, args.grid_step)
    write_csv(args.out, ("x0", "yhat", "ylin"), _prediction_columns(result, x0))
    return EXIT_OK


def cmd_bench(args):
    methods = args.method or ["mmb", "cd"]

    def progress(record):
        log.info("m=%d method=%s median=%.4gs", record.m, record.method, record.seconds)

    records = run_bench(args.m_list, methods, args.n_per_segment, args.repeats,
                        args.evaluations, args.degree, args.seed, progress)
    write_csv(args.out, BENCH_HEADER, records_to_columns(records))
    for method in sorted({r.method for r in records}):
        rows = [r for r in records if r.method == method]
        if len(rows) >= 2:
            slope = loglog_slope([r.m for r in rows], [r.seconds for r in rows])
            log.info("%s: log-log slope of time vs m = %.3f", method, slope)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mmbspline",
        description="P-spline smoothing with REML penalty selection via sparse mixed models.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="write simulated x,y data")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--xmin", type=float, default=0.0)
    p.add_argument("--xmax", type=float, default=10.0)
    p.add_argument("--noise-sd", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=949030)
    p.add_argument("--out", default=None, help="output CSV (default stdout)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="fit a smoother to an x,y CSV file")
    p.add_argument("input", help="CSV with header x,y")
    p.add_argument("--xmin", type=float, default=None, help="domain start (default min x)")
    p.add_argument("--xmax", type=float, default=None, help="domain end (default max x)")
    p.add_argument("--nseg", type=int, default=100)
    p.add_argument("--degree", type=int, default=2, choices=(2, 3))
    p.add_argument("--method", default="mmb", choices=("mmb", "cd"))
    p.add_argument("--lambda", dest="lam", type=float, default=None,
                   help="fixed penalty (default: REML search)")
    p.add_argument("--log10-bracket", type=float, nargs=2, default=list(DEFAULT_BRACKET),
                   metavar=("LO", "HI"))
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--grid-step", type=float, default=0.01)
    p.add_argument("--out", default=None, help="fit summary JSON (default stdout)")
    p.add_argument("--pred-out", default=None,
                   help="prediction CSV (default: <out stem>_pred.csv when --out is a file)")
    p.add_argument("--coefficients", action="store_true", help="include u_hat in the summary")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("predict", help="evaluate a saved fit")
    p.add_argument("--fit", required=True, help="fit summary JSON written by 'fit'")
    p.add_argument("--x", default=None, help="CSV with header x (default: grid)")
    p.add_argument("--grid-step", type=float, default=0.01)
    p.add_argument("--out", default=None, help="output CSV (default stdout)")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("bench", help="time both methods over a range of basis sizes")
    p.add_argument("--m-list", type=_int_list, default=[250, 500, 1000, 2000])
    p.add_argument("--method", action="append", choices=("mmb", "cd"),
                   help="repeatable; default both")
    p.add_argument("--n-per-segment", type=float, default=10.0)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--evaluations", type=int, default=None,
                   help="fixed number of likelihood evaluations (default: full REML search)")
    p.add_argument("--degree", type=int, default=2, choices=(2, 3))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="output CSV (default stdout)")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except NumericalError as exc:
        print(f"mmbspline: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (MMBSplineError, ValueError, OSError) as exc:
        print(f"mmbspline: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
