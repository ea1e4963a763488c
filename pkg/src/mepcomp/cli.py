"""Command-line front end.

    mepcomp bounds   --alpha 1,1.5,2
    mepcomp instance --family one_minus_pow --p 0.6 --n 1000 --out inst.json
    mepcomp eval     --instance inst.json --alpha 1,1.5 --refine 16
    mepcomp optimal  --instance inst.json --tol 1e-4
    mepcomp sweep    --family one_minus_pow --p 0.51:0.9:0.02 --n 2000
    mepcomp simulate --dataset rows.csv --p 2 --alpha 1.5 --reps 10000 --rng-seed 7

Exit codes: 0 success, 1 usage or I/O error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import bounds, coordsim, estimators, optsearch
from .hull import opt_squares, ratio_value
from .instance import InstanceError, family_instance, load_instance


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    text = text.strip()
    if not text:
        return []
    if ":" in text:
        parts = [float(x) for x in text.split(":")]
        if len(parts) != 3 or parts[2] <= 0:
            raise argparse.ArgumentTypeError("range must be start:stop:step")
        a, b, st = parts
        count = int(math.floor((b - a) / st + 1e-9)) + 1
        return [round(a + i * st, 12) for i in range(count)]
    return [float(x) for x in text.split(",") if x.strip()]


def _num(x):
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, np.integer):
        return int(x)
    return x


def _emit(args, payload, rows=None, columns=None) -> None:
    if args.format == "csv" and rows is not None:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow(["" if _num(r[c]) is None else repr(_num(r[c])) for c in columns])
        text = buf.getvalue()
    else:
        text = json.dumps(payload, indent=2, default=_num) + "\n"
    if args.out:
        try:
            with open(args.out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise UsageError(f"cannot write {args.out}: {exc}") from exc
    else:
        sys.stdout.write(text)


def _instance(args):
    if args.instance and args.family:
        raise UsageError("give either --instance or --family/--p/--n, not both")
    if args.instance:
        return load_instance(args.instance)
    if args.family:
        if args.p is None or args.n is None:
            raise UsageError("--family needs --p and --n")
        return family_instance(args.family, _single(args.p), args.n)
    raise UsageError("an instance source is required (--instance FILE or --family/--p/--n)")


def _single(ps):
    if len(ps) != 1:
        raise UsageError("expected a single --p value")
    return ps[0]


def cmd_bounds(args):
    rows = []
    for a in args.alpha:
        r = bounds.bounds_row(a)
        rows.append({"alpha": r.alpha, "upper": r.upper, "worst_lower": r.worst_lower, "convex": r.convex})
    _emit(args, {"rows": rows}, rows, ["alpha", "upper", "worst_lower", "convex"])


def cmd_instance(args):
    inst = _instance(args)
    d = inst.to_dict()
    _emit(args, d)


def cmd_eval(args):
    inst = _instance(args)
    opts = opt_squares(inst)
    rows = []
    for a in args.alpha:
        sq = estimators.alpha_l_squares(inst, a)
        for j in range(inst.size):
            tr = estimators.alpha_l_truncated(inst, j, a, args.refine).square_integral()
            rows.append({
                "v": float(inst.values[j]),
                "alpha": float(a),
                "opt": float(opts[j]),
                "square": float(sq[j]),
                "ratio": ratio_value(sq[j], opts[j]),
                "square_trunc": tr,
                "ratio_trunc": ratio_value(tr, opts[j]),
            })
    cols = ["v", "alpha", "opt", "square", "ratio", "square_trunc", "ratio_trunc"]
    _emit(args, {"rows": rows}, rows, cols)


def cmd_optimal(args):
    inst = _instance(args)
    res = optsearch.optimal_ratio(inst, args.tol)
    _emit(args, res.to_dict())


def cmd_sweep(args):
    if not args.family or args.p is None or args.n is None:
        raise UsageError("sweep needs --family, --p (list or start:stop:step) and --n")
    res = optsearch.sweep_optimal(args.family, args.p, args.n, args.tol, workers=args.workers)
    d = res.to_dict()
    _emit(args, d, d["rows"], ["p", "c_star", "lstar_ratio"])


def cmd_simulate(args):
    if not args.dataset:
        raise UsageError("simulate needs --dataset FILE")
    try:
        ds = coordsim.load_dataset(args.dataset)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    p = _single(args.p) if args.p else 1.0
    alpha = _single(args.alpha) if args.alpha else 1.0
    if args.reps < 2:
        raise UsageError("--reps must be >= 2")
    rep = coordsim.empirical_bias(ds, p, alpha, args.reps, args.rng_seed)
    _emit(args, rep.to_dict())


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--family", choices=["one_minus_pow", "pow_one_minus"])
    common.add_argument("--p", type=_floats, help="exponent, or list / start:stop:step for sweep")
    common.add_argument("--n", type=int, help="grid size (values i/n)")
    common.add_argument("--instance", metavar="FILE", help="instance JSON")
    common.add_argument("--alpha", type=_floats, default=None, help="alpha list, e.g. 1,1.5")
    common.add_argument("--tol", type=float, default=1e-4)
    common.add_argument("--refine", type=int, default=16)
    common.add_argument("--reps", type=int, default=1000)
    common.add_argument("--rng-seed", type=int, default=0)
    common.add_argument("--dataset", metavar="FILE", help="key,v1,v2 CSV")
    common.add_argument("--workers", type=int, default=None)
    common.add_argument("--out", metavar="FILE")
    common.add_argument("--format", choices=["json", "csv"], default="json")

    parser = _Parser(prog="mepcomp", description="variance-competitive monotone estimation")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, fn, help_ in [
        ("bounds", cmd_bounds, "alpha-L* bound table"),
        ("instance", cmd_instance, "write an instance as JSON"),
        ("eval", cmd_eval, "alpha-L* ratios per datum"),
        ("optimal", cmd_optimal, "instance-optimal competitive ratio"),
        ("sweep", cmd_sweep, "optimal ratio over a p grid"),
        ("simulate", cmd_simulate, "coordinated-sampling L_p^p bias check"),
    ]:
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=fn)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.alpha is None:
        args.alpha = [] if args.command == "bounds" else [1.0]
    if args.tol <= 0:
        parser.error("--tol must be positive")
    if any(a < 1 for a in args.alpha):
        print("mepcomp: alpha must be >= 1", file=sys.stderr)
        return 1
    try:
        args.func(args)
    except (UsageError, InstanceError, OSError) as exc:
        print(f"mepcomp: {exc}", file=sys.stderr)
        return 1
    except optsearch.BracketError as exc:
        print(f"mepcomp: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError) as exc:
        print(f"mepcomp: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
