"""Command line entry point: ``blockgs {sweep,gen,qr,check}``."""

import argparse
import sys

import numpy as np

from .bgs import VARIANTS, BlockPartition, loss_of_orthogonality, qr_residual, run_variant
from .densela import BreakdownError
from .harness import SweepSpec, default_params, format_csv, run_sweep
from .precision import PRECISIONS, get_pair
from .testmats import GluedParams, LaeuchliParams, MonomialParams, generate

FAMILY_DEFAULT_SHAPES = {
    "laeuchli": (1000, 100, 5),
    "monomial": (1000, 120, 2),
    "glued": (1000, 50, 4),
}


def _floats(text):
    return [float(v) for v in text.split(",") if v.strip()]


def _add_family_args(ap):
    ap.add_argument("--family", required=True, choices=sorted(FAMILY_DEFAULT_SHAPES))
    ap.add_argument("--precision", default="f32f64", choices=sorted(PRECISIONS))
    ap.add_argument("--m", type=int, help="rows")
    ap.add_argument("--p", type=int, help="number of blocks")
    ap.add_argument("--s", type=int, help="columns per block")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--eta", type=_floats, help="laeuchli: comma-separated eta values")
    ap.add_argument("--c1", type=float, help="glued: base log-condition")
    ap.add_argument("--c2", type=float, help="glued: glue log-condition")
    ap.add_argument(
        "--svec", type=_floats,
        help="monomial: block widths at fixed n; glued: svec values with c1 = c2 = svec/2",
    )
    ap.add_argument("--n", type=int, default=240, help="monomial: total columns for --svec")


def _family_params(args):
    """Parameter list from the family flags; no explicit flags means the default sweep."""
    fam = args.family
    m0, p0, s0 = FAMILY_DEFAULT_SHAPES[fam]
    explicit = any(
        v is not None for v in (args.m, args.p, args.s, args.eta, args.c1, args.c2, args.svec)
    )
    if not explicit:
        return default_params(fam, args.seed)
    m = args.m or m0
    p = args.p or p0
    s = args.s or s0
    if fam == "laeuchli":
        etas = args.eta or [1e-3]
        return [LaeuchliParams(m, p, s, eta) for eta in etas]
    if fam == "monomial":
        if args.svec:
            return [MonomialParams(m, args.n // int(w), int(w), args.seed) for w in args.svec]
        return [MonomialParams(m, p, s, args.seed)]
    if args.svec:
        return [GluedParams.from_svec(m, p, s, v, args.seed) for v in args.svec]
    c1 = args.c1 if args.c1 is not None else 1.0
    c2 = args.c2 if args.c2 is not None else c1
    return [GluedParams(m, p, s, c1, c2, args.seed)]


def cmd_sweep(args):
    pair = get_pair(args.precision)
    variants = tuple(v.strip() for v in args.variants.split(",") if v.strip())
    spec = SweepSpec(args.family, _family_params(args), variants, pair, args.out)

    def progress(rec):
        status = f"breakdown in block {rec.breakdown_block}" if rec.breakdown else f"loo={rec.loo:.3e}"
        print(
            f"{rec.family} {rec.sweep_param:.4g} {rec.variant:12s} kappa={rec.kappa:.3e} {status}",
            file=sys.stderr,
        )

    records = run_sweep(spec, progress=None if args.quiet else progress)
    if args.out is None:
        sys.stdout.write(format_csv(records))
    return 0


def cmd_gen(args):
    pair = get_pair(args.precision)
    params = _family_params(args)
    if len(params) != 1:
        print("gen: give a single parameter point (one --eta or --svec value)", file=sys.stderr)
        return 2
    x = generate(params[0], pair.working)
    text = "\n".join(",".join(str(v) for v in row) for row in x) + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)
    return 0


def cmd_qr(args):
    pair = get_pair(args.precision)
    x = np.loadtxt(args.input, delimiter=",", ndmin=2, dtype=np.float64)
    xw = pair.round(x)
    part = BlockPartition.of(xw, args.s)
    try:
        res = run_variant(args.variant, xw, part, pair)
    except BreakdownError as exc:
        print(f"variant={args.variant} breakdown_block={exc.block} sync_events={exc.sync_events}")
        return 1
    print(f"variant={res.variant}")
    print(f"loo={loss_of_orthogonality(res.Q)!r}")
    print(f"residual={qr_residual(xw, res.Q, res.R)!r}")
    print(f"sync_events={res.sync_events}")
    return 0


def cmd_check(args):
    from .checks import run_checks

    return 0 if run_checks() else 1


def build_parser():
    ap = argparse.ArgumentParser(prog="blockgs", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("sweep", help="run a condition-number sweep and write CSV")
    _add_family_args(sp)
    sp.add_argument("--variants", default=",".join(VARIANTS))
    sp.add_argument("--out", help="CSV path (default: stdout)")
    sp.add_argument("--quiet", action="store_true", help="no per-record progress on stderr")
    sp.set_defaults(func=cmd_sweep)

    gp = sub.add_parser("gen", help="write one test matrix as CSV")
    _add_family_args(gp)
    gp.add_argument("--out", help="CSV path (default: stdout)")
    gp.set_defaults(func=cmd_gen)

    qp = sub.add_parser("qr", help="factor a CSV matrix with one variant")
    qp.add_argument("input", help="CSV file of matrix entries, one row per line")
    qp.add_argument("--s", type=int, required=True, help="columns per block")
    qp.add_argument("--variant", default="bcgsi+ls-mp", choices=list(VARIANTS))
    qp.add_argument("--precision", default="f32f64", choices=sorted(PRECISIONS))
    qp.set_defaults(func=cmd_qr)

    cp = sub.add_parser("check", help="run the invariant suite")
    cp.set_defaults(func=cmd_check)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"blockgs: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
