"""Command-line front end: constants, family runs, model-vs-empirical tail
comparison, and moment sweeps, emitted as CSV or JSON.

tau is in the normalized scale of the tail definitions: the large-value
threshold is e^gamma * tau and the small-value threshold is
sqrt(zeta(3)/e^gamma) / tau.
"""

import argparse
import json
import math
import os
import sys


from cubiclab import BudgetError, NoConvergenceError, PrecondError
from cubiclab import family as fam
from cubiclab import moments as mom
from cubiclab import montecarlo as mc
from cubiclab import randmodel as rm

DEFAULT_SEED = 0x5EED


def _fmt(x) -> str:
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _write_table(path, header, rows, fmt):
    """Rows of already-python values; floats printed with 12 significant digits."""
    if fmt == "csv":
        lines = [",".join(header)]
        lines += [",".join(_fmt(v) for v in row) for row in rows]
        text = "\n".join(lines) + "\n"
    elif fmt == "json":
        recs = []
        for row in rows:
            rec = {}
            for k, v in zip(header, row):
                rec[k] = float(_fmt(v)) if isinstance(v, float) else v
            recs.append(rec)
        text = json.dumps(recs, indent=1) + "\n"
    else:
        raise PrecondError(f"unknown format {fmt!r}")
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _parse_grid(spec: str):
    """'a:b:step' (inclusive) or a comma-separated list."""
    if ":" in spec:
        a, b, step = (float(t) for t in spec.split(":"))
        n = int(math.floor((b - a) / step + 1e-9)) + 1
        return [a + i * step for i in range(n)]
    return [float(t) for t in spec.split(",")]


def cmd_constants(args) -> int:
    cs = rm.constants()
    rows = [
        ("c_max", cs.c_max),
        ("c_min", cs.c_min),
        ("zeta3", cs.zeta3),
        ("zeta2", cs.zeta2),
        ("euler_gamma", cs.euler_gamma),
        ("quad_tol", cs.quad_tol),
    ]
    for ell in (int(t) for t in args.ell.split(",")):
        rows.append((f"c_ell_{ell}", rm.c_ell(ell)))
    _write_table(args.out, ["name", "value"], rows, args.format)
    return 0


def cmd_family(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    slice_path = os.path.join(args.out, "slice.csv")
    if os.path.exists(slice_path):
        slc = fam.load_slice(slice_path, X=args.x)
    else:
        slc = fam.enumerate_family(args.x)
        fam.save_slice(slc, slice_path)
    n_or_y = args.trunc if args.method == "truncated_series" else args.y
    lvs = fam.l_values(slc, method=args.method, n_or_y=n_or_y, threads=args.threads)
    fam.save_lvalues(lvs, os.path.join(args.out, "lvalues.csv"))
    taus = _parse_grid(args.tau)
    rows = []
    for side in ("large", "small"):
        t = fam.empirical_tail(slc, taus, side, lvalues=lvs)
        rows += [(r.tau, r.side, r.value, r.method, r.count, r.n) for r in t]
    _write_table(os.path.join(args.out, "tails.csv"),
                 ["tau", "side", "estimate", "method", "count", "n"], rows, "csv")
    return 0


def thm13_tau_ceiling(X: float) -> float:
    """log2 X - log3 X - log4 X - 2, the unconditional uniformity ceiling."""
    l2 = math.log(math.log(X))
    l3 = math.log(l2)
    l4 = math.log(l3) if l3 > 0 else -math.inf
    return l2 - l3 - l4 - 2.0


def cmd_compare(args) -> int:
    taus = _parse_grid(args.tau)
    slc = fam.enumerate_family(args.x)
    lvs = fam.l_values(slc, n_or_y=args.trunc, threads=args.threads)
    famtab = fam.empirical_tail(slc, taus, "large", lvalues=lvs)
    batch = mc.sample(mc.SamplerConfig(args.seed, args.y, args.samples),
                      threads=args.threads)
    mctab = mc.empirical_tails(batch, taus, "large")
    ceiling = thm13_tau_ceiling(args.x)
    rows = []
    for i, tau in enumerate(taus):
        phi_s = rm.tail_phi(tau, "saddle")
        phi_a = rm.tail_phi(tau, "asymptotic")
        rows.append((
            float(tau),
            famtab.rows[i].value,
            mctab.rows[i].value,
            mctab.rows[i].stderr,
            phi_s.value if phi_s.value is not None else 0.0,
            phi_a.value if phi_a.value is not None else 0.0,
            bool(1.0 <= tau <= ceiling),
        ))
    _write_table(args.out,
                 ["tau", "phi_family", "phi_mc", "phi_mc_se", "phi_saddle",
                  "phi_asym", "in_thm13_range"], rows, args.format)
    return 0


def cmd_moments(args) -> int:
    zs = _parse_grid(args.z)
    slc = lvs = None
    if args.x is not None:
        slc = fam.enumerate_family(args.x)
        lvs = fam.l_values(slc, n_or_y=args.trunc, threads=args.threads)
    header = ["z", "y", "double_sum", "euler_product", "rel_diff"]
    if slc is not None:
        header += ["family", "family_rel_diff"]
    rows = []
    for z in zs:
        ds = mom.moment_double_sum(mom.MomentSpec(z=z, y=args.y))
        ep = mom.moment_euler_product(args.y, z)
        rel = abs(ds.value - ep) / abs(ep)
        row = [float(z), args.y, ds.value, ep, rel]
        if slc is not None:
            fm = mom.family_moment(slc, z, lvalues=lvs)
            full = mom.moment_euler_product(10**5, z)
            row += [fm, abs(fm - full) / abs(full)]
        rows.append(tuple(row))
    _write_table(args.out, header, rows, args.format)
    return 0


def build_parser() -> argparse.ArgumentParser:
    units = ("tau is in the normalized tail scale: the large-value threshold "
             "is e^gamma * tau and the small-value threshold is "
             "sqrt(zeta(3)/e^gamma) / tau")
    ap = argparse.ArgumentParser(
        prog="cubiclab",
        description="cubic Dirichlet L(1) laboratory: family statistics vs the "
                    "random Euler-product model",
        epilog=units,
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, out_default=None):
        p.add_argument("--out", default=out_default,
                       help="output path (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--threads", type=int, default=os.cpu_count() or 1)

    p = sub.add_parser("constants", epilog=units,
                       help="model constants C_max, C_min, C_ell, zeta values")
    p.add_argument("--ell", default="3", help="comma list of odd primes for C_ell")
    common(p)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("family", epilog=units,
                       help="enumerate F_3(X), dump L-values and tails")
    p.add_argument("--x", type=int, default=10**5, help="conductor bound X")
    p.add_argument("--method", choices=("truncated_series", "short_euler_product"),
                   default="truncated_series")
    p.add_argument("--trunc", type=int, default=None,
                   help="series truncation N (default max(1e6, 50*conductor))")
    p.add_argument("--y", type=int, default=10**4, help="short-product cutoff")
    p.add_argument("--tau", default="1.0:2.0:0.1", help="tau grid a:b:step")
    p.add_argument("--out", default="family_out", help="output directory")
    p.add_argument("--format", choices=("csv",), default="csv")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p.set_defaults(func=cmd_family)

    p = sub.add_parser("compare", epilog=units,
                       help="family vs Monte Carlo vs saddle vs asymptotic tails")
    p.add_argument("--x", type=int, default=10**5)
    p.add_argument("--y", type=int, default=10**4)
    p.add_argument("--trunc", type=int, default=None)
    p.add_argument("--tau", default="1.0:2.0:0.2", help="tau grid a:b:step")
    p.add_argument("--seed", type=lambda s: int(s, 0), default=DEFAULT_SEED)
    p.add_argument("--samples", type=int, default=10**6)
    common(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("moments", epilog=units,
                       help="double-sum vs Euler-product (vs family) moments")
    p.add_argument("--z", default="-2,-1,-0.5,0.5,1,2", help="z grid (list or a:b:step)")
    p.add_argument("--y", type=int, default=13, help="smoothness / product cutoff")
    p.add_argument("--x", type=int, default=None,
                   help="family bound X for the empirical column (off by default)")
    p.add_argument("--trunc", type=int, default=None)
    common(p)
    p.set_defaults(func=cmd_moments)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (PrecondError, NoConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BudgetError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
