"""Command line interface: ``pencillab <subcommand> ...``.

Numeric subcommands print one JSON object on stdout; ``chern`` prints a
short text line or, with ``--table``, CSV.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys

import numpy as np

__all__ = ["main", "build_parser"]


def _ints(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _emit(obj):
    def default(x):
        if isinstance(x, (np.floating, np.integer)):
            return x.item()
        if isinstance(x, np.ndarray):
            return x.tolist()
        raise TypeError(type(x).__name__)

    json.dump(obj, sys.stdout, indent=2, sort_keys=True, default=default)
    sys.stdout.write("\n")


def cmd_chern(args):
    from . import cohomology as coh

    if args.table:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(["n", "d", "chi_F", "chi_Y", "crit"])
        w.writerows(coh.chern_table(args.n, args.table, args.d or 1))
        return 0
    if args.d is None:
        raise SystemExit("chern: --d is required without --table")
    a, _ = coh.leading_density_complex(args.n)
    print(f"n={args.n} d={args.d} chi_F={coh.euler_fiber(args.n, args.d)} "
          f"chi_Y={coh.euler_base(args.n, args.d)} crit={coh.exact_crit_count(args.n, args.d)} "
          f"density(d->inf)={a}")
    return 0


def cmd_er(args):
    from .constants import e_r
    from .ensembles import make_stream

    method = {"quad": "quadrature"}.get(args.method, args.method)
    est = e_r(args.n, method, args.samples, make_stream(args.seed))
    _emit({"value": est.mean, "stderr": est.stderr,
           "meta": {"n": args.n, "method": method, "samples": est.n_samples, "seed": args.seed}})
    return 0


def cmd_constant(args):
    from .constants import kac_rice_density, predicted_real_density

    dc = predicted_real_density(args.n)
    meta = {"n": args.n, "e_r": dc.e_r_value, "c_r": dc.c_r}
    if args.n <= 2:
        meta["kac_rice_density"] = kac_rice_density(args.n)
    _emit({"value": dc.predicted_density_cpn if dc.predicted_density_cpn is not None else dc.c_r,
           "stderr": 0.0, "meta": meta})
    return 0


def cmd_peaks(args):
    from .constants import peak_lambda, peak_radius

    vals = {}
    for p in range(3):
        lam, full = peak_lambda(args.d, p), peak_lambda(args.d, p, True)
        vals[str(p)] = {"lambda": lam, "lambda_full_range": full,
                        "lambda_over_sqrt_d_power": lam / math.sqrt(args.d) ** (p + 1),
                        "truncation_gap": abs(lam / full - 1)}
    _emit({"value": vals, "stderr": None, "meta": {"d": args.d, "radius": peak_radius(args.d)}})
    return 0


def cmd_quadric(args):
    from .ensembles import make_stream
    from .quadric import quadric_mc

    est, rep = quadric_mc(args.n, args.samples, make_stream(args.seed), args.workers)
    _emit({"estimate": est.mean, "stderr": est.stderr, "closed_form": rep.closed_form,
           "ratio": rep.ratio, "ratio_ci": list(rep.ratio_ci), "report": rep.to_dict()})
    return 0


def _run(args, n):
    from .experiments import RunConfig, run_pencil1d, run_pencil2d

    cfg = RunConfig(n, args.d, args.samples, args.seed, out=args.out, workers=args.workers)
    rec = run_pencil1d(cfg) if n == 1 else run_pencil2d(cfg)
    out = {"run_id": rec.run_id, "summary": rec.summary.to_dict()}
    if args.out:
        out["csv"] = str(args.out)
    _emit(out)
    return 0 if rec.summary.valid else 2


def cmd_angles(args):
    from .experiments import ks_uniform, pooled_angles

    ang, rec = pooled_angles(args.d, args.samples, args.seed, workers=args.workers)
    if args.out:
        np.savetxt(args.out, ang, fmt="%.17g")
    _emit({"n_angles": int(len(ang)), "ks": ks_uniform(ang) if len(ang) >= 100 else None,
           "summary": rec.summary.to_dict()})
    return 0


def cmd_study(args):
    from .experiments import convergence_study

    st = convergence_study(args.ds, args.samples, args.seed, n=args.n, workers=args.workers)
    _emit(st.to_dict())
    return 0


def cmd_report(args):
    from .acceptance import run_all, verdict

    res = run_all(set(args.only) if args.only else None,
                  echo=lambda line: print(line, file=sys.stderr, flush=True))
    v = verdict(res)
    _emit(v)
    return 0 if v["passed"] else 1


def build_parser():
    p = argparse.ArgumentParser(prog="pencillab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("chern", help="exact Euler characteristics and complex critical counts")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--d", type=int)
    s.add_argument("--table", type=int, metavar="DMAX", help="CSV rows for d = D (or 1) .. DMAX")
    s.set_defaults(fn=cmd_chern)

    s = sub.add_parser("er", help="expected absolute determinant e_R(n)")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--method", choices=["mc", "quad", "quadrature"], default="quad")
    s.add_argument("--samples", type=int, default=10**6)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(fn=cmd_er)

    s = sub.add_parser("constant", help="predicted real density constant")
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(fn=cmd_constant)

    s = sub.add_parser("peaks", help="peak-section normalization constants on CP^1")
    s.add_argument("--d", type=int, required=True)
    s.set_defaults(fn=cmd_peaks)

    s = sub.add_parser("quadric", help="importance-sampling estimate of the quadric integral")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--samples", type=int, default=10**6)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--workers", type=int)
    s.set_defaults(fn=cmd_quadric)

    for name, n in (("pencil1d", 1), ("pencil2d", 2)):
        s = sub.add_parser(name, help=f"Monte Carlo over random pencils on CP^{n}")
        s.add_argument("--d", type=int, required=True)
        s.add_argument("--samples", type=int, required=True)
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--out", help="CSV path (a .json summary is written next to it)")
        s.add_argument("--workers", type=int)
        s.set_defaults(fn=lambda a, n=n: _run(a, n))

    s = sub.add_parser("angles", help="pooled critical angles and their KS distance to uniform")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--samples", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", help="write the pooled angles, one per line")
    s.add_argument("--workers", type=int)
    s.set_defaults(fn=cmd_angles)

    s = sub.add_parser("study", help="mean/sqrt(d)^n over several d with 1/sqrt(d) extrapolation")
    s.add_argument("--ds", type=_ints, required=True, help="e.g. 64,256,1024")
    s.add_argument("--samples", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--n", type=int, default=1, choices=[1, 2])
    s.add_argument("--workers", type=int)
    s.set_defaults(fn=cmd_study)

    s = sub.add_parser("report", help="run the acceptance battery and print a JSON verdict")
    s.add_argument("--only", type=_ints, help="comma-separated criterion numbers")
    s.set_defaults(fn=cmd_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return int(args.fn(args) or 0)
    except (ValueError, NotImplementedError) as exc:
        print(f"pencillab {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
