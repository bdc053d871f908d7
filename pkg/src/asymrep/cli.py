"""Command-line interface.

Subcommands::

    asymrep defect-table --group z2 --n 4..1024:x2 --p 1,2,inf --format csv
    asymrep pair         --group z2 --n 4,8,16
    asymrep pair         --certificate cert.json
    asymrep certify      --group z2 --n 8,16,32 --output cert.json
    asymrep perturb      --group z2 --n 16 --seeds 20 --budget 100000
    asymrep demo

Exit codes: 0 success, 2 invalid input, 3 integrity error (quantisation
failure or disagreeing recomputation), 4 a search found an exact
representation closer than 1/24 on an instance with a valid certificate.
Diagnostics go to standard error as one JSON object per line.
"""

import argparse
from concurrent.futures import ProcessPoolExecutor
import csv
import io
import json
import math
import sys

from . import errors
from .datafiles import load_group_data
from .matrix_core import parse_p
from .obstruction import THRESHOLD, canonical_json, certify_nonstable, recheck_certificate, winding_pair
from .perturb import best_report, make_problem, run_searches, bound_violations
from .voiculescu import AsymptoticRep, defect_bound, defect_norm

EXIT_OK, EXIT_INPUT, EXIT_INTEGRITY, EXIT_CONTRADICTION = 0, 2, 3, 4

CSV_COLUMNS = {
    "defect-table": ("n", "p", "g", "h", "m", "defect", "bound"),
    "pair": ("n", "raw_re", "raw_im", "rounded", "valid", "max_defect"),
    "perturb": ("seed", "start", "best_distance_inf", "relator_defect", "objective", "iterations", "converged"),
}

COLUMN_HELP = """\
CSV columns (floats written with 17 significant digits):
  defect-table  n,p,g,h,m,defect,bound
                m = beta(g)*alpha(h); defect = ||rho(gh) - rho(g)rho(h)||_p;
                bound = 2*pi*|m|/n * n^(1/p)  (p = inf written as "inf")
  pair          n,raw_re,raw_im,rounded,valid,max_defect
  perturb       n,seed,start,best_distance_inf,relator_defect,objective,iterations,converged

n values: comma separated; "a..b" is an inclusive range, "a..b:x2" doubles.
"""


class UsageError(Exception):
    pass


# -- argument parsing ----------------------------------------------------


def parse_n_values(text):
    """``"8,16"``, ``"4..10"``, ``"16..4096:x2"`` and comma-separated mixtures."""
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if ".." in part:
                rng, _, step = part.partition(":")
                a, b = (int(x) for x in rng.split(".."))
                if step:
                    if not step.startswith("x") or int(step[1:]) < 2:
                        raise UsageError(f"bad range step {step!r}; use e.g. ':x2'")
                    k = int(step[1:])
                    v = a
                    while v <= b:
                        out.append(v)
                        v *= k
                else:
                    out.extend(range(a, b + 1))
            else:
                out.append(int(part))
        except ValueError:
            raise UsageError(f"cannot parse n value {part!r}") from None
    if not out:
        raise UsageError("no n values given")
    if min(out) < 1:
        raise UsageError("n values must be >= 1")
    return sorted(set(out))


def parse_p_values(text):
    try:
        return [parse_p(x) for x in str(text).split(",") if x.strip()]
    except (ValueError, errors.InvalidParameterError) as exc:
        raise UsageError(str(exc)) from None


def build_parser():
    parser = argparse.ArgumentParser(
        prog="asymrep",
        description="Defects, winding pairings, non-stability certificates and perturbation searches "
        "for the Voiculescu pullback representations.",
        epilog=COLUMN_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, n_default=None):
        p.add_argument("--group", default="z2", help="group data file or shipped name (default: z2)")
        p.add_argument("--n", default=n_default, help="n values: list, a..b or a..b:x2")
        p.add_argument("--output", help="write here instead of standard output")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--jobs", type=int, default=1, help="worker processes (output order is fixed)")

    p = sub.add_parser("defect-table", help="defect norms against the closed-form bound", epilog=COLUMN_HELP,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    common(p, "4..64:x2")
    p.add_argument("--p", default="inf", help="Schatten exponents, e.g. 1,2,inf")
    p.add_argument("--pairs", help="g:h pairs, e.g. 'a:b,b:a' (default: the cells of the shipped cycle)")

    p = sub.add_parser("pair", help="winding pairing of rho_n with the shipped cycle")
    common(p, "8,16,32")
    p.add_argument("--certificate", help="re-check a certificate JSON produced by 'certify'")

    p = sub.add_parser("certify", help="emit a non-stability certificate")
    common(p, "8,16,32")

    p = sub.add_parser("perturb", help="search for a nearby genuine representation")
    common(p, "16")
    p.add_argument("--budget", type=int, default=10_000)
    p.add_argument("--seeds", type=int, default=4, help="number of restarts; the first starts warm")
    p.add_argument("--lam", type=float, default=10.0, help="relator penalty weight")
    p.add_argument("--seed", type=int, default=0, help="first seed")

    p = sub.add_parser("demo", help="run the whole pipeline on Z^2 and print a summary")
    p.add_argument("--budget", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    return parser


# -- formatting ----------------------------------------------------------


def fmt_float(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return "%.17g" % x


def _csv_value(v):
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return fmt_float(v)
    return "" if v is None else str(v)


def to_csv(columns, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_csv_value(row[c]) for c in columns])
    return buf.getvalue()


def _json_p(p):
    return "inf" if math.isinf(p) else p


def emit(text, output):
    if output:
        with open(output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def diagnose(kind, message, **extra):
    sys.stderr.write(json.dumps({"error": kind, "message": message, **extra}, sort_keys=True) + "\n")


# -- commands ------------------------------------------------------------


def _dataset(args):
    ds = load_group_data(args.group)
    if ds.alpha is None or ds.beta is None:
        raise UsageError(f"group {ds.name} has no alpha/beta homomorphisms")
    return ds


def _n_values(args):
    return parse_n_values(args.n)


def _defect_rows(job):
    ds_name, n, ps, pairs = job
    ds = load_group_data(ds_name)
    R = AsymptoticRep(n, ds.alpha, ds.beta)
    G = ds.group
    rows = []
    for p in ps:
        for g, h in pairs:
            m = R.twist_exponent(g, h)
            rows.append({
                "n": n,
                "p": p,
                "g": G.format(g),
                "h": G.format(h),
                "m": m,
                "defect": defect_norm(R, g, h, p),
                "bound": defect_bound(n, m, p),
            })
    return rows


def cmd_defect_table(args):
    ds = _dataset(args)
    G = ds.group
    ps = parse_p_values(args.p)
    if args.pairs:
        pairs = []
        for item in args.pairs.split(","):
            g, sep, h = item.partition(":")
            if not sep:
                raise UsageError(f"bad pair {item!r}; expected g:h")
            pairs.append((G.parse(g), G.parse(h)))
    else:
        pairs = [cell for _, cell in ds.cycle]
    jobs = [(args.group, n, ps, pairs) for n in _n_values(args)]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            chunks = list(ex.map(_defect_rows, jobs))
    else:
        chunks = [_defect_rows(j) for j in jobs]
    rows = [r for c in chunks for r in c]
    if args.format == "csv":
        return to_csv(CSV_COLUMNS["defect-table"], rows), EXIT_OK
    for r in rows:
        r["p"] = _json_p(r["p"])
    return canonical_json({"group": ds.name, "rows": rows}), EXIT_OK


def cmd_pair(args):
    if args.certificate:
        with open(args.certificate) as fh:
            cert = json.load(fh)
        ok, fresh = recheck_certificate(cert)
        out = {"certificate": args.certificate, "consistent": ok, "recomputed": fresh.to_json()}
        if not ok:
            diagnose("IntegrityError", "certificate does not match its recomputation")
        return canonical_json(out), EXIT_OK if ok else EXIT_INTEGRITY
    ds = _dataset(args)
    c = ds.cycle
    rows = []
    for n in _n_values(args):
        res = winding_pair(AsymptoticRep(n, ds.alpha, ds.beta), c)
        if not res.valid:
            diagnose("InvalidPairing", res.diagnostic, n=n)
        rows.append(res.to_json(n))
    if args.format == "csv":
        return to_csv(CSV_COLUMNS["pair"], rows), EXIT_OK
    return canonical_json({"group": ds.name, "results": rows}), EXIT_OK


def cmd_certify(args):
    if args.format != "json":
        raise UsageError("certificates are JSON only")
    ds = _dataset(args)
    cert = certify_nonstable(ds.group, ds.alpha, ds.beta, ds.cycle, _n_values(args))
    for d in cert.diagnostics:
        diagnose("NoConclusion", d)
    return cert.dumps(), EXIT_OK


def cmd_perturb(args):
    if args.seeds < 1:
        raise UsageError("--seeds must be at least 1")
    ds = _dataset(args)
    ns = _n_values(args)
    status = EXIT_OK
    blocks = []
    rows = []
    for n in ns:
        R = AsymptoticRep(n, ds.alpha, ds.beta)
        P = make_problem(ds, R, lam=args.lam, budget=args.budget)
        seeds = list(range(args.seed, args.seed + args.seeds))
        starts = ["warm"] + ["random"] * (len(seeds) - 1)
        reports = run_searches(P, seeds, jobs=args.jobs, starts=starts)
        cert = certify_nonstable(ds.group, ds.alpha, ds.beta, ds.cycle, [n])
        bad = bound_violations(reports) if cert.verdict else []
        for r in bad:
            diagnose("BoundContradiction", "exact representation closer than 1/24 on a certified instance",
                     n=n, seed=r.seed, distance=r.best_distance_inf)
            status = EXIT_CONTRADICTION
        best = best_report(reports)
        blocks.append({
            "n": n,
            "certified": cert.verdict,
            "threshold": THRESHOLD,
            "best_seed": best.seed,
            "best_distance_inf": best.best_distance_inf,
            "violations": [r.seed for r in bad],
            "reports": [r.to_json() for r in reports],
        })
        rows.extend({"n": n, **r.to_json()} for r in reports)
    if args.format == "csv":
        return to_csv(("n",) + CSV_COLUMNS["perturb"], rows), status
    out = {"group": ds.name, "lam": args.lam, "budget": args.budget, "runs": blocks}
    return canonical_json(out), status


def cmd_demo(args):
    ds = load_group_data("z2")
    G = ds.group
    lines = [f"group {ds.name}: generators {', '.join(G.generators)}; relators {', '.join(G.format(r) for r in G.relators)}"]
    lines.append(f"cycle c = {ds.cycle!r}")
    lines.append("")
    lines.append("operator-norm defect at (b, a), against the bound 2 pi |m| / n:")
    a, b = G.gen(0), G.gen(1)
    for n in (4, 16, 64, 256):
        R = AsymptoticRep(n, ds.alpha, ds.beta)
        m = R.twist_exponent(b, a)
        lines.append(f"  n={n:<4d} m={m}  defect={defect_norm(R, b, a, math.inf):.6f}  bound={defect_bound(n, m, math.inf):.6f}")
    lines.append("")
    lines.append("winding pairing <rho_n, c>:")
    for n in (4, 6, 8, 32):
        res = winding_pair(AsymptoticRep(n, ds.alpha, ds.beta), ds.cycle)
        val = f"{res.rounded} (raw {res.raw.real:.3e}{res.raw.imag:+.1e}i)" if res.valid else "invalid"
        lines.append(f"  n={n:<3d} {val}  max defect {res.max_defect:.4f}")
    cert = certify_nonstable(G, ds.alpha, ds.beta, ds.cycle, [8, 16, 32])
    lines.append("")
    lines.append(f"certificate verdict: {cert.verdict}")
    lines.append(cert.conclusion())
    n = 8
    P = make_problem(ds, AsymptoticRep(n, ds.alpha, ds.beta), budget=args.budget)
    reports = run_searches(P, [args.seed, args.seed + 1], starts=["warm", "random"])
    lines.append("")
    lines.append(f"perturbation search at n={n} (budget {args.budget}):")
    for r in reports:
        lines.append(f"  seed {r.seed} ({r.start}): distance {r.best_distance_inf:.6f}, relator defect {r.relator_defect:.2e}")
    status = EXIT_CONTRADICTION if bound_violations(reports) else EXIT_OK
    lines.append(f"  smallest distance {best_report(reports).best_distance_inf:.6f} vs threshold {THRESHOLD:.6f}")
    return "\n".join(lines) + "\n", status


COMMANDS = {
    "defect-table": cmd_defect_table,
    "pair": cmd_pair,
    "certify": cmd_certify,
    "perturb": cmd_perturb,
    "demo": cmd_demo,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        text, status = COMMANDS[args.command](args)
    except (UsageError, errors.GroupDataError, errors.InvalidParameterError, errors.RewritingError,
            errors.CannotVerifyError, errors.HomomorphismError, OSError, json.JSONDecodeError) as exc:
        diagnose(type(exc).__name__, str(exc))
        return EXIT_INPUT
    except errors.IntegrityError as exc:
        diagnose("IntegrityError", str(exc))
        return EXIT_INTEGRITY
    emit(text, getattr(args, "output", None))
    return status


if __name__ == "__main__":
    sys.exit(main())
