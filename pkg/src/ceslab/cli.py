"""Command-line entry point.

Exit codes: 0 success, 1 a check failed, 2 bad input (spec string, file,
parameters), 3 domain mismatch. Results go to stdout as JSON or CSV;
diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import norms as N
from .core import (Domain, DomainMismatch, Sequence, SpecError, StepFunction, Undecidable, UnsupportedSpec,
                   load_input, parse_space, parse_weight)
from .duality import REPORT_KINDS, duality_report, sinnamon_sup
from .inequalities import check_hardy_power, extremal_step
from .interpolation import check_k_identity, k_functional_weighted
from .operators import cesaro, majorant
from .sampling import family_for, random_halfline_domain, random_step, sample_rng
from .suite import SuiteConfig, run_suite, summary_csv, write_reports

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_DOMAIN = 0, 1, 2, 3

log = logging.getLogger("ceslab")


def _read_input(path: str):
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return load_input(text)


def _dump(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _csv(rows, header) -> None:
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)


def cmd_norm(args) -> int:
    X = parse_space(args.space)
    f = _read_input(args.input)
    _dump(N.norm(f, X).to_dict())
    return EXIT_OK


def cmd_dual_report(args) -> int:
    X = parse_space(args.space)
    rep = duality_report(X, args.samples, args.seed, kind=args.kind)
    d = rep.to_dict()
    if args.out:
        Path(args.out).write_text(json.dumps(d, indent=2, sort_keys=True) + "\n")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["sample", "ratio", "lower", "upper"])
            for i, r in enumerate(rep.ratios):
                w.writerow([i, repr(float(r)), repr(float(rep.interval[0])), repr(float(rep.interval[1]))])
    _dump(d)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_sinnamon(args) -> int:
    f, g = _read_input(args.f), _read_input(args.g)
    lp, closed, wit = sinnamon_sup(f, g)
    rel = abs(lp - closed) / max(abs(lp), abs(closed), 1e-300)
    ok = rel <= args.rtol
    _dump({"lp_value": lp, "closed_form": closed, "rel_err": rel, "pass": ok,
           "constraint_slack": wit.constraint_slack, "witness": wit.h.to_dict()})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_hardy(args) -> int:
    dom_kind = args.domain
    rows, ok = [], True
    for i in range(args.samples):
        rng = sample_rng(args.seed, i)
        if args.family == "extremal":
            # x^(-1/p-alpha+eps) on [0, 1] with eps shrinking across samples
            dom = Domain.unit() if dom_kind == "unit" else Domain.halfline(2.0)
            f = extremal_step(args.p, 0.2 / (i + 1), dom, alpha=args.alpha)
        else:
            dom = Domain.unit() if dom_kind == "unit" else random_halfline_domain(rng)
            f = random_step(rng, dom, 40, family_for(i))
        c = check_hardy_power(f, args.p, args.alpha)
        ok &= c.passed
        rows.append([i, repr(c.lhs), repr(c.rhs), repr(c.margin)])
    _csv(rows, ["sample", "lhs", "rhs", "margin"])
    return EXIT_OK if ok else EXIT_FAIL


def cmd_kfun(args) -> int:
    f = _read_input(args.input)
    if not isinstance(f, StepFunction):
        raise SpecError("kfun takes a step function")
    w = parse_weight(args.weight)
    dec = k_functional_weighted(f, args.t, w)
    chk = check_k_identity(f, args.t, w)
    _dump({"t": args.t, "K_weighted": dec.value, "K_of_fw": chk.rhs, "equal": chk.passed,
           "level": dec.level, "g_L1w": dec.g_norm, "h_Linfw": dec.h_norm,
           "g": dec.g.to_dict(), "h": dec.h.to_dict()})
    return EXIT_OK if chk.passed else EXIT_FAIL


def _parse_samples(items) -> dict:
    out = {}
    for it in items or ():
        k, _, v = it.partition("=")
        try:
            out[int(k)] = int(v)
        except ValueError:
            raise SpecError(f"--samples expects K=N, got {it!r}") from None
    return out


def cmd_suite(args) -> int:
    if args.tolerance is not None and args.tolerance < 0:
        raise SpecError("tolerance must be >= 0")
    cfg = SuiteConfig(seed=args.seed, samples=_parse_samples(args.samples), tolerance=args.tolerance,
                      out_dir=args.out, fmt=args.format, only=tuple(args.only or ()))
    bad = [k for k in cfg.only if k not in range(1, 13)]
    if bad:
        raise SpecError(f"unknown criteria {bad}")
    results = run_suite(cfg)
    for r in results:
        print(f"{r.line()}  ({r.runtime:.1f}s)", file=sys.stderr)
        for note in r.notes:
            print(f"      note: {note}", file=sys.stderr)
    if args.out:
        try:
            write_reports(results, args.out, args.format)
        except OSError as e:
            raise SpecError(f"cannot write reports: {e}") from None
    sys.stdout.write(summary_csv(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def cmd_plotdata(args) -> int:
    f = _read_input(args.input)
    if isinstance(f, Sequence):
        raise SpecError("plotdata takes a step function")
    lo = args.lo
    hi = args.hi if args.hi is not None else (f.horizon if f.domain.is_unit else 2 * f.horizon)
    if args.points < 1 or hi < lo or lo < 0:
        raise SpecError("need points >= 1 and 0 <= lo <= hi")
    x = np.linspace(lo, hi, args.points)
    fa = f.abs()
    cf = cesaro(fa)(x) if fa.n_cells else np.zeros_like(x)
    rows = [[repr(float(a)), repr(float(b)), repr(float(c)), repr(float(d))]
            for a, b, c, d in zip(x, f(x), cf, majorant(f)(x))]
    _csv(rows, ["x", "f", "Cf", "f_tilde"])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ceslab", description="Cesaro-space norms, duals and inequality checks")
    ap.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("norm", help="norm of a function or sequence in a space")
    p.add_argument("--space", required=True)
    p.add_argument("--input", required=True, help="JSON file, or - for stdin")
    p.set_defaults(fn=cmd_norm)

    p = sub.add_parser("dual-report", help="sampled duality ratios against the proven interval")
    p.add_argument("--space", required=True)
    p.add_argument("--kind", choices=REPORT_KINDS, help="which duality to check (default: inferred from the space)")
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="also write the JSON report here")
    p.add_argument("--csv", help="write the ratio table here")
    p.set_defaults(fn=cmd_dual_report)

    p = sub.add_parser("sinnamon", help="majorization LP against int f g~")
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--rtol", type=float, default=1e-8)
    p.set_defaults(fn=cmd_sinnamon)

    p = sub.add_parser("hardy", help="Hardy inequality in L^p(x^alpha) on sampled inputs")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--domain", choices=("unit", "halfline"), default="halfline")
    p.add_argument("--family", choices=("random", "extremal"), default="random")
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_hardy)

    p = sub.add_parser("kfun", help="weighted K-functional with its optimal decomposition")
    p.add_argument("--input", required=True)
    p.add_argument("--weight", default="(pow 0)")
    p.add_argument("--t", type=float, required=True)
    p.set_defaults(fn=cmd_kfun)

    p = sub.add_parser("suite", help="run the acceptance criteria")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", nargs="*", metavar="K=N", help="per-criterion sample counts")
    p.add_argument("--tolerance", type=float, help="override every pass tolerance")
    p.add_argument("--only", type=int, nargs="*", metavar="K")
    p.add_argument("--out", help="directory for per-criterion reports and summary.csv")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(fn=cmd_suite)

    p = sub.add_parser("plotdata", help="CSV of x, f, Cf and the majorant on a grid")
    p.add_argument("--input", required=True)
    p.add_argument("--points", type=int, default=101)
    p.add_argument("--lo", type=float, default=0.0)
    p.add_argument("--hi", type=float)
    p.set_defaults(fn=cmd_plotdata)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.fn(args)
    except DomainMismatch as e:
        log.error("domain mismatch: %s", e)
        return EXIT_DOMAIN
    except (SpecError, UnsupportedSpec, Undecidable, json.JSONDecodeError, KeyError, OSError, ValueError) as e:
        log.error("%s: %s", type(e).__name__, e)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
