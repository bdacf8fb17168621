"""Command-line interface: ``aplab <command> ...``.

Exit codes: 0 success / all checks pass, 1 a check failed, 2 usage error
(bad arguments, operator or weight strings), 3 I/O error.
"""

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .asymptotics import NormCurve, beta_lower, fit_exponent, parse_p_grid, sample_norm_curve, sharpness_probe
from .config import DEFAULT, RunConfig, bound_Bp
from .errors import AplabError
from .funcs1d import StepFunction1D
from .norms import lorentz_norm
from .operators import OperatorId
from .suites import SUITES, SuiteReport, verify_suite
from .svgplot import loglog_svg
from .weights import SEEDS, RdFParams, ap_constant, parse_weight, rubio_majorant

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _dumps(doc):
    return json.dumps(doc, indent=1, sort_keys=True, default=float) + "\n"


def _compact_number(x):
    x = float(x)
    return int(x) if x.is_integer() else x


def _target(args, name):
    """Resolve an output file: relative names go under the global ``--out`` directory."""
    if name is None:
        return None
    path = Path(name)
    if args.out_dir and not path.is_absolute():
        path = Path(args.out_dir) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _emit(args, text, name=None):
    path = _target(args, name)
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text)
    return path


# commands --------------------------------------------------------------------------------


def cmd_verify(args, config):
    names = list(SUITES) if args.suites == ["all"] else args.suites
    for n in names:
        if n not in SUITES:
            raise UsageError(f"unknown suite {n!r}; choose from {', '.join(SUITES)} or 'all'")
    if config.jobs > 1 and len(names) > 1:
        with ProcessPoolExecutor(config.jobs) as pool:
            reports = list(pool.map(verify_suite, names, [config] * len(names)))
    else:
        reports = [verify_suite(n, config) for n in names]
    for rep in reports:
        worst = min(rep.checks, key=lambda c: c.margin)
        status = "pass" if rep.ok else "fail"
        print(f"{rep.suite:14s} {status}  checks={len(rep.checks)}  min margin={worst.margin:.3g} ({worst.name})")
        if args.out_dir:
            _emit(args, rep.to_json() + "\n", f"verify-{rep.suite}.json")
    return EXIT_OK if all(r.ok for r in reports) else EXIT_FAIL


def cmd_norms(args, config):
    op = OperatorId.parse(args.op)
    w = None if args.weight == "const:1" else parse_weight(args.weight, config)
    curve = sample_norm_curve(op, args.family, w, parse_p_grid(args.p_grid), config)
    _emit(args, curve.to_csv(), args.out)
    if args.plot:
        svg = loglog_svg([(f"{curve.operator} / {curve.family}", curve.p, curve.N)], title=curve.weight)
        _emit(args, svg, args.plot)
    return EXIT_OK


def cmd_fit(args, config):
    try:
        curve = NormCurve.from_csv(args.infile)
    except (KeyError, ValueError) as exc:
        raise UsageError(f"cannot read norm curve {args.infile}: {exc}") from None
    fit = fit_exponent(curve, args.endpoint, args.tail)
    _emit(args, fit.to_json() + "\n", args.out)
    if args.plot:
        if args.endpoint == "one_plus":
            sel = curve.p < 2
            xs, xlabel = 1 / (curve.p[sel] - 1), "1/(p-1)"
        else:
            sel = curve.p > 2
            xs, xlabel = curve.p[sel], "p"
        line = (f"slope {fit.exponent:.3f}", fit.exponent, fit.intercept / math.log(10), xs)
        svg = loglog_svg([(curve.operator, xs, curve.N[sel])], xlabel=xlabel, fits=[line], title=f"{args.endpoint} fit")
        _emit(args, svg, args.plot)
    return EXIT_OK


def cmd_bound(args, config):
    b = beta_lower(args.alpha, args.gamma, args.p0)
    doc = {k: _compact_number(v) for k, v in json.loads(b.to_json()).items()}
    _emit(args, json.dumps(doc, sort_keys=True) + "\n", args.out)
    return EXIT_OK


def cmd_ap(args, config):
    w = parse_weight(args.weight, config)
    val, info = ap_constant(w, args.p, args.mode, config=config, return_info=True)
    doc = {"weight": args.weight, "p": args.p, "mode": args.mode, "value": val,
           "argmax": info["argmax"], "non_integrable": info["non_integrable"]}
    if "candidate" in w.diagnostics:
        doc["candidate"] = w.diagnostics["candidate"]
    _emit(args, _dumps(doc), args.out)
    return EXIT_OK


def cmd_sharpness(args, config):
    deltas = tuple(float(d) for d in args.deltas.split(","))
    res = sharpness_probe(OperatorId.parse(args.op), args.p, deltas, config.replace(near_zero_octaves=64))
    _emit(args, res.to_json() + "\n", args.out)
    if args.plot:
        a = [x for x, _ in res.pairs]
        r = [y for _, y in res.pairs]
        line = (f"slope {res.exponent:.3f}", res.exponent, res.intercept / math.log(10), a)
        _emit(args, loglog_svg([(res.operator, a, r)], xlabel="[w]_Ap", ylabel="weak ratio", fits=[line]), args.plot)
    return EXIT_OK


def cmd_rubio(args, config):
    if args.seed_fn in SEEDS:
        h = SEEDS[args.seed_fn]()
    else:
        h = StepFunction1D.from_csv(args.seed_fn)
    prm = RdFParams(args.p, bound_Bp(args.p, config.rdf_bound_rule), args.terms or config.rdf_terms, config.window_X)
    R = rubio_majorant(h, prm, config)
    rep = SuiteReport("rubio")
    rep.add("h <= R h", float(np.max(h(R.body.midpoints) - R.body.values)), 0.0)
    rep.add("|R h|_p <= 2|h|_p", lorentz_norm(R.body, None, args.p, "strong"),
            2 * lorentz_norm(h, None, args.p, "strong") + 1e-9)
    rep.add("[R h]_A1 <= 2 B_p", ap_constant(R, 1, "dyadic", config=config), 2 * prm.bound_Bp * (1 + 1e-12))
    rep.fingerprint = config.fingerprint()
    _emit(args, rep.to_json() + "\n", args.out)
    if args.weight_out:
        _emit(args, R.body.to_csv(), args.weight_out)
    return EXIT_OK if rep.ok else EXIT_FAIL


# parser -------------------------------------------------------------------------------------


def build_parser():
    ap = _Parser(prog="aplab", description="Weighted weak-type numerics: operators, A_p constants, exponent fits.")
    ap.add_argument("--config", help="JSON file with RunConfig fields")
    ap.add_argument("--seed", type=int, help="seed for randomized corpora")
    ap.add_argument("--out", dest="out_dir", help="directory for output files")
    ap.add_argument("--jobs", type=int, help="worker processes")
    # the global flags are also accepted after the command name
    common = _Parser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--jobs", type=int, default=argparse.SUPPRESS)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def command(name, help):
        return sub.add_parser(name, help=help, parents=[common])

    p = command("verify", help="run verification suites")
    p.add_argument("--out", dest="out_dir", default=argparse.SUPPRESS, help="directory for JSON reports")
    p.add_argument("suites", nargs="+", help=f"suite names ({', '.join(SUITES)}) or 'all'")
    p.set_defaults(func=cmd_verify)

    p = command("norms", help="sample a weak-norm ratio curve N(p) to CSV")
    p.add_argument("--op", required=True, help="e.g. hilbert, maximal:uncentered, iterated-maximal:k=2")
    p.add_argument("--family", default="indicator")
    p.add_argument("--weight", default="const:1")
    p.add_argument("--p-grid", default="one_plus")
    p.add_argument("--out", help="CSV file (stdout if omitted)")
    p.add_argument("--plot", help="SVG file")
    p.set_defaults(func=cmd_norms)

    p = command("fit", help="fit the endpoint exponent of a curve CSV")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--endpoint", choices=("one_plus", "infinity"), required=True)
    p.add_argument("--tail", type=int)
    p.add_argument("--out")
    p.add_argument("--plot")
    p.set_defaults(func=cmd_fit)

    p = command("bound", help="lower bound max(gamma, alpha/(p0-1)) for the A_p0 exponent")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--p0", type=float, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bound)

    p = command("ap", help="A_p constant of a weight")
    p.add_argument("--weight", required=True, help="const:1, power:a=0.5, step:file=..., rdf:p=2, primal:..., dual:...")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--mode", choices=("bruteforce", "dyadic"), default="bruteforce")
    p.add_argument("--out")
    p.set_defaults(func=cmd_ap)

    p = command("sharpness", help="fit weak ratio against [w]_Ap over the power-weight family")
    p.add_argument("--op", required=True)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--deltas", default="0.5,0.3333333333333333,0.25,0.16666666666666666,0.125,0.08333333333333333,0.0625")
    p.add_argument("--out")
    p.add_argument("--plot")
    p.set_defaults(func=cmd_sharpness)

    p = command("rubio", help="build R_p h and check its three properties")
    p.add_argument("--seed-fn", default="indicator", help="'indicator' or a step-function CSV")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--terms", type=int)
    p.add_argument("--out")
    p.add_argument("--weight-out", help="CSV for the majorant")
    p.set_defaults(func=cmd_rubio)
    return ap


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config = RunConfig.from_json(args.config) if args.config else DEFAULT
        changes = {k: v for k, v in (("seed", args.seed), ("out_dir", args.out_dir), ("jobs", args.jobs)) if v is not None}
        config = config.replace(**changes)
        return args.func(args, config)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"aplab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"aplab: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (AplabError, json.JSONDecodeError) as exc:
        print(f"aplab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
