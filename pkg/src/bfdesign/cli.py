"""Command-line front end.

Every subcommand first echoes its fully resolved settings as ``# key =
value`` lines, then prints results.  Settings may also come from a
``--config FILE`` of ``key = value`` lines; explicit flags win.

Exit codes: 0 success, 2 bad usage or invalid configuration, 3 target not
attainable, 4 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from fractions import Fraction

from . import __version__
from .bayesfactor import AnalysisPrior, OneSided, PointNull, bf01, log_bf01
from .design import (
    DesignConfig,
    Metric,
    SampleSizeQuery,
    curve,
    find_sample_size,
    find_threshold,
    operating_characteristics,
    rejection_set,
)
from .errors import ConvergenceError, DomainError, NotAttainableError
from .mc import Event, Hypothesis, mc_characteristics, mc_probability
from .priors import format_prior, parse_prior
from .sweeps import TABLE1_B_VALUES, table1

EXIT_USAGE = 2
EXIT_NOT_ATTAINABLE = 3
EXIT_NO_CONVERGENCE = 4

DEFAULT_TARGETS = {Metric.POWER: 0.8, Metric.TYPE1: 0.05, Metric.H0_EVIDENCE: 0.8}
CURVE_FIELDS = ("n", "power", "type1", "h0_evidence", "indecisive_h0", "indecisive_h1")


class UsageError(Exception):
    pass


def positive_real(text):
    """A real > 0; fractions such as ``1/3`` are accepted."""
    try:
        v = float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def probability(text):
    v = positive_real(text)
    if not v < 1:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1): {text!r}")
    return v


def nonneg_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative: {text!r}")
    return v


def positive_int(text):
    v = nonneg_int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def prior_spec(text):
    try:
        return parse_prior(text)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def band(text):
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"band must be 'lo,hi', got {text!r}")
    return positive_real(parts[0]), positive_real(parts[1])


def metric_name(text):
    try:
        return Metric(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"metric must be one of {', '.join(m.value for m in Metric)}") from None


# ---------------------------------------------------------------------------
# parser


def _add_test(p):
    p.add_argument("--test", choices=("one-sided", "two-sided"), default="one-sided")
    p.add_argument("--p0", type=probability, default=0.5)
    p.add_argument("--aa", type=positive_real, default=1.0, help="analysis prior shape a")
    p.add_argument("--ba", type=positive_real, default=1.0, help="analysis prior shape b")


def _add_design(p):
    _add_test(p)
    p.add_argument("--k", type=positive_real, default=0.1, help="evidence threshold (e.g. 1/10)")
    p.add_argument("--design-h0", type=prior_spec, default=None,
                   help="beta:a,b[,l,u] or point:p (default depends on --test)")
    p.add_argument("--design-h1", type=prior_spec, default=None)
    p.add_argument("--band", type=band, default=(1.0 / 3.0, 3.0), help="indecisive band 'lo,hi'")


def _add_search(p):
    p.add_argument("--metric", type=metric_name, default=Metric.POWER)
    p.add_argument("--target", type=probability, default=None)
    p.add_argument("--non-strict", action="store_true",
                   help="accept power/evidence equal to the target")


def build_parser():
    parser = argparse.ArgumentParser(prog="bfdesign",
                                     description="Bayes-factor design for binomial tests.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", default=None, help="file of 'key = value' settings")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bf", help="evaluate BF01 for observed data")
    _add_test(p)
    p.add_argument("--y", type=nonneg_int, required=True)
    p.add_argument("--n", type=positive_int, required=True)

    p = sub.add_parser("oc", help="operating characteristics at one n")
    _add_design(p)
    p.add_argument("--n", type=positive_int, required=True)

    p = sub.add_parser("n", help="smallest stable sample size")
    _add_design(p)
    _add_search(p)
    p.add_argument("--n-min", type=positive_int, default=1)
    p.add_argument("--n-max", type=positive_int, default=100000)
    p.add_argument("--window", type=nonneg_int, default=10)

    p = sub.add_parser("threshold", help="most stringent k meeting a target at fixed n")
    _add_design(p)
    _add_search(p)
    p.add_argument("--n", type=positive_int, required=True)

    p = sub.add_parser("curve", help="CSV of characteristics over a range of n")
    _add_design(p)
    p.add_argument("--n-min", type=positive_int, required=True)
    p.add_argument("--n-max", type=positive_int, required=True)
    p.add_argument("--out", default=None, help="CSV path (default: stdout)")

    p = sub.add_parser("mc", help="Monte Carlo estimates next to exact values")
    _add_design(p)
    p.add_argument("--n", type=positive_int, required=True)
    p.add_argument("--nsim", type=positive_int, default=100000)
    p.add_argument("--seed", type=nonneg_int, default=42)
    p.add_argument("--chunks", type=positive_int, default=1)
    p.add_argument("--hypothesis", choices=("H0", "H1"), default=None)
    p.add_argument("--event", choices=tuple(e.value for e in Event), default=None)

    p = sub.add_parser("table1", help="informativeness sweep of the phase II example")
    p.add_argument("--k", type=positive_real, required=True)
    p.add_argument("--out", default=None, help="CSV path (default: stdout)")
    p.add_argument("--p0", type=probability, default=0.2)
    p.add_argument("--p1", type=probability, default=0.4)
    p.add_argument("--target", type=probability, default=0.9)
    p.add_argument("--ad-decimals", type=nonneg_int, default=None,
                   help="round the centred a_d to this many decimals")
    return parser


def read_config(path):
    """Parse ``key = value`` lines; blank lines and '#' comments are skipped."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            values[key.replace("-", "_")] = value
    return values


def parse_args(argv):
    parser = build_parser()
    # only --config and the subcommand name; the full parse happens once the
    # file's values are installed as defaults
    pre_parser = argparse.ArgumentParser(add_help=False)
    pre_parser.add_argument("--config", default=None)
    pre_parser.add_argument("command", nargs="?")
    pre, _ = pre_parser.parse_known_args(argv)
    if pre.config is None or pre.command not in COMMANDS:
        return parser.parse_args(argv)
    try:
        values = read_config(pre.config)
    except OSError as exc:
        parser.error(f"cannot read config: {exc}")
    except UsageError as exc:
        parser.error(str(exc))
    subparser = parser._subparsers._group_actions[0].choices[pre.command]
    known = {a.dest: a for a in subparser._actions}
    unknown = sorted(set(values) - set(known))
    if unknown:
        parser.error(f"unknown config key(s): {', '.join(unknown)}")
    for key, value in values.items():
        action = known[key]
        if isinstance(action, argparse._StoreTrueAction):
            value = value.lower() in ("1", "true", "yes", "on")
        else:
            # string defaults go through the action's type converter
            action.required = False
        subparser.set_defaults(**{key: value})
    return parser.parse_args(argv)


# ---------------------------------------------------------------------------
# helpers


def _pct(x):
    return f"{100.0 * x:.2f}%"


def _num(x):
    return repr(float(x))


def _analysis(args):
    return AnalysisPrior(args.aa, args.ba)


def _test(args):
    return OneSided(args.p0) if args.test == "one-sided" else PointNull(args.p0)


def _config(args):
    analysis = _analysis(args)
    if args.test == "one-sided":
        h0 = args.design_h0 or parse_prior(f"beta:{args.aa!r},{args.ba!r},0,{args.p0!r}")
        h1 = args.design_h1 or parse_prior(f"beta:{args.aa!r},{args.ba!r},{args.p0!r},1")
    else:
        h0 = args.design_h0 or parse_prior(f"point:{args.p0!r}")
        h1 = args.design_h1 or parse_prior(f"beta:{args.aa!r},{args.ba!r}")
    args.design_h0, args.design_h1 = h0, h1
    return DesignConfig(_test(args), analysis, h0, h1, args.k, tuple(args.band))


def _echo(args, out):
    for key, value in sorted(vars(args).items()):
        if key in ("config",) and value is None:
            continue
        if isinstance(value, Metric):
            value = value.value
        elif hasattr(value, "a") or hasattr(value, "p"):
            value = format_prior(value)
        elif isinstance(value, tuple):
            value = ",".join(_num(v) for v in value)
        elif isinstance(value, float):
            value = _num(value)
        out.write(f"# {key} = {value}\n")


def _write_oc(oc, out):
    out.write(f"n = {oc.n}\n")
    out.write(f"power = {_pct(oc.power)}\n")
    out.write(f"type-I error = {_pct(oc.type1)}\n")
    out.write(f"H0 evidence = {_pct(oc.h0_evidence)}\n")
    out.write(f"indecisive | H0 = {_pct(oc.indecisive_h0)}\n")
    out.write(f"indecisive | H1 = {_pct(oc.indecisive_h1)}\n")


def _csv_writer(fh):
    return csv.writer(fh, lineterminator="\n")


def _emit_csv(rows, header, args, out):
    if args.out is None:
        w = _csv_writer(out)
        w.writerow(header)
        w.writerows(rows)
        return
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        w = _csv_writer(fh)
        w.writerow(header)
        w.writerows(rows)
    out.write(f"wrote {len(rows)} rows to {args.out}\n")


# ---------------------------------------------------------------------------
# subcommands


def cmd_bf(args, out):
    if args.y > args.n:
        raise DomainError(f"y={args.y} exceeds n={args.n}")
    _echo(args, out)
    test, prior = _test(args), _analysis(args)
    lbf = float(log_bf01(test, args.y, args.n, prior))
    out.write(f"BF01 = {float(bf01(test, args.y, args.n, prior)):.2f}\n")
    out.write(f"BF01 (full precision) = {_num(math.exp(lbf))}\n")
    out.write(f"ln BF01 = {_num(lbf)}\n")


def cmd_oc(args, out):
    config = _config(args)
    _echo(args, out)
    _write_oc(operating_characteristics(config, args.n), out)
    out.write(f"rejection set = {rejection_set(config, args.n)}\n")


def cmd_n(args, out):
    config = _config(args)
    if args.target is None:
        args.target = DEFAULT_TARGETS[args.metric]
    if args.n_min > args.n_max:
        raise DomainError("n-min exceeds n-max")
    _echo(args, out)
    query = SampleSizeQuery(args.metric, args.target, args.n_min, args.n_max, args.window,
                            strict=not args.non_strict)
    res = find_sample_size(config, query)
    _write_oc(res.characteristics, out)


def cmd_threshold(args, out):
    config = _config(args)
    if args.target is None:
        args.target = DEFAULT_TARGETS[args.metric]
    _echo(args, out)
    k = find_threshold(config, args.n, args.metric, args.target, strict=not args.non_strict)
    out.write(f"k* = {_num(k)}\n")
    out.write(f"1/k* = {_num(1.0 / k)}\n")


def cmd_curve(args, out):
    config = _config(args)
    if args.n_min > args.n_max:
        raise DomainError("n-min exceeds n-max")
    _echo(args, out)
    rows = [[oc.n] + [_num(getattr(oc, f)) for f in CURVE_FIELDS[1:]]
            for oc in curve(config, range(args.n_min, args.n_max + 1))]
    _emit_csv(rows, CURVE_FIELDS, args, out)


def cmd_mc(args, out):
    config = _config(args)
    if args.nsim < 100:
        raise DomainError("nsim must be at least 100")
    if args.chunks > args.nsim:
        raise DomainError("chunks may not exceed nsim")
    _echo(args, out)
    exact = operating_characteristics(config, args.n)
    if args.hypothesis or args.event:
        hyp = Hypothesis(args.hypothesis or "H1")
        ev = Event(args.event or "rejection")
        est = mc_probability(config, args.n, hyp, ev, args.nsim, args.seed, args.chunks)
        name = {(Hypothesis.H1, Event.REJECTION): "power", (Hypothesis.H0, Event.REJECTION): "type1",
                (Hypothesis.H0, Event.H0_EVIDENCE): "h0_evidence",
                (Hypothesis.H0, Event.INDECISIVE): "indecisive_h0",
                (Hypothesis.H1, Event.INDECISIVE): "indecisive_h1"}.get((hyp, ev))
        rows = [(f"{ev.value}|{hyp.value}", est, getattr(exact, name) if name else None)]
    else:
        mcc = mc_characteristics(config, args.n, args.nsim, args.seed, args.chunks)
        rows = [(f, getattr(mcc, f), getattr(exact, f)) for f in CURVE_FIELDS[1:]]
    out.write(f"{'quantity':<16}{'mc':>10}{'mcse':>10}{'exact':>10}\n")
    for name, est, ex in rows:
        ex_text = _pct(ex) if ex is not None else "n/a"
        out.write(f"{name:<16}{_pct(est.estimate):>10}{_pct(est.mcse):>10}{ex_text:>10}\n")
    out.write(f"# nsim = {args.nsim}, seed = {args.seed}, chunks = {args.chunks}\n")


def cmd_table1(args, out):
    _echo(args, out)
    rows = table1(args.k, TABLE1_B_VALUES, args.p0, args.p1, args.target, args.ad_decimals)
    header = ("a_d", "b_d", "a_d_plus_b_d", "n", "power", "type1", "freq_power", "freq_type1")
    body = [[_num(r.a_d), _num(r.b_d), _num(r.a_d + r.b_d), r.n, _num(r.power), _num(r.type1),
             _num(r.freq_power), _num(r.freq_type1)] for r in rows]
    _emit_csv(body, header, args, out)


COMMANDS = {"bf": cmd_bf, "oc": cmd_oc, "n": cmd_n, "threshold": cmd_threshold,
            "curve": cmd_curve, "mc": cmd_mc, "table1": cmd_table1}


def run(argv=None, out=None, err=None):
    """Run the CLI and return the exit code."""
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    buf = io.StringIO()
    try:
        COMMANDS[args.command](args, buf)
    except DomainError as exc:
        out.write(buf.getvalue())
        err.write(f"bfdesign: error: {exc}\n")
        return EXIT_USAGE
    except NotAttainableError as exc:
        out.write(buf.getvalue())
        err.write(f"bfdesign: not attainable: {exc}\n")
        return EXIT_NOT_ATTAINABLE
    except ConvergenceError as exc:
        out.write(buf.getvalue())
        err.write(f"bfdesign: numerical failure: {exc}\n")
        return EXIT_NO_CONVERGENCE
    out.write(buf.getvalue())
    return 0


def main():
    sys.exit(run())
