"""Command-line front end.

Exit codes: 0 on success, 2 for usage and input errors, 3 when a
computation fails.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import io as sio
from .convolution import ConvolutionConfig, convolve, convolve_power, subtract_convolve
from .distribution import linear_transform, to_fraction
from .errors import InvalidValue, ParseError, SumdistError
from .rarity import divergence_report, pr_curve, score_records
from .stats import (
    DEFAULT_KURT_MAX,
    DEFAULT_SKEW_MAX,
    clt_check,
    frequency_table,
    lower_tail,
    strict_lower_tail,
    strict_upper_tail,
    upper_tail,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_COMPUTE = 3


class InputError(Exception):
    """Bad file or argument detected after argument parsing."""


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _decimal(text):
    try:
        to_fraction(text)
    except InvalidValue as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return text


def _read(path, args):
    try:
        return sio.read_distribution(path, renormalize=getattr(args, "renormalize", False))
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    except ParseError as exc:
        raise InputError(f"{path}: {exc}") from None


def _config(args):
    try:
        return ConvolutionConfig(fft=args.fft, prune_eps=args.prune_eps)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _write(args, text):
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_convolve(args):
    f, g = _read(args.f, args), _read(args.g, args)
    _write(args, sio.emit_distribution_csv(convolve(f, g, _config(args))))


def cmd_subtract(args):
    f, g = _read(args.f, args), _read(args.g, args)
    _write(args, sio.emit_distribution_csv(subtract_convolve(f, g, _config(args))))


def cmd_power(args):
    f = _read(args.dist, args)
    _write(args, sio.emit_distribution_csv(convolve_power(f, args.n, _config(args))))


def cmd_transform(args):
    d = _read(args.dist, args)
    _write(args, sio.emit_distribution_csv(linear_transform(d, args.a, args.b)))


def cmd_table(args):
    d = _read(args.dist, args)
    table = frequency_table(d, args.width, args.origin)
    lines = ["lower,upper,probability\n"]
    width = to_fraction(args.width)
    for lower, p in table.bins:
        upper = float(to_fraction(lower) + width)
        lines.append(f"{sio._float_field(lower)},{sio._float_field(upper)},{sio._float_field(p)}\n")
    _write(args, "".join(lines))


def cmd_tail(args):
    d = _read(args.dist, args)
    if args.lower:
        p = (strict_lower_tail if args.strict else lower_tail)(d, args.t)
    else:
        p = (strict_upper_tail if args.strict else upper_tail)(d, args.t)
    _write(args, sio._float_field(p) + "\n")


def cmd_check_clt(args):
    d = _read(args.dist, args)
    v = clt_check(d, args.skew_max, args.kurt_max)
    verdict = "PASS" if v.passes else "FAIL"
    _write(args, f"{verdict} skewness={v.skewness!r} excess_kurtosis={v.excess_kurtosis!r} "
                 f"skew_max={args.skew_max!r} kurt_max={args.kurt_max!r}\n")


def _thresholds(spec):
    try:
        lo, hi, step = (Fraction(to_fraction(x)) for x in spec.split(":"))
    except (ValueError, InvalidValue):
        raise InputError(f"--pr-curve expects a0:a1:step, got {spec!r}") from None
    if step <= 0 or hi < lo:
        raise InputError("--pr-curve needs a0 <= a1 and a positive step")
    count = int((hi - lo) / step) + 1
    return [float(lo + i * step) for i in range(count)]


def cmd_rarity(args):
    try:
        with open(args.events, "rb") as fh:
            rows = sio.parse_events_csv(fh.read())
    except OSError as exc:
        raise InputError(f"{args.events}: {exc.strerror}") from None
    except ParseError as exc:
        raise InputError(f"{args.events}: {exc}") from None
    thresholds = _thresholds(args.pr_curve) if args.pr_curve else None
    try:
        agg = sio.aggregate_events(rows, min_visitors=args.min_visitors, dedupe=args.dedupe)
    except SumdistError as exc:
        raise InputError(str(exc)) from None
    g = _read(args.model, args) if args.model else agg.distribution
    report = score_records(g, agg.records, continuity=args.continuity,
                           config=_config(args))
    parts = [sio.emit_report_csv(report.results)]
    if thresholds is not None and report.results:
        parts.append("\n" + sio.emit_pr_csv(pr_curve(report.results, thresholds, args.rare_cutoff)))
    if args.divergence:
        parts.append("\n" + sio.emit_divergence_csv(divergence_report(report.results, args.floor)))
    _write(args, "".join(parts))

    quarantine = ["item,n,t,reason\n"]
    quarantine.extend(f"{rec.item_id},{rec.visitors},{rec.total_compensation},{reason}\n"
                      for rec, reason in report.quarantine)
    if args.quarantine:
        with open(args.quarantine, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("".join(quarantine))
    else:
        for rec, reason in report.quarantine:
            print(f"quarantined {rec.item_id}: {reason}", file=sys.stderr)
    print(f"scored {len(report.results)} items, quarantined {len(report.quarantine)}, "
          f"excluded {agg.excluded_items} below {args.min_visitors} visitors", file=sys.stderr)


def cmd_gen_synth(args):
    kwargs = {}
    if args.visitors:
        kwargs["visitor_count_distribution"] = _read(args.visitors, args)
    if args.compensation:
        kwargs["compensation_distribution"] = _read(args.compensation, args)
    try:
        config = sio.SyntheticConfig(args.items, random_seed=args.seed, **kwargs)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    _write(args, sio.emit_events_csv(sio.generate_synthetic(config)))


def _common(p, convolution=True):
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--renormalize", action="store_true",
                   help="divide input probabilities by their sum instead of rejecting")
    if convolution:
        p.add_argument("--prune-eps", type=float, default=0.0,
                       help="drop masses below this after each convolution (default 0: exact)")
        p.add_argument("--fft", choices=("auto", "on", "off"), default="auto",
                       help="FFT convolution strategy (default auto)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sumdist",
        description="Exact distributions of sample sums from a known discrete population.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convolve", help="distribution of X + W")
    p.add_argument("f")
    p.add_argument("g")
    _common(p)
    p.set_defaults(func=cmd_convolve)

    p = sub.add_parser("subtract", help="distribution of X - W")
    p.add_argument("f")
    p.add_argument("g")
    _common(p)
    p.set_defaults(func=cmd_subtract)

    p = sub.add_parser("power", help="distribution of the sum of N independent draws")
    p.add_argument("dist")
    p.add_argument("n", type=_positive_int)
    _common(p)
    p.set_defaults(func=cmd_power)

    p = sub.add_parser("transform", help="distribution of a*X + b")
    p.add_argument("dist")
    p.add_argument("--a", type=_decimal, default="1")
    p.add_argument("--b", type=_decimal, default="0")
    _common(p, convolution=False)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("table", help="frequency table at a class width")
    p.add_argument("dist")
    p.add_argument("--width", type=_decimal, required=True)
    p.add_argument("--origin", type=_decimal, default="0")
    _common(p, convolution=False)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("tail", help="upper P(X >= t) or lower P(X <= t) probability")
    p.add_argument("dist")
    p.add_argument("t", type=_decimal)
    side = p.add_mutually_exclusive_group(required=True)
    side.add_argument("--upper", action="store_true")
    side.add_argument("--lower", action="store_true")
    p.add_argument("--strict", action="store_true", help="exclude t itself (P(X > t) or P(X < t))")
    _common(p, convolution=False)
    p.set_defaults(func=cmd_tail)

    p = sub.add_parser("check-clt", help="normality verdict from skewness and excess kurtosis")
    p.add_argument("dist")
    p.add_argument("--skew-max", type=float, default=DEFAULT_SKEW_MAX)
    p.add_argument("--kurt-max", type=float, default=DEFAULT_KURT_MAX)
    _common(p, convolution=False)
    p.set_defaults(func=cmd_check_clt)

    p = sub.add_parser("rarity", help="score items of an event file")
    p.add_argument("events")
    p.add_argument("--min-visitors", type=_positive_int, default=3)
    p.add_argument("--rare-cutoff", type=float, default=0.1)
    p.add_argument("--floor", type=float, default=1e-4)
    p.add_argument("--continuity", action="store_true",
                   help="apply the half-step continuity correction to p_z")
    p.add_argument("--dedupe", action="store_true",
                   help="keep only the first row of each (item, visitor) pair")
    p.add_argument("--pr-curve", metavar="A0:A1:STEP",
                   help="append precision/recall rows for avg_spend > a")
    p.add_argument("--divergence", action="store_true", help="append (n, log_ratio) rows")
    p.add_argument("--quarantine", help="write out-of-support records here (default: stderr)")
    p.add_argument("--model", metavar="DIST",
                   help="score against this per-visit distribution instead of the empirical one")
    _common(p)
    p.set_defaults(func=cmd_rarity)

    p = sub.add_parser("gen-synth", help="write a seeded synthetic event file")
    p.add_argument("--items", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--visitors", help="visitor-count distribution CSV (default: built-in profile)")
    p.add_argument("--compensation", help="per-visit compensation CSV (default: built-in profile)")
    _common(p, convolution=False)
    p.set_defaults(func=cmd_gen_synth)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except InputError as exc:
        print(f"sumdist: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SumdistError, ArithmeticError, MemoryError) as exc:
        print(f"sumdist: computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
