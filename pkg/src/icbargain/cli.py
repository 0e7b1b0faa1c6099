"""Command-line interface.

Exit status is 0 on success, 2 on usage errors (argparse) and 1 when the
inputs parse but fail validation or output cannot be written.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import os
import sys
from typing import Iterator, List, Optional, TextIO

from .bargaining import region_boundary, solve_nbs
from .channel import DEFAULT_W, StandardChannel, channel_from_json, db_to_linear, reference_bounds
from .competitive import game_from_json, iterate_waterfilling
from .sweep import SweepSpec, run_sweep, write_csv

JOBS_ENV = "ICBARGAIN_JOBS"


class UsageError(Exception):
    pass


def _default_jobs() -> int:
    value = os.environ.get(JOBS_ENV)
    if value:
        try:
            return max(1, int(value))
        except ValueError:
            raise UsageError(f"{JOBS_ENV} must be an integer, got {value!r}")
    return os.cpu_count() or 1


def _channel_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("channel (standard form)")
    g.add_argument("--snr1-db", type=float, help="SNR of user 1 in dB")
    g.add_argument("--snr1", type=float, help="SNR of user 1, linear")
    g.add_argument("--snr2-db", type=float, help="SNR of user 2 in dB")
    g.add_argument("--snr2", type=float, help="SNR of user 2, linear")
    g.add_argument("--alpha", type=float, help="interference from user 2 into receiver 1")
    g.add_argument("--beta", type=float, help="interference from user 1 into receiver 2")
    g.add_argument("--w", type=float, default=None,
                   help=f"bandwidth convention; rates carry a w/2 factor (default {DEFAULT_W:g})")
    g.add_argument("--input", metavar="FILE",
                   help="JSON channel descriptor ('-' for stdin) instead of the flags above")
    return p


def _output_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("-o", "--output", metavar="FILE", help="write here instead of stdout")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="icbargain",
        description="Competitive and Nash-bargaining operating points of the "
                    "2x2 Gaussian interference channel under FDM.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    chan, out = _channel_parent(), _output_parent()
    fmt = argparse.ArgumentDefaultsHelpFormatter

    p = sub.add_parser("solve", parents=[chan, out], formatter_class=fmt,
                       help="bargaining solution for one channel")
    p.add_argument("--tol", type=float, default=1e-10, help="bracket width on rho")
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("region", parents=[chan, out], formatter_class=fmt,
                       help="FDM rate-region boundary as CSV")
    p.add_argument("-n", "--samples", type=int, default=512, help="number of boundary points")

    p = sub.add_parser("bounds", parents=[chan, out], formatter_class=fmt,
                       help="very-strong-interference and Sato reference bounds")

    for name, helptext in (("sweep-snr", "sweep both SNRs at fixed alpha, beta"),
                           ("sweep-interference", "sweep alpha and beta at fixed SNRs")):
        p = sub.add_parser(name, parents=[out], formatter_class=fmt, help=helptext)
        if name == "sweep-snr":
            p.add_argument("--alpha", type=float, default=0.7)
            p.add_argument("--beta", type=float, default=0.7)
            p.add_argument("--min-db", type=float, default=0.0)
            p.add_argument("--max-db", type=float, default=40.0)
            p.add_argument("--step-db", type=float, default=0.25)
        else:
            p.add_argument("--snr1-db", type=float, default=20.0)
            p.add_argument("--snr2-db", type=float, default=20.0)
            p.add_argument("--min", type=float, default=0.0, help="smallest alpha/beta")
            p.add_argument("--max", type=float, default=1.0, help="largest alpha/beta")
            p.add_argument("--step", type=float, default=0.01)
        p.add_argument("--w", type=float, default=DEFAULT_W)
        p.add_argument("-j", "--jobs", type=int, default=None,
                       help=f"worker processes (default: ${JOBS_ENV} or CPU count)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("iwf", parents=[out], formatter_class=fmt,
                       help="iterative water-filling equilibrium of a K-band game")
    p.add_argument("game", help="JSON game descriptor ('-' for stdin)")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--max-iters", type=int, default=100)
    return parser


def _read_json(path: str) -> dict:
    if path == "-":
        return json.load(sys.stdin)
    with open(path) as fh:
        return json.load(fh)


def _pick(args, name: str) -> Optional[float]:
    db, lin = getattr(args, f"{name}_db"), getattr(args, name)
    if db is not None and lin is not None:
        raise UsageError(f"give --{name}-db or --{name}, not both")
    if db is not None:
        return db_to_linear(db)
    return lin


def _channel(args) -> StandardChannel:
    if args.input is not None:
        flags = (args.snr1_db, args.snr1, args.snr2_db, args.snr2, args.alpha, args.beta)
        if any(v is not None for v in flags):
            raise UsageError("--input cannot be combined with channel flags")
        obj = _read_json(args.input)
        # accept the output of `solve` as input
        obj = obj.get("channel", obj)
        return channel_from_json(obj, w=args.w)
    snr1, snr2 = _pick(args, "snr1"), _pick(args, "snr2")
    missing = [n for n, v in (("snr1", snr1), ("snr2", snr2), ("alpha", args.alpha),
                              ("beta", args.beta)) if v is None]
    if missing:
        raise UsageError("missing channel parameters: " + ", ".join(missing))
    return StandardChannel(snr1, snr2, args.alpha, args.beta,
                           DEFAULT_W if args.w is None else args.w)


def _channel_dict(sc: StandardChannel) -> dict:
    return {"snr": [sc.snr1, sc.snr2], "alpha": sc.alpha, "beta": sc.beta, "w": sc.w}


@contextlib.contextmanager
def _open_out(path: Optional[str]) -> Iterator[TextIO]:
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _cmd_solve(args) -> None:
    sc = _channel(args)
    res = solve_nbs(sc, tol=args.tol)
    doc = {"channel": _channel_dict(sc), **res.as_dict()}
    with _open_out(args.output) as fh:
        if args.format == "json":
            json.dump(doc, fh, indent=2)
            fh.write("\n")
        else:
            g1, g2 = res.gains
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["snr1", "snr2", "alpha", "beta", "rc1", "rc2", "feasible", "rho1_min",
                        "rho2_min", "rho_star", "r_nbs1", "r_nbs2", "g1", "g2", "nash_product"])
            w.writerow([repr(v) for v in (
                sc.snr1, sc.snr2, sc.alpha, sc.beta, res.competitive_rates.r1,
                res.competitive_rates.r2, int(res.feasibility.feasible),
                res.feasibility.rho1_min, res.feasibility.rho2_min,
                -1.0 if res.rho_star is None else res.rho_star,
                res.nbs_rates.r1, res.nbs_rates.r2, g1, g2, res.nash_product)])


def _cmd_region(args) -> None:
    sc = _channel(args)
    if args.samples < 2:
        raise ValueError("--samples must be >= 2")
    res = solve_nbs(sc)
    rc, nbs = res.competitive_rates, res.nbs_rates
    with _open_out(args.output) as fh:
        fh.write(f"# ne,{rc.r1:.10g},{rc.r2:.10g}\n")
        fh.write(f"# nbs,{nbs.r1:.10g},{nbs.r2:.10g},{res.kind}\n")
        fh.write("rho,r1,r2\n")
        for rho, r in region_boundary(sc, args.samples):
            fh.write(f"{rho:.10g},{r.r1:.10g},{r.r2:.10g}\n")


def _cmd_bounds(args) -> None:
    sc = _channel(args)
    with _open_out(args.output) as fh:
        json.dump({"channel": _channel_dict(sc), **reference_bounds(sc).as_dict()}, fh, indent=2)
        fh.write("\n")


def _cmd_sweep(args) -> None:
    if args.command == "sweep-snr":
        spec = SweepSpec.snr_grid(args.alpha, args.beta, args.min_db, args.max_db,
                                  args.step_db, args.w)
    else:
        spec = SweepSpec.interference_grid(args.snr1_db, args.snr2_db, args.min, args.max,
                                           args.step, args.w)
    jobs = _default_jobs() if args.jobs is None else args.jobs
    if jobs < 1:
        raise UsageError("--jobs must be >= 1")
    records = run_sweep(spec, workers=jobs)
    with _open_out(args.output) as fh:
        if args.format == "csv":
            write_csv(records, fh)
        else:
            json.dump([r.__dict__ for r in records], fh)
            fh.write("\n")


def _cmd_iwf(args) -> None:
    game = game_from_json(_read_json(args.game))
    res = iterate_waterfilling(game, tol=args.tol, max_iters=args.max_iters)
    with _open_out(args.output) as fh:
        json.dump(res.as_dict(), fh, indent=2)
        fh.write("\n")


_COMMANDS = {
    "solve": _cmd_solve,
    "region": _cmd_region,
    "bounds": _cmd_bounds,
    "sweep-snr": _cmd_sweep,
    "sweep-interference": _cmd_sweep,
    "iwf": _cmd_iwf,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"icbargain {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"icbargain {args.command}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
