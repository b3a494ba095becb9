"""Command-line interface.

Exit codes: 0 success / test not rejected, 3 test rejected, 1 parse or
usage error, 2 table miss or window rule miss, 4 domain error (ties,
nonpositive data).
"""

import argparse
import json
import logging
import sys
import time
from contextlib import contextmanager

import numpy as np

from . import __version__
from .estimators import moving_average_smooth, smoothed_window_bound, spacing_window_bound
from .exceptions import (
    CensKLError,
    DegenerateSpacingError,
    DomainError,
    ParameterError,
    TableMissError,
    TableParseError,
    TieError,
)
from .gof import TestStatisticKind, run_test
from .montecarlo import DEFAULT_REPS, bias_rmse, empirical_density, generate_table, power_study
from .sampling import CensoredSample, get_alternative
from .tables import ALPHAS, default_table, load_table, window_for, write_table

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_TABLE_MISS = 2
EXIT_REJECT = 3
EXIT_DOMAIN = 4

logger = logging.getLogger("censkl")


class UsageError(CensKLError):
    """Bad command-line input (exit code 1)."""


def read_data(path):
    """Read one real per line; blank lines and ``#`` comments are skipped."""
    values = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            try:
                values.append(float(text))
            except ValueError:
                raise UsageError(f"{path}: line {lineno}: not a number: {text!r}") from None
    return np.array(values)


def parse_int_range(text):
    """``"15-27"``, ``"15:27"`` or ``"15,18,21"`` -> list of ints (inclusive)."""
    out = []
    try:
        for part in text.split(","):
            part = part.strip()
            for sep in ("-", ":"):
                if sep in part:
                    lo, hi = part.split(sep)
                    out.extend(range(int(lo), int(hi) + 1))
                    break
            else:
                out.append(int(part))
    except ValueError:
        raise UsageError(f"bad integer range {text!r}") from None
    return out


def _parse_floats(text):
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"bad list of numbers {text!r}") from None


def _parse_stat(text):
    try:
        return TestStatisticKind.parse(text)
    except ParameterError as err:
        raise UsageError(str(err)) from None


def _parse_m(text):
    if text is None or text == "auto":
        return None
    try:
        return int(text)
    except ValueError:
        raise UsageError(f"--m must be 'auto' or an integer, got {text!r}") from None


def _write_manifest(out_path, command, params, seed, started, argv):
    manifest = {
        "command": command,
        "params": params,
        "seed": seed,
        "version": __version__,
        "duration_s": round(time.perf_counter() - started, 3),
        "argv": argv,
    }
    with open(out_path + ".manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


@contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def cmd_test(args):
    values = read_data(args.data)
    if args.r is not None and args.r != values.size:
        raise UsageError(f"--r={args.r} but {args.data} holds {values.size} values")
    n = values.size if args.n is None else args.n
    if n < values.size:
        raise UsageError(f"--n={n} is smaller than the number of values ({values.size})")
    values = np.sort(values)
    if np.any(values <= 0):
        raise DomainError("data must be strictly positive")
    sample = CensoredSample(values, n, values.size)
    table = load_table(args.table) if args.table else None
    outcome = run_test(sample, _parse_stat(args.stat), alpha=args.alpha, m=_parse_m(args.m),
                       k=args.k, table=table)
    json.dump(outcome.to_dict(), sys.stdout)
    sys.stdout.write("\n")
    return EXIT_REJECT if outcome.reject else EXIT_OK


def window_bound(kind, r, k):
    if kind is TestStatisticKind.T2:
        return smoothed_window_bound(r, k)
    return spacing_window_bound(r)


def cmd_critical_values(args):
    kind = _parse_stat(args.stat)
    r_values = parse_int_range(args.r) if args.r else list(range(args.n // 2, args.n))
    m = _parse_m(args.m)
    for r in r_values:
        if kind.uses_window and m is None:
            window_for(kind, r, k=args.k)
        elif kind.uses_window and m > window_bound(kind, r, args.k):
            raise TableMissError(f"m={m} is outside the window bound for {kind.value} at r={r}")
        if kind.two_sided or kind is TestStatisticKind.BRAIN_SHAPIRO_BIG_Z:
            if r < 4:
                raise TableMissError(f"{kind.value} needs r >= 4, got r={r}")
        elif r < 3:
            raise TableMissError(f"{kind.value} needs r >= 3, got r={r}")
    table = generate_table(kind, args.n, r_values, alphas=_parse_floats(args.alpha),
                           reps=args.reps, seed=args.seed, m=m, k=args.k, workers=args.workers)
    with _output(args.out) as fh:
        write_table(table, fh)
    return EXIT_OK


def cmd_power(args):
    kinds = [_parse_stat(s) for s in args.stat.split(",")]
    codes = [c.strip() for c in args.alternatives.split(",")]
    for code in codes:
        try:
            get_alternative(code)
        except ParameterError as err:
            raise UsageError(str(err)) from None
    r_values = parse_int_range(args.r)
    alpha = _parse_floats(args.alpha)[0]
    table = load_table(args.table) if args.table else default_table()
    fallback = args.reps if args.simulate_missing else None
    result = power_study(kinds, codes, args.n, r_values, alpha=alpha, reps=args.reps,
                         seed=args.seed, table=table, k=args.k, workers=args.workers,
                         fallback_reps=fallback)
    with _output(args.out) as fh:
        result.to_csv(fh)
    return EXIT_OK


def cmd_bias_rmse(args):
    result = bias_rmse(args.n, parse_int_range(args.r), reps=args.reps, seed=args.seed,
                       k=args.k, workers=args.workers)
    with _output(args.out) as fh:
        result.to_csv(fh)
    return EXIT_OK


def cmd_smooth(args):
    values = np.sort(read_data(args.data))
    if values.size == 0:
        raise UsageError(f"{args.data} holds no values")
    y = moving_average_smooth(values, args.k)
    with _output(args.out) as fh:
        fh.write("index,x,y\n")
        for i, (xi, yi) in enumerate(zip(values, y), start=1):
            fh.write(f"{i},{float(xi)!r},{float(yi)!r}\n")
    return EXIT_OK


def cmd_density(args):
    result = empirical_density(_parse_stat(args.stat), args.n, args.r, reps=args.reps,
                               seed=args.seed, bins=args.bins, m=_parse_m(args.m), k=args.k,
                               workers=args.workers)
    with _output(args.out) as fh:
        result.to_csv(fh)
    return EXIT_OK


def cmd_replay(args):
    with open(args.manifest, "r", encoding="utf-8") as fh:
        manifest = json.load(fh)
    argv = list(manifest["argv"])
    if args.out:
        if "--out" in argv:
            argv[argv.index("--out") + 1] = args.out
        else:
            argv += ["--out", args.out]
    return main(argv)


def _add_study_flags(p, reps=DEFAULT_REPS):
    p.add_argument("--reps", type=int, default=reps, help="Monte Carlo replicates")
    p.add_argument("--seed", type=int, default=0, help="base seed")
    p.add_argument("--workers", type=int, default=1, help="worker processes")
    p.add_argument("--k", type=int, default=3, help="moving-average order for t2")
    p.add_argument("--out", default=None, help="output path (default: stdout)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="censkl",
        description="Entropy estimation and KL goodness-of-fit tests for Type-II censored data.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("test", help="test one censored sample for exponentiality")
    p.add_argument("--data", required=True, help="file with one value per line")
    p.add_argument("--n", type=int, help="original sample size (default: number of values)")
    p.add_argument("--r", type=int, help="number of observed values (checked against the file)")
    p.add_argument("--stat", default="t1", help="t, t1, t2, z or bigz")
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--m", default="auto", help="window size or 'auto'")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--table", help="critical-value CSV to use instead of the bundled tables")
    p.set_defaults(func=cmd_test, study=False)

    p = sub.add_parser("critical-values", help="Monte Carlo critical-value table")
    p.add_argument("--stat", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", help="r range, e.g. 15-27 (default: n/2 .. n-1)")
    p.add_argument("--alpha", default=",".join(str(a) for a in ALPHAS))
    p.add_argument("--m", default="auto")
    _add_study_flags(p)
    p.set_defaults(func=cmd_critical_values, study=True)

    p = sub.add_parser("power", help="power study against catalog alternatives")
    p.add_argument("--stat", default="t1,t2,t,z,bigz", help="comma-separated statistics")
    p.add_argument("--alternatives", default="A1,A2,A3,A4", help="codes A1..C4 or null")
    p.add_argument("--n", type=int, default=30)
    p.add_argument("--r", default="15-27")
    p.add_argument("--alpha", default="0.1")
    p.add_argument("--table", help="critical-value CSV (default: bundled tables)")
    p.add_argument("--simulate-missing", action="store_true",
                   help="simulate critical values missing from the table (seed + 1)")
    _add_study_flags(p)
    p.set_defaults(func=cmd_power, study=True)

    p = sub.add_parser("bias-rmse", help="bias and RMSE of the entropy estimators")
    p.add_argument("--n", type=int, default=30)
    p.add_argument("--r", default="15-27")
    _add_study_flags(p)
    p.set_defaults(func=cmd_bias_rmse, study=True)

    p = sub.add_parser("smooth", help="moving-average smoothing of a sample path")
    p.add_argument("--data", required=True)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_smooth, study=True)

    p = sub.add_parser("density", help="empirical null density of a statistic")
    p.add_argument("--stat", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--m", default="auto")
    p.add_argument("--bins", type=int, default=50)
    _add_study_flags(p)
    p.set_defaults(func=cmd_density, study=True)

    p = sub.add_parser("replay", help="re-run a study from its manifest")
    p.add_argument("manifest")
    p.add_argument("--out", help="write to this path instead of the recorded one")
    p.set_defaults(func=cmd_replay, study=False)
    return parser


def _exit_code(err):
    if isinstance(err, TableMissError):
        return EXIT_TABLE_MISS
    if isinstance(err, (TieError, DomainError, DegenerateSpacingError)):
        return EXIT_DOMAIN
    return EXIT_PARSE


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code not in (0, None) else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    started = time.perf_counter()
    try:
        code = args.func(args)
    except (CensKLError, OSError) as err:
        if isinstance(err, TableParseError):
            message = f"table parse error: {err}"
        else:
            message = str(err)
        print(f"censkl: error: {message}", file=sys.stderr)
        return EXIT_PARSE if isinstance(err, OSError) else _exit_code(err)
    if args.study and args.out not in (None, "-"):
        params = {k: v for k, v in vars(args).items() if k not in ("func", "study", "verbose")}
        _write_manifest(args.out, args.command, params, params.get("seed"), started,
                        argv)
    return code


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
