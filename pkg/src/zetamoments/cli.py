"""Command-line harness: experiment tables and the verification suite.

Exit codes: 0 success, 1 validation or verification failure, 2 numeric
domain error.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
import time
import warnings

from . import __version__
from . import rmt_exact as rx
from . import rmt_mc as mc
from . import zeta_lab as zl
from .errors import (
    DomainError,
    MissedZeroError,
    MomentOverflowError,
    MultipleZeroError,
    SingularityError,
    ZeroTableFormatError,
)

RMT_COLUMNS = ("N", "k", "displacement", "exact", "trig", "asymptotic", "mc_mean", "mc_stderr", "seed")
ZETA_COLUMNS = ("alpha", "k", "empirical", "conjecture3", "gonek", "ratio")
DEFAULT_SEED = 12345

EXIT_OK, EXIT_INVALID, EXIT_DOMAIN = 0, 1, 2


class ConfigError(ValueError):
    """Invalid command-line configuration."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def parse_range(text, integer=False):
    """Parse ``min:step:max`` (inclusive) or a single number into a list."""
    parts = text.split(":")
    try:
        nums = [float(p) for p in parts]
    except ValueError:
        raise ConfigError(f"malformed range {text!r}") from None
    if not all(math.isfinite(v) for v in nums):
        raise ConfigError(f"non-finite value in range {text!r}")
    if len(nums) == 1:
        values = nums
    elif len(nums) == 3:
        lo, step, hi = nums
        if step <= 0:
            raise ConfigError(f"range step must be positive in {text!r}")
        if hi < lo:
            raise ConfigError(f"empty range {text!r}")
        count = int(math.floor((hi - lo) / step + 1e-9)) + 1
        values = [round(lo + i * step, 12) for i in range(count)]
    else:
        raise ConfigError(f"range must be 'value' or 'min:step:max', got {text!r}")
    if integer:
        if any(v != int(v) for v in values):
            raise ConfigError(f"integer range expected, got {text!r}")
        values = [int(v) for v in values]
    return values


def build_parser():
    p = _Parser(prog="zetamoments", description="Moments of CUE characteristic polynomials and of zeta at its zeros.")
    p.add_argument("--command", required=True, choices=["rmt-exact", "rmt-mc", "zeta-zeros", "zeta-moment", "verify"])
    p.add_argument("--n", default="10", help="matrix sizes, min:step:max or a single value")
    p.add_argument("--k", default="1", help="moment parameters k")
    p.add_argument("--beta", default="0", help="angles beta for --mode joint")
    p.add_argument("--x", default="0.5", help="scaled displacements x (angle 2x/N) for --mode displaced")
    p.add_argument("--alpha", default="0.25:0.25:1", help="zeta displacements alpha, in units of 1/L")
    p.add_argument("--mode", choices=["joint", "displaced"], default="joint")
    p.add_argument("--samples", type=int, default=100_000, help="Monte Carlo draws per grid point")
    p.add_argument("--seed", type=int, default=None, help="64-bit master seed")
    p.add_argument("--t-min", type=float, default=10.0)
    p.add_argument("--t-max", type=float, default=5000.0)
    p.add_argument("--zeros-file", help="import a zero table instead of computing one")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--only", action="append", help="verify: run only the named check (repeatable)")
    p.add_argument("--skip-slow", action="store_true", help="verify: skip the long-running checks")
    p.add_argument("--list-checks", action="store_true", help="verify: list check names and exit")
    return p


# --------------------------------------------------------------------------
# Output
# --------------------------------------------------------------------------


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render(fmt, metadata, columns, rows, summary=None):
    if fmt == "json":
        doc = {"metadata": metadata, "columns": list(columns), "rows": [dict(zip(columns, r)) for r in rows]}
        if summary is not None:
            doc["summary"] = summary
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    for key, value in metadata.items():
        buf.write(f"# {key}: {value}\n")
    if summary is not None:
        for key, value in summary.items():
            buf.write(f"# summary.{key}: {_fmt(value)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def write_output(text, path):
    """Write ``text`` to ``path`` atomically, or to stdout when ``path`` is None."""
    if path is None:
        sys.stdout.write(text)
        return
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".out-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _config_echo(args):
    keep = ("command", "mode", "n", "k", "beta", "x", "alpha", "samples", "seed", "t_min", "t_max", "zeros_file")
    return " ".join(f"{k}={getattr(args, k)}" for k in keep if getattr(args, k) is not None)


def _metadata(args):
    return {"tool": f"zetamoments {__version__}", "config": _config_echo(args)}


# --------------------------------------------------------------------------
# Commands
# --------------------------------------------------------------------------


def _rmt_point(mode, N, k, d):
    if mode == "joint":
        return (
            rx.joint_moment_exact(N, k, d),
            rx.joint_moment_trig_form(N, k, d),
            rx.joint_moment_asymptotic(N, k, N * d),
        )
    beta = 2.0 * d / N
    exact = rx.factorization_rhs(N, k, beta)
    if k == 0:
        trig = 1.0
    elif N == 1:
        trig = exact
    else:
        trig = abs(2.0 * math.sin(beta / 2.0)) ** (2 * k) * rx.joint_moment_trig_form(N - 1, k, beta) / N
    return exact, trig, rx.displaced_moment_leading(N, k, d)


def run_rmt(args, with_mc):
    Ns = parse_range(args.n, integer=True)
    ks = parse_range(args.k)
    disps = parse_range(args.beta if args.mode == "joint" else args.x)
    if any(N < 1 for N in Ns):
        raise ConfigError("N must be positive")
    if with_mc and args.samples < mc.MIN_SAMPLES:
        raise ConfigError(f"--samples must be at least {mc.MIN_SAMPLES}")
    seed = DEFAULT_SEED if args.seed is None else args.seed
    rows = []
    for i, N in enumerate(Ns):
        estimates = {}
        if with_mc:
            betas = disps if args.mode == "joint" else [2.0 * x / N for x in disps]
            grid = mc.mc_moment_grid(args.mode, N, ks, betas, args.samples, mc.RngStream(seed, i), args.workers)
            estimates = {(d, k): grid[(b, k)] for d, b in zip(disps, betas) for k in ks}
        for k in ks:
            for d in disps:
                exact, trig, asym = _rmt_point(args.mode, N, k, d)
                est = estimates.get((d, k))
                rows.append(
                    (
                        N,
                        k,
                        d,
                        exact,
                        trig,
                        asym,
                        est.mean if est else None,
                        est.std_error if est else None,
                        seed if est else None,
                    )
                )
    return render(args.format, _metadata(args), RMT_COLUMNS, rows)


def _load_zeros(args):
    if args.zeros_file:
        return zl.read_zero_table(args.zeros_file)
    return zl.find_zeros(args.t_min, args.t_max, workers=args.workers)


def run_zeta_zeros(args):
    table = zl.find_zeros(args.t_min, args.t_max, workers=args.workers)
    if args.format == "json":
        doc = {
            "metadata": _metadata(args),
            "t_min": table.t_min,
            "t_max": table.t_max,
            "count": len(table),
            "ordinates": [float(g) for g in table.ordinates],
        }
        return json.dumps(doc, indent=2) + "\n"
    head = "".join(f"# {k}: {v}\n" for k, v in _metadata(args).items())
    lines = [f"# t_max={table.t_max!r}\n", f"# t_min={table.t_min!r}\n"]
    lines += [f"{g:.12f}\n" for g in table.ordinates]
    return head + "".join(lines)


def run_zeta(args):
    alphas = parse_range(args.alpha)
    ks = parse_range(args.k)
    table = _load_zeros(args)
    if len(table) == 0:
        raise ConfigError("zero table is empty")
    T = table.t_max
    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", zl.RangeWarning)
        for k in ks:
            for a in alphas:
                emp = zl.discrete_displaced_moment(table, k, a)
                conj = zl.conjecture3_rhs(T, k, a)
                gon = zl.gonek_rhs(T, a) if k == 1 else None
                ratio = emp / conj if conj != 0 else None
                rows.append((a, k, emp, conj, gon, ratio))
    summary = {"T": T, "zeros": len(table), "L": table.density.L}
    return render(args.format, _metadata(args), ZETA_COLUMNS, rows, summary)


def run_verify(args):
    from . import verification

    if args.list_checks:
        for c in verification.registry():
            print(c.name + (" (slow)" if c.slow else ""))
        return EXIT_OK
    seed = verification.DEFAULT_SEED if args.seed is None else args.seed
    try:
        status = verification.run_verify(only=args.only, seed=seed, skip_slow=args.skip_slow)
    except KeyError as exc:
        raise ConfigError(str(exc)) from None
    return EXIT_OK if status == 0 else EXIT_INVALID


def main(argv=None):
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        if args.seed is not None and not 0 <= args.seed < 2**64:
            raise ConfigError("--seed must be a 64-bit unsigned integer")
        if args.workers < 1:
            raise ConfigError("--workers must be at least 1")
        if args.command == "verify":
            return run_verify(args)
        if args.command in ("rmt-exact", "rmt-mc"):
            text = run_rmt(args, with_mc=args.command == "rmt-mc")
        elif args.command == "zeta-zeros":
            text = run_zeta_zeros(args)
        else:
            text = run_zeta(args)
        write_output(text, args.out)
    except (ConfigError, ZeroTableFormatError, MissedZeroError, MultipleZeroError) as exc:
        print(f"zetamoments: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (DomainError, MomentOverflowError, SingularityError, ArithmeticError) as exc:
        print(f"zetamoments: numeric error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"zetamoments: {exc}", file=sys.stderr)
        return EXIT_INVALID
    print(f"# wall time: {time.perf_counter() - t0:.2f} s", file=sys.stderr)
    return EXIT_OK
