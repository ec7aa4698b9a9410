"""Command-line front end: ``digamma_assoc [eval|table|coeffs|selftest] ...``.

Without a subcommand the arguments are read as ``eval`` options, so the
classic ``digamma_assoc [-p] [-n n] [-j j] [-s s] [-m mu] [-b b] [-e epsilon]``
shape keeps working.

Exit codes: 0 success, 1 usage error, 2 divergent integral, 3 self-test
failure, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import math
import re
import sys
from typing import Sequence

from . import checks, coefficients
from .integrals import MINUS, PLUS, DivergentIntegralError, IntegralSpec
from .quadrature import QuadratureConfig, QuadratureError, integrate
from .reduction import Atom, evaluate, reduce, within_caps

__all__ = ["main", "build_parser", "parse_grid", "eval_value"]

SUBCOMMANDS = ("eval", "table", "coeffs", "selftest")
EXIT_USAGE, EXIT_DIVERGENT, EXIT_SELFTEST, EXIT_NUMERIC = 1, 2, 3, 4

# auto mode hands members with more residual leaves than this to quadrature
AUTO_MAX_RESIDUALS = 8

FMT = "%.12e"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be a finite positive number, got {text!r}")
    return v


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("-e", dest="eps", type=_positive, default=1e-10, metavar="epsilon",
                   help="absolute error target (default 1e-10)")
    p.add_argument("--mode", choices=("auto", "closed", "quad", "both"), default="auto",
                   help="evaluation route (default auto)")
    p.add_argument("-v", "--verbose", action="store_true", help="log leaf reports to stderr")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="digamma_assoc",
        description="Evaluate int_0^inf x^n / ((x^2+b^2)^j (e^(mu x) -+ 1)^s) dx.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", help="evaluate one integral")
    ev.add_argument("-p", dest="plus", action="store_true", help="use e^(mu x) + 1 (default -)")
    ev.add_argument("-n", type=int, default=1)
    ev.add_argument("-j", type=int, default=1)
    ev.add_argument("-s", type=int, default=1)
    ev.add_argument("-m", dest="mu", type=_positive, default=1.0, metavar="mu")
    ev.add_argument("-b", type=_positive, default=2 * math.pi)
    _add_common(ev)

    tb = sub.add_parser("table", help="TSV table of normal-form values")
    tb.add_argument("--grid", default="n=1:4;j=1:3;s=1:2;bmu=1,pi,2pi",
                    help="e.g. 'n=1:2;j=1;s=1;bmu=1,pi,2pi' (ranges inclusive)")
    _add_common(tb)

    co = sub.add_parser("coeffs", help="dump an exact coefficient table as TSV")
    co.add_argument("--table", choices=("alpha", "gamma-minus", "gamma-plus"), default="alpha")
    co.add_argument("--max", type=int, default=None, help="largest l (alpha) or j (gamma)")

    st = sub.add_parser("selftest", help="run the invariant suite")
    st.add_argument("--group", action="append", choices=list(checks.GROUPS),
                    help="restrict to a group (repeatable)")
    st.add_argument("-v", "--verbose", action="store_true", help="print every check")
    return parser


def eval_value(spec: IntegralSpec, eps: float, mode: str) -> tuple[float, ...]:
    """Numbers printed by ``eval``: one value, or (closed, quad, |diff|) in both mode."""
    log = logging.getLogger("digamma_assoc.cli")
    if mode == "quad":
        return (integrate(spec, QuadratureConfig(eps=eps))[0],)
    if mode == "both":
        c = evaluate(spec, eps).value
        q = integrate(spec, QuadratureConfig(eps=eps))[0]
        return c, q, abs(c - q)
    if mode == "auto" and within_caps(spec):
        residuals = reduce(Atom.of(spec)).count("residual") if not (spec.sign == PLUS and spec.s > 1) else 0
        if residuals > AUTO_MAX_RESIDUALS:
            log.info("%s: %d residual leaves, using quadrature", spec, residuals)
            return (integrate(spec, QuadratureConfig(eps=eps))[0],)
    r = evaluate(spec, eps)
    log.info("%s: leaves %s, error bound %.2e", spec, r.leaf_report, r.abs_error)
    for w in r.warnings:
        log.info(w)
    return (r.value,)


_PI_TOKEN = re.compile(r"^(?P<k>[0-9.eE+-]*?)\*?pi(?:/(?P<d>[0-9.eE+]+))?$")


def _parse_real(tok: str) -> float:
    m = _PI_TOKEN.match(tok)
    if m:
        k = float(m["k"]) if m["k"] else 1.0
        d = float(m["d"]) if m["d"] else 1.0
        return k * math.pi / d
    return float(tok)


def _parse_ints(text: str) -> list[int]:
    out: list[int] = []
    for part in text.split(","):
        if ":" in part:
            lo, hi = (int(x) for x in part.split(":"))
            out.extend(range(lo, hi + 1))
        else:
            out.append(int(part))
    return out


def parse_grid(text: str) -> dict[str, list]:
    """Parse ``key=values;...`` with keys n, j, s, bmu.

    Integer fields take comma lists and inclusive ``a:b`` ranges; bmu takes
    reals, where ``pi``, ``2pi`` and ``pi/2`` style tokens are allowed.
    """
    grid: dict[str, list] = {}
    try:
        for item in filter(None, (x.strip() for x in text.split(";"))):
            key, _, vals = item.partition("=")
            key = key.strip()
            if key not in ("n", "j", "s", "bmu"):
                raise UsageError(f"unknown grid key {key!r}")
            if key == "bmu":
                grid[key] = [_parse_real(v.strip()) for v in vals.split(",")]
            else:
                grid[key] = _parse_ints(vals)
    except ValueError as exc:
        raise UsageError(f"malformed grid {text!r}: {exc}") from None
    missing = {"n", "j", "s", "bmu"} - grid.keys()
    if missing:
        raise UsageError(f"grid lacks {', '.join(sorted(missing))}")
    if not all(v > 0 and math.isfinite(v) for v in grid["bmu"]):
        raise UsageError("bmu values must be finite and positive")
    return grid


def _cell(sign, n, j, s, t, eps, mode) -> tuple[str, str]:
    try:
        spec = IntegralSpec(sign, n, j, s, t, 1.0)
        return FMT % eval_value(spec, eps, "auto" if mode == "both" else mode)[0], "ok"
    except DivergentIntegralError:
        return "nan", "div"
    except (ValueError, QuadratureError, FloatingPointError, ArithmeticError):
        return "nan", "err"


def run_table(args, out) -> int:
    grid = parse_grid(args.grid)
    out.write("n\tj\ts\tbmu\tIminus\tIplus\tmarker\n")
    for n in grid["n"]:
        for j in grid["j"]:
            for s in grid["s"]:
                for t in grid["bmu"]:
                    vm, km = _cell(MINUS, n, j, s, t, args.eps, args.mode)
                    vp, kp = _cell(PLUS, n, j, s, t, args.eps, args.mode)
                    marker = "ok" if km == kp == "ok" else (km if km != "ok" else kp)
                    out.write(f"{n}\t{j}\t{s}\t{t:.12g}\t{vm}\t{vp}\t{marker}\n")
    return 0


def run_coeffs(args, out) -> int:
    if args.table == "alpha":
        top = args.max or 7
        if top < 1:
            raise UsageError("--max must be >= 1")
        out.write("l\tk\talpha\n")
        for l in range(1, top + 1):
            for k in range(1, l + 1):
                out.write(f"{l}\t{k}\t{coefficients.alpha(l, k)}\n")
        return 0
    variant = args.table.split("-")[1]
    top = args.max or 6
    if not 2 <= top <= coefficients.MAX_J:
        raise UsageError(f"--max for gamma tables must lie in [2, {coefficients.MAX_J}]")
    out.write("j\ti\tgamma\n")
    for j in range(2, top + 1):
        for i, g in sorted(coefficients.gamma_row(variant, j).items()):
            out.write(f"{j}\t{i}\t{g}\n")
    return 0


def run_selftest(args, out) -> int:
    failed = False
    for group in args.group or list(checks.GROUPS):
        results = checks.run_group(group)
        bad = [c for c in results if not c.ok]
        failed |= bool(bad)
        out.write(f"{'FAIL' if bad else 'PASS'} {group} ({len(results) - len(bad)}/{len(results)})\n")
        for c in results if args.verbose else bad:
            out.write(f"  {'ok ' if c.ok else 'BAD'} {c.name}: {c.detail}\n")
    return EXIT_SELFTEST if failed else 0


def run_eval(args, out) -> int:
    spec = IntegralSpec(PLUS if args.plus else MINUS, args.n, args.j, args.s, args.b, args.mu)
    values = eval_value(spec, args.eps, args.mode)
    out.write(" ".join(FMT % v for v in values) + "\n")
    return 0


def _configure_logging(verbose: bool) -> None:
    pkg = logging.getLogger("digamma_assoc")
    for h in [h for h in pkg.handlers if getattr(h, "_from_cli", False)]:
        pkg.removeHandler(h)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
    handler._from_cli = True
    pkg.addHandler(handler)
    pkg.setLevel(logging.INFO if verbose else logging.WARNING)
    pkg.propagate = False


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] not in SUBCOMMANDS + ("-h", "--help"):
        argv.insert(0, "eval")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    _configure_logging(getattr(args, "verbose", False))
    runner = {"eval": run_eval, "table": run_table, "coeffs": run_coeffs, "selftest": run_selftest}
    try:
        return runner[args.command](args, sys.stdout)
    except DivergentIntegralError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_DIVERGENT
    except UsageError as exc:
        print(f"digamma_assoc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (TypeError, ValueError) as exc:
        print(f"digamma_assoc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (QuadratureError, FloatingPointError) as exc:
        print(f"digamma_assoc: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
