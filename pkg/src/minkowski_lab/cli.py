"""Command-line front end: `minkowski-lab <command> ...`.

Exit codes: 0 all invoked checks pass, 1 a check failed, 2 usage error,
3 quadrature budget or precision error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import List, Optional

import numpy as np

from . import __version__

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


# ------------------------------------------------------------ helpers

def _floats(text: str) -> List[float]:
    """'1,2,3' or 'geom:START:STOP:N' or 'lin:START:STOP:N' (negative values allowed)."""
    text = text.strip()
    for kind, fn in (("geom:", np.geomspace), ("lin:", np.linspace)):
        if text.startswith(kind):
            try:
                a, b, n = text[len(kind):].split(":")
                return [float(v) for v in fn(float(a), float(b), int(n))]
            except ValueError as exc:
                raise UsageError(f"bad grid spec {text!r}") from exc
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"bad number list {text!r}") from exc


def _complex(text: str) -> complex:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise UsageError(f"expected RE or RE,IM, got {text!r}")


def _number(text: str):
    try:
        if "/" in text:
            return Fraction(text)
        return float(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a number: {text!r}") from exc


def _g(v) -> str:
    return f"{float(v):.17g}"


class Emitter:
    """Collects rows and writes CSV or JSON lines behind a header block."""

    def __init__(self, args):
        self.args = args
        self.fmt = args.format
        self.path = args.out

    def header(self):
        cfg = {k: v for k, v in sorted(vars(self.args).items())
               if k not in ("func",) and not callable(v)}
        return {"program": "minkowski-lab", "version": __version__, "config": cfg}

    def write(self, rows: List[dict], columns: Optional[List[str]] = None, summary: str = ""):
        head = self.header()
        buf = io.StringIO()
        if self.fmt == "json":
            buf.write(json.dumps({"header": head}, default=str) + "\n")
            for r in rows:
                buf.write(json.dumps(r, default=float) + "\n")
        else:
            buf.write(f"# minkowski-lab {__version__}\n")
            buf.write(f"# config: {json.dumps(head['config'], default=str)}\n")
            cols = columns or (list(rows[0]) if rows else [])
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(cols)
            for r in rows:
                w.writerow([_g(r[c]) if isinstance(r[c], (float, np.floating)) else r[c]
                            for c in cols])
        text = buf.getvalue()
        if self.path:
            with open(self.path, "w") as fh:
                fh.write(text)
            if summary:
                print(summary)
        else:
            sys.stdout.write(text)


def _report_rows(rep):
    d = rep.as_dict()
    return [{"identity": d["identity"], "params": json.dumps(d["params"]),
             "lhs_re": d["lhs"]["re"], "lhs_im": d["lhs"]["im"],
             "rhs_re": d["rhs"]["re"], "rhs_im": d["rhs"]["im"],
             "residual": d["residual"],
             "bound": float("nan") if d["bound"] is None else d["bound"],
             "pass": "" if d["passed"] is None else ("PASS" if d["passed"] else "FAIL"),
             "budget": json.dumps(d["truncation_budget"], default=float)}]


def _emit_report(args, rep):
    Emitter(args).write(_report_rows(rep), summary=f"residual {rep.residual:.3e}")
    return EXIT_OK if rep.passed in (None, True) else EXIT_FAIL


# ------------------------------------------------------------ commands

def cmd_qm_eval(args):
    from .minkowski_core import question_mark, question_mark_rational
    x = _number(args.x)
    if isinstance(x, Fraction):
        if not 0 <= x <= 1:
            raise UsageError("x must lie in [0, 1]")
        print(_g(question_mark_rational(x.numerator, x.denominator)).rstrip())
    else:
        print(repr(float(question_mark(x))))
    return EXIT_OK


def cmd_qm_inverse(args):
    from .minkowski_core import box_inverse
    u = float(_number(args.u))
    fr = box_inverse(u, exact=True)
    print(f"{float(fr)!r} {fr}")
    return EXIT_OK


def cmd_qm_cf(args):
    from .minkowski_core import cf_from_rational, cf_from_real
    if args.float:
        cf = cf_from_real(float(_number(args.x)), tol=args.tol)
    else:
        # decimal input is read exactly: 0.3 means 3/10
        try:
            x = Fraction(args.x)
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"not a number: {args.x!r}") from exc
        cf = cf_from_rational(x)
    print("[0; " + ", ".join(str(t) for t in cf.terms) + (", ...]" if cf.truncated else "]"))
    return EXIT_OK


def cmd_coeffs(args):
    from .stieltjes_quadrature import coefficient_table
    tab = coefficient_table(args.max_n, tol=args.tol)
    rows = [{"n": n, "d_n": float(d), "error": float(e)} for n, (d, e) in tab.entries.items()]
    Emitter(args).write(rows, ["n", "d_n", "error"], summary=f"{len(rows)} coefficients")
    return EXIT_OK


def cmd_transform(args):
    from .stieltjes_quadrature import laplace_transform
    t = _complex(args.t)
    v = laplace_transform(t, tol=args.tol)
    Emitter(args).write([{"t_re": t.real, "t_im": t.imag, "m_re": v.real, "m_im": v.imag}],
                        summary=f"m(t) = {v!r}")
    return EXIT_OK


def cmd_verify(args):
    from . import identities as ident
    w = args.what
    if w == "thm1":
        rep = ident.theorem1_residual(args.s, args.X)
    elif w == "thm2":
        rep = ident.theorem2_residual(args.m, args.N)
    elif w == "fourier":
        rep = ident.fourier_series_residual(args.x, args.N)
    elif w == "symmetry":
        rep = ident.symmetry_residual(_complex(args.t))
    elif w == "bessel":
        rep = ident.bessel_identity_residual(args.x, args.s, args.eta)
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(w)
    return _emit_report(args, rep)


def _scan_one(job):
    from .oscillatory import lemma_scan
    a, b_grid = job
    return lemma_scan([a], b_grid)


def cmd_lemma_scan(args):
    from .oscillatory import LemmaScanReport
    a_grid = _floats(args.a_grid)
    b_grid = _floats(args.b_grid)
    if any(abs(b) < 2 * math.pi for b in b_grid):
        raise UsageError("b values need |b| >= 2 pi")
    jobs = [(a, b_grid) for a in a_grid]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as ex:
            parts = list(ex.map(_scan_one, jobs))
    else:
        parts = [_scan_one(j) for j in jobs]
    rows = []
    for a, p in zip(a_grid, parts):
        for r in p.rows():
            rows.append(r)
    cp = max(p.empirical_C_pos for p in parts)
    cn = max(p.empirical_C_neg for p in parts)
    Emitter(args).write(rows, ["branch", "a", "b", "eps", "ratio"],
                        summary=f"empirical C_pos {cp:.6g}, C_neg {cn:.6g}")
    if not args.out:
        print(f"# empirical_C_pos={cp:.17g} empirical_C_neg={cn:.17g}")
    return EXIT_OK


def cmd_oscillatory_p(args):
    from .oscillatory import p_integral, stationary_phase_estimate
    r = p_integral(args.a, args.b, args.tol)
    row = {"a": args.a, "b": args.b, "P": r.value, "error": r.error_estimate,
           "x0": float("nan") if r.stationary_point is None else r.stationary_point}
    if args.a > 0 and args.b > args.a:
        row["stationary_phase"] = stationary_phase_estimate(args.a, args.b).value
    Emitter(args).write([row], summary=f"P = {r.value!r}")
    return EXIT_OK


def cmd_appendix_scan(args):
    from .appendix_refutation import TestFunction, decay_scan
    from .special_functions import Precision
    wins = _floats(args.windows)
    f = TestFunction.bump() if args.function == "bump" else TestFunction.polynomial_cutoff(args.k)
    rep = decay_scan(f, wins, args.samples, Precision(args.bits))
    rows = []
    for i, (lo, hi) in enumerate(rep.windows):
        row = {"tau_lo": lo, "tau_hi": hi}
        for N in sorted(rep.window_maxima):
            row[f"max_N{N:g}"] = rep.window_maxima[N][i]
        rows.append(row)
    Emitter(args).write(rows, summary=rep.to_json())
    g2 = rep.growth_factors[2.0]
    print(f"# growth factors for N=2: {', '.join(f'{g:.4f}' for g in g2)}")
    return EXIT_OK if all(g >= 1.2 for g in g2) else EXIT_FAIL


def cmd_suite(args):
    from .acceptance import run_all
    only = [int(v) for v in _floats(args.only)] if args.only else None
    print(f"# minkowski-lab {__version__} acceptance suite")
    results = run_all(only, echo=lambda s: print(s, flush=True))
    if args.out:
        Emitter(args).write([{"criterion": r.number, "name": r.name,
                              "pass": "PASS" if r.passed else "FAIL", "detail": r.detail,
                              "seconds": r.seconds} for r in results])
    npass = sum(r.passed for r in results)
    print(f"# {npass}/{len(results)} criteria pass")
    return EXIT_OK if npass == len(results) else EXIT_FAIL


# ------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", default=None, help="write the machine artifact here")
    common.add_argument("--jobs", type=int, default=1, help="worker processes")

    p = argparse.ArgumentParser(prog="minkowski-lab",
                                description="Minkowski question-mark measure experiments")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    qm = sub.add_parser("qm", help="question-mark function").add_subparsers(dest="qm", required=True)
    q = qm.add_parser("eval", parents=[common]); q.add_argument("x"); q.set_defaults(func=cmd_qm_eval)
    q = qm.add_parser("inverse", parents=[common]); q.add_argument("u"); q.set_defaults(func=cmd_qm_inverse)
    q = qm.add_parser("cf", parents=[common]); q.add_argument("x")
    q.add_argument("--float", action="store_true",
                   help="expand the nearest double instead of the exact decimal")
    q.add_argument("--tol", type=float, default=0.0,
                   help="with --float: stop at the first convergent this close to x")
    q.set_defaults(func=cmd_qm_cf)

    q = sub.add_parser("coeffs", parents=[common], help="Fourier-Stieltjes coefficients d_n")
    q.add_argument("--max-n", type=int, default=4096)
    q.add_argument("--tol", type=float, default=1e-12)
    q.set_defaults(func=cmd_coeffs)

    q = sub.add_parser("transform", parents=[common], help="m(t) = int e^{tx} d?(x)")
    q.add_argument("--t", required=True, help="RE or RE,IM")
    q.add_argument("--tol", type=float, default=1e-12)
    q.set_defaults(func=cmd_transform)

    v = sub.add_parser("verify", help="identity residuals").add_subparsers(dest="what", required=True)
    q = v.add_parser("thm1", parents=[common])
    q.add_argument("--s", type=float, default=2 * math.pi); q.add_argument("--X", type=float, default=1e4)
    q = v.add_parser("thm2", parents=[common])
    q.add_argument("--m", type=int, default=1); q.add_argument("--N", type=int, default=4096)
    q = v.add_parser("fourier", parents=[common])
    q.add_argument("--x", type=float, default=1 / 3); q.add_argument("--N", type=int, default=4096)
    q = v.add_parser("symmetry", parents=[common]); q.add_argument("--t", default="5")
    q = v.add_parser("bessel", parents=[common])
    q.add_argument("--x", type=float, default=1.0); q.add_argument("--s", type=float, default=1.0)
    q.add_argument("--eta", type=float, default=0.1)
    for name in ("thm1", "thm2", "fourier", "symmetry", "bessel"):
        v.choices[name].set_defaults(func=cmd_verify)

    lem = sub.add_parser("lemma", help="empirical constants of the oscillatory tail bound").add_subparsers(dest="lemma", required=True)
    q = lem.add_parser("scan", parents=[common])
    q.add_argument("--a-grid", default="lin:0:30:13")
    q.add_argument("--b-grid", default="geom:6.283185307179586:1e5:100",
                   help="list or lin:/geom: spec; write --b-grid=-50,... for negative values")
    q.set_defaults(func=cmd_lemma_scan)

    osc = sub.add_parser("oscillatory", help="P(a, b)").add_subparsers(dest="osc", required=True)
    q = osc.add_parser("p", parents=[common])
    q.add_argument("--a", type=float, required=True); q.add_argument("--b", type=float, required=True)
    q.add_argument("--tol", type=float, default=1e-10)
    q.set_defaults(func=cmd_oscillatory_p)

    app = sub.add_parser("appendix", help="K_{i tau} decay scans").add_subparsers(dest="app", required=True)
    q = app.add_parser("scan", parents=[common])
    q.add_argument("--windows", default="10,20", help="window starts T (windows are [T, 2T])")
    q.add_argument("--samples", type=int, default=200)
    q.add_argument("--function", choices=("polynomial-cutoff", "bump"), default="polynomial-cutoff")
    q.add_argument("--k", type=int, default=2, help="exponent of the polynomial cutoff")
    q.add_argument("--bits", type=int, default=256)
    q.set_defaults(func=cmd_appendix_scan)

    q = sub.add_parser("suite", parents=[common], help="run the acceptance criteria")
    q.add_argument("--only", default=None, help="comma list of criterion numbers")
    q.set_defaults(func=cmd_suite)
    return p


def dispatch(argv: Optional[List[str]] = None) -> int:
    from .identities import TailBudgetError
    from .special_functions import PrecisionError
    from .stieltjes_quadrature import BudgetError
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (BudgetError, PrecisionError, TailBudgetError, MemoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, ValueError, OverflowError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
