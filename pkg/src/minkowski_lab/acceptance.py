"""The fourteen acceptance checks, shared by the test-suite and `minkowski-lab suite`."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from . import identities as ident
from .appendix_refutation import TestFunction, decay_scan
from .minkowski_core import (ALPHA, cf_from_rational, extended_F, holder_ratio, question_mark,
                             question_mark_cf)
from .oscillatory import lemma_scan, tail_profile
from .stieltjes_quadrature import (SchemeDisagreement, coefficient_table, integrate_dq, mhat)

__all__ = ["CriterionResult", "CRITERIA", "run_criterion", "run_all", "format_line"]


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0
    data: dict = field(default_factory=dict)


def _rng():
    return np.random.default_rng(20240611)


def c1_exact_kernel():
    worst = 0.0
    count = 0
    for q in range(1, 51):
        for p in range(1, q + 1):
            if math.gcd(p, q) != 1:
                continue
            exact = question_mark_cf(cf_from_rational(Fraction(p, q))).as_fraction()
            worst = max(worst, abs(float(question_mark(p / q)) - float(exact)))
            count += 1
    return worst <= 1e-15, f"max |?(p/q) - dyadic| = {worst:.2e} over {count} rationals", {"max": worst}


def c2_symmetry():
    rng = _rng()
    x = rng.uniform(0, 1, 10_000)
    r1 = float(np.max(np.abs(question_mark(x) + question_mark(1 - x) - 1)))
    y = rng.uniform(0, 10, 10_000)
    hi, lo = y[y >= 1], y[y < 1]
    F = extended_F
    r2 = float(max(np.max(np.abs(2 * F(hi) - F(hi - 1) - 1)),
                   np.max(np.abs(2 * F(lo) - F(lo / (1 - lo))))))
    z = rng.uniform(0, 100, 1000)
    z = z[z > 0]
    r3 = float(np.max(np.abs(F(z) + F(1 / z) - 1)))
    ok = max(r1, r2, r3) < 1e-12
    return ok, f"reflection {r1:.1e}, branch {r2:.1e}, inversion {r3:.1e}", \
        {"reflection": r1, "branch": r2, "inversion": r3}


def c3_constant():
    r = integrate_dq(lambda x: 1 / x, 1e-10, singular_at_zero=True)
    err = abs(r.value - 2.5)
    return err <= 1e-6, f"int x^-1 d? = {r.value:.12f} (|err| {err:.1e})", {"value": r.value}


def c4_mhat():
    rows = []
    ok = True
    for T in (1.0, 10.0, 1e2, 1e3, 1e4):
        a = mhat(T, form=2)
        b = mhat(T, form=1)
        rows.append((T, abs(a), abs(a - b)))
        ok &= abs(a) <= 5 and abs(b) <= 5 and abs(a - b) <= 1e-8
    worst = max(r[2] for r in rows)
    big = max(r[1] for r in rows)
    return ok, f"max |m^| = {big:.4f}, max form gap = {worst:.1e}", {"rows": rows}


def c5_coefficients():
    try:
        tab = coefficient_table(256, gate=math.inf)
    except SchemeDisagreement as exc:
        return False, str(exc), {}
    gap, imag = tab.meta["max_gap"], tab.meta["max_imag"]
    return gap <= 1e-8 and imag < 1e-10, f"max |d_a - d_c| = {gap:.1e}, max |Im| = {imag:.1e}", \
        {"max_gap": gap, "max_imag": imag}


def c6_fourier():
    tab = ident._table(4096)
    ok = True
    parts = []
    for x in (1 / 3, 1 / 7, 0.9):
        r = [ident.fourier_series_residual(x, N, tab).residual for N in (16, 256, 4096)]
        ok &= r[0] > r[1] > r[2] and r[2] < 1e-2
        parts.append(f"x={x:.4g}: " + " > ".join(f"{v:.1e}" for v in r))
    return ok, "; ".join(parts), {}


def c7_theorem1():
    res = {}
    for s in (1.0, 2 * math.pi, 10.0, 50.0):
        res[s] = ident.theorem1_residual(s, 1e4).residual
    r4 = ident.theorem1_residual(2 * math.pi, 4e4).residual
    shrink = res[2 * math.pi] / r4
    ok = all(v < 1e-4 for v in res.values()) and shrink >= 2
    det = ", ".join(f"s={s:.4g}: {v:.1e}" for s, v in res.items())
    return ok, f"X=1e4 residuals {det}; shrink at 4e4 = {shrink:.1f}x", \
        {"residuals": res, "residual_4e4": r4}


def c8_theorem2():
    tab = ident._table(4096)
    ok = True
    parts = []
    for m in (1, 2, 3):
        r = ident.theorem2_residual(m, 4096, table=tab)
        ok &= r.passed
        parts.append(f"m={m}: {r.residual:.1e} <= {r.bound:.2e}")
    return ok, "; ".join(parts), {}


def _lemma_ratio(a, b):
    eps, F = tail_profile(a, b)
    return float(np.max(np.abs(F))) * b ** 0.75 / (a + 1)


def c9_lemma():
    a = 0.5
    bs = np.geomspace(2 * math.pi, 1e5 / 16, 24)
    dev = [abs(_lemma_ratio(a, 16 * b) / _lemma_ratio(a, b) - 1) for b in bs]
    plateau = max(dev) < 0.1
    neg = lemma_scan([0.0, 0.5, 2.0, 10.0], list(-np.geomspace(2 * math.pi, 1e5, 60)))
    R = neg.ratios_neg[..., 0]
    bneg = np.abs(np.array(neg.b_neg))
    upper = float(R[:, bneg >= 1e3].max())
    lower = float(R[:, bneg < 1e3].max())
    bounded = upper <= 1.1 * lower
    a_grid = np.linspace(0, 30, 13)
    c1 = lemma_scan(a_grid, list(np.geomspace(2 * math.pi, 1e5, 100))).empirical_C_pos
    c2 = lemma_scan(np.linspace(0, 30, 25), list(np.geomspace(2 * math.pi, 1e5, 200))).empirical_C_pos
    stable = abs(c2 / c1 - 1) < 0.05
    ok = plateau and bounded and stable
    det = (f"b vs 16b max deviation {max(dev):.2f} ({'ok' if plateau else 'no plateau'}); "
           f"neg-branch sup {lower:.3f} -> {upper:.3f}; C_pos {c1:.4f} -> {c2:.4f}")
    return ok, det, {"deviations": dev, "C_pos": (c1, c2), "neg": (lower, upper)}


def c10_bessel():
    worst = 0.0
    for x in (0.5, 1.0, 2.0):
        for s in (0.0, 1.0, 3.0):
            for eta in (0.1, 0.03, 0.01):
                worst = max(worst, ident.bessel_identity_residual(x, s, eta).residual)
    lim = ident.bessel_limit_residual(2.0, 3.0).residual
    return worst < 1e-8 and lim < 1e-4, f"max quadrature residual {worst:.1e}; limit residual {lim:.1e}", {}


def c11_partial_sums():
    st = ident.partial_sum_stats(4096)
    ok = st["partial_sums_within_B"] and st["W_ratio_4096_128"] < 3
    return ok, (f"B = {st['B']:.6f}, max |partial sum| = {st['max_abs_partial_sum']:.4f}, "
                f"W(4096)/W(128) = {st['W_ratio_4096_128']:.3f}"), {}


def c12_holder():
    h14, h16 = holder_ratio(14, ALPHA), holder_ratio(16, ALPHA)
    change = abs(h16 / h14 - 1)
    ok = math.isfinite(h16) and change < 0.05
    return ok, f"depth 14: {h14:.6f}, depth 16: {h16:.6f} (change {change:.1e})", {}


def c13_appendix():
    rep = decay_scan(TestFunction.polynomial_cutoff(), (10.0, 20.0), 200)
    m15 = rep.window_maxima[1.5]
    g2 = rep.growth_factors[2.0][0]
    band = min(m15) > 0 and max(m15) / min(m15) < 1.5
    ok = band and g2 >= 1.2
    return ok, (f"tau^1.5 maxima {m15[0]:.3f}, {m15[1]:.3f}; tau^2 growth {g2:.3f}"), \
        rep.as_dict()


def c14_mock():
    r = [ident.mock_measure_residual(s).residual for s in (1.0, 3.0)]
    return max(r) < 1e-6, f"s=1: {r[0]:.1e}, s=3: {r[1]:.1e}", {}


CRITERIA: Dict[int, tuple] = {
    1: ("exact kernel", c1_exact_kernel),
    2: ("symmetry suite", c2_symmetry),
    3: ("int x^-1 d? = 2.5", c3_constant),
    4: ("m^ bound and forms", c4_mhat),
    5: ("coefficient cross-validation", c5_coefficients),
    6: ("Fourier reconstruction", c6_fourier),
    7: ("integral functional equation", c7_theorem1),
    8: ("discrete functional equation", c8_theorem2),
    9: ("oscillatory tail exponents", c9_lemma),
    10: ("Bessel identity", c10_bessel),
    11: ("partial sums", c11_partial_sums),
    12: ("Hoelder ratio", c12_holder),
    13: ("K_{i tau} decay counterexample", c13_appendix),
    14: ("mock measure control", c14_mock),
}


def run_criterion(k: int) -> CriterionResult:
    name, fn = CRITERIA[k]
    t0 = time.time()
    try:
        ok, detail, data = fn()
    except Exception as exc:  # a crash counts as failure, reported verbatim
        ok, detail, data = False, f"{type(exc).__name__}: {exc}", {}
    return CriterionResult(k, name, bool(ok), detail, time.time() - t0, data)


def format_line(r: CriterionResult) -> str:
    return f"[{'PASS' if r.passed else 'FAIL'}] {r.number:2d} {r.name}: {r.detail} ({r.seconds:.1f}s)"


def run_all(select: Optional[Sequence[int]] = None, echo: Optional[Callable] = None) -> List[CriterionResult]:
    out = []
    for k in (select or sorted(CRITERIA)):
        r = run_criterion(k)
        if echo:
            echo(format_line(r))
        out.append(r)
    return out
