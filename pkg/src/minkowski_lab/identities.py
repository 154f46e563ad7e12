"""Numerical checks of the integral identities for m(t) = int e^{tx} d?(x).

Every report pairs a left side and a right side obtained from disjoint code
paths (spread/FFT transforms vs. adaptive d? quadrature, quadrature vs.
closed forms, oscillatory P-integrals vs. the coefficient table) together
with the truncation budget that justifies the comparison.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .minkowski_core import ALPHA, question_mark
from .oscillatory import lemma_scan, p_integral, tail_integral
from .special_functions import bessel_j
from .stieltjes_quadrature import (CoefficientTable, TransformGrid, coefficient_table,
                                   integrate_dq, laplace_transform)

__all__ = [
    "ResidualReport",
    "TailBudgetError",
    "a_functional",
    "a_integrand",
    "theorem1_residual",
    "bessel_identity_quadrature",
    "bessel_identity_residual",
    "bessel_limit",
    "bessel_limit_residual",
    "cos_inverse_integral",
    "empirical_lemma_constants",
    "mock_measure_residual",
    "theorem2_term",
    "theorem2_residual",
    "fourier_series_residual",
    "symmetry_residual",
    "partial_sum_bound",
    "partial_sum_stats",
    "reports_to_csv",
]


class TailBudgetError(RuntimeError):
    """The truncation tail cannot be pushed below the requested level."""


def _c(z):
    return {"re": float(np.real(z)), "im": float(np.imag(z))}


@dataclass
class ResidualReport:
    identity: str
    params: dict
    lhs: complex
    rhs: complex
    residual: float
    truncation_budget: dict = field(default_factory=dict)
    bound: Optional[float] = None
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> Optional[bool]:
        if self.bound is None:
            return None
        return bool(self.residual <= self.bound)

    def as_dict(self):
        return {"identity": self.identity, "params": self.params,
                "lhs": _c(self.lhs), "rhs": _c(self.rhs), "residual": self.residual,
                "bound": self.bound, "passed": self.passed,
                "truncation_budget": self.truncation_budget, "extra": self.extra}

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), default=float)


def reports_to_csv(reports: Sequence[ResidualReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["identity", "parameter", "residual", "bound", "pass"])
    for r in reports:
        par = ";".join(f"{k}={v}" for k, v in r.params.items())
        w.writerow([r.identity, par, f"{r.residual:.6e}",
                    "" if r.bound is None else f"{r.bound:.6e}",
                    "" if r.passed is None else ("PASS" if r.passed else "FAIL")])
    return buf.getvalue()


# ------------------------------------------ integral functional equation

@lru_cache(maxsize=4)
def _grid(t_max: float) -> TransformGrid:
    return TransformGrid(t_max)


def _grid_for(X):
    # one grid per power of two keeps the cache small across nearby X
    return _grid(float(2 ** math.ceil(math.log2(max(X, 64.0)))))


def _kernel(s):
    rs = math.sqrt(s)

    def k(t):
        t = np.asarray(t, float)
        z = 2 * np.sqrt(s * t)
        return (s / t) * (bessel_j(0, z) - bessel_j(2, z)) - bessel_j(1, z) * rs / t ** 1.5
    return k


def a_integrand(s, t, grid: Optional[TransformGrid] = None):
    """m^(t) (J0 - J2)(2 sqrt(st)) s/t - m^(t) J1(2 sqrt(st)) sqrt(s)/t^{3/2}."""
    t = np.atleast_1d(np.asarray(t, float))
    g = grid if grid is not None else _grid_for(float(np.max(t)))
    return g.mhat(t) * _kernel(float(s))(t)


def _a_value(s, X, grid):
    zX = 2 * math.sqrt(s * X)
    mX = complex(grid.m([X])[0])
    mhX = complex(grid.mhat([X])[0])
    integral = grid.integrate_kernel(X, _kernel(s), strengths=grid.h, shift=grid.c0)
    j0, j1 = bessel_j(0, zX), bessel_j(1, zX)
    return (-1j * j0 * mX + 1j - 1j * j1 * math.sqrt(s / X) * mhX + 0.5j * integral)


@lru_cache(maxsize=64)
def _tail_constant(s: float) -> float:
    """c with |A(s, 2X) - A(s, X)| <= c X^{-1/4}, calibrated on X in [1e2, 1e3]."""
    g = _grid(2048.0)
    c = 0.0
    for X in np.geomspace(1e2, 1e3, 7):
        d = abs(_a_value(s, 2 * X, g) - _a_value(s, X, g))
        c = max(c, d * X ** 0.25)
    return c


def a_tail_bound(s, X):
    # geometric sum of X^{-1/4} increments over X, 2X, 4X, ...
    return _tail_constant(float(s)) * X ** -0.25 / (1 - 2 ** -0.25)


def a_functional(s, X, return_budget=False):
    """A(s, X) in its absolutely convergent integrated-by-parts form.

    -i J0(2 sqrt(sX)) m(iX) + i - i J1(2 sqrt(sX)) sqrt(s/X) m^(X)
    + (i/2) int_0^X m^(t) [(J0 - J2) s/t - J1 sqrt(s)/t^{3/2}] dt,
    with m^(t) = int_0^t m(iu) du.  With return_budget the tail bound
    c X^{-1/4} (c calibrated at X in [1e2, 1e3]) is returned as well.
    """
    s, X = float(s), float(X)
    if not (s > 0 and math.isfinite(s)):
        raise ValueError("s must be positive")
    if not (X >= 1 and math.isfinite(X)):
        raise ValueError("X must be >= 1")
    grid = _grid_for(X)
    val = complex(_a_value(s, X, grid))
    if not return_budget:
        return val
    return val, {"X": X, "tail_bound": a_tail_bound(s, X),
                 "tail_constant": _tail_constant(s), "dropped_mass": grid.dropped_mass}


def theorem1_residual(s, X=1e4) -> ResidualReport:
    """|A(s, X) - i m(is)/(2e^{2is} - e^{is})|.

    The right side uses adaptive d?-quadrature of e^{isx}; the left side the
    spread/FFT transform grid.
    """
    s = float(s)
    lhs, budget = a_functional(s, X, return_budget=True)
    den = 2 * np.exp(2j * s) - np.exp(1j * s)
    if abs(den) < 1:
        raise ArithmeticError("|2e^{2is} - e^{is}| < 1 contradicts the triangle inequality")
    rhs = 1j * laplace_transform(1j * s, tol=1e-13) / den
    res = abs(lhs - rhs)
    return ResidualReport("theorem1", {"s": s, "X": float(X)}, lhs, rhs, res, budget,
                          bound=budget["tail_bound"] + 1e-9,
                          extra={"denominator_modulus": float(abs(den))})


# ---------------------------------------------------------- Bessel integral

_GL20 = np.polynomial.legendre.leggauss(20)


def bessel_identity_quadrature(x, s, eta, tail=1e-15):
    """x int_0^inf e^{(ix - eta)t} J0(2 sqrt(st)) dt by Gauss panels.

    Panel edges sit where x t + 2 sqrt(st) crosses multiples of pi, so each
    panel carries at most half a period of either oscillation.
    """
    x, s, eta = float(x), float(s), float(eta)
    if eta <= 0:
        raise ValueError("eta must be positive; the undamped integral is only conditionally convergent")
    if x <= 0 or s < 0:
        raise ValueError("need x > 0 and s >= 0")
    T = (math.log(x / eta) - math.log(tail)) / eta
    rs = math.sqrt(s)
    kmax = int(math.ceil((x * T + 2 * rs * math.sqrt(T)) / math.pi))
    k = np.arange(kmax + 1, dtype=float) * math.pi
    u = np.zeros_like(k)
    u[1:] = k[1:] / (rs + np.sqrt(s + x * k[1:]))   # root of x u^2 + 2 sqrt(s) u = k pi
    edges = u * u
    gx, gw = _GL20
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    t = 0.5 * (hi + lo)[:, None] + half[:, None] * gx[None, :]
    f = np.exp((1j * x - eta) * t) * bessel_j(0, 2 * np.sqrt(s * t))
    return complex(x * np.sum(half[:, None] * gw[None, :] * f))


def _bessel_closed(x, s, eta):
    p = eta - 1j * x
    return x * np.exp(-s / p) / p


def bessel_identity_residual(x, s, eta) -> ResidualReport:
    lhs = bessel_identity_quadrature(x, s, eta)
    rhs = complex(_bessel_closed(x, s, eta))
    return ResidualReport("bessel", {"x": float(x), "s": float(s), "eta": float(eta)},
                          lhs, rhs, abs(lhs - rhs), {"eta": float(eta), "tail_bound": 1e-15},
                          bound=1e-8)


def _richardson(vals, ratio):
    # vals at eta, eta/ratio, eta/ratio^2, ...; error expansion in powers of eta
    table = [list(vals)]
    for j in range(1, len(vals)):
        prev = table[-1]
        f = ratio ** j
        table.append([(f * prev[i + 1] - prev[i]) / (f - 1) for i in range(len(prev) - 1)])
    return table[-1][0]


def bessel_limit(x, s, etas=(1e-1, 1e-2, 1e-3)):
    """Richardson-extrapolated eta -> 0 limit of the regularized quadrature."""
    etas = [float(e) for e in etas]
    ratio = etas[0] / etas[1]
    vals = [bessel_identity_quadrature(x, s, e) for e in etas]
    return complex(_richardson(vals, ratio)), vals


def bessel_limit_residual(x, s, etas=(1e-1, 1e-2, 1e-3)) -> ResidualReport:
    lhs, vals = bessel_limit(x, s, etas)
    rhs = 1j * np.exp(-1j * s / x)
    return ResidualReport("bessel-limit", {"x": float(x), "s": float(s)}, lhs, complex(rhs),
                          abs(lhs - rhs), {"etas": list(etas)}, bound=1e-4)


def mock_measure_residual(s, etas=(1e-2, 1e-3, 1e-4)) -> ResidualReport:
    """Point mass at 1: int_0^inf e^{it} J0(2 sqrt(st)) dt = i n(is) e^{-2is} with n(z) = e^z."""
    lhs, _ = bessel_limit(1.0, s, etas)
    rhs = 1j * np.exp(1j * s) * np.exp(-2j * s)
    return ResidualReport("mock-delta1", {"s": float(s)}, lhs, complex(rhs), abs(lhs - rhs),
                          {"etas": list(etas)}, bound=1e-6)


# ------------------------------------------ discrete functional equation

@lru_cache(maxsize=2)
def _table(n: int) -> CoefficientTable:
    return coefficient_table(max(n, 64))


def theorem2_term(m, n, d_n, tol):
    """2 d_n int_0^1 cos(2 pi n x) cos(2 pi m / x) dx = d_n [P(a, b) + P(a, -b)]."""
    a, b = 2 * math.pi * m, 2 * math.pi * n
    r1 = p_integral(a, b, tol)
    r2 = p_integral(a, -b, tol)
    return d_n * (r1.value + r2.value), abs(d_n) * (r1.error_estimate + r2.error_estimate)


def empirical_lemma_constants(m, b_points=120):
    a = 2 * math.pi * m
    b = np.geomspace(2 * math.pi, 1e5, b_points)
    rep = lemma_scan([a], list(b) + list(-b))
    return rep.empirical_C_pos, rep.empirical_C_neg


def _w_constant(absd, N):
    S = np.cumsum(absd[:N])
    n = np.arange(1, N + 1)
    return float(np.max(S * n ** (ALPHA / 2 - 1))), float(S[-1])


def theorem2_tail_majorant(m, N, absd, C_pos, C_neg):
    """Majorant of sum_{n>N} |d_n| |P(a, b) + P(a, -b)|, a = 2 pi m, b = 2 pi n.

    Each P is bounded by the oscillatory tail bound (with eps = 0): C+(a+1) b^{-3/4} and
    C-(a+1)/b.  The sums over n > N use partial summation with the observed
    growth S(n) = sum_{k<=n}|d_k| <= W n^{1-alpha/2}.
    """
    a = 2 * math.pi * m
    W, S = _w_constant(absd, N)
    h = ALPHA / 2
    s34 = W * 0.75 * N ** (0.25 - h) / (h - 0.25) - S * (N + 1) ** -0.75
    s1 = W * N ** -h / h - S / (N + 1)
    return (a + 1) * (C_pos * (2 * math.pi) ** -0.75 * max(s34, 0.0)
                      + C_neg * (2 * math.pi) ** -1 * max(s1, 0.0)), W


def theorem2_residual(m, N=4096, tol=1e-5, table: Optional[CoefficientTable] = None,
                      lemma_constants=None, require_tail: Optional[float] = None) -> ResidualReport:
    """|d_m - P(2 pi m, 0) - sum_{n<=N} d_n [P(2 pi m, 2 pi n) + P(2 pi m, -2 pi n)]|.

    Term n uses P-integrals at tolerance 1e-9/n.  The combined bound is the
    accumulated quadrature error plus the tail majorant built from empirical
    tail-bound constants.  require_tail raises TailBudgetError if the majorant
    exceeds it.
    """
    m, N = int(m), int(N)
    if m < 1 or N < 1:
        raise ValueError("m and N must be positive")
    tab = table if table is not None else _table(max(N, m))
    if tab.max_n < max(N, m):
        raise ValueError("coefficient table too short")
    d = tab.d
    a = 2 * math.pi * m
    r0 = p_integral(a, 0.0, 1e-12)
    rhs = r0.value
    qerr = r0.error_estimate
    for n in range(1, N + 1):
        v, e = theorem2_term(m, n, d[n], 1e-9 / n)
        rhs += v
        qerr += e
    qerr += 2 * float(np.sum(tab.err[1:N + 1])) + tab.err[m]
    if lemma_constants is None:
        lemma_constants = empirical_lemma_constants(m)
    C_pos, C_neg = lemma_constants
    tail, W = theorem2_tail_majorant(m, N, np.abs(d[1:]), C_pos, C_neg)
    if require_tail is not None and tail > require_tail:
        raise TailBudgetError(f"tail majorant {tail:.3e} exceeds {require_tail:.3e} at N={N}")
    lhs = float(d[m])
    res = abs(lhs - rhs)
    budget = {"N": N, "tail_bound": tail, "quadrature_error": qerr, "C_pos": C_pos,
              "C_neg": C_neg, "W": W, "term_tol": "1e-9/n"}
    return ResidualReport("theorem2", {"m": m}, lhs, rhs, res, budget, bound=tail + qerr)


def cos_inverse_integral(a):
    """int_0^1 cos(a/x) dx = cos a + a Si(a) - a pi/2 (closed form via sici)."""
    from scipy.special import sici
    a = float(a)
    return math.cos(a) + a * float(sici(a)[0]) - 0.5 * math.pi * a


# ----------------------------------------------------- Fourier series etc.

def fourier_series_residual(x, N, table: Optional[CoefficientTable] = None) -> ResidualReport:
    """|?(x) - x - sum_{n<=N} d_n/(pi n) sin(2 pi n x)|."""
    x = float(x)
    if not 0 <= x <= 1:
        raise ValueError("x must lie in [0, 1]")
    tab = table if table is not None else _table(N)
    if tab.max_n < N:
        raise ValueError("coefficient table too short")
    n = np.arange(1, N + 1)
    # sin(2 pi n x) with exact reduction for rational-looking x is not needed:
    # x = 0, 1/2, 1 give sin(k pi) which we set to zero exactly
    s = np.sin(2 * math.pi * n * x)
    if x in (0.0, 0.5, 1.0):
        s[:] = 0.0
    series = float(np.sum(tab.d[1:N + 1] / (math.pi * n) * s))
    lhs = float(question_mark(x)) - x
    return ResidualReport("fourier-series", {"x": x, "N": int(N)}, lhs, series,
                          abs(lhs - series), {"N": int(N)})


def symmetry_residual(t) -> ResidualReport:
    """|m(t) - e^t m(-t)| with bound 1e-10 e^{|t|}; for t = i*theta also Im m."""
    t = complex(t)
    if abs(t.real) > 100:
        raise OverflowError("|Re t| > 100")
    if t == 0:
        return ResidualReport("symmetry", {"t": str(t)}, 0.5 + 0j, 0.5 + 0j, 0.0, {}, bound=0.0)
    lhs = laplace_transform(t)
    rhs = np.exp(t) * laplace_transform(-t)
    extra = {}
    if t.real == 0:
        # m(i theta) e^{-i theta/2} is real; at theta = 2 pi n it equals d_n
        extra["imag_part"] = float(np.imag(lhs * np.exp(-0.5 * t)))
    return ResidualReport("symmetry", {"t": str(t)}, complex(lhs), complex(rhs),
                          float(abs(lhs - rhs)), {}, bound=1e-10 * math.exp(abs(t.real)),
                          extra=extra)


@lru_cache(maxsize=1)
def partial_sum_bound(tol=1e-10):
    """B = 2 int |e^{2 pi i x} - 1|^{-1} d?(x) = int 1/sin(pi x) d?(x).

    The endpoint poles are split off: 1/sin(pi x) - 1/(pi x) - 1/(pi(1-x)) is
    bounded, and the two pole pieces are equal by the symmetry of d?.
    """
    def smooth(x):
        x = np.asarray(x, float)
        with np.errstate(divide="ignore", invalid="ignore"):
            v = 1 / np.sin(np.pi * x) - 1 / (np.pi * x) - 1 / (np.pi * (1 - x))
        # near either end use 1/sin z - 1/z = z/6 + 7 z^3/360 + O(z^5)
        y = np.minimum(x, 1 - x)
        small = y < 1e-4
        if np.any(small):
            z = np.pi * y[small]
            v[small] = z / 6 + 7 * z ** 3 / 360 - 1 / (np.pi * (1 - y[small]))
        return v
    r1 = integrate_dq(smooth, tol)
    r2 = integrate_dq(lambda x: 1 / (np.pi * x), tol, singular_at_zero=True)
    return float(r1.value + 2 * r2.value), float(r1.error_estimate + 2 * r2.error_estimate)


def partial_sum_stats(N_max=4096, table: Optional[CoefficientTable] = None):
    """Dyadic rows of (N, sum d_n, sum |d_n|, W(N), max_{N/2<n<=N} |d_n|) plus checks."""
    tab = table if table is not None else _table(N_max)
    d = tab.d[1:N_max + 1]
    B, Berr = partial_sum_bound()
    cs = np.cumsum(d)
    ca = np.cumsum(np.abs(d))
    rows = []
    N = 1
    while N <= N_max:
        W = ca[N - 1] * N ** (ALPHA / 2 - 1)
        rows.append({"N": N, "sum_d": float(cs[N - 1]), "sum_abs_d": float(ca[N - 1]),
                     "W": float(W), "max_abs_d_dyadic": float(np.max(np.abs(d[N // 2:N])))})
        N *= 2
    within = bool(np.all(np.abs(cs) <= B))
    Ws = {r["N"]: r["W"] for r in rows}
    ratio = Ws.get(4096, rows[-1]["W"]) / Ws[128] if 128 in Ws else math.nan
    return {"B": B, "B_error": Berr, "max_abs_partial_sum": float(np.max(np.abs(cs))),
            "partial_sums_within_B": within, "W_ratio_4096_128": ratio, "rows": rows}
