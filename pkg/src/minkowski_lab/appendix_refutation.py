"""Decay of I(tau) = int_0^1 K_{i tau}(x) f(x) dx / x for f vanishing on [0, 1/2].

Exchanging the order of integration gives I(tau) = int_0^inf cos(tau t) g(t) dt
with g(t) = int f(x)/x exp(-x cosh t) dx, so g is tabulated once at high
precision on the cosh-quadrature nodes and every tau costs one weighted sum.
The signal is of size exp(-pi tau/2) sitting under O(1) cancellation, which
is why the sums run in mpmath.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import mpmath
import numpy as np
from scipy.optimize import minimize_scalar

from .special_functions import (CoshQuadrature, Precision, _check_precision, _mp_legendre,
                                k_asymptotic, k_leading_term)

__all__ = [
    "TestFunction",
    "DecayScanReport",
    "naylor_integral",
    "asymptotic_integral",
    "decay_scan",
    "NORMALIZATIONS",
]

TAU_MAX = 40.0
NORMALIZATIONS = (0.5, 1.0, 1.5, 2.0)


@dataclass(frozen=True)
class TestFunction:
    """Continuous f on [0, 1] vanishing outside [x_lo, x_hi].

    tag 'bump': 16 (2x-1)^2 (1-x)^2 on [1/2, 1] (zero to second order at both ends).
    tag 'polynomial-cutoff': (2x-1)^k on [1/2, 1] (k = smoothness order at 1/2).
    """
    __test__ = False   # not a pytest class

    tag: str = "polynomial-cutoff"
    x_lo: float = 0.5
    x_hi: float = 1.0
    smoothness: int = 2
    scale: float = 1.0
    terms: tuple = ()

    def __post_init__(self):
        if self.tag not in ("bump", "polynomial-cutoff", "zero", "sum"):
            raise ValueError(f"unknown test function tag {self.tag!r}")
        if not 0 < self.x_lo < self.x_hi <= 1:
            raise ValueError("support must lie in (0, 1]")

    @classmethod
    def bump(cls):
        return cls("bump", 0.5, 1.0, 2)

    @classmethod
    def polynomial_cutoff(cls, k=2):
        return cls("polynomial-cutoff", 0.5, 1.0, int(k))

    @classmethod
    def zero(cls):
        return cls("zero", 0.5, 1.0, 0)

    def __add__(self, other):
        return TestFunction("sum", min(self.x_lo, other.x_lo), max(self.x_hi, other.x_hi),
                            min(self.smoothness, other.smoothness), 1.0, (self, other))

    def __mul__(self, c):
        return TestFunction(self.tag, self.x_lo, self.x_hi, self.smoothness,
                            self.scale * c, self.terms)

    __rmul__ = __mul__

    def _raw(self, x):
        if self.tag == "zero":
            return 0 * x
        if self.tag == "bump":
            return 16 * (2 * x - 1) ** 2 * (1 - x) ** 2
        if self.tag == "polynomial-cutoff":
            return (2 * x - 1) ** self.smoothness
        return sum(t(x) for t in self.terms)

    def __call__(self, x):
        # works for floats, numpy arrays and mpf
        if isinstance(x, np.ndarray):
            inside = (x >= self.x_lo) & (x <= self.x_hi)
            return np.where(inside, self.scale * self._raw(x), 0.0)
        if self.tag == "sum":
            return self.scale * sum(t(x) for t in self.terms)
        if x < self.x_lo or x > self.x_hi:
            return 0 * x
        return self.scale * self._raw(x)

    def pieces(self):
        """Support intervals of the smooth pieces (for panel placement)."""
        if self.tag == "sum":
            pts = sorted({p for t in self.terms for p in (t.x_lo, t.x_hi)})
            return list(zip(pts[:-1], pts[1:]))
        return [(self.x_lo, self.x_hi)]


class _GTable:
    """g(t_j) = int f(x)/x exp(-x cosh t_j) dx on the cosh-quadrature nodes."""

    def __init__(self, f: TestFunction, bits: int, tau_max=TAU_MAX, x_panels=8, degree=40):
        self.bits = bits
        self.quad = CoshQuadrature(bits, f.x_lo, tau_max=tau_max)
        xs, ws = _mp_legendre(degree, bits)
        with mpmath.workprec(bits):
            xn, xw = [], []
            for lo, hi in f.pieces():
                lo, hi = mpmath.mpf(lo), mpmath.mpf(hi)
                h = (hi - lo) / x_panels
                for k in range(x_panels):
                    a = lo + k * h
                    for xi, wi in zip(xs, ws):
                        x = a + h * (xi + 1) / 2
                        xn.append(x)
                        xw.append(wi * h / 2 * f(x) / x)
            self.g = [mpmath.fsum(w * mpmath.exp(-x * mpmath.cosh(t)) for x, w in zip(xn, xw))
                      * wt for t, wt in zip(self.quad.nodes, self.quad.weights)]
            self.t = self.quad.nodes

    def value(self, tau):
        with mpmath.workprec(self.bits):
            tm = mpmath.mpf(tau)
            return mpmath.fsum(g * mpmath.cos(tm * t) for g, t in zip(self.g, self.t))


_CACHE: Dict[tuple, _GTable] = {}


def _table(f, bits):
    key = (f, bits)
    if key not in _CACHE:
        _CACHE[key] = _GTable(f, bits)
    return _CACHE[key]


def naylor_integral(f: TestFunction, tau, prec: Precision = Precision(256), as_mpf=False):
    """I(tau) = int_0^1 K_{i tau}(x) f(x) dx / x."""
    tau = float(tau)
    if not 0 <= tau <= TAU_MAX:
        raise ValueError(f"tau must lie in [0, {TAU_MAX}]")
    bits = _check_precision(tau, prec)
    if f.tag == "zero":
        return mpmath.mpf(0) if as_mpf else 0.0
    v = _table(f, bits).value(tau)
    return v if as_mpf else float(v)


def asymptotic_integral(f: TestFunction, tau, form="leading", n=400):
    """Oracle: substitute a large-tau form of K_{i tau} and integrate over x.

    form='leading' uses the corrected leading term, form='displayed' the
    uncorrected variant (off by a factor and a phase).
    """
    k = k_leading_term if form == "leading" else k_asymptotic
    gx, gw = np.polynomial.legendre.leggauss(n)
    total = 0.0
    for lo, hi in f.pieces():
        x = 0.5 * (hi + lo) + 0.5 * (hi - lo) * gx
        kv = np.array([k(tau, xi) for xi in x])
        total += 0.5 * (hi - lo) * np.sum(gw * kv * f(x) / x)
    return float(total)


def _scaled(f, tau, bits, N):
    v = abs(_table(f, bits).value(tau))
    with mpmath.workprec(bits):
        return float(mpmath.exp(mpmath.pi * tau / 2) * mpmath.mpf(tau) ** N * v)


@dataclass
class DecayScanReport:
    taus: List[float]
    values: List[float]                    # I(tau) rescaled by exp(pi tau/2)
    windows: List[tuple]
    window_maxima: Dict[float, List[float]]
    growth_factors: Dict[float, List[float]]
    argmax: Dict[float, List[float]] = field(default_factory=dict)
    function: str = ""

    def as_dict(self):
        return {"function": self.function, "windows": self.windows,
                "window_maxima": {str(k): v for k, v in self.window_maxima.items()},
                "growth_factors": {str(k): v for k, v in self.growth_factors.items()},
                "argmax": {str(k): v for k, v in self.argmax.items()}}

    def to_json(self):
        return json.dumps(self.as_dict())

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["tau", "exp(pi tau/2) I(tau)"])
        for t, v in zip(self.taus, self.values):
            w.writerow([f"{t:.17g}", f"{v:.17g}"])
        return buf.getvalue()


def decay_scan(f: Optional[TestFunction] = None, T_list: Sequence[float] = (10.0, 20.0),
               samples_per_window: int = 200, prec: Precision = Precision(256),
               refine: bool = True) -> DecayScanReport:
    """Window maxima of exp(pi tau/2) tau^N |I(tau)| over dyadic windows [T, 2T].

    Maxima are taken over the sample grid and, with refine, polished by a
    bounded 1-d search around the best sample.
    """
    f = f if f is not None else TestFunction.polynomial_cutoff()
    T_list = [float(T) for T in T_list]
    if any(2 * T > TAU_MAX for T in T_list):
        raise ValueError(f"windows must stay below tau = {TAU_MAX}")
    if f.x_lo < 0.5:
        raise ValueError("f must vanish on [0, 1/2]")
    bits = _check_precision(2 * max(T_list), prec)
    # sample spacing must resolve the phase tau log(2 tau / x): rate ~ log(4 tau)
    min_samples = int(math.ceil(max(T_list) * math.log(8 * max(T_list)) / math.pi * 2))
    if samples_per_window < min_samples:
        raise ValueError(f"sampling too coarse: need >= {min_samples} samples per window")
    tab = _table(f, bits)
    taus, vals = [], []
    windows = [(T, 2 * T) for T in T_list]
    maxima = {N: [] for N in NORMALIZATIONS}
    argmax = {N: [] for N in NORMALIZATIONS}
    for lo, hi in windows:
        grid = np.linspace(lo, hi, samples_per_window)
        with mpmath.workprec(bits):
            sv = [tab.value(t) * mpmath.exp(mpmath.pi * t / 2) for t in grid]
        sv = np.array([float(v) for v in sv])
        taus.extend(grid.tolist())
        vals.extend(sv.tolist())
        for N in NORMALIZATIONS:
            y = np.abs(sv) * grid ** N
            k = int(np.argmax(y))
            best, arg = float(y[k]), float(grid[k])
            if refine:
                a = grid[max(k - 1, 0)]
                b = grid[min(k + 1, len(grid) - 1)]
                r = minimize_scalar(lambda t: -_scaled(f, t, bits, N), bounds=(a, b),
                                    method="bounded", options={"xatol": 1e-6})
                if -r.fun > best:
                    best, arg = float(-r.fun), float(r.x)
            maxima[N].append(best)
            argmax[N].append(arg)
    growth = {N: [m2 / m1 for m1, m2 in zip(v[:-1], v[1:])] for N, v in maxima.items()}
    return DecayScanReport(taus, vals, windows, maxima, growth, argmax,
                           f"{f.tag}(k={f.smoothness}) on [{f.x_lo}, {f.x_hi}]")
