"""Oscillatory integrals P(a, b) = int_0^1 cos(a/x + b x) dx and their tails.

The phase phi(x) = a/x + b x is monotone on each side of the stationary
point x0 = sqrt(a/b) (b > 0).  [delta, 1] is cut at phase levels and
integrated with Gauss-Legendre panels; on (0, delta] the substitution
y = 1/x and a rotation y = Y + iu of the contour turn the oscillating
tail into an exponentially damped integral.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

__all__ = [
    "OscillatoryResult",
    "LemmaScanReport",
    "p_integral",
    "tail_integral",
    "product_integral",
    "stationary_phase_estimate",
    "lemma_scan",
    "tail_profile",
]

EPS = np.finfo(float).eps
_GL = {n: np.polynomial.legendre.leggauss(n) for n in (16, 20, 32)}


@dataclass
class OscillatoryResult:
    value: float
    error_estimate: float
    method: str
    stationary_point: Optional[float] = None
    amplitude: Optional[float] = None

    def __float__(self):
        return float(self.value)


def _delta(a, b):
    if a <= 0:
        return 0.0
    if b == 0:
        return 0.25
    return min(1.0, math.sqrt(a / abs(b))) / 4.0


def _stationary(a, b):
    if a > 0 and b > 0:
        x0 = math.sqrt(a / b)
        if x0 < 1:
            return x0
    return None


# ------------------------------------------------------------ near zero

def _rotated_tail(a, b, Y, tol):
    """int_Y^inf exp(i(a y + b/y)) y^-2 dy for a > 0 (complex value).

    With y = Y + iu the integrand becomes
    i e^{iaY} e^{-au} e^{ib/(Y+iu)} (Y+iu)^-2; the only singularity sits at
    u = iY, so panel widths ~ max(Y, u) keep Gauss-Legendre converging.
    """
    x, w = _GL[20]
    total = 0j
    u = 0.0
    for _ in range(10_000):
        h = min(max(Y, u), 2.0 / a)
        uu = u + 0.5 * h * (x + 1)
        yy = Y + 1j * uu
        f = np.exp(-a * uu + 1j * b / yy) / yy ** 2
        total += 0.5 * h * np.dot(w, f)
        u += h
        # remaining mass: e^{-au} / (a (Y^2 + u^2)) bounds the tail
        if math.exp(-a * u) * min(1.0 / a, 1.0 / max(u, 1e-300)) / (Y * Y + u * u) ** 0.5 \
                < tol * 1e-3:
            break
    return 1j * np.exp(1j * a * Y) * total


def _near(a, b, lo, hi, tol):
    """int_lo^hi cos(a/x + b x) dx with 0 <= lo < hi <= delta, via y = 1/x."""
    Yhi = 1.0 / lo if lo > 0 else math.inf
    Ylo = 1.0 / hi
    val = _rotated_tail(a, b, Ylo, tol)
    if math.isfinite(Yhi):
        val -= _rotated_tail(a, b, Yhi, tol)
    return float(val.real)


# -------------------------------------------------------------- far part

def _root_left(a, b, v):
    # x with phi(x) = v on a decreasing branch (x < x0, or b <= 0)
    if b == 0:
        return a / v
    disc = np.sqrt(np.maximum(v * v - 4 * a * b, 0.0))
    return 2 * a / (v + disc)


def _root_right(a, b, v):
    # increasing branch (x > x0 for b > 0, or a = 0 with b > 0)
    if a == 0:
        return v / b
    disc = np.sqrt(np.maximum(v * v - 4 * a * b, 0.0))
    return (v + disc) / (2 * b)


def _phase(a, b, x):
    if a == 0:
        return b * x
    return a / x + b * x


def _breaks(a, b, lo, hi, step, offset=0.0):
    """Sorted breakpoints in [lo, hi]: phase levels offset + k*step, x0, ends."""
    pts = [np.array([lo, hi])]
    x0 = _stationary(a, b)
    pieces = []
    if x0 is not None and lo < x0 < hi:
        pts.append(np.array([x0]))
        pieces = [(lo, x0, "L"), (x0, hi, "R")]
    else:
        if a == 0:
            kind = "R" if b > 0 else "A0"
        elif b <= 0 or x0 is None or hi <= x0:
            # no stationary point to the left of hi: phi decreasing
            kind = "L"
        else:
            kind = "R"
        pieces = [(lo, hi, kind)]
    if a == 0 and b == 0:
        pieces = []       # constant phase: no levels to place
    for l, r, kind in pieces:
        pl, pr = _phase(a, b, l), _phase(a, b, r)
        vmin, vmax = min(pl, pr), max(pl, pr)
        k0 = math.ceil((vmin - offset) / step)
        k1 = math.floor((vmax - offset) / step)
        if k1 < k0:
            continue
        v = offset + step * np.arange(k0, k1 + 1, dtype=float)
        if kind == "L":
            x = _root_left(a, b, v)
        elif kind == "R":
            x = _root_right(a, b, v)
        else:  # a == 0, b < 0: phi = b x
            x = v / b
        pts.append(x[(x > l) & (x < r)])
    out = np.unique(np.concatenate(pts))
    return out[(out >= lo) & (out <= hi)]


def _panels(a, b, edges, n):
    x, w = _GL[n]
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    xx = 0.5 * (hi + lo)[:, None] + half[:, None] * x[None, :]
    vals = np.cos(_phase(a, b, xx))
    return (half[:, None] * w[None, :] * vals).sum(axis=1)


def _gl_error(theta, width, n):
    # Gauss-Legendre remainder with |f^(2n)| ~ (theta/width)^(2n)
    lg = (4 * math.lgamma(n + 1) - math.log(2 * n + 1) - 3 * math.lgamma(2 * n + 1)
          + 2 * n * math.log(max(theta, 1e-300)))
    return width * math.exp(lg)


def _far(a, b, lo, hi, tol):
    step = 8 * math.pi if tol >= 1e-10 else 4 * math.pi
    edges = _breaks(a, b, lo, hi, step)
    vals = _panels(a, b, edges, 32)
    pmax = abs(a) / lo + abs(b) if lo > 0 else abs(b)
    err = _gl_error(step, 1.0, 32) + 4 * EPS * (1 + pmax) * (hi - lo)
    return float(np.sum(vals)), err, len(edges) - 1


# ------------------------------------------------------------ public API

def _validate(a, b, tol):
    a, b = float(a), float(b)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("non-finite parameters")
    if a < 0:
        raise ValueError("a must be nonnegative")
    if tol <= 0:
        raise ValueError("tol must be positive")
    return a, b


def tail_integral(a, b, eps=0.0, tol=1e-10) -> OscillatoryResult:
    """int_eps^1 cos(b x + a/x) dx for a >= 0, eps in [0, 1]."""
    a, b = _validate(a, b, tol)
    eps = float(eps)
    if not 0.0 <= eps <= 1.0:
        raise ValueError("eps must lie in [0, 1]")
    x0 = _stationary(a, b)
    if eps == 1.0:
        return OscillatoryResult(0.0, 0.0, "adaptive-direct", x0)
    total = 0.0
    err = 0.0
    # |cos(a/x + bx) - cos(bx)| <= min(2, a/x) integrates to <= a(1 + log(1/a))
    shift = a * (1.0 - math.log(a)) if 0.0 < a < 1e-3 else math.inf
    if shift < 1e-3 * tol:
        a, err = 0.0, shift
    delta = _delta(a, b)
    if eps < delta:
        total += _near(a, b, eps, delta, tol)
        err += tol * 1e-3
    lo = max(eps, delta)
    v, e, _ = _far(a, b, lo, 1.0, tol)
    total += v
    err += e
    return OscillatoryResult(total, err, "adaptive-direct", x0)


def p_integral(a, b, tol=1e-10) -> OscillatoryResult:
    """P(a, b) = int_0^1 cos(a/x + b x) dx."""
    return tail_integral(a, b, 0.0, tol)


def product_integral(a, b, tol=1e-10) -> OscillatoryResult:
    """int_0^1 cos(a/x) cos(b x) dx = (P(a, b) + P(a, -b)) / 2."""
    r1 = p_integral(a, b, tol)
    r2 = p_integral(a, -b, tol)
    return OscillatoryResult(0.5 * (r1.value + r2.value), 0.5 * (r1.error_estimate + r2.error_estimate),
                             "adaptive-direct", r1.stationary_point)


def stationary_phase_estimate(a, b) -> OscillatoryResult:
    """Leading stationary-phase value of P(a, b) for b > a > 0.

    sqrt(2 pi / phi''(x0)) cos(2 sqrt(ab) + pi/4) + sin(a + b)/(b - a),
    phi''(x0) = 2 b^(3/2) a^(-1/2).  The saddle amplitude sqrt(2 pi / phi'')
    is reported separately (it carries the b^(-3/4) law).
    """
    a, b = float(a), float(b)
    if not (a > 0 and b > 0):
        raise ValueError("need a > 0 and b > 0")
    if b <= a:
        raise ValueError("b <= a is the transition region; not covered")
    x0 = math.sqrt(a / b)
    phi2 = 2 * b ** 1.5 / math.sqrt(a)
    amp = math.sqrt(2 * math.pi / phi2)
    val = amp * math.cos(2 * math.sqrt(a * b) + math.pi / 4) + math.sin(a + b) / (b - a)
    return OscillatoryResult(val, math.nan, "stationary-phase", x0, amp)


# ------------------------------------------------------ uniform tail bound

def tail_profile(a, b, tol=1e-12, near_points=64):
    """(eps, F(eps)) with F(eps) = int_eps^1 cos(b x + a/x) dx at the
    critical points of F (phase levels pi/2 + k pi) plus eps = 0, delta, x0, 1.

    sup_eps |F| is attained at one of the returned points on [delta, 1];
    on (0, delta) a geometric sample is added.
    """
    a, b = _validate(a, b, tol)
    delta = _delta(a, b)
    lo = delta if a > 0 else 0.0
    edges = _breaks(a, b, lo, 1.0, math.pi, offset=0.5 * math.pi)
    # refine: panels of phase pi are integrated with 16 nodes
    vals = _panels(a, b, edges, 16)
    F = np.concatenate([np.cumsum(vals[::-1])[::-1], [0.0]])
    eps = edges
    if a > 0:
        F0 = F[0]
        ne = delta * np.geomspace(1.0, 1e-6, near_points)[1:]
        ne = ne[ne > 0]
        near = np.array([_near(a, b, e, delta, tol) for e in ne])
        eps = np.concatenate([[0.0], ne[::-1], eps])
        F = np.concatenate([[F0 + _near(a, b, 0.0, delta, tol)], F0 + near[::-1], F])
    return eps, F


@dataclass
class LemmaScanReport:
    a_grid: list
    b_pos: list
    b_neg: list
    empirical_C_pos: float
    empirical_C_neg: float
    worst_pos: tuple
    worst_neg: tuple
    ratios_pos: np.ndarray = field(repr=False, default=None)
    ratios_neg: np.ndarray = field(repr=False, default=None)

    def as_dict(self):
        return {"a_grid": list(map(float, self.a_grid)), "b_pos": list(map(float, self.b_pos)),
                "b_neg": list(map(float, self.b_neg)),
                "empirical_C_pos": self.empirical_C_pos, "empirical_C_neg": self.empirical_C_neg,
                "worst_pos": list(map(float, self.worst_pos)),
                "worst_neg": list(map(float, self.worst_neg))}

    def rows(self):
        for branch, bs, R in (("pos", self.b_pos, self.ratios_pos), ("neg", self.b_neg, self.ratios_neg)):
            for i, a in enumerate(self.a_grid):
                for j, b in enumerate(bs):
                    yield {"branch": branch, "a": float(a), "b": float(b),
                           "ratio": float(R[i, j, 0]), "eps": float(R[i, j, 1])}


def _sup_ratio(a, b, eps_grid, tol):
    if eps_grid is None:
        eps, F = tail_profile(a, b, tol)
        k = int(np.argmax(np.abs(F)))
        return abs(F[k]), eps[k]
    vals = [abs(tail_integral(a, b, e, tol).value) for e in eps_grid]
    k = int(np.argmax(vals))
    return vals[k], eps_grid[k]


def lemma_scan(a_grid: Sequence[float], b_grid: Sequence[float],
               eps_grid: Optional[Sequence[float]] = None, tol=1e-10) -> LemmaScanReport:
    """Empirical constants in |int_eps^1 cos(bx + a/x) dx| < C (a+1) b^{-3/4} (b >= 2 pi)
    and < C (a+1)/|b| (b <= -2 pi).

    eps_grid=None takes the supremum over eps exactly (critical points).
    """
    a_grid = [float(a) for a in a_grid]
    b_pos = sorted(float(b) for b in b_grid if b >= 2 * math.pi)
    b_neg = sorted(float(b) for b in b_grid if b <= -2 * math.pi)
    if any(2 * math.pi > abs(b) for b in b_grid):
        raise ValueError("b values must satisfy |b| >= 2 pi")
    Rp = np.zeros((len(a_grid), len(b_pos), 2))
    Rn = np.zeros((len(a_grid), len(b_neg), 2))
    for i, a in enumerate(a_grid):
        for j, b in enumerate(b_pos):
            s, e = _sup_ratio(a, b, eps_grid, tol)
            Rp[i, j] = s * b ** 0.75 / (a + 1), e
        for j, b in enumerate(b_neg):
            s, e = _sup_ratio(a, b, eps_grid, tol)
            Rn[i, j] = s * abs(b) / (a + 1), e

    def worst(R, bs):
        if R.size == 0:
            return 0.0, (math.nan,) * 4
        i, j = np.unravel_index(np.argmax(R[..., 0]), R.shape[:2])
        return float(R[i, j, 0]), (a_grid[i], bs[j], float(R[i, j, 1]), float(R[i, j, 0]))

    cp, wp = worst(Rp, b_pos)
    cn, wn = worst(Rn, b_neg)
    return LemmaScanReport(a_grid, b_pos, b_neg, cp, cn, wp, wn, Rp, Rn)
