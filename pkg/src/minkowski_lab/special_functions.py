"""Bessel J_0, J_1, J_2, Fresnel integrals and K_{i tau}(x).

J_nu is evaluated in three regimes: a short power series near the origin,
a periodic trapezoid rule for the Bessel integral in the middle range and
the Hankel expansion for large arguments.  K_{i tau} uses the cosh integral
representation in mpmath at a caller-controlled working precision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

__all__ = [
    "Precision",
    "PrecisionError",
    "bessel_j",
    "fresnel",
    "bessel_k_imag",
    "k_asymptotic",
    "k_leading_term",
    "required_bits",
]

SERIES_MAX = 4.0
HANKEL_MIN = 25.0
_TRAP_N = 64


class PrecisionError(ValueError):
    """Requested working precision cannot resolve the quantity."""


@dataclass(frozen=True)
class Precision:
    significand_bits: int = 53

    def __post_init__(self):
        if int(self.significand_bits) < 53:
            raise ValueError("significand_bits must be >= 53")

    @property
    def dps(self):
        return int(self.significand_bits * math.log10(2)) + 1


def _check_order(nu):
    if nu not in (0, 1, 2):
        raise ValueError(f"order {nu!r} not supported, expected 0, 1 or 2")


def _series(nu, u):
    # sum_k (-1)^k (u/2)^{2k+nu} / (k! (k+nu)!)
    h = 0.25 * u * u
    term = (0.5 * u) ** nu / math.factorial(nu)
    out = term.copy()
    for k in range(1, 30):
        term = -term * h / (k * (k + nu))
        out += term
    return out


def _trapezoid(nu, u):
    # J_nu(u) = (1/pi) int_0^pi cos(nu th - u sin th) dth; the integrand
    # is smooth and 2 pi periodic so the trapezoid rule converges spectrally
    th = np.pi * (np.arange(_TRAP_N) + 0.5) / _TRAP_N
    vals = np.cos(nu * th[None, :] - u[:, None] * np.sin(th)[None, :])
    return vals.mean(axis=1)


def _hankel(nu, u):
    mu = 4.0 * nu * nu
    z = 8.0 * u
    p = np.ones_like(u)
    q = np.zeros_like(u)
    term = np.ones_like(u)
    for k in range(1, 40):
        term = term * (mu - (2 * k - 1) ** 2) / (k * z)
        if k % 2:
            q += term if (k // 2) % 2 == 0 else -term
        else:
            p += -term if (k // 2) % 2 else term
        if np.all(np.abs(term) < 1e-17):
            break
    # cos(u - nu pi/2 - pi/4) without forming the shifted argument, which
    # would cost ~u*eps of absolute accuracy
    c, s = np.cos(u), np.sin(u)
    cm = (c + s) / math.sqrt(2.0)   # cos(u - pi/4)
    sm = (s - c) / math.sqrt(2.0)   # sin(u - pi/4)
    if nu == 1:
        cm, sm = sm, -cm
    elif nu == 2:
        cm, sm = -cm, -sm
    return np.sqrt(2.0 / (np.pi * u)) * (p * cm - q * sm)


def bessel_j(nu, u):
    """J_nu(u) for nu in {0, 1, 2} and u >= 0; scalar or array input."""
    _check_order(nu)
    arr = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("non-finite argument")
    if np.any(arr < 0):
        raise ValueError("argument must be nonnegative")
    flat = np.atleast_1d(arr).ravel()
    out = np.empty_like(flat)
    small = flat <= SERIES_MAX
    large = flat > HANKEL_MIN
    mid = ~small & ~large
    if small.any():
        out[small] = _series(nu, flat[small])
    if mid.any():
        out[mid] = _trapezoid(nu, flat[mid])
    if large.any():
        out[large] = _hankel(nu, flat[large])
    out = out.reshape(arr.shape)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------- Fresnel

_GL_X, _GL_W = np.polynomial.legendre.leggauss(24)
FRESNEL_SPLIT = 6.0


def _fresnel_direct(u):
    # composite Gauss-Legendre on [0, u]; at most ~9 oscillations for |u| <= 6
    panels = 24
    edges = np.linspace(0.0, u, panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    t = mid[:, None] + half[:, None] * _GL_X[None, :]
    w = half[:, None] * _GL_W[None, :]
    arg = 0.5 * np.pi * t * t
    return float((w * np.cos(arg)).sum()), float((w * np.sin(arg)).sum())


def _fresnel_asymptotic(u):
    # auxiliary functions f, g of the asymptotic expansion
    z = math.pi * u * u
    f = 0.0
    g = 0.0
    tf = 1.0
    tg = 1.0
    for k in range(0, 30):
        if k:
            tf *= -(4 * k - 1) * (4 * k - 3) / (z * z)
            tg *= -(4 * k + 1) * (4 * k - 1) / (z * z)
        f += tf
        g += tg
        if abs(tf) < 1e-18 and abs(tg) < 1e-18:
            break
    f /= math.pi * u
    g /= math.pi * z * u
    # reduce u^2 mod 4 exactly; sin/cos(pi u^2 / 2) has period 4 in u^2
    r = float(Fraction(u) ** 2 % 4)
    c, s = math.cos(0.5 * math.pi * r), math.sin(0.5 * math.pi * r)
    return 0.5 + f * s - g * c, 0.5 - f * c - g * s


def fresnel(u):
    """Return (C(u), S(u)) with C = int_0^u cos(pi t^2/2) dt, S likewise."""
    u = float(u)
    if not math.isfinite(u):
        raise ValueError("non-finite argument")
    if u == 0.0:
        return 0.0, 0.0
    sgn = 1.0 if u > 0 else -1.0
    a = abs(u)
    c, s = _fresnel_direct(a) if a <= FRESNEL_SPLIT else _fresnel_asymptotic(a)
    return sgn * c, sgn * s


# ------------------------------------------------------------- K_{i tau}

def required_bits(tau):
    """Working-precision floor for K_{i tau}: 53 + ceil(pi tau / (2 ln 2))."""
    return 53 + int(math.ceil(math.pi * float(tau) / (2.0 * math.log(2.0))))


def _check_precision(tau, prec):
    bits = prec.significand_bits if isinstance(prec, Precision) else int(prec)
    need = required_bits(tau)
    if bits < need:
        raise PrecisionError(f"tau={tau} needs at least {need} bits, got {bits}")
    return bits


class CoshQuadrature:
    """Composite Gauss-Legendre nodes for int_0^T h(t) dt at fixed precision.

    T is chosen so that exp(-x_min cosh T) is below 2^-(bits+20).
    """

    def __init__(self, bits, x_min, tau_max=40.0, degree=40):
        self.bits = int(bits)
        with mpmath.workprec(self.bits):
            big = (self.bits + 20) * mpmath.log(2) / mpmath.mpf(x_min)
            T = mpmath.acosh(big)
            # panel width keeps tau*h modest relative to the degree
            width = min(mpmath.mpf(1) / 2, mpmath.mpf(degree) / (2 * max(tau_max, 1)))
            n = int(mpmath.ceil(T / width))
            xs, ws = _mp_legendre(degree, self.bits)
            nodes, weights = [], []
            h = T / n
            for k in range(n):
                a = k * h
                for xi, wi in zip(xs, ws):
                    nodes.append(a + h * (xi + 1) / 2)
                    weights.append(wi * h / 2)
        self.nodes = nodes
        self.weights = weights
        self.T = T


_LEG_CACHE = {}


def _mp_legendre(n, bits):
    key = (n, bits)
    if key not in _LEG_CACHE:
        with mpmath.workprec(bits + 20):
            xs, ws = [], []
            for k in range(1, n + 1):
                x = mpmath.cos(mpmath.pi * (k - mpmath.mpf(1) / 4) / (n + mpmath.mpf(1) / 2))
                for _ in range(100):
                    p0, p1 = mpmath.mpf(1), x
                    for j in range(2, n + 1):
                        p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
                    dp = n * (x * p1 - p0) / (x * x - 1)
                    dx = p1 / dp
                    x -= dx
                    if abs(dx) < mpmath.mpf(2) ** (-bits - 10):
                        break
                p0, p1 = mpmath.mpf(1), x
                for j in range(2, n + 1):
                    p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
                dp = n * (x * p1 - p0) / (x * x - 1)
                xs.append(x)
                ws.append(2 / ((1 - x * x) * dp * dp))
        _LEG_CACHE[key] = (xs, ws)
    return _LEG_CACHE[key]


def bessel_k_imag(tau, x, prec=Precision(256), as_mpf=False):
    """K_{i tau}(x) = int_0^inf exp(-x cosh t) cos(tau t) dt.

    Raises PrecisionError when prec is below required_bits(tau).  The value is
    returned as float unless as_mpf is set (floats underflow the relative
    scale only far beyond tau=40, but the mpf keeps all computed digits).
    """
    tau = float(tau)
    x = float(x)
    if not (math.isfinite(tau) and math.isfinite(x)):
        raise ValueError("non-finite input")
    if x <= 0:
        raise ValueError("x must be positive")
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    bits = _check_precision(tau, prec)
    quad = CoshQuadrature(bits, x, tau_max=max(tau, 1.0))
    with mpmath.workprec(bits):
        xm = mpmath.mpf(x)
        tm = mpmath.mpf(tau)
        val = mpmath.fsum(w * mpmath.exp(-xm * mpmath.cosh(t)) * mpmath.cos(tm * t)
                          for t, w in zip(quad.nodes, quad.weights))
    return val if as_mpf else float(val)


def k_asymptotic(tau, x):
    """Uncorrected large-tau form
    -(2 pi)^(-1/2) exp(-pi tau/2) tau^(-1/2) sin(tau log(e x / (2 tau))).

    Kept for comparison only: it misses a factor 2 pi and a phase pi/4, see
    k_leading_term for the correct leading term.
    """
    tau = float(tau)
    if tau < 5:
        raise ValueError("asymptotic form requires tau >= 5")
    if x <= 0:
        raise ValueError("x must be positive")
    return (-(2 * math.pi) ** -0.5 * math.exp(-0.5 * math.pi * tau) * tau ** -0.5
            * math.sin(tau * math.log(math.e * x / (2 * tau))))


def k_leading_term(tau, x):
    """Correct leading term -sqrt(2 pi / tau) exp(-pi tau/2) sin(tau log(e x/2tau) - pi/4).

    Differs from k_asymptotic by the amplitude factor 2 pi and a pi/4 phase.
    """
    tau = float(tau)
    if tau <= 0 or x <= 0:
        raise ValueError("tau and x must be positive")
    return (-math.sqrt(2 * math.pi / tau) * math.exp(-0.5 * math.pi * tau)
            * math.sin(tau * math.log(math.e * x / (2 * tau)) - 0.25 * math.pi))
