"""Integration against d?(x) and the transforms built on it.

The measure is self-similar on Stern-Brocot atoms: on the atom with
endpoints p0/q0 < p1/q1 at depth d,

    int_A g d? = 2^-d int_0^1 g(L(z)) d?(z),   L(z) = (p0 + (p1-p0) z) / (q0 + (q1-q0) z).

A Gauss rule for d? itself therefore gives a rule on every atom.  The rule
comes from modified Chebyshev moments obtained as the fixed point of the
Gauss-map relation ?(1/(k+y)) = 2^(1-k) - 2^-k ?(y).

Schemes
-------
farey-adaptive      Gauss rule per atom, refined where parent and children differ.
inverse-pushforward midpoint rule in u = ?(x) (mediant nodes) with the
                    first-order bound mass * min(2 sup|g|, sup|g'| width).
parts-riemann       cosine integrands only: d_n = 1 + 2 pi n int ?(x) sin(2 pi n x) dx,
                    with ?(x) = ?(l) + 2^-d ?(L^-1 x) on each atom.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from numpy.polynomial import chebyshev as C
from scipy.linalg import eigh_tridiagonal

from .minkowski_core import question_mark_rational

__all__ = [
    "BudgetError",
    "SchemeDisagreement",
    "QuadratureResult",
    "CoefficientTable",
    "chebyshev_moments",
    "gauss_rule",
    "integrate_dq",
    "parts_riemann",
    "fourier_coefficient",
    "laplace_transform",
    "mhat",
    "DiscreteMeasure",
    "dq_measure",
    "parts_measures",
    "exp_sums",
    "TransformGrid",
    "coefficient_table",
]

EPS = np.finfo(float).eps
SCHEMES = ("farey-adaptive", "inverse-pushforward", "parts-riemann")

NDEG = 48        # Chebyshev degree for the Gauss-map expansions
NMOM = 48
KMAX = 64        # terms of the Gauss-map sum kept (2^-64 tail)
NODES = 10       # Gauss nodes per atom
MAX_DEPTH = 88   # int64 numerators stay exact below Fibonacci(92)


class BudgetError(RuntimeError):
    """Node or depth budget exhausted; carries the best available estimate."""

    def __init__(self, msg, best=None, error_estimate=None):
        super().__init__(msg)
        self.best = best
        self.error_estimate = error_estimate


class SchemeDisagreement(RuntimeError):
    """Two independent schemes disagree beyond their combined error."""


@dataclass
class QuadratureResult:
    value: complex
    error_estimate: float
    scheme: str
    nodes_used: int


# ----------------------------------------------------------------- moments

def _shifted_T(j, y):
    return np.cos(j * np.arccos(np.clip(2.0 * y - 1.0, -1.0, 1.0)))


@lru_cache(maxsize=None)
def chebyshev_moments():
    """(nu, lam): nu_j = int T~_j d?, lam_j = int ?(y) T~_j(y) dy.

    T~_j(y) = T_j(2y - 1).  Both come from linear fixed-point systems built
    by expanding T~_j(1/(k+y)) (and the same times (k+y)^-2) in T~_i(y).
    """
    t = np.cos(np.pi * (np.arange(NDEG + 1) + 0.5) / (NDEG + 1))
    y = (t + 1) / 2
    V = np.linalg.pinv(C.chebvander(t, NDEG))
    # int_0^1 T~_i(y) dy
    lin = np.array([1.0 / (1 - i * i) if i % 2 == 0 else 0.0 for i in range(NDEG + 1)])
    A = np.zeros((NMOM, NMOM))
    B = np.zeros((NMOM, NMOM))
    b = np.zeros(NMOM)
    for k in range(1, KMAX + 1):
        x = 1.0 / (k + y)
        jac = 1.0 / (k + y) ** 2
        for j in range(NMOM):
            Tj = _shifted_T(j, x)
            c = V @ Tj
            A[j] += 2.0 ** -k * c[:NMOM]
            c2 = V @ (Tj * jac)
            b[j] += 2.0 ** (1 - k) * (c2 @ lin)
            B[j] += 2.0 ** -k * c2[:NMOM]
    # nu = A nu with nu_0 = 1
    M = np.eye(NMOM) - A
    M[0] = 0.0
    M[0, 0] = 1.0
    rhs = np.zeros(NMOM)
    rhs[0] = 1.0
    nu = np.linalg.solve(M, rhs)
    # int ?(y) h(y) dy over [0,1] = sum_k int_{1/(k+1)}^{1/k}; substituting
    # x = 1/(k+y) gives lam = b - B lam
    lam = np.linalg.solve(np.eye(NMOM) + B, b)
    return nu, lam


def _modified_chebyshev(m, a, b, n):
    # Gautschi's modified Chebyshev algorithm
    alpha = np.zeros(n)
    beta = np.zeros(n)
    L = 2 * n
    sig_prev = np.zeros(L + 1)
    sig = np.array(m[:L], float)
    alpha[0] = a[0] + m[1] / m[0]
    beta[0] = m[0]
    for k in range(1, n):
        new = np.zeros(L)
        for l in range(k, L - k):
            new[l] = (sig[l + 1] - (alpha[k - 1] - a[l]) * sig[l]
                      - beta[k - 1] * sig_prev[l] + b[l] * sig[l - 1])
        alpha[k] = a[k] + new[k + 1] / new[k] - sig[k] / sig[k - 1]
        beta[k] = new[k] / sig[k - 1]
        sig_prev, sig = sig, new
    return alpha, beta


@lru_cache(maxsize=None)
def gauss_rule(n: int = NODES, weight: str = "dq"):
    """Gauss nodes/weights on [0,1] for d?(x) ('dq') or ?(x) dx ('qdx')."""
    if 2 * n > NMOM:
        raise ValueError(f"at most {NMOM // 2} nodes")
    nu, lam = chebyshev_moments()
    mom = nu if weight == "dq" else lam
    # monic shifted Chebyshev: p_j = T~_j / 2^(2j-1)
    m = np.array([mom[j] / (2.0 ** (2 * j - 1) if j else 1.0) for j in range(2 * n)])
    a = np.full(2 * n, 0.5)
    b = np.full(2 * n, 1 / 16.0)
    b[0] = 0.0
    b[1] = 1 / 8.0
    al, be = _modified_chebyshev(m, a, b, n)
    x, v = eigh_tridiagonal(al, np.sqrt(be[1:]))
    w = be[0] * v[0] ** 2
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


# ------------------------------------------------------------------- atoms

def _root():
    one = np.array([1], dtype=np.int64)
    return (np.array([0], dtype=np.int64), one, one.copy(), one.copy(), np.array([0], dtype=np.int64))


def _split(p0, q0, p1, q1, d):
    pm, qm = p0 + p1, q0 + q1
    return (np.concatenate([p0, pm]), np.concatenate([q0, qm]),
            np.concatenate([pm, p1]), np.concatenate([qm, q1]),
            np.concatenate([d + 1, d + 1]))


def _take(atoms, mask):
    return tuple(a[mask] for a in atoms)


def _pullback(p0, q0, p1, q1, z):
    den = q0[:, None] + (q1 - q0)[:, None] * z[None, :]
    x = (p0[:, None] + (p1 - p0)[:, None] * z[None, :]) / den
    return x, 1.0 / den ** 2


def _rule(atoms, g):
    z, w = gauss_rule(NODES, "dq")
    p0, q0, p1, q1, d = atoms
    x, _ = _pullback(p0, q0, p1, q1, z)
    return np.ldexp(1.0, -d.astype(int)) * (g(x) @ w)


def _zero_tail_bound(g, depth):
    # atom [0, 1/(d+1)] is the union of [1/(k+1), 1/k], k > d, of mass 2^-k
    k = np.arange(depth + 1, depth + 400, dtype=float)
    gk = np.maximum(np.abs(g(1.0 / (k + 1))), np.abs(g(1.0 / k)))
    return 2.0 * float(np.sum(np.ldexp(gk, -k.astype(int))))


def _farey_adaptive(g, tol, singular_at_zero=False, noise=0.0, max_nodes=50_000_000):
    atoms = _root()
    est = _rule(atoms, g)
    total = 0.0
    err = 0.0
    nodes = NODES
    floor = tol * 1e-3
    while len(atoms[0]):
        if atoms[4].max() > MAX_DEPTH:
            raise BudgetError("farey-adaptive: depth budget exhausted",
                              total + est.sum(), err + np.abs(est).sum())
        kids = _split(*atoms)
        cv = _rule(kids, g)
        nodes += NODES * len(cv)
        n = len(atoms[0])
        cs = cv[:n] + cv[n:]
        mass = np.ldexp(1.0, -atoms[4].astype(int))
        diff = np.abs(cs - est)
        ok = (diff <= max(tol, noise) * mass) | (2 * mass <= floor)
        if singular_at_zero:
            at0 = atoms[0] == 0
            if at0.any():
                i = int(np.flatnonzero(at0)[0])
                bound = _zero_tail_bound(g, int(atoms[4][i]))
                if bound <= floor:
                    ok[i] = True
                    cs[i] = 0.0
                    diff[i] = bound
        total += cs[ok].sum()
        err += diff[ok].sum()
        keep = np.concatenate([~ok, ~ok])
        atoms = _take(kids, keep)
        est = cv[keep]
        if nodes > max_nodes:
            raise BudgetError("farey-adaptive: node budget exhausted",
                              total + est.sum(), err + np.abs(est).sum())
    return total, err, nodes


def _inverse_pushforward(g, tol, dg=None, max_nodes=5_000_000):
    # the u-midpoint of a dyadic interval maps to the mediant of its atom;
    # bulk marking: refine the largest bounds carrying half the total

    def evaluate(atoms):
        p0, q0, p1, q1, d = atoms
        mass = np.ldexp(1.0, -d.astype(int))
        xl, xr = p0 / q0, p1 / q1
        xm = (p0 + p1) / (q0 + q1)
        gl, gm, gr = g(xl), g(xm), g(xr)
        sup_g = np.maximum(np.maximum(np.abs(gl), np.abs(gm)), np.abs(gr))
        if dg is not None:
            sup_d = np.maximum(np.maximum(np.abs(dg(xl)), np.abs(dg(xm))), np.abs(dg(xr)))
        else:
            # inflated divided differences; heuristic without a derivative
            sup_d = 2.0 * np.maximum(np.abs(gm - gl) / np.maximum(xm - xl, 1e-300),
                                     np.abs(gr - gm) / np.maximum(xr - xm, 1e-300))
        bound = mass * np.minimum(2 * sup_g, sup_d * (xr - xl))
        return mass * gm, bound

    atoms = _root()
    val, bound = evaluate(atoms)
    nodes = 3
    while True:
        if bound.sum() <= tol:
            break
        order = np.argsort(bound)[::-1]
        csum = np.cumsum(bound[order])
        k = int(np.searchsorted(csum, 0.5 * csum[-1])) + 1
        hot = np.zeros(len(bound), bool)
        hot[order[:k]] = True
        if atoms[4][hot].max() > MAX_DEPTH or nodes > max_nodes:
            raise BudgetError("inverse-pushforward: budget exhausted",
                              np.sum(val).item(), float(bound.sum()))
        kids = _split(*_take(atoms, hot))
        kv, kb = evaluate(kids)
        nodes += 3 * len(kv)
        atoms = tuple(np.concatenate([a[~hot], k]) for a, k in zip(atoms, kids))
        val = np.concatenate([val[~hot], kv])
        bound = np.concatenate([bound[~hot], kb])
    return np.sum(val), bound.sum(), nodes


@lru_cache(maxsize=None)
def _parts_fit():
    z = (np.cos(np.pi * (np.arange(25) + 0.5) / 25) + 1) / 2
    V = np.linalg.pinv(C.chebvander(2 * z - 1, 24))
    _, lam = chebyshev_moments()
    lin = np.array([1.0 / (1 - i * i) if i % 2 == 0 else 0.0 for i in range(25)])
    return z, V, lam[:25], lin


def parts_riemann(n: int, tol: float = 1e-12, max_nodes=20_000_000):
    """d_n = 1 + 2 pi n int_0^1 ?(x) sin(2 pi n x) dx (integration by parts).

    On an atom A = [l, r]: int_A ?(x) phi(x) dx = ?(l) int_A phi + 2^-d int_0^1 ?(z) phi(L z) L'(z) dz,
    the first term exactly (antiderivative), the second from the Chebyshev
    coefficients of phi(L z) L'(z) against the moments lam.
    """
    n = int(n)
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return QuadratureResult(1.0, 0.0, "parts-riemann", 0)
    om = 2 * np.pi * n
    z, V, lam, _ = _parts_fit()
    atoms = _root()
    total = 0.0
    err = 0.0
    nodes = 0
    while len(atoms[0]):
        p0, q0, p1, q1, d = atoms
        if d.max() > MAX_DEPTH:
            raise BudgetError("parts-riemann: depth budget exhausted", None, None)
        x, jac = _pullback(p0, q0, p1, q1, z)
        c = (np.sin(om * x) * jac) @ V.T
        nodes += x.size
        mass = np.ldexp(1.0, -d.astype(int))
        tail = np.abs(c[:, -4:]).sum(1)
        ok = (tail <= max(tol, 16 * EPS * (1 + om))) | (om * mass <= tol * 1e-3)
        if ok.any():
            ql = np.array([question_mark_rational(a, b) for a, b in zip(p0[ok], q0[ok])])
            xl, xr = p0[ok] / q0[ok], p1[ok] / q1[ok]
            exact = (np.cos(om * xl) - np.cos(om * xr)) / om
            total += np.sum(ql * exact) + np.sum(mass[ok] * (c[ok] @ lam))
            err += np.sum(mass[ok] * tail[ok])
        if nodes > max_nodes:
            raise BudgetError("parts-riemann: node budget exhausted", 1 + om * total, om * err)
        atoms = _split(*_take(atoms, ~ok))
    return QuadratureResult(1.0 + om * total, om * err + 16 * EPS * om, "parts-riemann", nodes)


def integrate_dq(g: Callable, tol: float = 1e-10, scheme: str = "farey-adaptive",
                 singular_at_zero: bool = False, dg: Optional[Callable] = None,
                 noise: float = 0.0, max_nodes: Optional[int] = None) -> QuadratureResult:
    """int_0^1 g(x) d?(x).

    g must accept float arrays.  Pass singular_at_zero=True for integrands
    unbounded at 0 (such as 1/x); the atom touching 0 is then dropped once
    the mass-weighted tail sum_k 2^-k sup|g| on [1/(k+1), 1/k] is negligible.
    `noise` is a relative roundoff floor for the parent/child test (set it
    to ~16 eps |omega| for e^{i omega x}).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if scheme == "farey-adaptive":
        kw = {} if max_nodes is None else {"max_nodes": max_nodes}
        v, e, n = _farey_adaptive(g, tol, singular_at_zero, noise, **kw)
    elif scheme == "inverse-pushforward":
        kw = {} if max_nodes is None else {"max_nodes": max_nodes}
        v, e, n = _inverse_pushforward(g, tol, dg, **kw)
    elif scheme == "parts-riemann":
        raise ValueError("parts-riemann only handles cosines; use fourier_coefficient")
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    if np.iscomplexobj(v):
        v = complex(v)
    else:
        v = float(v)
    return QuadratureResult(v, float(e), scheme, int(n))


def fourier_coefficient(n: int, tol: float = 1e-10, return_transform: bool = False):
    """d_n = int cos(2 pi n x) d?(x), cross-checked by two schemes.

    Returns (d_n, err).  The farey-adaptive value comes from the full
    transform m(2 pi i n); its imaginary part is checked against 1e-10.
    """
    n = int(n)
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return (1.0, 0.0, 1.0 + 0j) if return_transform else (1.0, 0.0)
    om = 2 * np.pi * n
    a = integrate_dq(lambda x: np.exp(1j * om * x), tol, noise=16 * EPS * (1 + om))
    c = parts_riemann(n, tol)
    if abs(a.value.imag) >= 1e-10:
        raise SchemeDisagreement(f"Im m(2 pi i {n}) = {a.value.imag:.3e}")
    gap = abs(a.value.real - c.value)
    allowed = max(a.error_estimate + c.error_estimate, 10 * tol)
    if gap > allowed:
        raise SchemeDisagreement(f"n={n}: farey-adaptive {a.value.real!r} vs "
                                 f"parts-riemann {c.value!r} (gap {gap:.3e} > {allowed:.3e})")
    err = max(gap, a.error_estimate, c.error_estimate)
    if return_transform:
        return a.value.real, err, a.value
    return a.value.real, err


def laplace_transform(t, tol: float = 1e-12) -> complex:
    """m(t) = int_0^1 e^{x t} d?(x) for |Re t| <= 100."""
    t = complex(t)
    if abs(t.real) > 100:
        raise OverflowError("|Re t| must not exceed 100")
    if t == 0:
        return 1.0 + 0j
    noise = 16 * EPS * (1 + abs(t))
    if t.real > 0:
        # keep the integrand bounded by 1 so the mass floor stays meaningful
        res = integrate_dq(lambda x: np.exp(t * (x - 1.0)), tol, noise=noise)
        return complex(res.value) * complex(np.exp(t))
    return complex(integrate_dq(lambda x: np.exp(t * x), tol, noise=noise).value)


def _mhat_kernel(T):
    # (e^{ixT} - 1)/(ix) = T e^{ixT/2} sinc(xT/(2 pi)), bounded at x = 0
    return lambda x: T * np.exp(0.5j * T * x) * np.sinc(x * T / (2 * np.pi))


def mhat(T: float, form: int = 2, tol: float = 1e-11) -> complex:
    """m^(T) = int_0^T m(it) dt = int_0^1 (e^{ixT} - 1)/(ix) d?(x).

    form=2 integrates the kernel against d? adaptively; form=1 integrates
    m(it) over [0, T] on a uniform grid of the transform (see TransformGrid).
    """
    T = float(T)
    if T < 0:
        raise ValueError("T must be nonnegative")
    if T == 0:
        return 0j
    if form == 2:
        return complex(integrate_dq(_mhat_kernel(T), tol, noise=16 * EPS * (1 + T)).value)
    if form == 1:
        grid = TransformGrid(T, tol=min(tol, 1e-12))
        return grid.integrate_m(T)
    raise ValueError("form must be 1 or 2")


# ---------------------------------------------------- discrete measures

@dataclass
class DiscreteMeasure:
    """Weighted nodes x_i in [0,1]; sum w_i h(x_i) approximates an integral."""
    x: np.ndarray
    w: np.ndarray
    omega: float = 0.0
    tol: float = 0.0

    def __len__(self):
        return len(self.x)

    def integrate(self, h):
        return np.sum(self.w * h(self.x))


def dq_measure(omega: float, tol: float = 1e-12) -> DiscreteMeasure:
    """Child-level Gauss nodes of an atom partition that resolves e^{i w x}, |w| <= omega."""
    omega = float(abs(omega))
    z, w = gauss_rule(NODES, "dq")
    tol_eff = max(tol, 16 * EPS * (1 + omega))
    g = lambda x: np.exp(1j * omega * x)
    atoms = _root()
    est = _rule(atoms, g)
    xs, ws = [], []
    while len(atoms[0]):
        if atoms[4].max() > MAX_DEPTH:
            raise BudgetError("dq_measure: depth budget exhausted")
        kids = _split(*atoms)
        cv = _rule(kids, g)
        n = len(atoms[0])
        cs = cv[:n] + cv[n:]
        mass = np.ldexp(1.0, -atoms[4].astype(int))
        ok = (np.abs(cs - est) <= tol_eff * mass) | (2 * mass <= tol * 1e-3)
        ok2 = np.concatenate([ok, ok])
        acc = _take(kids, ok2)
        x, _ = _pullback(*acc[:4], z)
        xs.append(x.ravel())
        ws.append((np.ldexp(1.0, -acc[4].astype(int))[:, None] * w[None, :]).ravel())
        atoms = _take(kids, ~ok2)
        est = cv[~ok2]
    return DiscreteMeasure(np.concatenate(xs), np.concatenate(ws), omega, tol)


def parts_measures(omega: float, tol: float = 1e-12):
    """Discrete measures R, Q on an atom partition resolving e^{i w x}, |w| <= omega.

    With ?(x) = ?(l_A) + 2^-d ?(L_A^-1 x) on each atom A and H' = h,

        int_0^1 ?(x) h(x) dx = sum_A ?(l_A) (H(r_A) - H(l_A)) + sum_A 2^-d int_0^1 ?(z) h(L_A z) L_A'(z) dz.

    Summation by parts turns the first sum into H(1) - sum_A mass_A H(r_A);
    R holds the point masses mass_A at r_A, Q the Gauss nodes for the
    second sum.  For h = e^{2 pi i n x}: d_n = Re R_n + 2 pi n Im Q_n.
    """
    omega = float(abs(omega))
    z, w = gauss_rule(NODES, "qdx")
    # the caller multiplies Q by up to omega
    tol_eff = max(tol / max(omega, 1.0), 16 * EPS * (1 + omega))

    def rule(atoms):
        x, jac = _pullback(*atoms[:4], z)
        return np.ldexp(1.0, -atoms[4].astype(int)) * ((np.exp(1j * omega * x) * jac) @ w)

    def dH(pa, qa, pb, qb):
        # (e^{i w b} - e^{i w a}) / (i w) for neighbours a < b, b - a = 1/(qa qb)
        width = 1.0 / (qa * qb)
        mid = 0.5 * (pa / qa + pb / qb)
        return np.exp(1j * omega * mid) * width * np.sinc(omega * width / (2 * np.pi))

    atoms = _root()
    est = rule(atoms)
    accepted = []
    while len(atoms[0]):
        if atoms[4].max() > MAX_DEPTH:
            raise BudgetError("parts_measures: depth budget exhausted")
        kids = _split(*atoms)
        cv = rule(kids)
        n = len(atoms[0])
        p0, q0, p1, q1, d = atoms
        mass = np.ldexp(1.0, -d.astype(int))
        # moving to the children raises ?(l) by mass/2 on the right child
        cs = cv[:n] + cv[n:] + 0.5 * mass * dH(p0 + p1, q0 + q1, p1, q1)
        scale = mass / (q0 * q1)   # size of the Q-term: mass * width
        ok = (np.abs(cs - est) <= tol_eff * scale) | ((1 + omega) * scale <= tol * 1e-3)
        ok2 = np.concatenate([ok, ok])
        accepted.append(_take(kids, ok2))
        atoms = _take(kids, ~ok2)
        est = cv[~ok2]
    p0, q0, p1, q1, d = (np.concatenate([a[i] for a in accepted]) for i in range(5))
    mass = np.ldexp(1.0, -d.astype(int))
    xq, jac = _pullback(p0, q0, p1, q1, z)
    Q = DiscreteMeasure(xq.ravel(), (mass[:, None] * jac * w[None, :]).ravel(), omega, tol)
    R = DiscreteMeasure(p1 / q1, mass, omega, tol)
    return R, Q


# ------------------------------------------------------ spreading + FFT

SPREAD_WIDTH = 16


@lru_cache(maxsize=None)
def _bary():
    S = SPREAD_WIDTH
    return np.array([(-1) ** (S - 1 - k) / (math.factorial(k) * math.factorial(S - 1 - k))
                     for k in range(S)])


def _spread_chunk(x, w, M):
    S = SPREAD_WIDTH
    u = x * M
    i0 = np.floor(u).astype(np.int64) - (S // 2 - 1)
    r = u - i0
    diffs = r[:, None] - np.arange(S)[None, :]
    pre = np.ones((len(x), S))
    suf = np.ones((len(x), S))
    pre[:, 1:] = np.cumprod(diffs[:, :-1], axis=1)
    suf[:, :-1] = np.cumprod(diffs[:, :0:-1], axis=1)[:, ::-1]
    lag = pre * suf * _bary()[None, :]
    idx = (i0[:, None] + np.arange(S)[None, :]).ravel()
    lo = idx.min()
    return lo, np.bincount(idx - lo, weights=(lag * w[:, None]).ravel())


def spread(x, w, M, chunk=200_000):
    """Exchange point masses w at x for masses G_m at grid points m/M.

    Degree-15 Lagrange interpolation weights: sum_m G_m f(m/M) reproduces
    sum_i w_i f(x_i) for f band-limited well below the grid Nyquist rate.
    Returns (offset, G) with G[k] living at (offset + k)/M.
    """
    S = SPREAD_WIDTH
    lo = int(np.floor(x.min() * M)) - S
    hi = int(np.floor(x.max() * M)) + S
    G = np.zeros(hi - lo + 1, dtype=np.result_type(w, float))
    for i in range(0, len(x), chunk):
        o, g = _spread_chunk(x[i:i + chunk], w[i:i + chunk], M)
        G[o - lo:o - lo + len(g)] += g
    return lo, G


def _grid_size(nmax):
    return 1 << max(10, int(math.ceil(math.log2(32 * max(nmax, 1)))))


def exp_sums(x, w, nmax: int, M: Optional[int] = None):
    """sum_i w_i exp(2 pi i n x_i) for n = 0..nmax (spread + one FFT)."""
    M = M or _grid_size(nmax)
    off, G = spread(np.asarray(x, float), np.asarray(w, float), M)
    full = np.zeros(M)
    np.add.at(full, (off + np.arange(len(G))) % M, G)
    return (np.fft.ifft(full) * M)[:nmax + 1]


class TransformGrid:
    """m(it) and m^(t) for 0 <= t <= t_max from a spread discrete measure.

    The d?-measure is replaced by masses G_m at x_m = m/M; then
    m(it) = sum_m G_m e^{i t x_m}, and values on t = k H + tau, H = 2 pi M / L,
    come from one length-L FFT per offset tau.
    """

    def __init__(self, t_max: float, tol: float = 1e-12, oversample: float = 1.05):
        self.t_max = float(t_max)
        om = max(self.t_max * oversample, 64.0)
        meas = dq_measure(om, tol)
        self.M = max(1 << int(math.ceil(math.log2(4 * om))), 4096)
        # nodes below 32/M carry ?-mass < 2^-(M/32) and would push the
        # stencil to x <= 0, where the m^ strengths G/(ix) blow up
        keep = meas.x >= 32.0 / self.M
        self.dropped_mass = float(meas.w[~keep].sum())
        self.nodes = int(keep.sum())
        self.off, self.G = spread(meas.x[keep], meas.w[keep], self.M)
        del meas, keep
        self.xm = (self.off + np.arange(len(self.G))) / self.M
        if self.off <= 0:
            raise RuntimeError("spread grid reaches x <= 0")
        self.h = self.G / (1j * self.xm)      # m^ strengths
        self.c0 = self.h.sum()                # so m^(t) = sum h e^{itx} - c0

    def m(self, t):
        t = np.atleast_1d(np.asarray(t, float))
        out = np.empty(len(t), complex)
        for i in range(0, len(t), 256):
            out[i:i + 256] = np.exp(1j * np.outer(t[i:i + 256], self.xm)) @ self.G
        return out

    def mhat(self, t):
        t = np.atleast_1d(np.asarray(t, float))
        out = np.empty(len(t), complex)
        for i in range(0, len(t), 256):
            tt = t[i:i + 256]
            th = np.outer(tt, self.xm)
            out[i:i + 256] = (np.exp(0.5j * th) * np.sinc(th / (2 * np.pi)) * tt[:, None]) @ self.G
        return out

    def panel(self, L, tau, strengths):
        """sum_m s_m e^{i x_m (k H + tau)} for k = 0..L-1."""
        full = np.zeros(L, complex)
        np.add.at(full, (self.off + np.arange(len(self.G))) % L,
                  strengths * np.exp(1j * self.xm * tau))
        return np.fft.ifft(full) * L

    def panel_size(self, spacing=0.8):
        # spacing of the uniform t panels: H = 2 pi M / L
        return 1 << int(math.ceil(math.log2(2 * math.pi * self.M / spacing)))

    def integrate_kernel(self, X, kernel, strengths=None, shift=0.0, order=20):
        """int_0^X (sum_m s_m e^{i t x_m} - shift) kernel(t) dt by Gauss panels."""
        s = self.G if strengths is None else strengths
        L = self.panel_size()
        H = 2 * np.pi * self.M / L
        K = int(X // H)
        gl, gw = np.polynomial.legendre.leggauss(order)
        total = 0j
        if K:
            for tau, wt in zip((gl + 1) * H / 2, gw):
                F = self.panel(L, tau, s)[:K]
                tn = np.arange(K) * H + tau
                total += wt * H / 2 * np.sum((F - shift) * kernel(tn))
        a = K * H
        if X > a:
            tr = a + (gl + 1) * (X - a) / 2
            if strengths is None:
                vals = self.m(tr)
            else:
                vals = np.array([np.sum(s * np.exp(1j * t * self.xm)) for t in tr])
            total += np.sum(gw * (X - a) / 2 * (vals - shift) * kernel(tr))
        return total

    def integrate_m(self, T):
        """m^(T) = int_0^T m(it) dt."""
        if T > self.t_max * 1.0001:
            raise ValueError("T beyond the grid's design range")
        return complex(self.integrate_kernel(T, lambda t: np.ones_like(t)))


# ------------------------------------------------------ coefficient table

@dataclass
class CoefficientTable:
    """n -> (d_n, err); d_0 = 1 exactly."""
    d: np.ndarray
    err: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.d = np.asarray(self.d, float)
        self.err = np.asarray(self.err, float)
        if self.d[0] != 1.0:
            raise ValueError("d_0 must equal 1")

    @property
    def max_n(self):
        return len(self.d) - 1

    @property
    def entries(self):
        return {n: (float(self.d[n]), float(self.err[n])) for n in range(len(self.d))}

    def __getitem__(self, n):
        return float(self.d[n]), float(self.err[n])

    def to_csv(self, header: Optional[dict] = None) -> str:
        buf = io.StringIO()
        for k, v in (header or {}).items():
            buf.write(f"# {k}: {v}\n")
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["n", "d_n", "err"])
        for n in range(len(self.d)):
            wr.writerow([n, f"{self.d[n]:.17g}", f"{self.err[n]:.17g}"])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "CoefficientTable":
        rows = [r for r in text.splitlines() if r and not r.startswith("#")]
        rd = list(csv.reader(rows))[1:]
        return cls(np.array([float(r[1]) for r in rd]), np.array([float(r[2]) for r in rd]))

    def to_jsonl(self) -> str:
        return "".join(json.dumps({"n": n, "d_n": float(f"{self.d[n]:.17g}"),
                                   "err": float(f"{self.err[n]:.17g}")}) + "\n"
                       for n in range(len(self.d)))


def coefficient_table(max_n: int = 4096, tol: float = 1e-12, gate: float = 1e-8) -> CoefficientTable:
    """d_n for n <= max_n from two independent discrete schemes.

    farey-adaptive:  Gauss nodes for d? on an adaptive atom partition.
    parts-riemann:   d_n = Re R_n + 2 pi n Im Q_n with R, Q from parts_measures.
    Every entry must pass |a - c| <= gate, otherwise SchemeDisagreement.
    """
    max_n = int(max_n)
    if max_n < 0:
        raise ValueError("max_n must be nonnegative")
    om = 2 * np.pi * max(max_n, 1) * 1.02
    meas = dq_measure(om, tol)
    ea = exp_sums(meas.x, meas.w, max_n)
    n_a = len(meas)
    del meas
    R, Q = parts_measures(om, tol)
    eR = exp_sums(R.x, R.w, max_n)
    eQ = exp_sums(Q.x, Q.w, max_n)
    n_parts = len(R) + len(Q)
    del R, Q
    n = np.arange(max_n + 1)
    dc = eR.real + 2 * np.pi * n * eQ.imag
    da = ea.real
    imag = np.abs(ea.imag)
    gap = np.abs(da - dc)
    da[0] = dc[0] = 1.0
    gap[0] = 0.0
    if np.any(imag[1:] >= 1e-10):
        k = int(np.argmax(imag))
        raise SchemeDisagreement(f"Im m(2 pi i n) = {imag[k]:.3e} at n = {k}")
    if np.any(gap > gate):
        k = int(np.argmax(gap))
        raise SchemeDisagreement(f"coefficient schemes disagree at n={k}: gap {gap[k]:.3e}")
    err = np.maximum(gap, 16 * EPS * (1 + 2 * np.pi * n))
    err[0] = 0.0
    meta = {"tol": tol, "gate": gate, "nodes_farey": n_a, "nodes_parts": n_parts,
            "max_gap": float(gap.max()), "max_imag": float(imag[1:].max()) if max_n else 0.0}
    return CoefficientTable(da, err, meta)
