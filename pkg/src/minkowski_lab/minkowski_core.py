"""Minkowski question mark function, its inverse and Stern-Brocot atoms.

?([0; a1, a2, ...]) = 2 * sum_i (-1)^(i+1) 2^-(a1 + ... + ai).

All exact work is done with Python integers.  Floating evaluation expands
the (exactly representable) float argument into a continued fraction,
forms the dyadic value exactly and rounds once.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

__all__ = [
    "ALPHA",
    "ContinuedFraction",
    "DyadicValue",
    "FareyAtom",
    "FareyPartition",
    "HolderConstants",
    "cf_from_real",
    "cf_from_rational",
    "question_mark_cf",
    "question_mark",
    "question_mark_rational",
    "extended_F",
    "box_inverse",
    "farey_partition",
    "refine_atom",
    "holder_ratio",
]

MAX_TERMS = 64
MASS_CUTOFF_BITS = 70
UNDERFLOW_BITS = 1100
MAX_PARTITION_DEPTH = 24


@dataclass(frozen=True)
class HolderConstants:
    """alpha = log 2 / (2 log phi), phi the golden ratio."""

    @property
    def alpha(self) -> float:
        phi = (1.0 + math.sqrt(5.0)) / 2.0
        return math.log(2.0) / (2.0 * math.log(phi))


ALPHA = HolderConstants().alpha


@dataclass(frozen=True)
class ContinuedFraction:
    terms: tuple
    truncated: bool = False

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(int(a) for a in self.terms))
        if not self.terms:
            raise ValueError("empty continued fraction")
        if any(a < 1 for a in self.terms):
            raise ValueError("partial quotients must be positive")

    @property
    def canonical(self) -> bool:
        return len(self.terms) == 1 or self.terms[-1] >= 2

    def canonicalize(self) -> "ContinuedFraction":
        t = list(self.terms)
        if len(t) >= 2 and t[-1] == 1:
            t = t[:-2] + [t[-2] + 1]
        return ContinuedFraction(tuple(t), self.truncated)

    def value(self) -> Fraction:
        x = Fraction(0)
        for a in reversed(self.terms):
            x = 1 / (a + x)
        return x

    def __float__(self):
        return float(self.value())


@dataclass(frozen=True)
class DyadicValue:
    numerator: int
    exponent: int

    def __post_init__(self):
        n, e = int(self.numerator), int(self.exponent)
        if n < 0 or e < 0:
            raise ValueError("numerator and exponent must be nonnegative")
        if n == 0:
            e = 0
        while e > 0 and n % 2 == 0:
            n //= 2
            e -= 1
        object.__setattr__(self, "numerator", n)
        object.__setattr__(self, "exponent", e)
        if n > (1 << e):
            raise ValueError("dyadic value exceeds 1")

    def as_fraction(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.exponent)

    def __float__(self):
        return math.ldexp(self.numerator, -self.exponent) if self.exponent < 1000 \
            else float(self.as_fraction())


def _cf_terms(p: int, q: int):
    terms = []
    while q:
        a, r = divmod(p, q)
        terms.append(a)
        p, q = q, r
    return terms


def cf_from_rational(x) -> ContinuedFraction:
    """Exact (canonical) continued fraction of a rational in (0, 1]."""
    x = Fraction(x)
    if not 0 < x <= 1:
        raise ValueError("x must lie in (0, 1]")
    if x == 1:
        return ContinuedFraction((1,))
    return ContinuedFraction(tuple(_cf_terms(x.numerator, x.denominator)[1:]))


def cf_from_real(x, max_terms: int = MAX_TERMS, tol: float = 0.0) -> ContinuedFraction:
    """Continued fraction of x in (0, 1].

    With tol > 0 the expansion stops at the first convergent within tol of x;
    with tol = 0 it stops once the remaining ?-mass 2^-(a1+...+ak) drops
    below 2^-70.  At most max_terms terms are kept.
    The truncation flag is set whenever digits of x were discarded.
    """
    if isinstance(x, Fraction):
        fx = x
    else:
        xf = float(x)
        if not math.isfinite(xf):
            raise ValueError("non-finite input")
        fx = Fraction(xf)
    if not 0 < fx <= 1:
        raise ValueError("x must lie in (0, 1]")
    full = cf_from_rational(fx).terms
    out = []
    total = 0
    # convergents h_k = a_k h_{k-1} + h_{k-2}, seeded with h_{-1} = 1/0, h_0 = 0/1
    p0, q0, p1, q1 = 1, 0, 0, 1
    for a in full:
        if len(out) >= max_terms:
            break
        if tol <= 0 and total + a > UNDERFLOW_BITS:
            # 2^-(total+a) is invisible next to the earlier terms (or
            # underflows outright when this is the first term)
            if not out:
                out.append(UNDERFLOW_BITS)
            break
        out.append(a)
        total += a
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        close = tol > 0 and abs(Fraction(p1, q1) - fx) <= tol
        if close or (tol <= 0 and total > MASS_CUTOFF_BITS):
            break
    return ContinuedFraction(tuple(out), truncated=len(out) < len(full))


def _qm_terms(terms: Sequence[int]) -> DyadicValue:
    # 2 * sum (-1)^{i+1} 2^{-S_i} as numerator / 2^{S_k - 1}
    s = 0
    partial = []
    for a in terms:
        s += a
        partial.append(s)
    e = partial[-1]
    num = 0
    sign = 1
    for si in partial:
        num += sign * (1 << (e - si))
        sign = -sign
    # value = 2 num / 2^e
    return DyadicValue(num, e - 1) if e >= 1 else DyadicValue(2 * num, 0)


def question_mark_cf(cf: ContinuedFraction) -> DyadicValue:
    """Exact dyadic ?-value of a finite continued fraction."""
    if not isinstance(cf, ContinuedFraction):
        cf = ContinuedFraction(tuple(cf))
    return _qm_terms(cf.terms)


@lru_cache(maxsize=1 << 20)
def _qm_pq(p: int, q: int) -> float:
    if p == 0:
        return 0.0
    if p == q:
        return 1.0
    return float(_qm_terms(_cf_terms(p, q)[1:]))


def question_mark_rational(p, q) -> float:
    """?(p/q) rounded once from the exact dyadic value (cached)."""
    p, q = int(p), int(q)
    g = math.gcd(p, q)
    return _qm_pq(p // g, q // g)


def _qm_float(x: float) -> float:
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    return float(question_mark_cf(cf_from_real(x)))


def question_mark(x):
    """?(x) on [0, 1]; scalar or array."""
    arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0) or np.any(arr > 1):
        raise ValueError("question_mark is defined on [0, 1]")
    if arr.ndim == 0:
        return _qm_float(float(arr))
    out = np.fromiter((_qm_float(v) for v in arr.ravel()), float, arr.size)
    return out.reshape(arr.shape)


def _F_scalar(x: float) -> float:
    if x == 0.0:
        return 0.0
    fx = Fraction(x)
    # F(x) = ?(x/(x+1)); the map is evaluated exactly on the float
    return float(question_mark_cf(cf_from_real(fx / (fx + 1))))


def extended_F(x):
    """F(x) = ?(x/(x+1)) for x >= 0; F(x) -> 1 as x -> inf."""
    arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0):
        raise ValueError("extended_F needs finite x >= 0")
    if arr.ndim == 0:
        return _F_scalar(float(arr))
    out = np.fromiter((_F_scalar(v) for v in arr.ravel()), float, arr.size)
    return out.reshape(arr.shape)


def _box_inverse_scalar(u) -> Fraction:
    u = Fraction(u)
    if u == 0:
        return Fraction(0)
    if u == 1:
        return Fraction(1)
    m, e = u.numerator, u.denominator.bit_length() - 1
    bits = bin(m)[2:].rjust(e, "0")
    # binary digits of ?(x) = 0^(a1-1) 1^a2 0^a3 1^a4 ...; the terminating
    # expansion ends on a run of ones followed by zeros forever
    runs = []
    cur, n = "0", 0
    for b in bits:
        if b == cur:
            n += 1
        else:
            runs.append(n)
            cur, n = b, 1
    runs.append(n)
    terms = [runs[0] + 1] + runs[1:]
    return ContinuedFraction(tuple(terms)).value()


def box_inverse(u, exact: bool = False):
    """Inverse of ?: read the binary run lengths of u as partial quotients.

    A DyadicValue or dyadic Fraction is inverted exactly (returns a Fraction).
    """
    if isinstance(u, (DyadicValue, Fraction)):
        fr = u.as_fraction() if isinstance(u, DyadicValue) else u
        if fr.denominator & (fr.denominator - 1) or not 0 <= fr <= 1:
            raise ValueError("exact input must be a dyadic rational in [0, 1]")
        return _box_inverse_scalar(fr)
    arr = np.asarray(u, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0) or np.any(arr > 1):
        raise ValueError("box_inverse is defined on [0, 1]")
    if arr.ndim == 0:
        r = _box_inverse_scalar(float(arr))
        return r if exact else float(r)
    vals = [_box_inverse_scalar(v) for v in arr.ravel()]
    if exact:
        return vals
    return np.array([float(v) for v in vals]).reshape(arr.shape)


@dataclass(frozen=True)
class FareyAtom:
    p0: int
    q0: int
    p1: int
    q1: int
    depth: int

    def __post_init__(self):
        if self.p1 * self.q0 - self.p0 * self.q1 != 1:
            raise ValueError("endpoints are not Farey neighbours")

    @property
    def left(self) -> Fraction:
        return Fraction(self.p0, self.q0)

    @property
    def right(self) -> Fraction:
        return Fraction(self.p1, self.q1)

    @property
    def mass(self) -> Fraction:
        return Fraction(1, 1 << self.depth)

    @property
    def mediant(self) -> Fraction:
        return Fraction(self.p0 + self.p1, self.q0 + self.q1)


ROOT_ATOM = FareyAtom(0, 1, 1, 1, 0)


def refine_atom(atom: FareyAtom):
    """Split at the mediant into two atoms of half the mass."""
    pm, qm = atom.p0 + atom.p1, atom.q0 + atom.q1
    return (FareyAtom(atom.p0, atom.q0, pm, qm, atom.depth + 1),
            FareyAtom(pm, qm, atom.p1, atom.q1, atom.depth + 1))


class FareyPartition:
    """All 2^depth Stern-Brocot atoms of a given depth, stored as int arrays."""

    def __init__(self, p0, q0, p1, q1, depth):
        self.p0, self.q0, self.p1, self.q1 = p0, q0, p1, q1
        self.depth = depth

    def __len__(self):
        return len(self.p0)

    def __getitem__(self, i):
        return FareyAtom(int(self.p0[i]), int(self.q0[i]), int(self.p1[i]), int(self.q1[i]),
                         self.depth)

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    @property
    def mass(self) -> Fraction:
        return Fraction(1, 1 << self.depth)

    def endpoints(self):
        """Left endpoints of all atoms followed by the right end 1/1."""
        return (np.append(self.p0, self.p1[-1]), np.append(self.q0, self.q1[-1]))


def farey_partition(depth: int) -> FareyPartition:
    depth = int(depth)
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    if depth > MAX_PARTITION_DEPTH:
        raise ValueError(f"depth {depth} exceeds {MAX_PARTITION_DEPTH}")
    # ordered endpoints of level d interleave level d-1 endpoints with mediants
    p = np.array([0, 1], dtype=np.int64)
    q = np.array([1, 1], dtype=np.int64)
    for _ in range(depth):
        pn = np.empty(2 * len(p) - 1, dtype=np.int64)
        qn = np.empty_like(pn)
        pn[0::2], qn[0::2] = p, q
        pn[1::2], qn[1::2] = p[:-1] + p[1:], q[:-1] + q[1:]
        p, q = pn, qn
    return FareyPartition(p[:-1], q[:-1], p[1:], q[1:], depth)


def holder_ratio(depth: int, alpha: float = ALPHA, cumulative: bool = False) -> float:
    """max of |?(r)-?(l)| / |r-l|^alpha over neighbouring endpoints l < r.

    For Farey neighbours |r - l| = 1/(q0 q1) and the ?-increment of an atom
    at depth d is 2^-d.  By default only atoms of the given depth enter (the
    finest scale); with cumulative=True all depths <= depth are included,
    in which case the root interval pins the value at 1.
    """
    levels = range(0, int(depth) + 1) if cumulative else [int(depth)]
    best = 0.0
    for d in levels:
        part = farey_partition(d)
        logs = alpha * (np.log(part.q0.astype(float)) + np.log(part.q1.astype(float)))
        best = max(best, float(np.exp(logs.max() - d * math.log(2.0))))
    return best
