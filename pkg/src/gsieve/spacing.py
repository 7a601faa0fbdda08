"""Farey points on the torus and the clustering count K.

K counts, for the worst center point, how many sample points fall
within the sieve spacing radius.  Three formulations are implemented:
Euclidean torus distance, sup-norm (K'), and the exact norm-form
criterion in Z[i].  Every comparison is cross-multiplied integer
arithmetic, so boundary ties are deterministic and platform
independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .gaussint import GaussInt
from .sieve import BudgetExceededError, CoefficientSeq, ModuliFamily, reduced_residues

__all__ = [
    "FareyPoint",
    "farey_points",
    "K_euclid",
    "K_sup",
    "K_norm",
    "theorem_ls_check",
    "LS_CONSTANT",
]

# Explicit constant pi^(2d)/2^d of the plane large sieve at d = 2.
LS_CONSTANT = math.pi**4 / 4.0

INT64_SAFE = 2**62


@dataclass(frozen=True)
class FareyPoint:
    """A reduced pair (r, m) with its exact torus embedding.

    The embedding is conj(r)/conj(m) = (num_re + i num_im)/den with
    num_re = x*u + y*v, num_im = x*v - y*u, den = N(m) for r = x+iy,
    m = u+iv.
    """

    r: GaussInt
    q: GaussInt  # base modulus of the family
    m: GaussInt  # full modulus (q^k for power families)

    @property
    def den(self) -> int:
        return self.m.norm()

    @property
    def num_re(self) -> int:
        return self.r.re * self.m.re + self.r.im * self.m.im

    @property
    def num_im(self) -> int:
        return self.r.re * self.m.im - self.r.im * self.m.re


def farey_points(family: ModuliFamily, budget: int | None = None) -> list[FareyPoint]:
    """All (r, q^k) with q in the family and r reduced mod the modulus."""
    out = []
    spent = 0
    for q, m in family.moduli():
        spent += m.norm()
        if budget is not None and spent > budget:
            raise BudgetExceededError(f"farey enumeration budget {budget} exceeded at {m}")
        for r in reduced_residues(q, m):
            out.append(FareyPoint(r, q, m))
    return out


def _as_fraction(N) -> Fraction:
    f = Fraction(N)
    if f <= 0:
        raise ValueError("N must be positive")
    return f


def _int64_ok(points: list[FareyPoint], N: Fraction) -> bool:
    dmax = max(p.den for p in points)
    # Worst term ~ N.numerator * D^2 with D = den_i * den_j.
    return N.numerator * dmax**4 < INT64_SAFE and 2 * N.denominator * dmax**4 < INT64_SAFE


def _pair_counts_torus(points: list[FareyPoint], N: Fraction, sup: bool) -> int:
    """Max row count of pairs within the torus radius (Euclid or sup)."""
    if not points:
        raise ValueError("need at least one point")
    p, qd = N.numerator, N.denominator
    use64 = _int64_ok(points, N)
    dt = np.int64 if use64 else object
    nre = np.array([pt.num_re for pt in points], dtype=dt)
    nim = np.array([pt.num_im for pt in points], dtype=dt)
    den = np.array([pt.den for pt in points], dtype=dt)
    best = 0
    R = len(points)
    chunk = max(1, 8_000_000 // max(R, 1))
    for lo in range(0, R, chunk):
        hi = min(R, lo + chunk)
        Dr = den[lo:hi, None]
        D = Dr * den[None, :]
        # Embedding difference over the common denominator D = den_i * den_j.
        d1 = nre[lo:hi, None] * den[None, :] - nre[None, :] * Dr
        d2 = nim[lo:hi, None] * den[None, :] - nim[None, :] * Dr
        r1 = d1 % D
        r2 = d2 % D
        m1 = np.minimum(r1, D - r1)
        m2 = np.minimum(r2, D - r2)
        if sup:
            mm = np.maximum(m1, m2)
            ok = p * mm * mm <= qd * D * D
        else:
            ok = p * (m1 * m1 + m2 * m2) <= 2 * qd * D * D
        best = max(best, int(ok.sum(axis=1).max()))
    return best


def K_euclid(points: list[FareyPoint], N) -> int:
    """Pairs within torus Euclidean distance sqrt(2) N^(-1/2), worst center.

    Criterion per pair: N * (m1^2 + m2^2) <= 2 * D^2 where (m1, m2) is
    the exact per-coordinate torus reduction of the embedding difference
    over the common denominator D.
    """
    return _pair_counts_torus(points, _as_fraction(N), sup=False)


def K_sup(points: list[FareyPoint], N) -> int:
    """The K' count with the sup-norm radius N^(-1/2); K_sup <= K_euclid."""
    return _pair_counts_torus(points, _as_fraction(N), sup=True)


def K_norm(points: list[FareyPoint], N) -> int:
    """K via the norm-form criterion in Z[i], exactly.

    Pair condition: min over z in Z[i] of
    N * N(r1 m2 - r2 m1 - z m1 m2) <= 2 N(m1) N(m2).  The minimizing z
    is the nearest Gaussian integer to (r1 m2 - r2 m1)/(m1 m2); a 3x3
    candidate box around the rounded quotient is searched for safety.
    """
    frac = _as_fraction(N)
    p, qd = frac.numerator, frac.denominator
    R = len(points)
    if R == 0:
        raise ValueError("need at least one point")
    dmax = max(pt.den for pt in points)
    use64 = 64 * p * dmax**4 < INT64_SAFE and 2 * qd * dmax**2 < INT64_SAFE
    dt = np.int64 if use64 else object
    rre = np.array([pt.r.re for pt in points], dtype=dt)
    rim = np.array([pt.r.im for pt in points], dtype=dt)
    mre = np.array([pt.m.re for pt in points], dtype=dt)
    mim = np.array([pt.m.im for pt in points], dtype=dt)
    nm = np.array([pt.den for pt in points], dtype=dt)
    best = 0
    chunk = max(1, 2_000_000 // max(R, 1))
    for lo in range(0, R, chunk):
        hi = min(R, lo + chunk)
        # w = r_j m_i - r_i m_j scaled difference; M = m_i m_j (i rows, j cols).
        wre = (rre[None, :] * mre[lo:hi, None] - rim[None, :] * mim[lo:hi, None]) - (
            rre[lo:hi, None] * mre[None, :] - rim[lo:hi, None] * mim[None, :]
        )
        wim = (rre[None, :] * mim[lo:hi, None] + rim[None, :] * mre[lo:hi, None]) - (
            rre[lo:hi, None] * mim[None, :] + rim[lo:hi, None] * mre[None, :]
        )
        Mre = mre[lo:hi, None] * mre[None, :] - mim[lo:hi, None] * mim[None, :]
        Mim = mre[lo:hi, None] * mim[None, :] + mim[lo:hi, None] * mre[None, :]
        nM = nm[lo:hi, None] * nm[None, :]
        # Nearest quotient z0 of w/M (componentwise nearest, ties toward -inf).
        tre = wre * Mre + wim * Mim
        tim = wim * Mre - wre * Mim
        z0re = -((nM - 2 * tre) // (2 * nM))
        z0im = -((nM - 2 * tim) // (2 * nM))
        bestn = None
        for dz1 in (-1, 0, 1):
            for dz2 in (-1, 0, 1):
                zre = z0re + dz1
                zim = z0im + dz2
                ure = wre - (zre * Mre - zim * Mim)
                uim = wim - (zre * Mim + zim * Mre)
                n = ure * ure + uim * uim
                bestn = n if bestn is None else np.minimum(bestn, n)
        ok = p * bestn <= 2 * qd * nM
        best = max(best, int(ok.sum(axis=1).max()))
    return best


def _round_nearest(a: int, n: int) -> int:
    """Nearest integer to a/n for n > 0, ties toward -infinity."""
    return -((n - 2 * a) // (2 * n))


def theorem_ls_check(points: list[FareyPoint], a: CoefficientSeq):
    """T over the given points against the explicit plane-sieve bound.

    Returns (T, (pi^4/4) * K_euclid * N * Z, ratio); the explicit form
    of the large sieve guarantees ratio <= 1.
    """
    T = 0.0
    by_modulus: dict[GaussInt, list[FareyPoint]] = {}
    for pt in points:
        by_modulus.setdefault(pt.m, []).append(pt)
    from .sieve import _modulus_fixed_residues_T  # local import to avoid cycle

    s, t, avec = a.arrays()
    for m, pts in by_modulus.items():
        T += _modulus_fixed_residues_T(m, [pt.r for pt in pts], s, t, avec, a.N)
    K = K_euclid(points, Fraction(a.N))
    bound = LS_CONSTANT * K * float(a.N) * a.Z
    return T, bound, T / bound if bound > 0 else math.inf
