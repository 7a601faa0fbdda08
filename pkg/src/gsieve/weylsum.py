"""Differenced exponential sums over Z[i] and their transformed forms.

S(q1, r1, j) is a Gaussian-weighted theta-like sum with a k-th power
phase.  For k = 2 it can be evaluated three ways: directly, through the
squared/differenced double sum, and through Poisson summation on the
inner variable; the three must agree within the combined truncation
tolerances.  The module also evaluates the general-k majorant built
from the difference polynomials P, and the small-fractional-part
counters behind the final counting step.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .gaussint import GaussInt, gcd_is_unit
from .sieve import BudgetExceededError
from .weights import kappa

__all__ = [
    "WeylConfig",
    "S_direct",
    "S2_squared_differenced",
    "S2_squared_poisson",
    "P_poly",
    "P_poly_terminal_doubled",
    "Sk_power_bound_rhs",
    "count_small_fractional",
    "psi2_mass",
]


@dataclass(frozen=True)
class WeylConfig:
    """Parameters of one differenced-sum evaluation.

    q1 must sit in the dyadic norm window Q0/2^(1/k) < N(q1) <= Q0 and
    be coprime to r1; kappa = 2^(k-1) is derived.
    """

    k: int
    Q0: float
    q1: GaussInt
    r1: GaussInt
    j: GaussInt
    truncation_tol: float = 1e-10

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("k must be >= 2")
        if self.Q0 <= 0:
            raise ValueError("Q0 must be positive")
        n = self.q1.norm()
        if not (self.Q0 / 2 ** (1.0 / self.k) < n <= self.Q0):
            raise ValueError(
                f"N(q1) = {n} outside the window ({self.Q0 / 2 ** (1.0 / self.k):.3f}, {self.Q0}]"
            )
        if not gcd_is_unit(self.r1, self.q1):
            raise ValueError("r1 must be coprime to q1")
        if self.truncation_tol <= 0:
            raise ValueError("truncation tolerance must be positive")

    @property
    def kappa(self) -> int:
        return kappa(self.k)

    @property
    def modulus(self) -> GaussInt:
        return self.q1**self.k

    @property
    def den(self) -> int:
        return self.modulus.norm()


def _gauss_disk_radius_sq(c: float, tol: float) -> int:
    """M such that sum over N(z) > M of exp(-c N(z)) is certifiably < tol.

    Certified by the annulus bound: at most pi*(2m+3) lattice points
    have |z| in [m, m+1).
    """
    if c <= 0:
        raise ValueError("decay rate must be positive")
    m = 1
    while True:
        tail = 0.0
        mm = m
        while True:
            term = math.pi * (2 * mm + 3) * math.exp(-c * mm * mm)
            tail += term
            if term < 1e-300 or term < 1e-18 * tail:
                break
            mm += 1
        if tail < tol:
            return m * m
        m += 1
        if m > 100000:
            raise RuntimeError("no certified truncation radius")


def _disk_points(norm_bound: int) -> tuple[np.ndarray, np.ndarray]:
    """Integer points with a^2 + b^2 <= norm_bound, as int64 arrays."""
    b = math.isqrt(norm_bound)
    g = np.arange(-b, b + 1, dtype=np.int64)
    A, B = np.meshgrid(g, g, indexing="ij")
    mask = A * A + B * B <= norm_bound
    return A[mask], B[mask]


def _complex_int_pow(A: np.ndarray, B: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """(A + iB)^k componentwise in exact int64 arithmetic."""
    Pre, Pim = A.copy(), B.copy()
    for _ in range(k - 1):
        Pre, Pim = Pre * A - Pim * B, Pre * B + Pim * A
    return Pre, Pim


def psi2_mass(k: int, Q0: float, tol: float = 1e-12) -> float:
    """sum over q2 in Z[i] of Psi2(q2^k / Q0^(k/2)) = sum exp(-(pi/kappa) N(q2)/Q0)."""
    c = math.pi / kappa(k) / Q0
    M = _gauss_disk_radius_sq(c, tol)
    A, B = _disk_points(M)
    return float(np.sum(np.exp(-c * (A * A + B * B).astype(np.float64))))


def S_direct(cfg: WeylConfig) -> complex:
    """The weighted k-th power sum, truncated with a certified Gaussian tail.

    Psi2 at the k-th power argument collapses exactly to
    exp(-(pi/kappa) N(q2)/Q0); phases Re(j r1 q2^k / q1^k) are reduced
    mod 1 as exact integers over N(q1)^k.
    """
    c = math.pi / cfg.kappa / cfg.Q0
    M = _gauss_disk_radius_sq(c, cfg.truncation_tol)
    A, B = _disk_points(M)
    w = cfg.j * cfg.r1 * cfg.modulus.conj()
    den = cfg.den
    Pre, Pim = _complex_int_pow(A, B, cfg.k)
    _check_int64(max(abs(w.re), abs(w.im)), int(np.abs(Pre).max(initial=0)), int(np.abs(Pim).max(initial=0)))
    num = (w.re * Pre - w.im * Pim) % den
    weights = np.exp(-c * (A * A + B * B).astype(np.float64))
    return complex(np.sum(weights * np.exp((2j * np.pi / den) * num)))


def _check_int64(wmax: int, pmax1: int, pmax2: int) -> None:
    if wmax * (pmax1 + pmax2) >= 2**62:
        raise OverflowError(
            "phase numerators exceed the int64 fast path; reduce Q0 or norms"
        )


def S2_squared_differenced(cfg: WeylConfig, alpha_cut: float | None = None) -> complex:
    """|S|^2 through the alpha/q double sum obtained by squaring (k = 2).

    The alpha range is certified from the exp(-pi N(alpha)/(4 Q0))
    prefactor unless alpha_cut (a bound on N(alpha)) is given.
    """
    if cfg.k != 2:
        raise ValueError("the differenced form is the k = 2 special case")
    Q0 = cfg.Q0
    c = math.pi / 2.0 / Q0
    tol = cfg.truncation_tol
    mass = psi2_mass(2, Q0)
    # Contribution of one alpha is at most exp(-pi N(alpha)/(4 Q0)) * mass.
    if alpha_cut is None:
        Malpha = _gauss_disk_radius_sq(math.pi / (4.0 * Q0), tol / max(mass, 1.0))
    else:
        Malpha = int(alpha_cut)
    Mq = _gauss_disk_radius_sq(c, tol / max(4.0 * Malpha, 1.0))
    qre, qim = _disk_points(Mq)
    qn = (qre * qre + qim * qim).astype(np.float64)
    den = cfg.den
    wsq = cfg.j * cfg.r1 * cfg.modulus.conj()  # phase numerator core for alpha^2
    total = 0 + 0j
    ar, ai = _disk_points(Malpha)
    for t in range(len(ar)):
        a1, a2 = int(ar[t]), int(ai[t])
        alpha = GaussInt(a1, a2)
        # Outer phase e(Re(j r1 alpha^2 / q1^2)).
        asq = alpha * alpha
        num0 = (wsq.re * asq.re - wsq.im * asq.im) % den
        outer = np.exp(2j * np.pi * num0 / den)
        # Inner sum over q with the pair of Gaussians and a linear phase.
        w2 = GaussInt(2, 0) * cfg.j * alpha * cfg.r1 * cfg.modulus.conj()
        num = (w2.re * qre - w2.im * qim) % den
        pair = np.exp(-c * (qn + (qre + a1) ** 2 + (qim + a2) ** 2))
        inner = np.sum(pair * np.exp((2j * np.pi / den) * num))
        total += outer * inner
    return complex(total)


def S2_squared_poisson(cfg: WeylConfig, alpha_cut: float | None = None) -> complex:
    """|S|^2 through the Poisson-transformed beta sum (k = 2).

    For each alpha the inner q-sum becomes Q0 times a sum of the exact
    transform of the differenced Gaussian pair, evaluated at
    sqrt(Q0) * (beta - conj(2 j alpha r1 / q1^2)); only the few beta
    nearest the fractional center survive the exp(-pi Q0 N(.)) factor.
    """
    if cfg.k != 2:
        raise ValueError("the Poisson form is the k = 2 special case")
    Q0 = cfg.Q0
    tol = cfg.truncation_tol
    sq = math.sqrt(Q0)
    den = cfg.den
    if alpha_cut is None:
        mass = psi2_mass(2, Q0)
        Malpha = _gauss_disk_radius_sq(math.pi / (4.0 * Q0), tol / max(mass, 1.0))
    else:
        Malpha = int(alpha_cut)
    # Beta window: exp(-pi Q0 d^2) below tol/(#alpha) is negligible.
    ar, ai = _disk_points(Malpha)
    nalpha = max(len(ar), 1)
    dmax2 = _gauss_disk_radius_sq(math.pi * Q0, tol / nalpha)
    belt = int(math.ceil(math.sqrt(dmax2))) + 1
    wsq = cfg.j * cfg.r1 * cfg.modulus.conj()
    total = 0 + 0j
    for t in range(len(ar)):
        a1, a2 = int(ar[t]), int(ai[t])
        alpha = GaussInt(a1, a2)
        asq = alpha * alpha
        num0 = (wsq.re * asq.re - wsq.im * asq.im) % den
        outer = np.exp(2j * np.pi * num0 / den)
        # Exact rational center conj(2 j alpha r1 / q1^2) = G / den.
        G = GaussInt(2, 0) * (cfg.j * alpha * cfg.r1).conj() * cfg.modulus
        c_re = G.re / den
        c_im = G.im / den
        b0_re = round(c_re)
        b0_im = round(c_im)
        pref = math.exp(-math.pi / (4.0 * Q0) * alpha.norm())
        inner = 0 + 0j
        for b1 in range(b0_re - belt, b0_re + belt + 1):
            for b2 in range(b0_im - belt, b0_im + belt + 1):
                z1 = sq * (b1 - c_re)
                z2 = sq * (b2 - c_im)
                # Exact transform of the differenced pair (positive phase
                # sign; only the modulus matters for the final bounds).
                phase = (alpha.re * z1 + alpha.im * z2) / (2.0 * sq)
                inner += (
                    pref
                    * np.exp(2j * np.pi * phase)
                    * math.exp(-math.pi * (z1 * z1 + z2 * z2))
                )
        total += outer * inner
    return complex(Q0 * total)


def P_poly(k: int, alphas: list[GaussInt], q: GaussInt) -> GaussInt:
    """Iterated finite difference of X^k in directions alphas, at X = q.

    Computed by inclusion-exclusion over subsets,
    sum over u in {0,1}^m of (-1)^(m - |u|) (q + u . alpha)^k,
    which is always a Gaussian integer.
    """
    if not 1 <= len(alphas) <= k - 1:
        raise ValueError("need between 1 and k-1 difference directions")
    m = len(alphas)
    out = GaussInt(0, 0)
    for u in itertools.product((0, 1), repeat=m):
        shift = GaussInt(0, 0)
        for uv, a in zip(u, alphas):
            if uv:
                shift = shift + a
        term = (q + shift) ** k
        if (m - sum(u)) % 2:
            out = out - term
        else:
            out = out + term
    return out


def P_poly_terminal_doubled(k: int, alphas: list[GaussInt], q: GaussInt) -> GaussInt:
    """2 * P for the full-depth difference: k! * prod(alpha) * (2q + sum(alpha)).

    Stating the closed form with everything doubled keeps it integral
    without the half-integer shift; 2 * P_poly must equal it exactly.
    """
    if len(alphas) != k - 1:
        raise ValueError("the closed form needs exactly k-1 directions")
    prod = GaussInt(math.factorial(k), 0)
    for a in alphas:
        prod = prod * a
    ssum = GaussInt(0, 0)
    for a in alphas:
        ssum = ssum + a
    return prod * (q + q + ssum)


def Sk_power_bound_rhs(
    cfg: WeylConfig,
    eps: float = 0.0,
    budget: int = 2_000_000,
    sample: int | None = None,
    seed: int = 0,
) -> float:
    """The majorant dominating |S|^kappa after full Weyl differencing.

    Q0^(kappa - k + eps) times the sum over the alpha grid (each
    N(alpha_v) <= Q0^(1+eps)) of the absolute inner q-sum with the
    2^(k-1)-fold Psi2 product and the degree-one phase P_{1,alpha}.
    Grids beyond the budget are refused unless `sample` asks for a
    seeded random subsample of alpha tuples.
    """
    k, Q0 = cfg.k, cfg.Q0
    kap = cfg.kappa
    tol = cfg.truncation_tol
    cut = int(math.floor(Q0 ** (1.0 + eps)))
    ar, ai = _disk_points(cut)
    ncell = len(ar) ** (k - 1)
    indices = list(itertools.product(range(len(ar)), repeat=k - 1))
    if ncell > budget:
        if sample is None:
            raise BudgetExceededError(
                f"alpha grid has {ncell} cells, over the budget {budget}; pass sample="
            )
        rng = np.random.default_rng(seed)
        pick = rng.choice(len(indices), size=min(sample, len(indices)), replace=False)
        indices = [indices[i] for i in sorted(pick)]
        scale_cells = ncell / len(indices)
    else:
        scale_cells = 1.0
    c = math.pi / kap / Q0
    Mq = _gauss_disk_radius_sq(c, tol)
    qre, qim = _disk_points(Mq)
    den = cfg.den
    w = cfg.j * cfg.r1 * cfg.modulus.conj()
    subsets = list(itertools.product((0, 1), repeat=k - 1))
    total = 0.0
    for idx in indices:
        alphas = [GaussInt(int(ar[i]), int(ai[i])) for i in idx]
        # Product of shifted Gaussians over all subset sums.
        expo = np.zeros_like(qre, dtype=np.float64)
        for u in subsets:
            s1 = sum(uv * a.re for uv, a in zip(u, alphas))
            s2 = sum(uv * a.im for uv, a in zip(u, alphas))
            expo += (qre + s1) ** 2 + (qim + s2) ** 2
        weights = np.exp(-c * expo)
        if all(not a.is_zero() for a in alphas):
            # Linear phase from the terminal difference polynomial.
            coeff = GaussInt(math.factorial(k), 0)
            for a in alphas:
                coeff = coeff * a
            wc = w * coeff
            shift = GaussInt(0, 0)
            for a in alphas:
                shift = shift + a
            # P = coeff*(q + shift/2); use the doubled numerator over 2*den.
            num = (2 * (wc.re * qre - wc.im * qim) + (wc.re * shift.re - wc.im * shift.im)) % (2 * den)
            inner = np.sum(weights * np.exp((2j * np.pi / (2 * den)) * num))
        else:
            inner = np.sum(weights)
        total += abs(complex(inner))
    return Q0 ** (kap - k + eps) * scale_cells * total


def count_small_fractional(
    q1: GaussInt,
    r1: GaussInt,
    k: int,
    norm_limit: int,
    delta,
) -> int:
    """#{d != 0 : N(d) <= norm_limit, ||d r1 / q1^k|| <= delta}, exactly.

    ||.|| is the distance to the nearest Gaussian integer; the test is
    cross-multiplied by N(q1^k) so boundary cases are exact for rational
    delta (floats convert exactly).
    """
    if not gcd_is_unit(r1, q1):
        raise ValueError("r1 must be coprime to q1")
    dfrac = Fraction(delta)
    if dfrac < 0:
        raise ValueError("delta must be nonnegative")
    m = q1**k
    den = m.norm()
    w = r1 * m.conj()
    A, B = _disk_points(norm_limit)
    nonzero = (A != 0) | (B != 0)
    A, B = A[nonzero], B[nonzero]
    # d * r1 * conj(m) componentwise; reduce each coordinate to nearest.
    nre = A * w.re - B * w.im
    nim = A * w.im + B * w.re
    r1m = nre % den
    r2m = nim % den
    m1 = np.minimum(r1m, den - r1m).astype(object)
    m2 = np.minimum(r2m, den - r2m).astype(object)
    p, qd = dfrac.numerator, dfrac.denominator
    ok = (m1 * m1 + m2 * m2) * qd * qd <= p * p * den * den
    return int(np.count_nonzero(ok))
