"""Large sieve quantities: moduli families, coefficients, T and bounds.

The left-hand side T is the double sum over moduli and reduced residues
of |sum a_n e(Re(n r / m))|^2.  Phases are reduced modulo 1 in exact
integer arithmetic (numerator Re(n*r*conj(m)), denominator N(m)) before
any floating conversion, then the inner sums are vectorized with numpy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .gaussint import GaussInt, gcd_is_unit, residue_system

__all__ = [
    "ModuliFamily",
    "CoefficientSeq",
    "BudgetExceededError",
    "support_points",
    "trig_sum",
    "lhs_T",
    "lhs_T_vector",
    "bounds",
    "make_coefficients",
]

INT64_SAFE = 2**62


class BudgetExceededError(RuntimeError):
    """An enumeration would exceed the configured resource budget."""


def _is_square(n: int) -> bool:
    r = math.isqrt(n)
    return r * r == n


@dataclass(frozen=True)
class ModuliFamily:
    """A rule generating the modulus multiset S.

    kind: 'all' (k=1), 'squares' (q^2), 'power' (q^k), or 'square_norm'
    (q with N(q) <= Q^2 and N(q) a perfect square).  The range is the
    base-norm window: full means 0 < N(q) <= limit, dyadic means
    limit/2 < N(q) <= limit.  The associates policy 'literal' keeps all
    four associates of each base q; 'units' keeps canonical ones only.
    """

    kind: str
    Q: float
    k: int = 1
    dyadic: bool = False
    associates: str = "literal"

    def __post_init__(self):
        if self.kind not in ("all", "squares", "power", "square_norm"):
            raise ValueError(f"unknown family kind {self.kind!r}")
        if self.associates not in ("literal", "units"):
            raise ValueError(f"unknown associates policy {self.associates!r}")
        if self.Q < 1:
            raise ValueError("Q must be >= 1")
        if self.kind == "power" and self.k < 1:
            raise ValueError("power family needs k >= 1")

    @property
    def power(self) -> int:
        """Exponent applied to the base modulus."""
        return {"all": 1, "squares": 2, "power": self.k, "square_norm": 1}[self.kind]

    def base_moduli(self) -> list[GaussInt]:
        """Base elements q in the norm window, deterministically ordered."""
        limit = self.Q if self.kind != "square_norm" else self.Q * self.Q
        lo = limit / 2 if self.dyadic else 0.0
        bound = int(math.isqrt(int(limit))) + 1
        out = []
        for a in range(-bound, bound + 1):
            for b in range(-bound, bound + 1):
                if a == 0 and b == 0:
                    continue
                n = a * a + b * b
                if not (lo < n <= limit):
                    continue
                if self.kind == "square_norm" and not _is_square(n):
                    continue
                if self.associates == "units" and not (a > 0 and b >= 0):
                    continue
                out.append(GaussInt(a, b))
        out.sort(key=lambda z: (z.norm(), z.re, z.im))
        return out

    def moduli(self) -> list[tuple[GaussInt, GaussInt]]:
        """Pairs (base q, modulus m = q^power)."""
        p = self.power
        return [(q, q**p) for q in self.base_moduli()]

    def describe(self) -> str:
        tag = self.kind if self.kind != "power" else f"power{self.k}"
        rng = "dyadic" if self.dyadic else "full"
        return f"{tag}:{rng}:Q={self.Q:g}:{self.associates}"


def support_points(N: float) -> list[GaussInt]:
    """All n in Z[i] with N(n) <= N, ordered by (norm, re, im)."""
    if N < 0:
        raise ValueError("support bound must be nonnegative")
    bound = int(math.isqrt(int(N)))
    pts = [
        GaussInt(a, b)
        for a in range(-bound, bound + 1)
        for b in range(-bound, bound + 1)
        if a * a + b * b <= N
    ]
    pts.sort(key=lambda z: (z.norm(), z.re, z.im))
    return pts


@dataclass
class CoefficientSeq:
    """Finitely supported complex coefficients a_n on {N(n) <= N}."""

    N: float
    entries: dict[GaussInt, complex]
    provenance: str = "custom"

    def __post_init__(self):
        for n in self.entries:
            if n.norm() > self.N:
                raise ValueError(f"support point {n} outside N(n) <= {self.N}")

    @cached_property
    def Z(self) -> float:
        """Coefficient energy sum |a_n|^2."""
        return float(sum(abs(c) ** 2 for c in self.entries.values()))

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(re, im, value) arrays in canonical support order."""
        items = sorted(self.entries.items(), key=lambda kv: (kv[0].norm(), kv[0].re, kv[0].im))
        s = np.array([n.re for n, _ in items], dtype=np.int64)
        t = np.array([n.im for n, _ in items], dtype=np.int64)
        a = np.array([c for _, c in items], dtype=np.complex128)
        return s, t, a


def make_coefficients(
    kind: str,
    N: float,
    seed: int = 0,
    r0: GaussInt | None = None,
    q0: GaussInt | None = None,
    k: int = 1,
) -> CoefficientSeq:
    """Build a coefficient sequence: all_ones, random(seed), or extremal.

    random uses numpy's PCG64 generator (seeded, cross-platform) and
    draws entries with modulus <= 1.  extremal sets a_n = e(-Re(n r0 / q0^k)),
    so the (r0, q0^k) term of T is the squared support count.
    """
    pts = support_points(N)
    if kind == "all_ones":
        return CoefficientSeq(N, {n: 1.0 + 0.0j for n in pts}, "all_ones")
    if kind == "random":
        rng = np.random.default_rng(seed)
        radii = rng.random(len(pts))
        angles = rng.random(len(pts))
        entries = {
            n: radii[i] * np.exp(2j * np.pi * angles[i]) for i, n in enumerate(pts)
        }
        return CoefficientSeq(N, entries, f"random({seed})")
    if kind == "extremal":
        if r0 is None or q0 is None:
            raise ValueError("extremal coefficients need r0 and q0")
        if not gcd_is_unit(r0, q0):
            raise ValueError("extremal probe needs gcd(r0, q0) = 1")
        m = q0**k
        den = m.norm()
        entries = {}
        for n in pts:
            num = (n * r0 * m.conj()).re % den
            ang = -2.0 * math.pi * num / den
            entries[n] = complex(math.cos(ang), math.sin(ang))
        return CoefficientSeq(N, entries, f"extremal({r0},{q0},{k})")
    raise ValueError(f"unknown coefficient kind {kind!r}")


def trig_sum(a: CoefficientSeq, r: GaussInt, m: GaussInt) -> complex:
    """sum a_n e(Re(n r / m)) with exact rational phase reduction."""
    if m.is_zero():
        raise ZeroDivisionError("trig_sum needs a nonzero modulus")
    den = m.norm()
    w = r * m.conj()
    out = 0 + 0j
    for n, c in a.entries.items():
        num = (n.re * w.re - n.im * w.im) % den
        ang = 2.0 * math.pi * num / den
        out += c * complex(math.cos(ang), math.sin(ang))
    return out


def reduced_residues(q: GaussInt, m: GaussInt) -> list[GaussInt]:
    """Representatives r mod m with gcd(r, q) a unit.

    For m = q^k this equals the reduced residue system mod m; the
    coprimality is tested against the base q, which defines the sample
    points attached to the modulus family.
    """
    return [r for r in residue_system(m).representatives if gcd_is_unit(r, q)]


def _modulus_T(
    q: GaussInt,
    m: GaussInt,
    s: np.ndarray,
    t: np.ndarray,
    avec: np.ndarray,
    Nmax: float,
) -> float:
    """Sum over reduced residues mod m of |trig_sum|^2, vectorized."""
    return _modulus_fixed_residues_T(m, reduced_residues(q, m), s, t, avec, Nmax)


def _modulus_fixed_residues_T(
    m: GaussInt,
    res: list[GaussInt],
    s: np.ndarray,
    t: np.ndarray,
    avec: np.ndarray,
    Nmax: float,
) -> float:
    """|trig_sum|^2 summed over the given residues, exact phase reduction."""
    if not res:
        return 0.0
    den = m.norm()
    x = np.array([r.re for r in res], dtype=np.int64)
    y = np.array([r.im for r in res], dtype=np.int64)
    # Overflow guard for the int64 fast path: |Re(n r conj(m))| <= |n||r||m|.
    bound = math.sqrt(Nmax) * math.sqrt(max(r.norm() for r in res)) * math.sqrt(den)
    if bound >= INT64_SAFE:
        # Exact big-int fallback, one residue at a time.
        total = 0.0
        w_s = s.tolist()
        w_t = t.tolist()
        for r in res:
            w = r * m.conj()
            acc = 0 + 0j
            for i in range(len(w_s)):
                num = (w_s[i] * w.re - w_t[i] * w.im) % den
                ang = 2.0 * math.pi * num / den
                acc += avec[i] * complex(math.cos(ang), math.sin(ang))
            total += abs(acc) ** 2
        return total
    u, v = m.re, m.im
    # Re(n r conj(m)) = Re(n r) u + Im(n r) v with n = s+ti, r = x+yi.
    A = np.outer(s, x) - np.outer(t, y)
    B = np.outer(s, y) + np.outer(t, x)
    P = (A * u + B * v) % den
    phases = np.exp((2j * np.pi / den) * P)
    sums = avec @ phases
    return float(np.sum(np.abs(sums) ** 2))


def lhs_T(family: ModuliFamily, a: CoefficientSeq, budget: int | None = None) -> float:
    """The exact double sum T over the family's moduli and reduced residues."""
    s, t, avec = a.arrays()
    total = 0.0
    spent = 0
    for q, m in family.moduli():
        nres = m.norm()  # upper bound on the residue count
        spent += nres
        if budget is not None and spent > budget:
            raise BudgetExceededError(
                f"residue enumeration budget {budget} exceeded at modulus {m}"
            )
        total += _modulus_T(q, m, s, t, avec, a.N)
    return total


def lhs_T_vector(family: ModuliFamily, a: CoefficientSeq) -> float:
    """T via the R^2 vector-phase form, as an independent float path.

    Phases are ((xu+yv) s + (xv-yu) t)/N(m) computed in floating point
    with no modular reduction; agreement with lhs_T checks the
    algebraic identity between the two displays.
    """
    s, t, avec = a.arrays()
    sf = s.astype(np.float64)
    tf = t.astype(np.float64)
    total = 0.0
    for q, m in family.moduli():
        den = float(m.norm())
        u, v = m.re, m.im
        for r in reduced_residues(q, m):
            x, y = r.re, r.im
            c1 = (x * u + y * v) / den
            c2 = (x * v - y * u) / den
            ang = 2.0 * np.pi * (c1 * sf + c2 * tf)
            val = np.sum(avec * np.exp(1j * ang))
            total += abs(val) ** 2
    return total


def bounds(
    Q: float,
    N: float,
    Z: float,
    k: int = 2,
    eps: float = 0.0,
    C: float = 1.0,
) -> dict[str, float]:
    """All comparison bounds, each as C * (QN)^eps * formula * Z.

    huxley: Q^2 + N (all moduli); thm1: Q^3 + Q^2 sqrt(N) + sqrt(Q) N
    (square moduli; also the square-norm bound); thm2 with kap = 2^(k-1):
    Q^(k+1) + N Q^(1-1/kap) + N^(1-1/kap) Q^(1+k/kap); conjecture:
    N + Q^(k+1).
    """
    if Q < 1 or N < 1:
        raise ValueError("Q and N must be >= 1")
    if Z < 0:
        raise ValueError("Z must be nonnegative")
    kap = 2 ** (k - 1)
    scale = C * (Q * N) ** eps * Z
    return {
        "huxley": scale * (Q * Q + N),
        "thm1": scale * (Q**3 + Q * Q * math.sqrt(N) + math.sqrt(Q) * N),
        "thm2": scale * (Q ** (k + 1) + N * Q ** (1 - 1 / kap) + N ** (1 - 1 / kap) * Q ** (1 + k / kap)),
        "conjecture": scale * (N + Q ** (k + 1)),
        "square_norm": scale * (Q**3 + Q * Q * math.sqrt(N) + math.sqrt(Q) * N),
    }
