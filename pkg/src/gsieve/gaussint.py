"""Exact arithmetic in the ring of Gaussian integers Z[i].

Everything here is pure integer arithmetic: norms, nearest-rounding
division, Euclidean gcd, residue systems, the Euler phi analogue,
modular inverses, factorization into Gaussian primes, and the
distance-to-nearest-Gaussian-integer used by the spacing counts.
Python integers are unbounded, so there is no overflow to guard
against; all results are deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from sympy import factorint

__all__ = [
    "GaussInt",
    "ResidueSystem",
    "Factorization",
    "NotInvertibleError",
    "ZERO",
    "ONE",
    "I",
    "norm",
    "divrem",
    "gcd",
    "canonical_associate",
    "residue_system",
    "gaussian_phi",
    "inv_mod",
    "factor",
    "divisor_count",
    "divisors",
    "nearest_gaussian_distance",
    "nearest_gaussian_distance_sq",
    "reduced_residue_sq",
]

# Trial-factoring guard for `factor`; norms beyond this are refused loudly.
DEFAULT_FACTOR_NORM_LIMIT = 2**50


class NotInvertibleError(ValueError):
    """Raised when an element has no inverse modulo the given modulus."""


@dataclass(frozen=True)
class GaussInt:
    """A Gaussian integer re + im*i with exact integer components."""

    re: int
    im: int

    def __add__(self, other: "GaussInt") -> "GaussInt":
        return GaussInt(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussInt") -> "GaussInt":
        return GaussInt(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "GaussInt":
        return GaussInt(-self.re, -self.im)

    def __mul__(self, other: "GaussInt") -> "GaussInt":
        return GaussInt(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __pow__(self, e: int) -> "GaussInt":
        if e < 0:
            raise ValueError("negative exponent on a GaussInt")
        out = ONE
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def conj(self) -> "GaussInt":
        return GaussInt(self.re, -self.im)

    def norm(self) -> int:
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_unit(self) -> bool:
        return self.norm() == 1

    def to_complex(self) -> complex:
        return complex(self.re, self.im)

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"

    def __repr__(self) -> str:
        return f"GaussInt({self.re}, {self.im})"


ZERO = GaussInt(0, 0)
ONE = GaussInt(1, 0)
I = GaussInt(0, 1)

UNITS = (ONE, I, GaussInt(-1, 0), GaussInt(0, -1))


def norm(z: GaussInt) -> int:
    """N(z) = Re(z)^2 + Im(z)^2, exact and multiplicative."""
    return z.re * z.re + z.im * z.im


def _round_half_down(p: int, n: int) -> int:
    """Nearest integer to p/n (n > 0); ties round toward -infinity."""
    # ceil((2p - n) / (2n)); for p/n = m + 1/2 this yields m.
    return -((n - 2 * p) // (2 * n))


def divrem(a: GaussInt, b: GaussInt) -> tuple[GaussInt, GaussInt]:
    """Nearest-rounding division: a = q*b + r with N(r) <= N(b)/2.

    The quotient is the componentwise nearest Gaussian integer to a/b,
    ties rounding toward negative infinity in each coordinate, so the
    result is deterministic.
    """
    if b.is_zero():
        raise ZeroDivisionError("division by zero GaussInt")
    n = b.norm()
    t = a * b.conj()
    q = GaussInt(_round_half_down(t.re, n), _round_half_down(t.im, n))
    r = a - q * b
    return q, r


def canonical_associate(z: GaussInt) -> GaussInt:
    """The unique associate of z with re > 0, im >= 0 (zero maps to zero)."""
    if z.is_zero():
        return ZERO
    for u in UNITS:
        w = z * u
        if w.re > 0 and w.im >= 0:
            return w
    raise AssertionError("unreachable: every nonzero z has such an associate")


def gcd(a: GaussInt, b: GaussInt) -> GaussInt:
    """Greatest common divisor, normalized to the canonical associate."""
    if a.is_zero() and b.is_zero():
        raise ValueError("gcd(0, 0) is undefined")
    while not b.is_zero():
        _, r = divrem(a, b)
        a, b = b, r
    return canonical_associate(a)


@dataclass(frozen=True)
class ResidueSystem:
    """Representatives of Z[i]/(m), complete or reduced, one per class."""

    modulus: GaussInt
    representatives: tuple[GaussInt, ...]
    reduced_flag: bool

    def __len__(self) -> int:
        return len(self.representatives)

    def __iter__(self):
        return iter(self.representatives)


def reduce_mod(w: GaussInt, m: GaussInt) -> GaussInt:
    """Canonical representative of w in the fundamental parallelogram of (m).

    The parallelogram is {x*m + y*im : x, y in [0, 1)}; membership is
    decided with exact integer arithmetic.
    """
    if m.is_zero():
        raise ZeroDivisionError("reduction modulo zero")
    n = m.norm()
    # Coordinates of w in the basis (m, i*m): x = Re(w*conj(m))/n, y = Im(w*conj(m))/n.
    t = w * m.conj()
    qx = t.re // n
    qy = t.im // n
    return w - GaussInt(qx * m.re - qy * m.im, qx * m.im + qy * m.re)


def residue_system(m: GaussInt, reduced: bool = False) -> ResidueSystem:
    """Enumerate one representative per residue class modulo m.

    Representatives are the Gaussian integers inside the half-open
    fundamental parallelogram of the lattice m*Z[i].  The complete
    system has exactly N(m) elements; the reduced one keeps classes
    coprime to m and has gaussian_phi(m) elements.
    """
    if m.is_zero():
        raise ZeroDivisionError("residue system modulo zero")
    n = m.norm()
    u, v = m.re, m.im
    # Integer bounding box of the parallelogram with corners 0, m, i*m, m + i*m.
    xs = [0, u, -v, u - v]
    ys = [0, v, u, v + u]
    reps: list[GaussInt] = []
    for a in range(min(xs), max(xs) + 1):
        for b in range(min(ys), max(ys) + 1):
            # (x, y) coordinates of a+bi in basis (m, i*m), times n.
            cx = u * a + v * b
            cy = -v * a + u * b
            if 0 <= cx < n and 0 <= cy < n:
                reps.append(GaussInt(a, b))
    assert len(reps) == n, f"parallelogram enumeration found {len(reps)} != N(m) = {n}"
    if reduced:
        reps = [r for r in reps if gcd_is_unit(r, m)]
    reps.sort(key=lambda z: (z.norm(), z.re, z.im))
    return ResidueSystem(m, tuple(reps), reduced)


def gcd_is_unit(a: GaussInt, b: GaussInt) -> bool:
    """True iff gcd(a, b) is a unit (with gcd(0, m) treated as m)."""
    if a.is_zero() and b.is_zero():
        return False
    return gcd(a, b).is_unit()


@dataclass(frozen=True)
class Factorization:
    """unit * prod(p_i**e_i) with canonical-associate primes."""

    unit: GaussInt
    prime_powers: tuple[tuple[GaussInt, int], ...]

    def value(self) -> GaussInt:
        out = self.unit
        for p, e in self.prime_powers:
            out = out * p**e
        return out


def _split_prime(p: int) -> GaussInt:
    """A Gaussian prime above a rational prime p = 1 mod 4."""
    # Square root of -1 mod p from a quadratic non-residue, then gcd with p.
    for x in range(2, p):
        t = pow(x, (p - 1) // 4, p)
        if (t * t) % p == p - 1:
            return canonical_associate(gcd(GaussInt(p, 0), GaussInt(t, 1)))
    raise AssertionError(f"no sqrt(-1) mod {p}")


def factor(m: GaussInt, norm_limit: int = DEFAULT_FACTOR_NORM_LIMIT) -> Factorization:
    """Factor m into canonical Gaussian primes times a unit.

    Rational primes dividing N(m) are handled by type: 2 ramifies as
    (1+i)^2, p = 3 mod 4 stays inert, p = 1 mod 4 splits into a
    conjugate pair.
    """
    if m.is_zero():
        raise ValueError("cannot factor zero")
    n = m.norm()
    if n > norm_limit:
        raise ValueError(f"norm {n} exceeds the factoring limit {norm_limit}")
    if n == 1:
        return Factorization(m, ())
    powers: list[tuple[GaussInt, int]] = []
    rest = m
    for p, _ in sorted(factorint(n).items()):
        if p == 2:
            g = GaussInt(1, 1)
            e = 0
            while True:
                q, r = divrem(rest, g)
                if not r.is_zero():
                    break
                rest, e = q, e + 1
            if e:
                powers.append((canonical_associate(g), e))
        elif p % 4 == 3:
            g = GaussInt(p, 0)
            e = 0
            while True:
                q, r = divrem(rest, g)
                if not r.is_zero():
                    break
                rest, e = q, e + 1
            if e:
                powers.append((canonical_associate(g), e))
        else:
            pi = _split_prime(p)
            for g in (pi, pi.conj()):
                g = canonical_associate(g)
                e = 0
                while True:
                    q, r = divrem(rest, g)
                    if not r.is_zero():
                        break
                    rest, e = q, e + 1
                if e:
                    powers.append((g, e))
    assert rest.is_unit(), f"leftover non-unit {rest} factoring {m}"
    powers.sort(key=lambda pe: (pe[0].norm(), pe[0].re, pe[0].im))
    return Factorization(rest, tuple(powers))


def gaussian_phi(m: GaussInt) -> int:
    """|(Z[i]/(m))^*| = N(m) * prod over primes p | m of (1 - 1/N(p))."""
    if m.is_zero():
        raise ValueError("phi of zero is undefined")
    out = 1
    for p, e in factor(m).prime_powers:
        np = p.norm()
        out *= np ** (e - 1) * (np - 1)
    return out


def inv_mod(r: GaussInt, m: GaussInt) -> GaussInt:
    """Inverse of r modulo m, as a canonical residue representative."""
    if m.is_zero():
        raise ZeroDivisionError("inversion modulo zero")
    # Extended Euclid: track s with s*r = current remainder mod m.
    a, b = r, m
    sa, sb = ONE, ZERO
    while not b.is_zero():
        q, rr = divrem(a, b)
        a, b = b, rr
        sa, sb = sb, sa - q * sb
    if not a.is_unit():
        raise NotInvertibleError(f"{r} is not invertible mod {m}")
    # a = unit = sa*r + t*m for some t; divide by the unit.
    inv_unit = a.conj()  # inverse of a unit is its conjugate
    return reduce_mod(sa * inv_unit, m)


def divisors(d: GaussInt) -> list[GaussInt]:
    """All divisors of d up to units, as canonical associates."""
    if d.is_zero():
        raise ValueError("zero has infinitely many divisors")
    out = [ONE]
    for p, e in factor(d).prime_powers:
        out = [w * p**j for w in out for j in range(e + 1)]
    return sorted((canonical_associate(w) for w in out), key=lambda z: (z.norm(), z.re, z.im))


def divisor_count(d: GaussInt) -> int:
    """Number of divisors of d counted up to units: prod(e_i + 1)."""
    if d.is_zero():
        raise ValueError("zero has infinitely many divisors")
    out = 1
    for _, e in factor(d).prime_powers:
        out *= e + 1
    return out


def nearest_gaussian_distance(z: complex) -> float:
    """Distance from z in C to the nearest Gaussian integer."""
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError("nearest_gaussian_distance needs a finite input")
    dx = z.real - round(z.real)
    dy = z.imag - round(z.imag)
    return math.hypot(dx, dy)


def nearest_gaussian_distance_sq(z: complex) -> float:
    """Squared distance from z to the nearest Gaussian integer."""
    d = nearest_gaussian_distance(z)
    return d * d


def reduced_residue_sq(num_re: int, num_im: int, den: int) -> tuple[int, int]:
    """Exact torus reduction of (num_re + i*num_im)/den, den > 0.

    Returns (m1, m2) with m1 = min over integers z of |num_re - z*den|
    and likewise m2, so the squared distance of the point to the
    nearest Gaussian integer is (m1^2 + m2^2)/den^2 exactly.
    """
    if den <= 0:
        raise ValueError("denominator must be positive")
    r1 = num_re % den
    r2 = num_im % den
    return min(r1, den - r1), min(r2, den - r2)


def nearest_gaussian_distance_exact(num_re: int, num_im: int, den: int) -> Fraction:
    """Exact squared torus distance of a rational point, as a Fraction."""
    m1, m2 = reduced_residue_sq(num_re, num_im, den)
    return Fraction(m1 * m1 + m2 * m2, den * den)
