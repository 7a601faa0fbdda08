"""Rank-2 lattices in the plane and a numerical Poisson summation engine.

Lattices are stored with exact rational bases (Fractions), so point
enumeration in disks and dual-lattice construction are exact and
deterministic.  The Poisson engine evaluates both sides of the shifted
lattice summation identity with certified truncation tails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .gaussint import GaussInt

__all__ = [
    "Lattice2",
    "ShiftedLattice",
    "Z2",
    "lattice_from_modulus",
    "dual",
    "points_in_disk",
    "poisson_two_sides",
    "tail_bound_disk",
    "truncation_radius",
]

Vec2 = tuple[Fraction, Fraction]


@dataclass(frozen=True)
class Lattice2:
    """Full-rank lattice {x*b1 + y*b2 : x, y integers} with exact basis."""

    b1: Vec2
    b2: Vec2

    def __post_init__(self):
        if self.covolume() == 0:
            raise ValueError("basis vectors are linearly dependent")

    def det(self) -> Fraction:
        return self.b1[0] * self.b2[1] - self.b1[1] * self.b2[0]

    def covolume(self) -> Fraction:
        return abs(self.det())

    def point(self, x: int, y: int) -> Vec2:
        return (
            x * self.b1[0] + y * self.b2[0],
            x * self.b1[1] + y * self.b2[1],
        )

    def basis_length_bound(self) -> float:
        """Max Euclidean length of the two basis vectors (float, rounded up)."""
        return max(
            math.hypot(float(self.b1[0]), float(self.b1[1])),
            math.hypot(float(self.b2[0]), float(self.b2[1])),
        ) * (1 + 1e-12)

    def covering_radius_bound(self) -> float:
        """Upper bound on the covering radius: half the cell diameter."""
        l1 = math.hypot(float(self.b1[0]), float(self.b1[1]))
        l2 = math.hypot(float(self.b2[0]), float(self.b2[1]))
        return 0.5 * (l1 + l2) * (1 + 1e-12)


@dataclass(frozen=True)
class ShiftedLattice:
    """The point set shift + lattice."""

    lattice: Lattice2
    shift: Vec2


Z2 = Lattice2((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1)))


def lattice_from_modulus(q: GaussInt) -> Lattice2:
    """The lattice of multiples of q in C, viewed as vectors in R^2.

    For q = u + iv the basis is (u, v), (-v, u) and the covolume is
    exactly N(q).
    """
    if q.is_zero():
        raise ValueError("modulus lattice needs a nonzero q")
    u, v = Fraction(q.re), Fraction(q.im)
    return Lattice2((u, v), (-v, u))


def dual(lat: Lattice2) -> Lattice2:
    """Dual lattice: vectors with integer inner product against lat.

    Rows of (M^-1)^T where M has the basis vectors as rows; exact in
    rational arithmetic, and covolume(dual) = 1/covolume(lat).
    """
    d = lat.det()
    a, b = lat.b1
    c, e = lat.b2
    # inverse of [[a, b], [c, e]] is [[e, -b], [-c, a]]/d; transpose rows.
    return Lattice2((e / d, -c / d), (-b / d, a / d))


def points_in_disk(sl: ShiftedLattice, radius) -> list[Vec2]:
    """All points of the shifted lattice with |p| <= radius, exactly.

    Comparison |p|^2 <= radius^2 is done in rational arithmetic
    (radius is converted via Fraction, which is exact for floats).
    Output order is (squared norm, x, y), reproducible bit for bit.
    """
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    lat, shift = sl.lattice, sl.shift
    r = Fraction(radius)
    r2 = r * r
    # Coefficient bounds from the dual basis: x = (p - shift) . d1.
    dl = dual(lat)
    snorm = math.hypot(float(shift[0]), float(shift[1]))
    out: list[tuple[Fraction, Vec2]] = []
    len_d1 = math.hypot(float(dl.b1[0]), float(dl.b1[1]))
    len_d2 = math.hypot(float(dl.b2[0]), float(dl.b2[1]))
    rf = float(radius)
    xmax = int(math.ceil((rf + snorm) * len_d1 + 1e-9)) + 1
    ymax = int(math.ceil((rf + snorm) * len_d2 + 1e-9)) + 1
    for x in range(-xmax, xmax + 1):
        for y in range(-ymax, ymax + 1):
            px = shift[0] + x * lat.b1[0] + y * lat.b2[0]
            py = shift[1] + x * lat.b1[1] + y * lat.b2[1]
            n2 = px * px + py * py
            if n2 <= r2:
                out.append((n2, (px, py)))
    out.sort(key=lambda t: (t[0], t[1][0], t[1][1]))
    return [p for _, p in out]


def tail_bound_disk(
    envelope: Callable[[float], float],
    covolume: float,
    covering_radius: float,
    R: float,
) -> float:
    """Certified bound on sum of envelope(|y|) over lattice points with |y| > R.

    envelope must be a nonincreasing pointwise bound.  Points with
    |y| in [m, m+1) number at most area(annulus widened by the covering
    radius) / covolume, since each point owns a cell of that area within
    the widened annulus.
    """
    total = 0.0
    m = max(0, int(math.floor(R)))
    for _ in range(100000):
        outer = m + 1 + covering_radius
        inner = max(0.0, m - covering_radius)
        count = math.pi * (outer * outer - inner * inner) / covolume
        term = count * envelope(max(m, R))
        total += term
        if term < 1e-300 or term < 1e-18 * total:
            return total
        m += 1
    raise RuntimeError("tail bound did not converge; envelope decays too slowly")


def truncation_radius(
    envelope: Callable[[float], float],
    covolume: float,
    covering_radius: float,
    tol: float,
) -> float:
    """Smallest integer radius whose certified tail is below tol."""
    R = 1.0
    while tail_bound_disk(envelope, covolume, covering_radius, R) > tol:
        R += 1.0
        if R > 1e6:
            raise RuntimeError("no radius with certified tail below tolerance")
    return R


def poisson_two_sides(
    weight,
    lat: Lattice2,
    shift: Sequence[float],
    B: float,
    tol: float,
) -> tuple[float, complex, float]:
    """Evaluate both sides of shifted-lattice Poisson summation.

    lhs = sum over y in shift+lat of f(y/B);
    rhs = B^d / covol(lat) * sum over x in dual(lat) of e(shift.x) fhat(B x).

    Each sum is truncated where its certified tail is below tol/2; the
    returned discrepancy |lhs - rhs| is below tol whenever the weight's
    transform is exact.
    """
    if weight.f_hat is None:
        raise ValueError(f"weight {weight.kind!r} has no closed-form transform")
    if B <= 0:
        raise ValueError("scale B must be positive")
    if weight.d != 2:
        raise ValueError("the lattice engine is two-dimensional")

    covol = float(lat.covolume())
    rho = lat.covering_radius_bound()
    a = (Fraction(shift[0]), Fraction(shift[1]))

    # Direct side: f(y/B) for y in a + lat.
    env = weight.envelope
    R1 = truncation_radius(lambda r: env(r / B), covol, rho, tol / 2)
    lhs = 0.0
    for px, py in points_in_disk(ShiftedLattice(lat, a), Fraction(math.ceil(R1))):
        lhs += weight.f((float(px) / B, float(py) / B)).real

    # Dual side: e(a.x) fhat(Bx) for x in dual(lat).
    dl = dual(lat)
    dcovol = float(dl.covolume())
    drho = dl.covering_radius_bound()
    henv = weight.hat_envelope
    scale = B * B / covol
    R2 = truncation_radius(lambda r: scale * henv(B * r), dcovol, drho, tol / 2)
    rhs = 0 + 0j
    for px, py in points_in_disk(ShiftedLattice(dl, (Fraction(0), Fraction(0))), Fraction(math.ceil(R2))):
        phase = a[0] * px + a[1] * py  # rational: shift and dual points are exact
        hv = weight.f_hat((B * float(px), B * float(py)))
        rhs += cmath_exp2pi(float(phase - math.floor(phase))) * hv
    rhs *= scale
    return lhs, rhs, abs(lhs - rhs)


def cmath_exp2pi(t: float) -> complex:
    """e(t) = exp(2*pi*i*t)."""
    ang = 2.0 * math.pi * (t - math.floor(t))
    return complex(math.cos(ang), math.sin(ang))
