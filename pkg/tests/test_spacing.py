"""Spacing counts over the Farey points attached to a modulus family.

The sample points are x_r = conj(r)/conj(m) on the torus (R/Z)^2; K is
the worst-case number of points within the sieve's spacing radius of a
single point.  A direct Fraction-arithmetic double loop serves as the
oracle for all three vectorized counting rules.
"""

from fractions import Fraction

import pytest

from gsieve.sieve import CoefficientSeq, ModuliFamily, make_coefficients
from gsieve.spacing import (
    LS_CONSTANT,
    FareyPoint,
    K_euclid,
    K_norm,
    K_sup,
    farey_points,
    theorem_ls_check,
)


def torus_diff_sq(p, q):
    """Exact squared torus distance between two Farey points, via Fractions."""
    dx = Fraction(p.num_re, p.den) - Fraction(q.num_re, q.den)
    dy = Fraction(p.num_im, p.den) - Fraction(q.num_im, q.den)
    out = []
    for t in (dx, dy):
        frac = t - t.__floor__()
        out.append(min(frac, 1 - frac) ** 2)
    return out[0] + out[1]


def brute_K_euclid(points, N):
    best = 0
    NF = Fraction(N)
    for p in points:
        c = sum(1 for q in points if NF * torus_diff_sq(p, q) <= 2)
        best = max(best, c)
    return best


def brute_K_sup(points, N):
    best = 0
    NF = Fraction(N)
    for p in points:
        c = 0
        for q in points:
            dx = Fraction(p.num_re, p.den) - Fraction(q.num_re, q.den)
            dy = Fraction(p.num_im, p.den) - Fraction(q.num_im, q.den)
            ds = []
            for t in (dx, dy):
                frac = t - t.__floor__()
                ds.append(min(frac, 1 - frac))
            if NF * max(ds) ** 2 <= 1:
                c += 1
        best = max(best, c)
    return best


def test_farey_points_are_reduced_and_distinct():
    fam = ModuliFamily(kind="squares", Q=4, associates="units")
    pts = farey_points(fam)
    frs = {(Fraction(p.num_re, p.den), Fraction(p.num_im, p.den)) for p in pts}
    # distinct residues mod distinct moduli may still coincide on the
    # torus only when the reduced fractions agree; reduced residues of a
    # fixed modulus never do
    per_mod = {}
    for p in pts:
        per_mod.setdefault((p.m.re, p.m.im), []).append(
            (Fraction(p.num_re, p.den), Fraction(p.num_im, p.den)))
    for vals in per_mod.values():
        assert len(vals) == len(set(vals))
    assert len(frs) <= len(pts)


@pytest.mark.parametrize("kind,Q,k", [("all", 4, 1), ("squares", 3, 2), ("power", 2, 3)])
def test_K_against_brute_force(kind, Q, k):
    fam = ModuliFamily(kind=kind, Q=Q, k=k, associates="units")
    pts = farey_points(fam)
    for N in (2, 5, 10, 25):
        assert K_euclid(pts, N) == brute_K_euclid(pts, N)
        assert K_sup(pts, N) == brute_K_sup(pts, N)


@pytest.mark.parametrize("kind,Q,k", [("all", 5, 1), ("squares", 4, 2), ("power", 3, 3)])
def test_K_formulations_agree(kind, Q, k):
    fam = ModuliFamily(kind=kind, Q=Q, k=k)
    pts = farey_points(fam)
    for N in (4, 9, 36):
        ke = K_euclid(pts, N)
        kn = K_norm(pts, N)
        ks = K_sup(pts, N)
        assert ke == kn
        assert ks <= ke
        assert ke >= 1


def test_K_with_rational_N():
    fam = ModuliFamily(kind="all", Q=3, associates="units")
    pts = farey_points(fam)
    # exact boundary handling: N given as a Fraction must not lose ties
    assert K_euclid(pts, Fraction(9, 2)) == brute_K_euclid(pts, Fraction(9, 2))


def test_theorem_ls_holds_on_small_grid():
    for kind, Q, k in (("all", 4, 1), ("squares", 4, 2), ("power", 3, 3)):
        fam = ModuliFamily(kind=kind, Q=Q, k=k)
        pts = farey_points(fam)
        for coeffs in (make_coefficients("all_ones", 9),
                       make_coefficients("random", 16, seed=3)):
            T, bound, ratio = theorem_ls_check(pts, coeffs)
            assert T <= bound * (1 + 1e-9)
            assert ratio == pytest.approx(T / bound)


def test_ls_constant_value():
    import math
    assert LS_CONSTANT == pytest.approx(math.pi ** 4 / 4)
