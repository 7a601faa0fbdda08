"""Weight functions and their closed-form Fourier transforms.

The quadrature oracle (adaptive integration with certified truncation)
is the independent referee for every closed form here.
"""

import math
import random

import numpy as np
import pytest

from gsieve.gaussint import GaussInt
from gsieve.weights import (
    QuadratureError,
    WeightFn,
    fejer,
    fejer_hat_value,
    fejer_value,
    g_and_hat_k,
    g_and_hat_square,
    kappa,
    numeric_fourier,
    psi1,
    psi2,
    psi2_value,
)


def test_kappa():
    assert [kappa(k) for k in range(1, 6)] == [1, 2, 4, 8, 16]


def test_fejer_basic_values():
    # phi(0) = (pi/2)^(2d), hat(0) = (pi^2/4)^d
    for d in (1, 2):
        assert fejer_value(d, (0.0,) * d) == pytest.approx((math.pi / 2) ** (2 * d))
        assert fejer_hat_value(d, (0.0,) * d) == pytest.approx((math.pi ** 2 / 4) ** d)
    # the tent vanishes outside [-1, 1]^d
    assert fejer_hat_value(1, (1.0,)) == 0.0
    assert fejer_hat_value(2, (0.5, -1.2)) == 0.0


def test_fejer_majorizes_unit_disk_indicator():
    """phi(x) >= 1 on [-1/2, 1/2]^2 scaled: phi >= indicator of |x_i| <= 1/2."""
    rng = random.Random(1)
    for _ in range(200):
        x = (rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5))
        assert fejer_value(2, x) >= 1.0


def test_fejer_transform_vs_quadrature():
    rng = random.Random(4)
    w1, w2 = fejer(1), fejer(2)
    for _ in range(8):
        s = rng.uniform(-1.5, 1.5)
        assert w1.f_hat((s,)) == pytest.approx(
            numeric_fourier(w1, (s,), tol=1e-8).real, abs=1e-6)
        pt = (rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))
        assert w2.f_hat(pt) == pytest.approx(
            numeric_fourier(w2, pt, tol=1e-8).real, abs=1e-6)
    # edge of the tent support
    assert numeric_fourier(w1, (1.0,), tol=1e-8).real == pytest.approx(0.0, abs=1e-6)


def test_psi1_self_dual():
    w = psi1()
    rng = random.Random(7)
    for _ in range(6):
        pt = (rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))
        assert w.f(pt) == pytest.approx(w.f_hat(pt), rel=1e-12)
        assert w.f_hat(pt) == pytest.approx(
            numeric_fourier(w, pt, tol=1e-9).real, abs=1e-7)


def test_psi2_collapses_on_kth_powers():
    """Psi2 evaluated at q^k / Q0^(k/2) is a plain Gaussian in N(q)."""
    for k in (2, 3, 4):
        Q0 = 7.0
        w = psi2(k)
        for q in (GaussInt(1, 0), GaussInt(2, 1), GaussInt(3, 2)):
            z = complex(q.re, q.im) ** k / Q0 ** (k / 2.0)
            expect = math.exp(-math.pi / kappa(k) * q.norm() / Q0)
            assert w.f((z.real, z.imag)) == pytest.approx(expect, rel=1e-12)
        assert psi2_value(k, 0) == 1.0


def test_g_square_transform_vs_quadrature():
    rng = random.Random(12)
    for alpha in (GaussInt(1, 0), GaussInt(1, 1), GaussInt(2, -1)):
        w = g_and_hat_square(alpha, 4.0)
        for _ in range(4):
            pt = (rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))
            num = numeric_fourier(w, pt, tol=1e-8)
            assert abs(w.f_hat(pt) - num) < 1e-6


def test_g_k_transform_vs_quadrature():
    rng = random.Random(13)
    cases = [
        ([GaussInt(1, 0), GaussInt(0, 1)], 3),
        ([GaussInt(1, 1), GaussInt(1, -1)], 3),
    ]
    for alphas, k in cases:
        w = g_and_hat_k(alphas, k, 5.0)
        for _ in range(3):
            pt = (rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0))
            num = numeric_fourier(w, pt, tol=1e-8)
            assert abs(w.f_hat(pt) - num) < 1e-6
            # the modulus envelope dominates the transform
            r = math.hypot(*pt)
            assert abs(w.f_hat(pt)) <= w.hat_envelope(r) * (1 + 1e-12)


def test_quadrature_error_reported():
    # an envelope too flat for the tolerance must raise, not return junk
    flat = WeightFn(kind="flat", d=2, f=lambda x: 1.0 / (1.0 + x[0] ** 2 + x[1] ** 2),
                    f_hat=None, envelope=lambda r: 1.0 / (1.0 + r * r),
                    hat_envelope=None, params={})
    with pytest.raises((QuadratureError, RuntimeError)):
        numeric_fourier(flat, (0.3, 0.4), tol=1e-10)
