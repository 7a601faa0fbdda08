"""Analytic weight functions with closed-form Fourier transforms.

The transform convention is fhat(x) = integral f(y) e(-x.y) dy with
e(t) = exp(2*pi*i*t) and no extra normalization.  Each weight carries
nonincreasing radial envelopes for itself and its transform, used to
certify every truncation in the lattice and exponential-sum modules.
numeric_fourier is the independent quadrature oracle for all closed
forms.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from scipy.integrate import dblquad, quad
from scipy.special import sici

from .gaussint import GaussInt

__all__ = [
    "WeightFn",
    "kappa",
    "fejer_value",
    "fejer_hat_value",
    "psi1_value",
    "psi2_value",
    "fejer",
    "psi1",
    "psi2",
    "g_and_hat_square",
    "g_and_hat_k",
    "numeric_fourier",
]


def kappa(k: int) -> int:
    """2^(k-1), the exponent accumulated by iterated differencing."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return 2 ** (k - 1)


@dataclass
class WeightFn:
    """A nonnegative weight on R^d with optional closed-form transform.

    f and f_hat map a d-vector of floats to a number; envelope and
    hat_envelope are nonincreasing pointwise bounds as functions of the
    Euclidean radius.
    """

    kind: str
    d: int
    f: Callable[[Sequence[float]], complex]
    f_hat: Optional[Callable[[Sequence[float]], complex]]
    envelope: Callable[[float], float]
    hat_envelope: Callable[[float], float]
    params: dict = field(default_factory=dict)


def _sinc_sq_quarter(t: float) -> float:
    """(sin(pi t) / (2 t))^2 with the removable singularity at t = 0."""
    if t == 0.0:
        return (math.pi / 2.0) ** 2
    return (math.sin(math.pi * t) / (2.0 * t)) ** 2


def fejer_value(d: int, x: Sequence[float]) -> float:
    """Squared-sinc product; >= 1 on the box max|x_k| <= 1/2."""
    out = 1.0
    for k in range(d):
        out *= _sinc_sq_quarter(x[k])
    return out


def fejer_hat_value(d: int, s: Sequence[float]) -> float:
    """(pi^2/4)^d times a product of unit tents; supported in the unit box."""
    out = (math.pi * math.pi / 4.0) ** d
    for k in range(d):
        out *= max(1.0 - abs(s[k]), 0.0)
    return out


def fejer(d: int) -> WeightFn:
    if d < 1:
        raise ValueError("dimension must be >= 1")
    peak = (math.pi * math.pi / 4.0) ** d

    def env(r: float) -> float:
        # max|x_k| >= r/sqrt(d), and the remaining factors are <= (pi/2)^2.
        if r == 0.0:
            return peak
        worst = min((math.pi / 2.0) ** 2, d / (4.0 * r * r))
        return (math.pi * math.pi / 4.0) ** (d - 1) * worst

    return WeightFn(
        kind="fejer",
        d=d,
        f=lambda x: fejer_value(d, x),
        f_hat=lambda s: fejer_hat_value(d, s),
        envelope=env,
        hat_envelope=lambda r: peak if r < math.sqrt(d) else 0.0,
        params={"d": d},
    )


def psi1_value(z: complex) -> float:
    """exp(-pi N(z)); equal to its own transform under the e(-x.y) kernel."""
    return math.exp(-math.pi * (z.real * z.real + z.imag * z.imag))


def psi1() -> WeightFn:
    gauss = lambda x: math.exp(-math.pi * (x[0] * x[0] + x[1] * x[1]))
    env = lambda r: math.exp(-math.pi * r * r)
    return WeightFn(kind="psi1", d=2, f=gauss, f_hat=gauss, envelope=env, hat_envelope=env)


def psi2_value(k: int, z: complex) -> float:
    """exp(-(pi/kappa) N(z)^(1/k)).

    Evaluated at a k-th power w^k / Q0^(k/2), the k-th root collapses and
    the value is exactly exp(-(pi/kappa) N(w)/Q0), a Gaussian in w.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    n = z.real * z.real + z.imag * z.imag
    return math.exp(-(math.pi / kappa(k)) * n ** (1.0 / k))


def psi2(k: int) -> WeightFn:
    kap = kappa(k)
    f = lambda x: psi2_value(k, complex(x[0], x[1]))
    env = lambda r: math.exp(-(math.pi / kap) * r ** (2.0 / k))
    return WeightFn(kind="psi2", d=2, f=f, f_hat=None, envelope=env,
                    hat_envelope=lambda r: math.inf, params={"k": k})


def _e(t: float) -> complex:
    ang = 2.0 * math.pi * t
    return complex(math.cos(ang), math.sin(ang))


def g_and_hat_square(alpha: GaussInt, Q0: float) -> WeightFn:
    """The differenced square-moduli weight and its exact transform.

    g(z) = Psi2((z1+iz2)^2) * Psi2((alpha/sqrt(Q0) + z1+iz2)^2) with the
    k=2 choice Psi2(w) = exp(-(pi/2) sqrt(N(w))), which collapses to a
    product of two Gaussians; the transform is the displayed closed form
    exp(-pi N(alpha)/(4 Q0)) * e(-Re(conj(alpha) z)/(2 sqrt(Q0))) * exp(-pi N(z)).
    """
    if Q0 <= 0:
        raise ValueError("Q0 must be positive")
    a1 = alpha.re / math.sqrt(Q0)
    a2 = alpha.im / math.sqrt(Q0)
    pref = math.exp(-math.pi / (4.0 * Q0) * alpha.norm())
    sq = math.sqrt(Q0)

    def f(x: Sequence[float]) -> float:
        z1, z2 = x[0], x[1]
        return math.exp(
            -math.pi / 2.0 * (z1 * z1 + z2 * z2 + (a1 + z1) ** 2 + (a2 + z2) ** 2)
        )

    def f_hat(x: Sequence[float]) -> complex:
        # Shifting the Gaussian by c = alpha/(2 sqrt(Q0)) multiplies the
        # transform by e(+x.c) under the e(-x.y) kernel.
        z1, z2 = x[0], x[1]
        phase = (alpha.re * z1 + alpha.im * z2) / (2.0 * sq)
        return pref * _e(phase) * math.exp(-math.pi * (z1 * z1 + z2 * z2))

    return WeightFn(
        kind="g_square",
        d=2,
        f=f,
        f_hat=f_hat,
        envelope=lambda r: math.exp(-math.pi / 2.0 * r * r),
        hat_envelope=lambda r: pref * math.exp(-math.pi * r * r),
        params={"alpha": alpha, "Q0": Q0},
    )


def g_and_hat_k(alphas: Sequence[GaussInt], k: int, Q0: float) -> WeightFn:
    """The depth-(k-1) differenced weight for k-th power moduli.

    g(z) = prod over u in {0,1}^(k-1) of Psi2((z1+iz2 + u.alpha/sqrt(Q0))^k);
    completing squares gives a single Gaussian whose transform is the
    prefactor exp(-pi sum N(alpha_v)/(4 Q0)) times a linear phase times
    exp(-pi N(z)).  The modulus of the transform is bounded by
    prefactor * exp(-pi N(z)), returned as hat_envelope.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    if len(alphas) != k - 1:
        raise ValueError(f"need {k - 1} shift directions, got {len(alphas)}")
    if Q0 <= 0:
        raise ValueError("Q0 must be positive")
    kap = kappa(k)
    sq = math.sqrt(Q0)
    shifts = []
    for u in itertools.product((0, 1), repeat=k - 1):
        s1 = sum(uv * a.re for uv, a in zip(u, alphas)) / sq
        s2 = sum(uv * a.im for uv, a in zip(u, alphas)) / sq
        shifts.append((s1, s2))
    pref = math.exp(-math.pi / (4.0 * Q0) * sum(a.norm() for a in alphas))
    t1 = sum(a.re for a in alphas)
    t2 = sum(a.im for a in alphas)

    def f(x: Sequence[float]) -> float:
        z1, z2 = x[0], x[1]
        acc = 0.0
        for s1, s2 in shifts:
            acc += (z1 + s1) ** 2 + (z2 + s2) ** 2
        return math.exp(-(math.pi / kap) * acc)

    def f_hat(x: Sequence[float]) -> complex:
        z1, z2 = x[0], x[1]
        phase = (t1 * z1 + t2 * z2) / (2.0 * sq)
        return pref * _e(phase) * math.exp(-math.pi * (z1 * z1 + z2 * z2))

    return WeightFn(
        kind="g_k",
        d=2,
        f=f,
        f_hat=f_hat,
        envelope=lambda r: math.exp(-(math.pi / kap) * r * r),
        hat_envelope=lambda r: pref * math.exp(-math.pi * r * r),
        params={"alphas": tuple(alphas), "k": k, "Q0": Q0},
    )


class QuadratureError(RuntimeError):
    """The adaptive quadrature could not certify the requested accuracy."""


def _box_radius(envelope: Callable[[float], float], tol: float) -> float:
    """Radius R with a certified bound sum_{m>=R} env(m)*pi*(2m+1+2) < tol."""
    for R in range(1, 2000):
        tail = 0.0
        m = R
        while True:
            term = envelope(float(m)) * math.pi * (2 * m + 3)
            tail += term
            if term < 1e-300 or term < 1e-18 * tail:
                break
            m += 1
            if m > R + 100000:
                raise QuadratureError("integrand envelope decays too slowly")
        if tail < tol:
            return float(R)
    raise QuadratureError("no finite truncation box for this weight")


def numeric_fourier(weight: WeightFn, point: Sequence[float], tol: float = 1e-8) -> complex:
    """Quadrature evaluation of the transform integral at one point.

    This is the independent oracle for every closed-form transform: it
    never consults weight.f_hat.  Raises QuadratureError when the
    requested accuracy cannot be certified.
    """
    if weight.kind == "fejer":
        # Separable with only quadratic decay: use 1D oscillatory quadrature
        # per coordinate (QAWF on the half line; the integrand is even).
        out = 1.0 + 0.0j
        for s in point[: weight.d]:
            out *= _fejer_1d_transform(s, tol)
        return out

    R = _box_radius(weight.envelope, tol / 4.0)

    def re_part(y2: float, y1: float) -> float:
        t = point[0] * y1 + point[1] * y2
        return (weight.f((y1, y2)) * _e(-t)).real

    def im_part(y2: float, y1: float) -> float:
        t = point[0] * y1 + point[1] * y2
        return (weight.f((y1, y2)) * _e(-t)).imag

    kwargs = dict(epsabs=tol / 8.0, epsrel=0.0)
    re_val, re_err = dblquad(re_part, -R, R, -R, R, **kwargs)
    im_val, im_err = dblquad(im_part, -R, R, -R, R, **kwargs)
    if re_err + im_err > tol:
        raise QuadratureError(
            f"quadrature error {re_err + im_err:.3e} exceeds tolerance {tol:.3e}"
        )
    return complex(re_val, im_val)


def _cos_over_x2_tail(a: float, X: float) -> float:
    """integral_X^inf cos(a x) / x^2 dx, exactly, by parts via Si."""
    if a == 0.0:
        return 1.0 / X
    a = abs(a)
    si, _ = sici(a * X)
    return math.cos(a * X) / X - a * (math.pi / 2.0 - si)


def _fejer_1d_transform(s: float, tol: float) -> float:
    """2 * integral_0^inf (sin(pi x)/(2x))^2 cos(2 pi s x) dx.

    Finite part by adaptive quadrature; on [X, inf) the integrand is
    [cos(2 pi s x) - cos(2 pi (1+s) x)/2 - cos(2 pi (1-s) x)/2] / (8 x^2)
    and each term integrates in closed form through the sine integral.
    """
    s = abs(s)
    X = 40.0
    val, err = quad(lambda x: _sinc_sq_quarter(x) * math.cos(2.0 * math.pi * s * x),
                    0.0, X, epsabs=tol / 4.0, epsrel=0.0, limit=2000)
    if err > tol / 2.0:
        raise QuadratureError(f"1D quadrature error {err:.3e} > {tol / 2.0:.3e}")
    tail = (
        _cos_over_x2_tail(2.0 * math.pi * s, X)
        - 0.5 * _cos_over_x2_tail(2.0 * math.pi * (1.0 + s), X)
        - 0.5 * _cos_over_x2_tail(2.0 * math.pi * (1.0 - s), X)
    ) / 8.0
    return 2.0 * (val + tail)
