"""Real-place matrix coefficients and local Rallis zeta integrals.

Measure conventions are fixed here rather than by callers:

* the identity component of the orthogonal similitude group carries the
  Cartan measure ``16 pi^2 sinh(2 t1) sinh(2 t2) dt1 dt2`` times probability
  measures on the two compact factors;
* GL(2, R) carries the Iwasawa measure ``du dx t1 dx t2 |t1|^-1 dk`` with
  ``dx t = dt/|t|`` and vol(O(2)) = 1, whose Cartan form is
  ``8 pi sinh(r1 - r2) dr1 dr2 dk dk'`` (r1 > r2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numkit import PrecisionConfig, integrate_halfline, integrate_halfline_nd, integrate_tensor_hermite
from .special import bessel_k, gamma, log_gamma

__all__ = [
    "DSWeight",
    "PSPairing",
    "f_n0_closed",
    "f_n0_quad",
    "weil_phi_ds",
    "weil_phi_ps",
    "ds_matrix_coeff",
    "l_std_ds",
    "ds_inner_closed",
    "ds_inner_quad",
    "ds_double_closed",
    "ds_double_quad",
    "ds_rallis_zeta_quad",
    "ds_rallis_zeta_assembled",
    "ds_rallis_zeta_closed",
    "bessel_norm",
    "l_adjoint_gl2",
    "ps_pairing_constant",
    "f2o_check",
    "f1o_constant",
    "zonal_spherical",
    "zonal_product_check",
    "zonal_mellin_check",
    "l_std_ps",
    "doubling_zeta",
    "ps_rallis_zeta",
    "KAK_CONSTANT_H1",
    "KAK_CONSTANT_GL2",
]

PI = math.pi
KAK_CONSTANT_H1 = 16 * PI**2
# matched against the Iwasawa measure on exp(-pi tr g g^t) |det g|^(s+1)
KAK_CONSTANT_GL2 = 8 * PI
F_N0_MAX = 6


def _zeta_r(s):
    """pi^(-s/2) Gamma(s/2), complex-safe."""
    s = complex(s)
    return complex(np.exp(-0.5 * s * math.log(PI) + log_gamma(s / 2)))


@dataclass(frozen=True)
class DSWeight:
    """Minimal weights (kappa1, kappa2) of a holomorphic-type discrete series."""

    kappa1: int
    kappa2: int

    def __post_init__(self) -> None:
        k1, k2 = self.kappa1, self.kappa2
        if int(k1) != k1 or int(k2) != k2:
            raise ValueError("minimal weights are integers")
        if k1 < 1 or k2 < 1:
            raise ValueError("minimal weights must be positive")
        if (k1 + k2) % 2:
            raise ValueError("kappa1 + kappa2 must be even")

    @classmethod
    def from_blattner(cls, lambda1: int, lambda2: int) -> "DSWeight":
        return cls(lambda1 - lambda2, lambda1 + lambda2)

    def ordered(self) -> "DSWeight":
        """The same weight with kappa1 >= kappa2 (the pair enters symmetrically)."""
        return self if self.kappa1 >= self.kappa2 else DSWeight(self.kappa2, self.kappa1)

    @property
    def lambda1(self) -> int:
        return (self.kappa1 + self.kappa2) // 2

    @property
    def lambda2(self) -> int:
        return (self.kappa2 - self.kappa1) // 2


@dataclass(frozen=True)
class PSPairing:
    """GL(2) parameters mu1, mu2 of the two principal series factors."""

    mu1: complex = 0.0
    mu2: complex = 0.0

    def __post_init__(self) -> None:
        m1, m2 = complex(self.mu1), complex(self.mu2)
        object.__setattr__(self, "mu1", m1)
        object.__setattr__(self, "mu2", m2)
        if abs(m1.real) >= 0.5 or abs(m2.real) >= 0.5:
            raise ValueError("need |Re mu| < 1/2")

    @property
    def chi(self) -> tuple[complex, complex]:
        """Exponents of the induced GL(2) representation."""
        return self.mu1 + self.mu2, self.mu1 - self.mu2


# --------------------------------------------------------------------------
# Weil representation coefficients
# --------------------------------------------------------------------------


def _brackets(a, b):
    return a * b + 1 / (a * b), a / b + b / a


def f_n0_closed(n: int, a: float, b: float) -> float:
    """Gaussian moment f_n(0) in closed form."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if not (a > 0 and b > 0):
        raise ValueError("a and b must be positive")
    p, m = _brackets(a, b)
    return PI ** (-n) * math.factorial(n) / (p * m) * (1 / p + 1 / m) ** n


def f_n0_quad(n: int, a: float, b: float, order: int | None = None) -> float:
    """f_n(0) from its defining four-dimensional Gaussian integral.

    The quadratic form is diagonal, so rescaling each axis turns the integral
    into a tensor Gauss-Hermite problem with a polynomial of degree 2n, which an
    (n+1)-point rule integrates exactly.
    """
    if not 0 <= n <= F_N0_MAX:
        raise ValueError(f"f_n0_quad is limited to 0 <= n <= {F_N0_MAX}")
    if not (a > 0 and b > 0):
        raise ValueError("a and b must be positive")
    coef = np.array([a**-2 + b**-2, a**-2 + b**2, a**2 + b**-2, a**2 + b**2])
    scale = 1 / np.sqrt(PI * coef)

    def poly(y1, y2, y3, y4):
        x1, x2, x3, x4 = y1 * scale[0], y2 * scale[1], y3 * scale[2], y4 * scale[3]
        left = x1 / a - 1j * x2 / a - 1j * a * x3 - a * x4
        right = x1 / b + 1j * b * x2 + 1j * x3 / b - b * x4
        return (left * right) ** n

    val = integrate_tensor_hermite(poly, order or n + 1, 4) * float(np.prod(scale))
    return float(np.real(val))


def weil_phi_ds(w: DSWeight, a: float, b: float) -> float:
    """Weil coefficient on the torus [m(a), m(b)] for a discrete series weight."""
    w = w.ordered()
    l1, l2 = w.lambda1, w.lambda2
    p, m = _brackets(a, b)
    return (
        PI ** (-l1 + l2)
        * math.gamma(l1 + 1)
        * math.gamma(-l2 + 1)
        * p**-2
        * m**-2
        * (1 / p + 1 / m) ** (l1 - l2)
    )


def weil_phi_ps(a: float, b: float) -> float:
    p, m = _brackets(a, b)
    return p**-2 * m**-2


def ds_matrix_coeff(w: DSWeight, t1, t2):
    """Normalized Whittaker pairing at [m(e^t1), m(e^t2)], rotations set to 1."""
    w = w.ordered()
    return 2.0 ** (-2 * w.lambda1 - 2) * np.cosh(t1) ** (-w.kappa1) * np.cosh(t2) ** (-w.kappa2)


# --------------------------------------------------------------------------
# discrete series zeta integral
# --------------------------------------------------------------------------


def l_std_ds(w: DSWeight, s: float) -> float:
    w = w.ordered()
    l1, l2 = w.lambda1, w.lambda2
    return 4 * (2 * PI) ** (-2 * s - l1 + l2 + 1) * math.gamma(s + l1 - 1) * math.gamma(s - l2)


def ds_inner_closed(kappa1: int, t2: float) -> float:
    return 0.5 / (1 + kappa1) * (1 + math.cosh(2 * t2)) ** (-1 - kappa1)


def ds_inner_quad(kappa1: int, t2: float, cfg: PrecisionConfig | None = None) -> float:
    """The t1-integral of sinh(2 t1) (cosh 2t1 + cosh 2t2)^(-2-kappa1)."""
    c2 = math.cosh(2 * t2)
    res = integrate_halfline(
        lambda t: np.sinh(2 * t) * (np.cosh(2 * t) + c2) ** (-2.0 - kappa1),
        cfg=cfg or PrecisionConfig(target_rel_tol=1e-13, max_nodes=20000),
        x_max=400.0,
    )
    return float(res.value)


def ds_double_closed(w: DSWeight) -> float:
    w = w.ordered()
    return 2.0 ** (-3 - w.kappa1) / (w.lambda1 * (1 + w.kappa1))


def ds_double_quad(w: DSWeight, cfg: PrecisionConfig | None = None) -> float:
    """Double integral of cosh(t2)^(1-2 l2) sinh(2t1) sinh(t2) / (cosh 2t1 + cosh 2t2)^(2+k1)."""
    w = w.ordered()
    k1, l2 = w.kappa1, w.lambda2

    def f(t1, t2):
        return (
            np.cosh(t2) ** (1.0 - 2 * l2)
            * np.sinh(2 * t1)
            * np.sinh(t2)
            / (np.cosh(2 * t1) + np.cosh(2 * t2)) ** (2.0 + k1)
        )

    res = integrate_halfline_nd(
        f,
        2,
        cfg or PrecisionConfig(target_rel_tol=1e-12),
        h0=0.125,
        limits=[(1e-30, 400.0)] * 2,
        max_levels=3,
    )
    return float(res.value)


def ds_rallis_zeta_quad(w: DSWeight, cfg: PrecisionConfig | None = None) -> float:
    """Integral of Weil coefficient times Whittaker pairing over the identity component.

    Evaluated in Cartan coordinates straight from the two coefficient
    formulas, without the hyperbolic simplifications.
    """
    w = w.ordered()

    def f(t1, t2):
        a, b = np.exp(t1), np.exp(t2)
        return (
            weil_phi_ds(w, a, b)
            * ds_matrix_coeff(w, t1, t2)
            * np.sinh(2 * t1)
            * np.sinh(2 * t2)
        )

    res = integrate_halfline_nd(
        f,
        2,
        cfg or PrecisionConfig(target_rel_tol=1e-12),
        h0=0.125,
        limits=[(1e-30, 300.0)] * 2,
        max_levels=3,
    )
    return KAK_CONSTANT_H1 * float(res.value)


def _s_factor(in_S: bool) -> float:
    return 0.25 if in_S else 1.0


def ds_rallis_zeta_assembled(w: DSWeight, in_S: bool, cfg: PrecisionConfig | None = None) -> float:
    """Local zeta value from the quadrature and the standard L-factor."""
    zr2, zr4 = 1 / PI, PI**-2
    return zr2 * zr4 / l_std_ds(w, 1.0) * ds_rallis_zeta_quad(w, cfg) * _s_factor(in_S)


def ds_rallis_zeta_closed(w: DSWeight, in_S: bool) -> float:
    w = w.ordered()
    return 2.0 ** (-w.lambda1 - w.lambda2 - 3) / (1 + w.kappa1) * _s_factor(in_S)


# --------------------------------------------------------------------------
# principal series pieces
# --------------------------------------------------------------------------


def bessel_norm(p: PSPairing, i: int, cfg: PrecisionConfig | None = None) -> tuple[complex, complex]:
    """Integral over R of K_mu(2 pi |t|)^2 against 2^-2 Gamma(1/2 + mu) Gamma(1/2 - mu)."""
    if i not in (1, 2):
        raise ValueError("i is 1 or 2")
    mu = p.mu1 if i == 1 else p.mu2
    # the integrand behaves like x^(-2|Re mu|) at 0; push the cut far enough
    x_min = 1e-250 if abs(mu.real) > 0.3 else 1e-60
    res = integrate_halfline(
        lambda x: bessel_k(mu, x) ** 2,
        cfg=cfg or PrecisionConfig(target_rel_tol=1e-12, max_nodes=20000),
        x_min=x_min,
        x_max=60.0,
    )
    lhs = complex(res.value) / PI
    rhs = 0.25 * complex(gamma(0.5 + mu) * gamma(0.5 - mu))
    return _tidy(lhs), _tidy(rhs)


def _tidy(z: complex, rel: float = 1e-12):
    """Drop an imaginary part that is rounding noise."""
    z = complex(z)
    return z.real if abs(z.imag) <= rel * max(abs(z.real), 1e-300) else z


def l_adjoint_gl2(mu: complex, s: float = 1.0) -> complex:
    """Adjoint L-factor of the GL(2) principal series with exponents +-mu."""
    return _zeta_r(s) * _zeta_r(s + 2 * mu) * _zeta_r(s - 2 * mu)


def ps_pairing_constant(p: PSPairing, cfg: PrecisionConfig | None = None) -> float:
    """Normalized pairing of the spherical Whittaker vector, from quadrature Bessel norms."""
    n1, _ = bessel_norm(p, 1, cfg)
    n2, _ = bessel_norm(p, 2, cfg)
    ratio = (_zeta_r(2) / _zeta_r(1)) ** 2
    val = ratio * n1 * n2 / (l_adjoint_gl2(p.mu1) * l_adjoint_gl2(p.mu2))
    return float(np.real(val))


def f2o_check(s: float, cfg: PrecisionConfig | None = None) -> tuple[float, float]:
    """Gaussian Mellin integral over GL(2, R) against its zeta-product value.

    The left side integrates exp(-2 pi tr x x^t) |det x|^(2s+2) in Iwasawa
    coordinates, which splits into three one-dimensional integrals.
    """
    if not s > -0.5:
        raise ValueError("the integral diverges for s <= -1/2")
    cfg = cfg or PrecisionConfig(target_rel_tol=1e-13, max_nodes=20000)

    def line(power: float) -> float:
        # integral over R^x of exp(-2 pi t^2) |t|^power dx t
        res = integrate_halfline(lambda t: 2 * np.exp(-2 * PI * t * t) * t ** (power - 1), cfg=cfg, x_max=20.0)
        return float(res.value)

    u = float(integrate_halfline(lambda x: 2 * np.exp(-2 * PI * x * x), cfg=cfg, x_max=20.0).value)
    # |t1|^(2s+2) |t1|^-1 and |t2|^(2s+2)
    lhs = u * line(2 * s + 1) * line(2 * s + 2)
    rhs = 2.0 ** (-2 * s - 2) * _zeta_r(2 * s + 1).real * _zeta_r(2 * s + 2).real
    return lhs, rhs


def f1o_constant(s: float) -> float:
    """Value of the degenerate section at the base point; taken as given, not derived."""
    return 2 * _zeta_r(2 * s + 2).real / _zeta_r(2 * s + 3).real


# -- zonal spherical function ------------------------------------------------

_ZONAL_STEP = 0.25
_ZONAL_TAIL = 40.0


def _circle_mean_power(big, small, power: complex):
    """Mean over the circle of (big cos^2 + small sin^2)^power, big >= small > 0.

    The angle is parametrized by tan(theta) = e^w; the trapezoid rule in w is
    spectrally accurate because the integrand is analytic in |Im w| < pi/2, and
    it resolves the peak near theta = 0 however large big/small gets.
    """
    big = np.asarray(big, dtype=float)
    small = np.asarray(small, dtype=float)
    span = 0.5 * float(np.max(np.log(big / small)))
    w = np.arange(-_ZONAL_TAIL, span + _ZONAL_TAIL, _ZONAL_STEP)
    shape = big.shape + (1,)
    lb = np.log(big).reshape(shape)
    ls = np.log(small).reshape(shape)
    e2w = 2 * w
    log_quad = np.logaddexp(lb, ls + e2w)
    log_one = np.logaddexp(0.0, e2w)
    terms = np.exp(power * log_quad - (power + 1) * log_one + w)
    return (2 / PI) * _ZONAL_STEP * terms.sum(axis=-1)


def zonal_spherical(p: PSPairing, g, dual: bool = False):
    """Bi-O(2)-invariant coefficient of the induced representation, equal to 1 at 1.

    ``g`` is a 2x2 matrix or a stack of them. The value is the O(2)-average of
    the spherical vector |t1|^(chi1+1/2) |t2|^(chi2-1/2), where t2 is the norm
    of the bottom row of k g.
    """
    g = np.asarray(g, dtype=float)
    chi1, chi2 = p.chi
    if dual:
        chi1, chi2 = -chi1, -chi2
    det = np.abs(np.linalg.det(g))
    gram = g @ np.swapaxes(g, -1, -2)
    tr = gram[..., 0, 0] + gram[..., 1, 1]
    disc = np.sqrt(np.maximum((gram[..., 0, 0] - gram[..., 1, 1]) ** 2 + 4 * gram[..., 0, 1] ** 2, 0.0))
    big = 0.5 * (tr + disc)
    small = det**2 / big
    # |t2|^2 = v^t g g^t v on the unit circle, |t1| = |det| / |t2|
    power = 0.5 * (chi2 - chi1 - 1)
    out = det ** (chi1 + 0.5) * _circle_mean_power(big, small, power)
    return out[()] if np.ndim(out) == 0 else out


def _rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.stack([np.stack([c, -s], -1), np.stack([s, c], -1)], -2)


def zonal_product_check(p: PSPairing, g1, g2, nodes: int = 64) -> tuple[complex, complex]:
    """(mean over O(2) of omega(g1 k g2), omega(g1) omega(g2)), the mean by periodic trapezoid."""
    theta = 2 * PI * np.arange(nodes) / nodes
    k = _rotation(theta)
    refl = np.diag([1.0, -1.0])
    g1, g2 = np.asarray(g1, float), np.asarray(g2, float)
    mats = np.concatenate([g1 @ k @ g2, g1 @ (refl @ k) @ g2])
    lhs = complex(np.mean(zonal_spherical(p, mats)))
    rhs = complex(zonal_spherical(p, g1) * zonal_spherical(p, g2))
    return lhs, rhs


def _zonal_mellin_one(p: PSPairing, s: float, dual: bool, cfg: PrecisionConfig) -> complex:
    """Integral over GL(2, R) of exp(-pi tr g g^t) omega(g) |det g|^(s+1), Cartan coordinates.

    With r1 = m + d/2, r2 = m - d/2 and rho = e^(2m), the measure is
    8 pi sinh(d) dd drho / (2 rho).
    """

    def f(d, rho):
        shape = np.broadcast_shapes(d.shape, rho.shape)
        omega = np.empty(shape, dtype=complex)
        d_full = np.broadcast_to(d, shape)
        rho_full = np.broadcast_to(rho, shape)
        # one row of d at a time keeps the angle-by-grid array small
        for i in range(shape[0]):
            a = np.zeros(shape[1:] + (2, 2))
            a[..., 0, 0] = np.sqrt(rho_full[i]) * np.exp(d_full[i] / 2)
            a[..., 1, 1] = np.sqrt(rho_full[i]) * np.exp(-d_full[i] / 2)
            omega[i] = zonal_spherical(p, a, dual)
        return omega * np.exp(-2 * PI * rho * np.cosh(d)) * rho**s * 0.5 * np.sinh(d)

    res = integrate_halfline_nd(
        f, 2, cfg, h0=0.0625, limits=[(1e-20, 60.0), (1e-60, 60.0)], max_levels=1, strict=False
    )
    return KAK_CONSTANT_GL2 * complex(res.value)


def zonal_mellin_check(p: PSPairing, s: float, cfg: PrecisionConfig | None = None) -> tuple[complex, complex]:
    """Product of the two Gaussian zonal integrals against the standard L-factor at s + 1/2."""
    chi = max(abs(p.chi[0].real), abs(p.chi[1].real))
    if not s + 0.5 > chi:
        raise ValueError("zonal integrals diverge unless s + 1/2 > max |Re(mu1 +- mu2)|")
    cfg = cfg or PrecisionConfig(target_rel_tol=1e-9)
    lhs = _zonal_mellin_one(p, s, False, cfg) * _zonal_mellin_one(p, s, True, cfg)
    rhs = l_std_ps(p, s + 0.5)
    return _tidy(lhs, 1e-9), _tidy(rhs)


def l_std_ps(p: PSPairing, s: float) -> complex:
    """Standard L-factor: the product of zeta_R(s +- mu1 +- mu2)."""
    chi1, chi2 = p.chi
    return _zeta_r(s + chi1) * _zeta_r(s - chi1) * _zeta_r(s + chi2) * _zeta_r(s - chi2)


def doubling_zeta(p: PSPairing, s: float = 0.5, cfg: PrecisionConfig | None = None) -> tuple[complex, complex]:
    """Doubling integral at s assembled from its pieces, against its closed form.

    The pieces are the pairing constant at 1, the ratio of the two sections at
    the base point (numerator taken as given, denominator by quadrature) and
    the zonal Gaussian integrals.
    """
    f2_lhs, _ = f2o_check(s, cfg)
    zonal, _ = zonal_mellin_check(p, s, cfg)
    assembled = ps_pairing_constant(p, cfg) * f1o_constant(s) / f2_lhs * zonal
    closed = 2.0 ** (2 * s - 1) * l_std_ps(p, s + 0.5) / (_zeta_r(2 * s + 1) * _zeta_r(2 * s + 3))
    return _tidy(assembled, 1e-9), _tidy(closed)


def ps_rallis_zeta(p: PSPairing, cfg: PrecisionConfig | None = None) -> float:
    """Local zeta value at a spherical principal series place, assembled numerically."""
    z_half, _ = doubling_zeta(p, 0.5, cfg)
    phi_at_one = weil_phi_ps(1.0, 1.0)
    val = phi_at_one * _zeta_r(2) * _zeta_r(4) / l_std_ps(p, 1.0) * z_half
    return float(np.real(val))
