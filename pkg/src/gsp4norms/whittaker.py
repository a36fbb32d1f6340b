"""Archimedean Whittaker functions on the torus of GSp(4).

Two families are covered. For holomorphic-type discrete series the value is a
double Mellin-Barnes integral of four Gamma factors, and the direct side is
built from the one-dimensional integral h_n. For spherical principal series the
Mellin-Barnes side carries a 3F2 at one, and the direct side is a double
integral of two K-Bessel functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .numkit import (
    ContourSpec,
    PrecisionConfig,
    QuadratureRule,
    QuadResult,
    contour_plane,
    integrate_halfline,
    integrate_halfline_nd,
)
from .special import bessel_k, hermite, hyp3f2_unit_with_error, log_gamma

__all__ = [
    "DSParams",
    "PSParams",
    "TorusPoint",
    "ContourError",
    "j_closed",
    "j_quad",
    "h_fn",
    "h_mellin_rhs",
    "h_mellin_check",
    "ds_prefactor",
    "ds_whittaker_direct",
    "ds_whittaker_mb",
    "ds_normalization",
    "ps_whittaker_mb",
    "ps_whittaker_direct",
    "ps_normalization",
    "default_ds_contours",
    "default_ps_contours",
    "saddle_ps_contours",
]

PI = math.pi


class ContourError(ValueError):
    """A contour abscissa outside the region where the integral representation holds."""


@dataclass(frozen=True)
class DSParams:
    """Blattner parameter (lambda1, lambda2) of a discrete series."""

    lambda1: int
    lambda2: int

    def __post_init__(self) -> None:
        l1, l2 = self.lambda1, self.lambda2
        if int(l1) != l1 or int(l2) != l2:
            raise ValueError("Blattner parameters are integers")
        if not 1 - l1 <= l2 <= 0:
            raise ValueError(f"need 1 - lambda1 <= lambda2 <= 0, got ({l1}, {l2})")
        if (l1 - l2) % 2:
            raise ValueError("lambda1 - lambda2 must be even")

    @property
    def kappa1(self) -> int:
        return self.lambda1 - self.lambda2

    @property
    def kappa2(self) -> int:
        return self.lambda1 + self.lambda2


@dataclass(frozen=True)
class PSParams:
    """Spherical principal series parameters (lambda1, lambda2) and sign epsilon."""

    lambda1: complex
    lambda2: complex
    epsilon: int = 0

    def __post_init__(self) -> None:
        l1, l2 = complex(self.lambda1), complex(self.lambda2)
        object.__setattr__(self, "lambda1", l1)
        object.__setattr__(self, "lambda2", l2)
        if abs(l1.real) + abs(l2.real) >= 1:
            raise ValueError("need |Re lambda1| + |Re lambda2| < 1")
        if self.epsilon not in (0, 1):
            raise ValueError("epsilon is 0 or 1")

    @property
    def mu1(self) -> complex:
        return (self.lambda1 + self.lambda2) / 2

    @property
    def mu2(self) -> complex:
        return (self.lambda1 - self.lambda2) / 2


@dataclass(frozen=True)
class TorusPoint:
    """The torus element diag(a1, a2, 1/a1, 1/a2)."""

    a1: float = 1.0
    a2: float = 1.0

    def __post_init__(self) -> None:
        if not (self.a1 > 0 and self.a2 > 0):
            raise ValueError("torus coordinates must be positive")


# --------------------------------------------------------------------------
# J_n: a Hermite-Gaussian integral with a closed form
# --------------------------------------------------------------------------


def _check_j(r1: float, r2: float, r3: float) -> None:
    if not r1 > 0:
        raise ValueError("J_n needs r1 > 0")
    if not r2 * r2 + r3 > 0:
        raise ValueError("J_n needs r2^2 + r3 > 0")


def j_closed(n: int, r1: float, r2: float, r3: float) -> float:
    """2^(n-1) pi^(n/2) (R + r2)^n R^-1 exp(-2 pi r1 (R + r2)), R = sqrt(r2^2 + r3)."""
    _check_j(r1, r2, r3)
    root = math.sqrt(r2 * r2 + r3)
    # R + r2 without cancellation when r2 < 0
    shifted = root + r2 if r2 >= 0 else r3 / (root - r2)
    return 2.0 ** (n - 1) * PI ** (n / 2) * shifted**n / root * math.exp(-2 * PI * r1 * shifted)


def j_quad(n: int, r1: float, r2: float, r3: float, cfg: PrecisionConfig | None = None) -> float:
    """Quadrature of the integral over y > 0 of
    y^(n-2) H_n(sqrt(pi)(r1 y + r2/y)) exp(-pi (r1 y + r2/y)^2 - pi r3 / y^2)."""
    _check_j(r1, r2, r3)
    sq = math.sqrt(PI)

    def f(y: np.ndarray) -> np.ndarray:
        u = r1 * y + r2 / y
        expo = -PI * (r1 * r1 * y * y + 2 * r1 * r2 + (r2 * r2 + r3) / (y * y))
        return y ** (n - 2) * hermite(n, sq * u) * np.exp(expo)

    cfg = cfg or PrecisionConfig(target_rel_tol=1e-12, max_nodes=20000)
    return float(integrate_halfline(f, QuadratureRule(), cfg).value)


# --------------------------------------------------------------------------
# h_n and its double Mellin transform
# --------------------------------------------------------------------------


def _h_integrand(n: int, a1, a2, y, with_gauss: bool = True):
    """Integrand of h_n(a1, a2) in y; broadcasts over all three arguments.

    ``with_gauss=False`` drops the factor exp(2 pi a2^2) from the exponent.
    """
    s = np.sqrt(a1 * a1 / (y * y) + a2 * a2 * y * y)
    # S - a2 y = (a1/y)^2 / (S + a2 y), free of cancellation
    diff = (a1 * a1 / (y * y)) / (s + a2 * y)
    # (a2/y) S - a2^2 = (a2/y)(S - a2 y)
    expo = y * y + (a2 / y) * diff + (y / a2) * s
    if not with_gauss:
        expo = expo + a2 * a2
    return a1 * a2 ** (n + 1) * y ** (-n - 2) * diff**n / s * np.exp(-2 * PI * expo)


def h_fn(n: int, a1: float, a2: float, cfg: PrecisionConfig | None = None) -> float:
    """h_n(a1, a2) by exp-sinh quadrature of its defining integral."""
    return _h_quad(n, a1, a2, True, cfg)


def _h_quad(n: int, a1: float, a2: float, with_gauss: bool, cfg: PrecisionConfig | None) -> float:
    if n < 0:
        raise ValueError("h_n needs n >= 0")
    if not (a1 > 0 and a2 > 0):
        raise ValueError("h_n needs a1, a2 > 0")
    cfg = cfg or PrecisionConfig(target_rel_tol=1e-12, max_nodes=20000)
    res = integrate_halfline(lambda y: _h_integrand(n, a1, a2, y, with_gauss), QuadratureRule(), cfg)
    return float(res.value)


def _check_mellin_strip(s1: complex, s2: complex) -> None:
    if not ((s1 + s2).real + 1 > 0 and s1.real > 0 > s2.real):
        raise ContourError("need Re(s1+s2+1) > 0 and Re s1 > 0 > Re s2")


def h_mellin_rhs(n: int, s1: complex, s2: complex) -> complex:
    """Gamma-product value of the double Mellin transform of h_n."""
    s1, s2 = complex(s1), complex(s2)
    _check_mellin_strip(s1, s2)
    logv = (
        (-n - 4) * math.log(2)
        + (-n - 1) * math.log(PI)
        - s1 / 2 * math.log(4 * PI**3)
        - s2 / 2 * math.log(4 * PI)
        + log_gamma((s1 + s2 + 2 * n + 1) / 2)
        + log_gamma((s1 + s2 + 1) / 2)
        + log_gamma(s1 / 2)
        + log_gamma(-s2 / 2)
    )
    return complex(np.exp(logv))


def h_mellin_check(
    n: int, s1: complex, s2: complex, cfg: PrecisionConfig | None = None
) -> tuple[complex, complex]:
    """(triple quadrature of the Mellin transform of h_n, Gamma-product value)."""
    s1, s2 = complex(s1), complex(s2)
    rhs = h_mellin_rhs(n, s1, s2)

    def f(x1, x2, y):
        weight = np.exp((s1 - 1) * np.log(x1) + (s2 - 1) * np.log(x2))
        return weight * _h_integrand(n, x1, x2, y)

    cfg = cfg or PrecisionConfig(target_rel_tol=1e-8)
    res = integrate_halfline_nd(
        f,
        3,
        cfg,
        h0=0.0625,
        limits=[(1e-40, 1e4), (1e-60, 1e40), (1e-100, 1e10)],
        max_levels=1,
        strict=False,
    )
    lhs = complex(res.value)
    if s1.imag == 0 and s2.imag == 0:
        lhs, rhs = lhs.real, rhs.real
    return lhs, rhs


# --------------------------------------------------------------------------
# discrete series
# --------------------------------------------------------------------------


def ds_prefactor(p: DSParams) -> float:
    """2^(-lambda1-4) pi^((-3 lambda1 + lambda2 - 5)/2)."""
    return 2.0 ** (-p.lambda1 - 4) * PI ** ((-3 * p.lambda1 + p.lambda2 - 5) / 2)


def ds_whittaker_direct(p: DSParams, t: TorusPoint, cfg: PrecisionConfig | None = None) -> float:
    """2 a1^(lambda1+1) a2^lambda2 exp(-2 pi a2^2) h_{-lambda2}(a1, a2)."""
    h = _h_quad(-p.lambda2, t.a1, t.a2, False, cfg)
    return 2.0 * t.a1 ** (p.lambda1 + 1) * t.a2**p.lambda2 * h


def default_ds_contours(height: float = 26.0, per_panel: int = 16) -> tuple[ContourSpec, ContourSpec]:
    nodes = max(64, int(per_panel * math.ceil(height)))
    return ContourSpec(1.0, height, nodes), ContourSpec(-0.5, height, nodes)


def _ds_log_integrand(p: DSParams, a1: float, a2: float):
    l1, l2 = p.lambda1, p.lambda2
    la = math.log(4 * PI**3 * a1 * a1)
    lb = math.log(4 * PI * a2 * a2)

    def logg(s1, s2):
        ssum = s1 + s2
        return (
            (-s1 + l1 + 1) / 2 * la
            + (-s2 + l2) / 2 * lb
            + log_gamma((ssum - 2 * l2 + 1) / 2)
            + log_gamma((ssum + 1) / 2)
            + log_gamma(s1 / 2)
            + log_gamma(-s2 / 2)
        )

    return logg


def _ds_contour_value(
    p: DSParams,
    t: TorusPoint,
    contours: tuple[ContourSpec, ContourSpec] | None,
    cfg: PrecisionConfig | None,
) -> QuadResult:
    c1, c2 = contours or default_ds_contours()
    if not (c1.abscissa + c2.abscissa + 1 > 0 and c1.abscissa > 0 > c2.abscissa):
        raise ContourError("DS contours need c1 + c2 + 1 > 0 and c1 > 0 > c2")
    logg = _ds_log_integrand(p, t.a1, t.a2)
    return contour_plane(lambda s1, s2: np.exp(logg(s1, s2)), c1, c2, cfg or PrecisionConfig(1e-9))


def ds_whittaker_mb(
    p: DSParams,
    t: TorusPoint,
    contours: tuple[ContourSpec, ContourSpec] | None = None,
    cfg: PrecisionConfig | None = None,
) -> float:
    """Double Mellin-Barnes value of the discrete-series Whittaker function at t."""
    res = _ds_contour_value(p, t, contours, cfg)
    return ds_prefactor(p) * math.exp(-2 * PI * t.a2**2) * complex(res.value).real


def ds_normalization(
    p: DSParams,
    contours: tuple[ContourSpec, ContourSpec] | None = None,
    cfg: PrecisionConfig | None = None,
) -> float:
    """The normalizing number W(1) of the discrete-series Whittaker function
    (the Mellin-Barnes value at the identity without the prefactor)."""
    res = _ds_contour_value(p, TorusPoint(1.0, 1.0), contours, cfg)
    return math.exp(-2 * PI) * complex(res.value).real


# --------------------------------------------------------------------------
# principal series
# --------------------------------------------------------------------------


def default_ps_contours(
    p: PSParams, height: float = 14.0, per_panel: int = 12
) -> tuple[ContourSpec, ContourSpec]:
    """Contours one unit to the right of the last poles."""
    c1 = max(abs(p.lambda1.real), abs(p.lambda2.real)) + 1.0
    c2 = max(abs(p.mu1.real), abs(p.mu2.real)) + 1.0
    nodes = max(64, int(per_panel * math.ceil(height)))
    return ContourSpec(c1, height, nodes), ContourSpec(c2, height, nodes)


def saddle_ps_contours(
    p: PSParams, t: TorusPoint, per_panel: int = 8, tail: float = 1e-10
) -> tuple[ContourSpec, ContourSpec]:
    """Contours through the minimum of |integrand| on the real plane.

    Near the poles the integrand is many orders of magnitude larger than the
    Whittaker value, and the double integral cancels down to it. At the real
    minimum there is essentially no cancellation. The height is grown until
    the integrand on the boundary of the square falls below ``tail`` times
    its value at the centre.
    """
    g = _ps_log_abs(p, t.a1, t.a2)
    lo1 = max(abs(p.lambda1.real), abs(p.lambda2.real)) + 0.5
    lo2 = max(abs(p.mu1.real), abs(p.mu2.real)) + 0.5
    c1, c2 = _argmin_plane(g, lo1, lo2)
    centre = float(g(np.array([[c1 + 0j]]), np.array([[c2 + 0j]]))[0, 0])
    height = 8.0
    while height < 120.0:
        edge = np.linspace(-height, height, 41)
        top = np.full_like(edge, height)
        s1 = np.concatenate([c1 + 1j * edge, c1 + 1j * top, c1 - 1j * top, c1 + 1j * edge])
        s2 = np.concatenate([c2 + 1j * top, c2 + 1j * edge, c2 + 1j * edge, c2 - 1j * top])
        if np.max(g(s1, s2)) < centre + math.log(tail):
            break
        height *= 1.25
    height = math.ceil(height)
    nodes = max(64, per_panel * height)
    return ContourSpec(c1, height, nodes), ContourSpec(c2, height, nodes)


def _argmin_plane(logabs, lo1: float, lo2: float) -> tuple[float, float]:
    """Grid search of a convex function on [lo1, lo1+60] x [lo2, lo2+60], refined twice."""
    x = lo1 + np.arange(0, 61, 1.0)
    y = lo2 + np.arange(0, 61, 1.0)
    for step in (1.0, 0.25, 0.0625):
        vals = logabs(x[:, None] + 0j, y[None, :] + 0j)
        i, j = np.unravel_index(np.argmin(vals), vals.shape)
        bx, by = x[i], y[j]
        x = np.maximum(lo1, bx + np.arange(-4, 5) * step / 4)
        y = np.maximum(lo2, by + np.arange(-4, 5) * step / 4)
    return float(bx), float(by)


def _ps_check_contours(p: PSParams, c1: ContourSpec, c2: ContourSpec) -> None:
    if not c1.abscissa > max(abs(p.lambda1.real), abs(p.lambda2.real)):
        raise ContourError("PS contour needs c1 > max |Re lambda_i|")
    if not c2.abscissa > max(abs(p.mu1.real), abs(p.mu2.real)):
        raise ContourError("PS contour needs c2 > max |Re (lambda1 +- lambda2)/2|")


def _ps_log_parts(p: PSParams, a1: float, a2: float):
    l1, l2, m1, m2 = p.lambda1, p.lambda2, p.mu1, p.mu2
    la = math.log(PI * a1 / a2)
    lb = math.log(PI * a2 * a2)

    def parts(s1, s2):
        s1b, s2b = np.broadcast_arrays(s1, s2)
        half = (s1b + s2b) / 2
        logv = (
            -s1b * la
            - s2b * lb
            + log_gamma((s1b + l1) / 2)
            + log_gamma((s1b - l1) / 2)
            + log_gamma((s1b + l2) / 2)
            + log_gamma((s1b - l2) / 2)
            + log_gamma(s2b / 2 + m1 / 2)
            + log_gamma(s2b / 2 - m1 / 2)
            + log_gamma(s2b / 2 + m2 / 2)
            + log_gamma(s2b / 2 - m2 / 2)
            - log_gamma(half + m1 / 2)
            - log_gamma(half - m1 / 2)
        )
        f32, _ = hyp3f2_unit_with_error(s1b / 2, s2b / 2 + m2 / 2, s2b / 2 - m2 / 2, half + m1 / 2, half - m1 / 2)
        return logv, f32

    return parts


def _ps_integrand(p: PSParams, a1: float, a2: float):
    parts = _ps_log_parts(p, a1, a2)

    def g(s1, s2):
        logv, f32 = parts(s1, s2)
        return np.exp(logv) * f32

    return g


def _ps_log_abs(p: PSParams, a1: float, a2: float):
    parts = _ps_log_parts(p, a1, a2)

    def g(s1, s2):
        logv, f32 = parts(s1, s2)
        with np.errstate(divide="ignore"):
            return logv.real + np.log(np.abs(f32))

    return g


def ps_whittaker_mb(
    p: PSParams,
    t: TorusPoint,
    contours: tuple[ContourSpec, ContourSpec] | None = None,
    cfg: PrecisionConfig | None = None,
    *,
    refine: bool = True,
) -> complex:
    """Double Mellin-Barnes value of the spherical Whittaker function at t."""
    c1, c2 = contours or saddle_ps_contours(p, t)
    _ps_check_contours(p, c1, c2)
    res = contour_plane(_ps_integrand(p, t.a1, t.a2), c1, c2, cfg or PrecisionConfig(1e-7), refine=refine)
    return 2.0**-4 * t.a1**2 * t.a2 * complex(res.value)


def ps_normalization(
    p: PSParams,
    contours: tuple[ContourSpec, ContourSpec] | None = None,
    cfg: PrecisionConfig | None = None,
    *,
    refine: bool = True,
) -> complex:
    """The normalizing number W(1) of the spherical Whittaker function."""
    return ps_whittaker_mb(p, TorusPoint(1.0, 1.0), contours, cfg, refine=refine)


def ps_whittaker_direct(p: PSParams, t: TorusPoint, cfg: PrecisionConfig | None = None) -> complex:
    """8 a1^2 a2 times the double integral over y1, y2 > 0 of
    K_mu1(2 pi y1^2) K_mu2(2 pi y2^2) exp(-pi Q(y)) / (y1 y2)."""
    a1, a2 = t.a1, t.a2
    m1, m2 = p.mu1, p.mu2

    def f(y1, y2):
        k1 = bessel_k(m1, 2 * PI * y1 * y1)
        k2 = bessel_k(m2, 2 * PI * y2 * y2)
        u1, u2 = y1 * y1, y2 * y2
        q = a1 * a1 / (u1 * u2) + a2 * a2 * u2 / u1 + a2 * a2 * u1 / u2 + u1 * u2 / (a2 * a2)
        return k1 * k2 * np.exp(-PI * q) / (y1 * y2)

    cfg = cfg or PrecisionConfig(target_rel_tol=1e-9)
    res = integrate_halfline_nd(f, 2, cfg, h0=0.25, limits=[(1e-8, 1e2)] * 2, max_levels=3)
    return 8.0 * a1 * a1 * a2 * complex(res.value)
