"""Special functions: complex log-Gamma, K-Bessel of complex order, 3F2 at one,
Hermite polynomials and local completed zeta factors.

Array arguments are accepted wherever the contour integrands need them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from .numkit import PrecisionConfig, QuadratureRule, integrate_halfline

__all__ = [
    "PoleError",
    "DivergenceError",
    "LocalZetaPlace",
    "log_gamma",
    "gamma",
    "bessel_k",
    "bessel_k_quad",
    "hyp3f2_unit",
    "hyp3f2_unit_with_error",
    "hermite",
    "hermite_scaled",
    "zeta_local",
    "zeta_local_exact",
]


class PoleError(ValueError):
    """Evaluation at a pole."""


class DivergenceError(ValueError):
    """A series outside its region of convergence."""


# --------------------------------------------------------------------------
# log Gamma
# --------------------------------------------------------------------------

# Lanczos-type coefficients (g = 671/128, 14 terms); truncation error ~3e-15
# on the right half-plane, including far up vertical lines
_LANCZOS_G = 671.0 / 128.0
_LANCZOS_C0 = 0.999999999999997092
_LANCZOS = (
    57.1562356658629235,
    -59.5979603554754912,
    14.1360979747417471,
    -0.491913816097620199,
    0.339946499848118887e-4,
    0.465236289270485756e-4,
    -0.983744753048795646e-4,
    0.158088703224912494e-3,
    -0.210264441724104883e-3,
    0.217439618115212643e-3,
    -0.164318106536763890e-3,
    0.844182239838527433e-4,
    -0.261908384015814087e-4,
    0.368991826595316234e-5,
)
_SQRT_2PI = 2.5066282746310005


_SPLIT = 134217729.0  # 2**27 + 1


def _two_prod(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Error-free product: a*b = p + e exactly (Dekker)."""
    p = a * b
    ca, cb = _SPLIT * a, _SPLIT * b
    ah = ca - (ca - a)
    bh = cb - (cb - b)
    al, bl = a - ah, b - bh
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


def _two_sum(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Error-free sum: a+b = s + e exactly (Knuth)."""
    s = a + b
    bb = s - a
    e = (a - (s - bb)) + (b - bb)
    return s, e


def _log_abs_dd(t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """log|t| as hi + lo, accurate to about one unit of 1e-16 in absolute terms."""
    p1, e1 = _two_prod(t.real, t.real)
    p2, e2 = _two_prod(t.imag, t.imag)
    m_hi, m_err = _two_sum(p1, p2)
    m_lo = m_err + e1 + e2
    half = 0.5 * np.log(m_hi)
    e = np.exp(2.0 * half)
    # |t|^2 = e (1 + d) with d tiny; log|t| = half + d/2
    d = ((m_hi - e) + m_lo) / e
    return half, 0.5 * d


def _lanczos_log_gamma(z: np.ndarray) -> np.ndarray:
    """log Gamma(z) for Re z >= 1/2.

    Uses (z + 1/2)(log t - 1) - (g - 1/2) with t = z + g, which equals the usual
    (z + 1/2) log t - t; the large product is formed with error-free
    transformations so that |log Gamma| of a few hundred keeps full accuracy.
    """
    ser = np.full_like(z, _LANCZOS_C0)
    for i, c in enumerate(_LANCZOS, start=1):
        ser = ser + c / (z + i)
    t = z + _LANCZOS_G
    # log|t| - 1 as a double-double (hi, lo); arg t needs no extra care
    lr_hi, lr_lo = _log_abs_dd(t)
    w_hi, w_err = _two_sum(lr_hi, np.full_like(lr_hi, -1.0))
    w_lo = w_err + lr_lo
    w_im = np.angle(t)
    x, y = z.real + 0.5, z.imag
    p1, e1 = _two_prod(x, w_hi)
    e1 = e1 + x * w_lo
    p2, e2 = _two_prod(y, w_im)
    p3, e3 = _two_prod(x, w_im)
    p4, e4 = _two_prod(y, w_hi)
    e4 = e4 + y * w_lo
    tail = np.log(_SQRT_2PI * ser / z) - (_LANCZOS_G - 0.5)
    re = (p1 - p2) + ((e1 - e2) + tail.real)
    im = (p3 + p4) + ((e3 + e4) + tail.imag)
    return re + 1j * im


def _is_pole(z: np.ndarray) -> np.ndarray:
    return (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))


_PI_HI = math.pi
_PI_LO = 1.2246467991473532e-16  # pi - _PI_HI


def _log_sin_pi(z: np.ndarray) -> np.ndarray:
    """A logarithm of sin(pi z), overflow-free for large |Im z| (branch not fixed).

    For Im z >= 0, sin(pi z) = (i/2) e^(-i pi z) (1 - e^(2 pi i z)); the large
    term -i pi z is formed in split precision.
    """
    upper = z.imag >= 0
    w = np.where(upper, z, np.conj(z))
    # -i pi w = pi Im w - i pi Re w
    r1, r2 = _two_prod(np.full_like(w.real, _PI_HI), w.imag)
    i1, i2 = _two_prod(np.full_like(w.real, _PI_HI), w.real)
    # 1 - e^(2 pi i w) only depends on w mod 1; reducing first (exact) and
    # using expm1 keeps the digits when w sits next to an integer
    frac = w - np.round(w.real)
    small = np.log(-np.expm1(2j * np.pi * frac)) + math.log(0.5)
    re = r1 + (r2 + _PI_LO * w.imag + small.real)
    im = -i1 + (-i2 - _PI_LO * w.real + small.imag + 0.5 * np.pi)
    val = re + 1j * im
    return np.where(upper, val, np.conj(val))


def log_gamma(z):
    """Principal branch of log Gamma(z).

    Re z >= 1/2 uses the Lanczos formula. Otherwise the reflection formula
    gives the value, and the branch (a multiple of 2 pi i) is read off from the
    upward recurrence log Gamma(z) = log Gamma(z+1) - log z, which follows the
    principal branch but loses a few digits over many steps.
    """
    arr = np.asarray(z, dtype=complex)
    if np.any(_is_pole(arr)):
        bad = arr[_is_pole(arr)].ravel()[0]
        raise PoleError(f"log_gamma has a pole at z = {bad.real:g}")
    low = arr.real < 0.5
    out = _lanczos_log_gamma(np.where(low, 1.0, arr))
    if np.any(low):
        zl = arr[low]
        w = zl.copy()
        shift = np.zeros_like(w)
        todo = w.real < 0.5
        while np.any(todo):
            shift = np.where(todo, shift + np.log(np.where(todo, w, 1.0)), shift)
            w = np.where(todo, w + 1.0, w)
            todo = w.real < 0.5
        rough = _lanczos_log_gamma(w) - shift
        refl = math.log(math.pi) - _log_sin_pi(zl) - _lanczos_log_gamma(1.0 - zl)
        k = np.round((rough - refl).imag / (2 * math.pi))
        out = np.array(out, dtype=complex)
        out[low] = refl + 2j * math.pi * k
    return complex(out) if out.ndim == 0 else out


def gamma(z):
    """Gamma(z) through exp(log_gamma), exact for real input up to rounding."""
    out = np.exp(log_gamma(z))
    return out


# --------------------------------------------------------------------------
# K-Bessel
# --------------------------------------------------------------------------

_K_STEP = 0.1


def bessel_k(nu, x):
    """K_nu(x) for x > 0 and complex order nu.

    With t = e^u the defining integral becomes the integral over the real line of
    exp(-x cosh u + nu u)/2; the trapezoid rule on this doubly exponentially
    decaying integrand is spectrally accurate.
    """
    xs = np.asarray(x, dtype=float)
    if np.any(xs <= 0):
        raise ValueError("bessel_k requires x > 0")
    nu = complex(nu)
    flat = xs.ravel()
    a = abs(nu.real)
    # cut where x cosh u - |Re nu| u exceeds the dynamic range by a margin
    x_min = float(flat.min())
    upper = max(4.0, math.log(2 * (60.0 + a * 50.0) / x_min))
    for _ in range(3):
        upper = max(4.0, math.log(2 * (60.0 + a * upper) / x_min) + 1.0)
    u = np.arange(0.0, upper + _K_STEP, _K_STEP)
    cu = np.cosh(u)
    expo = -flat[:, None] * cu[None, :]
    with np.errstate(over="ignore", under="ignore"):
        vals = 0.5 * (np.exp(expo + nu * u) + np.exp(expo - nu * u))
    vals[:, 0] *= 0.5
    out = _K_STEP * vals.sum(axis=1)
    if nu.imag == 0:
        out = out.real
    out = out.reshape(xs.shape)
    return out[()] if out.ndim == 0 else out


def bessel_k_quad(nu: complex, x: float, cfg: PrecisionConfig | None = None) -> complex:
    """K_nu(x) by exp-sinh quadrature of (1/2) int_0^inf exp(-x(t+1/t)/2) t^(nu-1) dt."""
    if x <= 0:
        raise ValueError("bessel_k requires x > 0")
    nu = complex(nu)
    res = integrate_halfline(
        lambda t: 0.5 * np.exp(-0.5 * x * (t + 1.0 / t) + (nu - 1.0) * np.log(t)),
        QuadratureRule("tanh-sinh-halfline"),
        cfg or PrecisionConfig(target_rel_tol=1e-13, max_nodes=20000),
    )
    return complex(res.value)


# --------------------------------------------------------------------------
# 3F2 at unit argument
# --------------------------------------------------------------------------

_LEVIN_TERMS = 64
_LEVIN_OFFSETS = (0, 6, 12)
_LEVIN_ORDER = 24


def _levin_tables(kmax: int, offsets: tuple[int, ...]):
    table = {}
    for n0 in offsets:
        for k in range(1, kmax):
            j = np.arange(k + 1)
            m = n0 + j
            sign = np.where(j % 2 == 0, 1.0, -1.0)
            binom = np.array([float(comb(k, int(i))) for i in j])
            table[(n0, k)] = (m, sign * binom * ((1.0 + m) / (1.0 + n0 + k)) ** (k - 1))
    return table


_LEVIN_TABLE = _levin_tables(_LEVIN_ORDER, _LEVIN_OFFSETS)


def _check_3f2(a1, a2, a3, b1, b2) -> None:
    for b in (b1, b2):
        bad = _is_pole(np.asarray(b, dtype=complex))
        if np.any(bad):
            raise PoleError("3F2: a lower parameter is a non-positive integer")
    deficit = np.asarray(b1 + b2 - a1 - a2 - a3, dtype=complex)
    if np.any(deficit.real <= 0):
        raise DivergenceError("3F2 at 1 diverges: Re(b1+b2-a1-a2-a3) <= 0")


def _terminating_degree(a: np.ndarray) -> int | None:
    flat = a.ravel()
    if flat.size == 1:
        v = complex(flat[0])
        if v.imag == 0 and v.real <= 0 and v.real == round(v.real):
            return int(-v.real)
    return None


def hyp3f2_unit_with_error(a1, a2, a3, b1, b2):
    """3F2(a1,a2,a3; b1,b2; 1) and an absolute error estimate.

    Terminating series are summed exactly. Otherwise the partial sums are
    accelerated by the Levin u-transform at several starting offsets and
    orders; the result with the smallest change between consecutive orders wins.
    """
    args = [np.asarray(v, dtype=complex) for v in (a1, a2, a3, b1, b2)]
    _check_3f2(*args)
    shape = np.broadcast(*args).shape
    a1, a2, a3, b1, b2 = [np.broadcast_to(v, shape).ravel() for v in args]
    for a in (a1, a2, a3):
        deg = _terminating_degree(a)
        if deg is not None:
            k = np.arange(deg + 1)[:, None]
            r = (a1 + k) * (a2 + k) * (a3 + k) / ((b1 + k) * (b2 + k) * (k + 1.0))
            t = np.vstack([np.ones((1, a1.size), complex), np.cumprod(r, axis=0)[:-1]])
            val = t.sum(axis=0).reshape(shape)
            return (complex(val) if val.ndim == 0 else val), 0.0
    k = np.arange(_LEVIN_TERMS)[:, None]
    r = (a1 + k) * (a2 + k) * (a3 + k) / ((b1 + k) * (b2 + k) * (k + 1.0))
    terms = np.vstack([np.ones((1, a1.size), complex), np.cumprod(r, axis=0)[:-1]])
    partial = np.cumsum(terms, axis=0)
    best = partial[-1].copy()
    best_err = np.full(a1.size, np.inf)
    with np.errstate(all="ignore"):
        for n0 in _LEVIN_OFFSETS:
            prev = None
            for order in range(1, _LEVIN_ORDER):
                m, coef = _LEVIN_TABLE[(n0, order)]
                omega = (1.0 + m)[:, None] * terms[m]
                val = (coef[:, None] * partial[m] / omega).sum(axis=0) / (coef[:, None] / omega).sum(axis=0)
                if prev is not None:
                    err = np.abs(val - prev)
                    take = np.isfinite(val) & (err < best_err)
                    best = np.where(take, val, best)
                    best_err = np.where(take, err, best_err)
                prev = val
    best = best.reshape(shape)
    best_err = best_err.reshape(shape)
    if best.ndim == 0:
        return complex(best), float(best_err)
    return best, best_err


def hyp3f2_unit(a1, a2, a3, b1, b2):
    """3F2(a1,a2,a3; b1,b2; 1); requires Re(b1+b2-a1-a2-a3) > 0."""
    return hyp3f2_unit_with_error(a1, a2, a3, b1, b2)[0]


# --------------------------------------------------------------------------
# Hermite polynomials
# --------------------------------------------------------------------------

HERMITE_MAX_DEGREE = 60


def hermite(n: int, x):
    """Physicists' Hermite polynomial H_n(x) by the three-term recurrence."""
    if n < 0:
        raise ValueError("hermite degree must be non-negative")
    if n > HERMITE_MAX_DEGREE:
        raise ValueError(f"hermite degree is limited to {HERMITE_MAX_DEGREE}")
    x = np.asarray(x, dtype=float)
    h_prev, h = np.ones_like(x), 2.0 * x
    if n == 0:
        return h_prev[()] if h_prev.ndim == 0 else h_prev
    for k in range(1, n):
        h_prev, h = h, 2.0 * x * h - 2.0 * k * h_prev
    return h[()] if h.ndim == 0 else h


def hermite_scaled(n: int, x: float) -> tuple[float, int]:
    """H_n(x) as (mantissa, exponent) with H_n(x) = mantissa * 2**exponent.

    Renormalises during the recurrence so large |x| cannot overflow.
    """
    if n < 0:
        raise ValueError("hermite degree must be non-negative")
    if n > HERMITE_MAX_DEGREE:
        raise ValueError(f"hermite degree is limited to {HERMITE_MAX_DEGREE}")
    h_prev, h, e = 1.0, 2.0 * x, 0
    if n == 0:
        return 1.0, 0
    for k in range(1, n):
        h_prev, h = h, 2.0 * x * h - 2.0 * k * h_prev
        if abs(h) > 2.0**500:
            h, h_prev, e = h * 2.0**-500, h_prev * 2.0**-500, e + 500
    m, ex = math.frexp(h)
    return m, ex + e


# --------------------------------------------------------------------------
# local zeta factors
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class LocalZetaPlace:
    """A finite place with residue field size q, or the real place (q = None)."""

    q: int | None = None

    def __post_init__(self) -> None:
        if self.q is not None and self.q < 2:
            raise ValueError("a finite place needs q >= 2")

    @property
    def is_real(self) -> bool:
        return self.q is None

    @classmethod
    def real(cls) -> "LocalZetaPlace":
        return cls(None)

    @classmethod
    def finite(cls, q: int) -> "LocalZetaPlace":
        return cls(q)


def zeta_local(place: LocalZetaPlace, s):
    """(1 - q^-s)^-1 at a finite place, pi^(-s/2) Gamma(s/2) at the real place."""
    if place.is_real:
        s_arr = np.asarray(s, dtype=complex)
        if np.any(_is_pole(s_arr / 2)):
            raise PoleError("real zeta factor has a pole where s/2 is a non-positive integer")
        out = np.exp(-0.5 * s_arr * math.log(math.pi) + log_gamma(s_arr / 2))
    else:
        s_arr = np.asarray(s, dtype=complex)
        x = np.exp(-s_arr * math.log(place.q))
        if np.any(np.abs(1 - x) == 0) or np.any(
            (s_arr.real == 0) & np.isclose(np.mod(s_arr.imag * math.log(place.q), 2 * math.pi), 0)
        ):
            raise PoleError("finite zeta factor has a pole where q^-s = 1")
        out = 1.0 / (1.0 - x)
    if np.all(s_arr.imag == 0):
        out = out.real
    return out[()] if np.ndim(out) == 0 else out


def zeta_local_exact(q: int, s: int) -> Fraction:
    """(1 - q^-s)^-1 as an exact rational for integer s != 0."""
    if s == 0:
        raise PoleError("finite zeta factor has a pole at s = 0")
    x = Fraction(1, q**s) if s > 0 else Fraction(q ** (-s))
    return 1 / (1 - x)
