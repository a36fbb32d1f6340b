"""Precision settings, quadrature engines and vertical-line contour integration.

Every integrator here works on vectorised callables: ``f`` receives a numpy
array of abscissae and returns an array of the same shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "PrecisionConfig",
    "ContourSpec",
    "QuadratureRule",
    "QuadResult",
    "NonConvergenceError",
    "integrate_halfline",
    "integrate_halfline_nd",
    "halfline_nodes",
    "integrate_tensor_hermite",
    "gauss_legendre_panels",
    "contour_line",
    "contour_plane",
    "choose_height",
]

WORKING_MODES = ("machine-double", "extended")


class NonConvergenceError(RuntimeError):
    """Raised when refinement stops before the requested tolerance is met."""

    def __init__(self, message: str, last: complex, previous: complex):
        super().__init__(f"{message}: last={last!r}, previous={previous!r}")
        self.last = last
        self.previous = previous


@dataclass(frozen=True)
class PrecisionConfig:
    target_rel_tol: float = 1e-10
    max_nodes: int = 4096
    working_mode: str = "machine-double"

    def __post_init__(self) -> None:
        if not 0.0 < self.target_rel_tol < 1.0:
            raise ValueError("target_rel_tol must lie in (0, 1)")
        if self.max_nodes < 16:
            raise ValueError("max_nodes must be at least 16")
        if self.working_mode not in WORKING_MODES:
            raise ValueError(f"working_mode must be one of {WORKING_MODES}")

    @property
    def extended(self) -> bool:
        return self.working_mode == "extended"


@dataclass(frozen=True)
class ContourSpec:
    """The vertical segment c + it, |t| <= height, sampled with ``nodes`` points."""

    abscissa: float
    height: float = 30.0
    nodes: int = 512

    def __post_init__(self) -> None:
        if self.nodes < 64:
            raise ValueError("a contour needs at least 64 nodes")
        if not self.height > 0:
            raise ValueError("contour height must be positive")


@dataclass(frozen=True)
class QuadratureRule:
    kind: str = "tanh-sinh-halfline"
    order: int = 8
    dimension: int = 1

    def __post_init__(self) -> None:
        if self.kind not in ("gauss-legendre", "tanh-sinh-halfline", "gauss-hermite"):
            raise ValueError(f"unknown quadrature kind {self.kind!r}")
        if self.order < 1 or self.dimension < 1:
            raise ValueError("order and dimension must be positive")


@dataclass(frozen=True)
class QuadResult:
    value: complex
    error: float
    converged: bool
    nodes: int

    def __float__(self) -> float:
        return float(np.real(self.value))

    def __complex__(self) -> complex:
        return complex(self.value)


def _accumulate(terms: np.ndarray, extended: bool) -> complex:
    """Sum an array; in extended mode the sum is exactly rounded."""
    terms = np.ravel(terms)
    if not extended:
        return complex(np.sum(terms))
    if np.iscomplexobj(terms):
        return complex(math.fsum(terms.real), math.fsum(terms.imag))
    return complex(math.fsum(terms), 0.0)


def _finalize(value: complex, like_real: bool) -> complex | float:
    return value.real if like_real else value


# --------------------------------------------------------------------------
# exp-sinh rule on (0, inf): x = exp(pi/2 * sinh t)
# --------------------------------------------------------------------------

_HALF_PI = 0.5 * math.pi


def _t_limits(x_min: float, x_max: float) -> tuple[float, float]:
    return (
        math.asinh(math.log(x_min) / _HALF_PI),
        math.asinh(math.log(x_max) / _HALF_PI),
    )


def _raw_halfline(h: float, x_min: float, x_max: float, offset: float) -> tuple[np.ndarray, np.ndarray]:
    t_lo, t_hi = _t_limits(x_min, x_max)
    k_lo = math.ceil((t_lo - offset) / h)
    k_hi = math.floor((t_hi - offset) / h)
    t = offset + h * np.arange(k_lo, k_hi + 1)
    x = np.exp(_HALF_PI * np.sinh(t))
    return x, _HALF_PI * np.cosh(t) * x


def halfline_nodes(
    h: float, x_min: float = 1e-280, x_max: float = 1e100
) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the exp-sinh rule with step ``h`` on (x_min, x_max)."""
    x, w = _raw_halfline(h, x_min, x_max, 0.0)
    return x, h * w


def _eval(f: Callable, x: np.ndarray) -> np.ndarray:
    with np.errstate(all="ignore"):
        y = np.asarray(f(x))
    if y.shape != x.shape:
        y = np.broadcast_to(y, x.shape)
    # extreme nodes may under/overflow inside f; their true weight is nil
    return np.where(np.isfinite(y), y, 0.0)


def integrate_halfline(
    f: Callable[[np.ndarray], np.ndarray],
    rule: QuadratureRule | None = None,
    cfg: PrecisionConfig | None = None,
    *,
    x_min: float = 1e-280,
    x_max: float = 1e100,
    strict: bool = True,
) -> QuadResult:
    """Integrate ``f`` over (0, inf) with step-halving exp-sinh quadrature.

    Each level reuses the previous nodes; the error estimate is the change
    between the last two levels.
    """
    rule = rule or QuadratureRule()
    cfg = cfg or PrecisionConfig()
    if rule.kind != "tanh-sinh-halfline":
        raise ValueError("integrate_halfline needs a tanh-sinh-halfline rule")
    h = 0.5
    x, w = _raw_halfline(h, x_min, x_max, 0.0)
    terms = w * _eval(f, x)
    previous = h * _accumulate(terms, cfg.extended)
    while True:
        x, w = _raw_halfline(h, x_min, x_max, h / 2)
        terms = np.concatenate([terms, w * _eval(f, x)])
        h /= 2
        estimate = h * _accumulate(terms, cfg.extended)
        err = abs(estimate - previous)
        real = not np.iscomplexobj(terms)
        if err <= cfg.target_rel_tol * abs(estimate) or err == 0.0:
            return QuadResult(_finalize(estimate, real), err, True, terms.size)
        if terms.size >= cfg.max_nodes:
            if strict:
                raise NonConvergenceError("exp-sinh quadrature did not converge", estimate, previous)
            return QuadResult(_finalize(estimate, real), err, False, terms.size)
        previous = estimate


_SLAB = 1 << 20


def integrate_halfline_nd(
    f: Callable[..., np.ndarray],
    dim: int,
    cfg: PrecisionConfig | None = None,
    *,
    h0: float = 0.25,
    limits: Sequence[tuple[float, float]] | None = None,
    max_levels: int = 3,
    strict: bool = True,
) -> QuadResult:
    """Tensor exp-sinh quadrature over (0, inf)^dim.

    ``f(x1, ..., xd)`` receives broadcastable arrays (one axis per variable).
    The step is halved in every direction until two levels agree.
    """
    cfg = cfg or PrecisionConfig()
    limits = list(limits) if limits is not None else [(1e-280, 1e100)] * dim
    if len(limits) != dim:
        raise ValueError("one (x_min, x_max) pair per dimension is required")
    previous: complex | None = None
    err = math.inf
    h = h0
    for _ in range(max_levels + 1):
        grids = [halfline_nodes(h, lo, hi) for lo, hi in limits]
        axes = []
        weight = np.ones(())
        for i, (x, w) in enumerate(grids):
            shape = [1] * dim
            shape[i] = x.size
            axes.append(x.reshape(shape))
            weight = weight * w.reshape(shape)
        size = weight.size
        # evaluate in slabs along the first axis to bound memory
        step = max(1, _SLAB // max(1, size // grids[0][0].size))
        partial = []
        real = True
        for lo in range(0, grids[0][0].size, step):
            sl = slice(lo, lo + step)
            with np.errstate(all="ignore"):
                vals = np.asarray(f(axes[0][sl], *axes[1:]))
            vals = np.where(np.isfinite(vals), vals, 0.0)
            real = real and not np.iscomplexobj(vals)
            slab = np.broadcast_to(weight[sl] * vals, weight[sl].shape)
            partial.append(_accumulate(slab, cfg.extended))
        estimate = _accumulate(np.asarray(partial), cfg.extended)
        if previous is not None:
            err = abs(estimate - previous)
            if err <= cfg.target_rel_tol * abs(estimate) or err == 0.0:
                return QuadResult(_finalize(estimate, real), err, True, size)
        previous = estimate
        h /= 2
    if strict:
        raise NonConvergenceError("tensor exp-sinh quadrature did not converge", estimate, previous)
    return QuadResult(_finalize(estimate, real), err, False, size)


# --------------------------------------------------------------------------
# Gauss-Hermite tensor rule
# --------------------------------------------------------------------------


def integrate_tensor_hermite(f: Callable[..., np.ndarray], order: int, dim: int) -> complex | float:
    """Tensor Gauss-Hermite value of the integral of f(x) exp(-|x|^2) over R^dim.

    Exact whenever f is a polynomial of degree at most 2*order - 1 in each variable.
    """
    if dim > 4:
        raise ValueError("tensor Gauss-Hermite is limited to dimension 4")
    if dim < 1 or order < 1:
        raise ValueError("order and dimension must be positive")
    x, w = np.polynomial.hermite.hermgauss(order)
    axes = []
    weight = np.ones(())
    for i in range(dim):
        shape = [1] * dim
        shape[i] = order
        axes.append(x.reshape(shape))
        weight = weight * w.reshape(shape)
    vals = np.asarray(f(*axes))
    total = complex(np.sum(np.broadcast_to(weight * vals, weight.shape)))
    return total.real if not np.iscomplexobj(vals) else total


# --------------------------------------------------------------------------
# vertical-line contours
# --------------------------------------------------------------------------


def gauss_legendre_panels(height: float, nodes: int, width: float = 2.0) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule on [-height, height] with panels of ``width``."""
    panels = max(1, math.ceil(2 * height / width))
    order = max(8, math.ceil(nodes / panels))
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(-height, height, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    t = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wt = (half[:, None] * w[None, :]).ravel()
    return t, wt


def choose_height(
    g_abs: Callable[[np.ndarray], np.ndarray], tol: float, t_max: float = 200.0, start: float = 4.0
) -> float:
    """Smallest height (doubling from ``start``) where |g| has dropped below tol * max|g|.

    ``g_abs`` maps heights t >= 0 to the largest integrand modulus on the
    boundary at that height.
    """
    scale = float(np.max(g_abs(np.linspace(0.0, start, 33))))
    t = start
    while t < t_max:
        if float(np.max(g_abs(np.linspace(t, 1.5 * t, 9)))) < tol * scale:
            return t
        t *= 1.5
    return t_max


def contour_line(
    g: Callable[[np.ndarray], np.ndarray],
    spec: ContourSpec,
    cfg: PrecisionConfig | None = None,
) -> QuadResult:
    """(1/2 pi i) times the integral of g over c + it, |t| <= T.

    The estimate from width-2 panels is refined once by panel halving; the
    reported error adds the panel difference and the tail size |g(c +- iT)|.
    ``converged`` is False when that error exceeds the target tolerance.
    """
    cfg = cfg or PrecisionConfig()
    c, T = spec.abscissa, spec.height
    values = []
    for width in (2.0, 1.0):
        t, w = gauss_legendre_panels(T, spec.nodes * int(2.0 / width), width)
        with np.errstate(all="ignore"):
            vals = np.asarray(g(c + 1j * t), dtype=complex)
        values.append(_accumulate(w * vals, cfg.extended) / (2 * math.pi))
    with np.errstate(all="ignore"):
        tail = float(np.max(np.abs(g(np.array([c - 1j * T, c + 1j * T])))))
    value = values[-1]
    err = abs(values[1] - values[0]) + tail * 2.0 / (2 * math.pi)
    ok = err <= cfg.target_rel_tol * max(abs(value), 1e-300)
    return QuadResult(value, err, ok, 3 * spec.nodes)


def contour_plane(
    g: Callable[[np.ndarray, np.ndarray], np.ndarray],
    spec1: ContourSpec,
    spec2: ContourSpec,
    cfg: PrecisionConfig | None = None,
    *,
    refine: bool = True,
) -> QuadResult:
    """(1/2 pi i)^2 times the double integral of g(s1, s2) over a product of vertical segments.

    ``g`` receives a column of s1 values and a row of s2 values. With
    ``refine`` the panel-halved rule provides the error estimate.
    """
    cfg = cfg or PrecisionConfig()
    widths = (2.0, 1.0) if refine else (2.0,)
    values = []
    for width in widths:
        factor = int(2.0 / width)
        t1, w1 = gauss_legendre_panels(spec1.height, spec1.nodes * factor, width)
        t2, w2 = gauss_legendre_panels(spec2.height, spec2.nodes * factor, width)
        s1 = (spec1.abscissa + 1j * t1)[:, None]
        s2 = (spec2.abscissa + 1j * t2)[None, :]
        with np.errstate(all="ignore"):
            vals = np.asarray(g(s1, s2), dtype=complex)
        vals = np.where(np.isfinite(vals), vals, 0.0)
        terms = w1[:, None] * w2[None, :] * vals
        values.append(_accumulate(terms, cfg.extended) / (2 * math.pi) ** 2)
    value = values[-1]
    err = abs(values[-1] - values[0]) if refine else float("nan")
    ok = (not refine) or err <= cfg.target_rel_tol * max(abs(value), 1e-300)
    return QuadResult(value, err, ok, int(np.size(vals)))
