"""Registered verification checks, grouped into suites.

Each check computes one (lhs, rhs) pair from two independent routes and is
turned into a CheckReport against the run tolerance. Multi-point checks report
their worst point.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import archzeta as az
from . import constants as cs
from . import padic as pa
from . import special as sp
from . import whittaker as wh
from .numkit import PrecisionConfig

__all__ = ["RunConfig", "Check", "SUITES", "REGISTRY", "run_suite"]

SUITES = ("special", "whittaker-ds", "whittaker-ps", "padic", "archzeta", "constants", "all")


@dataclass(frozen=True)
class RunConfig:
    tol: float = 1e-6
    prec: str = "machine-double"
    max_nodes: int | None = None
    seed: int = 0
    jobs: int = 1
    fmt: str = "text"

    def __post_init__(self) -> None:
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.jobs < 1:
            raise ValueError("jobs must be at least 1")
        PrecisionConfig(working_mode=self.prec)

    def precision(self, target: float, nodes: int = 20000) -> PrecisionConfig:
        """Quadrature settings: the check's own target, the run's mode and node cap."""
        return PrecisionConfig(target, self.max_nodes or nodes, self.prec)

    def rng(self, salt: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, salt])


@dataclass(frozen=True)
class Check:
    id: str
    suite: str
    ref: str
    run: Callable[[RunConfig], tuple]


REGISTRY: list[Check] = []


def _register(suite: str, name: str, ref: str):
    def deco(fn):
        REGISTRY.append(Check(f"{suite}.{name}", suite, ref, fn))
        return fn

    return deco


def _worst(pairs):
    """The (lhs, rhs) pair with the largest relative deviation."""

    def rel(pair):
        lhs, rhs = (complex(float(v)) if isinstance(v, (Fraction, cs.PiMonomial)) else complex(v) for v in pair)
        return abs(lhs - rhs) / (abs(rhs) or 1.0)

    return max(pairs, key=rel)


# -- special -------------------------------------------------------------------


@_register("special", "log_gamma", "complex log-Gamma against the real library value")
def _(rc):
    xs = [0.1, 0.5, 1.7, 5.5, 33.3]
    return _worst([(complex(sp.log_gamma(x)).real, math.lgamma(x)) for x in xs])


@_register("special", "gamma_reflection", "Gamma(z) Gamma(1-z) = pi / sin(pi z)")
def _(rc):
    zs = [0.3 + 0.2j, 0.5 + 1.5j, -1.25 + 0.1j]
    return _worst([(complex(sp.gamma(z) * sp.gamma(1 - z)), math.pi / np.sin(math.pi * z)) for z in zs])


@_register("special", "bessel_k", "K-Bessel trapezoid against exp-sinh quadrature")
def _(rc):
    pts = [(0.0, 1.0), (0.3j, 0.8), (0.45, 2.5), (1.5 + 0.5j, 0.3)]
    return _worst([(complex(sp.bessel_k(nu, x)), sp.bessel_k_quad(nu, x, rc.precision(1e-13))) for nu, x in pts])


@_register("special", "hyp3f2_saalschutz", "balanced terminating 3F2 at one against the Pfaff-Saalschutz value")
def _(rc):
    # 3F2(-n, a, b; c, 1+a+b-c-n; 1) = (c-a)_n (c-b)_n / ((c)_n (c-a-b)_n)
    n, a, b, c = 5, 0.3, 0.7, 1.9

    def poch(x, k):
        return math.prod(x + i for i in range(k))

    rhs = poch(c - a, n) * poch(c - b, n) / (poch(c, n) * poch(c - a - b, n))
    return complex(sp.hyp3f2_unit(-n, a, b, c, 1 + a + b - c - n)).real, rhs


@_register("special", "hyp3f2_levin", "Levin-accelerated 3F2 at one against Gauss's 2F1 value")
def _(rc):
    # 3F2(a, b, c; d, c; 1) = 2F1(a, b; d; 1) = G(d) G(d-a-b) / (G(d-a) G(d-b))
    a, b, d, c = 0.4, 0.3, 1.9, 1.3
    rhs = math.gamma(d) * math.gamma(d - a - b) / (math.gamma(d - a) * math.gamma(d - b))
    return complex(sp.hyp3f2_unit(a, b, c, d, c)).real, rhs


@_register("special", "zeta_local", "local zeta factors: exact rational and real-place values")
def _(rc):
    return _worst(
        [
            (sp.zeta_local_exact(2, 2), Fraction(4, 3)),
            (sp.zeta_local(sp.LocalZetaPlace.real(), 2.0), 1 / math.pi),
            (sp.zeta_local(sp.LocalZetaPlace.finite(5), 3.0), 1 / (1 - 5.0**-3)),
        ]
    )


@_register("special", "gauss_hermite_exactness", "Gauss-Hermite exact to degree 2 order - 1")
def _(rc):
    from .numkit import integrate_tensor_hermite

    order = 6
    # integral of x^(2k) exp(-x^2) = Gamma(k + 1/2)
    return _worst(
        [(integrate_tensor_hermite(lambda x, k=k: x ** (2 * k), order, 1), math.gamma(k + 0.5)) for k in range(order)]
    )


# -- whittaker-ds ---------------------------------------------------------------


@_register("whittaker-ds", "j_identity", "Hermite-Gaussian integral J_n against its closed form")
def _(rc):
    rng = rc.rng(1)
    pairs = []
    for _ in range(5):
        n = int(rng.integers(0, 7))
        r1, r2 = rng.uniform(0.5, 2), rng.uniform(-0.5, 1)
        r3 = rng.uniform(0.1 - r2 * r2, 1.0)
        pairs.append((wh.j_quad(n, r1, r2, r3, rc.precision(1e-12)), wh.j_closed(n, r1, r2, r3)))
    return _worst(pairs)


@_register("whittaker-ds", "h_mellin", "double Mellin transform of h_n against the Gamma product")
def _(rc):
    return wh.h_mellin_check(1, 1.3, -0.4, rc.precision(1e-8))


@_register("whittaker-ds", "mb_vs_direct", "DS Whittaker function: Mellin-Barnes against the h-integral")
def _(rc):
    p = wh.DSParams(3, -1)
    t = wh.TorusPoint(1.25, 0.8)
    return wh.ds_whittaker_mb(p, t), wh.ds_whittaker_direct(p, t)


@_register("whittaker-ds", "normalization_ratio", "DS Whittaker value at 1 (direct route) over its normalizing number")
def _(rc):
    p = wh.DSParams(3, -1)
    return wh.ds_whittaker_direct(p, wh.TorusPoint()) / wh.ds_normalization(p), wh.ds_prefactor(p)


# -- whittaker-ps ---------------------------------------------------------------


@_register("whittaker-ps", "mb_vs_direct", "PS Whittaker function: Mellin-Barnes against the K-Bessel integral")
def _(rc):
    p = wh.PSParams(0.3j, 0.1j)
    t = wh.TorusPoint()
    return wh.ps_whittaker_mb(p, t, refine=False), wh.ps_whittaker_direct(p, t)


@_register("whittaker-ps", "weyl_invariance", "PS normalizing number under lambda1 <-> lambda2")
def _(rc):
    return (
        wh.ps_normalization(wh.PSParams(0.1j, 0.3j), refine=False),
        wh.ps_normalization(wh.PSParams(0.3j, 0.1j), refine=False),
    )


# -- padic ----------------------------------------------------------------------


@_register("padic", "iia_series", "level-place zeta integral: truncated cell sum against 1/90 at q = 2")
def _(rc):
    place = pa.FinitePlace(2)
    return pa.iia_rallis_zeta_series(place, pa.IIaParams(0, 0.2j), 40), float(pa.iia_rallis_zeta_closed(place))


@_register("padic", "iia_alpha_independence", "level-place zeta integral is independent of the Satake value")
def _(rc):
    rng = rc.rng(2)
    place = pa.FinitePlace(3)
    target = float(pa.iia_rallis_zeta_closed(place))
    pairs = []
    for _ in range(4):
        p = pa.IIaParams(int(rng.integers(0, 2)), complex(0, rng.uniform(-3, 3)))
        pairs.append((pa.iia_rallis_zeta_series(place, p, 40), target))
    return _worst(pairs)


@_register("padic", "iia_subsums", "each geometric subsum against its closed form")
def _(rc):
    place = pa.FinitePlace(5)
    p = pa.IIaParams(1, 0.35j)
    return _worst([(pa.z_subsum_series(place, p, i), pa.z_subsum_closed(place, p, i)) for i in (1, 2, 3, 4)])


@_register("padic", "iia_closed_exact", "exact closed form 2^-2 q^-3 zeta(2) zeta(4) / zeta(1)^2")
def _(rc):
    pairs = []
    for q in (2, 3, 5, 7):
        z = sp.zeta_local_exact
        pairs.append((pa.iia_rallis_zeta_closed(pa.FinitePlace(q)), Fraction(1, 4 * q**3) * z(q, 2) * z(q, 4) / z(q, 1) ** 2))
    return _worst(pairs)


@_register("padic", "tensor_identities", "spin x spin, wedge^2 and Sym^2 decompositions on formal exponents")
def _(rc):
    res = pa.tensor_decomp_check()
    return Fraction(int(res.ok)), Fraction(1)


@_register("padic", "euler_product", "16-factor Euler product equals zeta L_std L_ad")
def _(rc):
    rng = rc.rng(3)
    spin, std, ad = (pa.satake_multisets(k) for k in ("spin", "std", "ad"))
    pairs = []
    for _ in range(3):
        l1, l2 = rng.uniform(-0.4, 0.4), complex(0, rng.uniform(-1, 1))
        q, s = int(rng.choice([2, 3, 5, 7])), rng.uniform(1.2, 3.0)
        lhs = pa.euler_factor(q, spin.tensor(spin).specialize(l1, l2))(q, s)
        rhs = (
            sp.zeta_local(sp.LocalZetaPlace.finite(q), s)
            * pa.euler_factor(q, std.specialize(l1, l2))(q, s)
            * pa.euler_factor(q, ad.specialize(l1, l2))(q, s)
        )
        pairs.append((lhs, rhs))
    return _worst(pairs)


@_register("padic", "normalizing_factors", "d_P(1/2) and d_Pcal(1) at a finite place")
def _(rc):
    (dp, t1), (dpc, t2) = pa.dP_dPcal_values(pa.FinitePlace(3))
    return _worst([(dp, t1), (dpc, t2)])


@_register("padic", "unramified_constant", "unramified local constant from the two zeta integrals equals q^-5c")
def _(rc):
    place = pa.FinitePlace(3, 1)
    return pa.unram_local_constant(place, 0.2, 0.1j), 3.0**-5


# -- archzeta -------------------------------------------------------------------


@_register("archzeta", "gaussian_moments", "Gaussian moment f_n(0): Gauss-Hermite against closed form")
def _(rc):
    return _worst([(az.f_n0_quad(n, a, b), az.f_n0_closed(n, a, b)) for n in range(4) for a, b in [(1, 1), (1.3, 0.7)]])


@_register("archzeta", "weil_coefficients", "Weil coefficients at the identity")
def _(rc):
    return _worst(
        [
            (az.weil_phi_ps(1, 1), 1 / 16),
            (az.weil_phi_ds(az.DSWeight.from_blattner(2, 0), 1, 1), math.pi**-2 / 8),
        ]
    )


@_register("archzeta", "ds_inner", "inner t1-integral of the DS zeta integral")
def _(rc):
    return az.ds_inner_quad(4, 0.3, rc.precision(1e-13)), az.ds_inner_closed(4, 0.3)


@_register("archzeta", "ds_rallis", "DS local zeta integral: Cartan quadrature against closed form")
def _(rc):
    pairs = []
    for l1, l2, in_s in [(2, 0, False), (3, -1, True)]:
        w = az.DSWeight.from_blattner(l1, l2)
        pairs.append((az.ds_rallis_zeta_assembled(w, in_s, rc.precision(1e-12)), az.ds_rallis_zeta_closed(w, in_s)))
    return _worst(pairs)


@_register("archzeta", "bessel_norm", "square-integral of K_mu against the Gamma product")
def _(rc):
    return _worst([az.bessel_norm(az.PSPairing(mu, 0), 1, rc.precision(1e-12)) for mu in (0, 0.3j, 0.45)])


@_register("archzeta", "ps_pairing", "PS Whittaker pairing constant 2^-4")
def _(rc):
    return az.ps_pairing_constant(az.PSPairing(0.2j, 0.35j), rc.precision(1e-12)), 1 / 16


@_register("archzeta", "f2o", "Gaussian Mellin integral over GL(2) against its zeta product")
def _(rc):
    return az.f2o_check(0.5, rc.precision(1e-13))


@_register("archzeta", "zonal_mellin", "zonal Gaussian integrals against the standard L-factor")
def _(rc):
    return az.zonal_mellin_check(az.PSPairing(0.2j, 0), 0.5, rc.precision(1e-9))


@_register("archzeta", "ps_rallis", "PS local zeta integral assembled from its pieces")
def _(rc):
    return az.ps_rallis_zeta(az.PSPairing(0.2j, 0.1j), rc.precision(1e-9)), 1 / 16


# -- constants ------------------------------------------------------------------


def _sample_places():
    return [
        cs.UnramifiedPlace(3, 1, 0.1, 0.2),
        cs.IIaPlace(2, 0),
        cs.IIaPlace(5, 1, 1, 0.2j),
        cs.DSPlace(3, -1),
        cs.DSPlace(2, 0, False),
        cs.PSPlace(0.3j, 0.1j),
    ]


@_register("constants", "tables", "closed constants table against the constants rebuilt from local factors")
def _(rc):
    return _worst([(cs.c_constant_exact(p), cs.c_prime_constant(p)) for p in _sample_places()])


@_register("constants", "rallis_assembly", "product of local zeta factors against the explicit Rallis product")
def _(rc):
    rng = rc.rng(4)
    pairs = []
    for _ in range(5):
        g = cs.random_endoscopic_spec(rng)
        lhs = cs.PiMonomial(1)
        for p in g.places:
            z = cs.local_rallis_zeta(p)
            lhs = float(lhs) * z if isinstance(z, float) or isinstance(lhs, float) else lhs * z
        pairs.append((lhs, cs.rallis_target(g)))
    return _worst(pairs)


@_register("constants", "stable_toggle", "endoscopic over stable Petersson norm is 2")
def _(rc):
    places = (cs.DSPlace(3, -1), cs.IIaPlace(2))
    endo = cs.petersson_norm(cs.GlobalSpec(places, True), 1.0)
    stable = cs.petersson_norm(cs.GlobalSpec(places, False), 1.0)
    return endo / stable, 2.0


@_register("constants", "delta_q", "zeta(2) zeta(4) for Q equals pi^3 / 540")
def _(rc):
    return cs.completed_zeta_q(2) * cs.completed_zeta_q(4), cs.PiMonomial(Fraction(1, 540), 3)


# --------------------------------------------------------------------------


def _run_one(check: Check, rc: RunConfig) -> cs.CheckReport:
    try:
        lhs, rhs = check.run(rc)
    except Exception as exc:  # a crashing check is a failing check
        rep = cs.CheckReport.skipped(check.id, f"{check.ref} [error: {type(exc).__name__}: {exc}]", rc.tol)
        return cs.CheckReport(**{**rep.__dict__, "status": "fail"})
    return cs.CheckReport.compare(check.id, check.ref, lhs, rhs, rc.tol)


def run_suite(suite: str, rc: RunConfig) -> list[cs.CheckReport]:
    """Run every check of ``suite`` (or all of them); reports come back sorted by id."""
    if suite not in SUITES:
        raise KeyError(suite)
    selected = [c for c in REGISTRY if suite == "all" or c.suite == suite]
    if rc.jobs > 1:
        with ThreadPoolExecutor(max_workers=rc.jobs) as pool:
            reports = list(pool.map(lambda c: _run_one(c, rc), selected))
    else:
        reports = [_run_one(c, rc) for c in selected]
    return sorted(reports, key=lambda r: r.id)
