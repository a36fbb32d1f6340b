"""Per-place constants of the Petersson norm formula and the Rallis assembly.

Two routes produce each local constant. ``c_constant`` reads the closed table;
``c_prime_constant`` rebuilds it as q^(-5c) Z_v / (W_v / q^c)^2 from the local
zeta integral Z_v and the local Whittaker value W_v. Finite places stay in exact
rationals and real places in exact rational multiples of powers of pi, so the
two routes can be compared with ``==``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Union

import numpy as np

from . import archzeta, padic
from .special import zeta_local_exact

__all__ = [
    "PiMonomial",
    "UnramifiedPlace",
    "IIaPlace",
    "DSPlace",
    "PSPlace",
    "PlaceSpec",
    "GlobalSpec",
    "CheckReport",
    "bernoulli",
    "zeta_even_exact",
    "completed_zeta_q",
    "euler_product_zeta",
    "c_constant",
    "c_constant_exact",
    "c_prime_constant",
    "local_whittaker_value",
    "local_rallis_zeta",
    "whittaker_theta_constant",
    "rallis_assembly_check",
    "rallis_target",
    "petersson_norm",
    "random_endoscopic_spec",
]

PI = math.pi


@dataclass(frozen=True)
class PiMonomial:
    """The exact number coef * pi^power with rational coef and power."""

    coef: Fraction
    power: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "coef", Fraction(self.coef))
        object.__setattr__(self, "power", Fraction(self.power))

    @staticmethod
    def lift(x: "PiMonomial | Fraction | int") -> "PiMonomial":
        return x if isinstance(x, PiMonomial) else PiMonomial(Fraction(x))

    def __mul__(self, other):
        o = PiMonomial.lift(other)
        return PiMonomial(self.coef * o.coef, self.power + o.power)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = PiMonomial.lift(other)
        return PiMonomial(self.coef / o.coef, self.power - o.power)

    def __rtruediv__(self, other):
        return PiMonomial.lift(other) / self

    def __pow__(self, k: int):
        return PiMonomial(self.coef**k, self.power * k)

    def __eq__(self, other) -> bool:
        if isinstance(other, (PiMonomial, Fraction, int)):
            o = PiMonomial.lift(other)
            if self.coef == 0 or o.coef == 0:
                return self.coef == o.coef
            return self.coef == o.coef and self.power == o.power
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.coef, self.power))

    def __float__(self) -> float:
        return float(self.coef) * PI ** float(self.power)

    def __str__(self) -> str:
        if self.power == 0:
            return str(self.coef)
        return f"{self.coef}*pi^{self.power}"


Exact = Union[Fraction, PiMonomial]


# --------------------------------------------------------------------------
# place data
# --------------------------------------------------------------------------


def _check_q(q: int) -> None:
    if int(q) != q or q < 2:
        raise ValueError("q must be an integer >= 2")


def _check_c(c: int) -> None:
    if int(c) != c or c < 0:
        raise ValueError("c must be a non-negative integer")


@dataclass(frozen=True)
class UnramifiedPlace:
    q: int
    c: int = 0
    lambda1: complex = 0.0
    lambda2: complex = 0.0

    def __post_init__(self) -> None:
        _check_q(self.q)
        _check_c(self.c)
        l1, l2 = complex(self.lambda1), complex(self.lambda2)
        object.__setattr__(self, "lambda1", l1)
        object.__setattr__(self, "lambda2", l2)
        if abs(l1.real) + abs(l2.real) >= 1:
            raise ValueError("need |Re lambda1| + |Re lambda2| < 1")

    kind = "unramified"


@dataclass(frozen=True)
class IIaPlace:
    """A place dividing the level; such places always lie in the set where sigma and its twist differ."""

    q: int
    c: int = 0
    epsilon: int = 0
    lam: complex = 0.0

    def __post_init__(self) -> None:
        _check_q(self.q)
        _check_c(self.c)
        padic.IIaParams(self.epsilon, self.lam)
        object.__setattr__(self, "lam", complex(self.lam))

    kind = "iia"

    @property
    def finite_place(self) -> padic.FinitePlace:
        return padic.FinitePlace(self.q, self.c)


@dataclass(frozen=True)
class DSPlace:
    lambda1: int
    lambda2: int
    in_S: bool = True

    def __post_init__(self) -> None:
        from .whittaker import DSParams

        DSParams(self.lambda1, self.lambda2)
        if not self.in_S and self.lambda2 != 0:
            raise ValueError("a discrete series place with kappa1 != kappa2 always lies in S")

    kind = "ds"

    @property
    def weight(self) -> archzeta.DSWeight:
        return archzeta.DSWeight.from_blattner(self.lambda1, self.lambda2)


@dataclass(frozen=True)
class PSPlace:
    lambda1: complex = 0.0
    lambda2: complex = 0.0
    epsilon: int = 0

    def __post_init__(self) -> None:
        from .whittaker import PSParams

        p = PSParams(self.lambda1, self.lambda2, self.epsilon)
        object.__setattr__(self, "lambda1", p.lambda1)
        object.__setattr__(self, "lambda2", p.lambda2)

    kind = "ps"

    @property
    def pairing(self) -> archzeta.PSPairing:
        return archzeta.PSPairing((self.lambda1 + self.lambda2) / 2, (self.lambda1 - self.lambda2) / 2)


PlaceSpec = Union[UnramifiedPlace, IIaPlace, DSPlace, PSPlace]
_REAL_KINDS = ("ds", "ps")


# --------------------------------------------------------------------------
# global zeta values for Q
# --------------------------------------------------------------------------


@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """Bernoulli number B_n with B_1 = -1/2."""
    b = [Fraction(1)]
    for m in range(1, n + 1):
        b.append(-sum(math.comb(m + 1, k) * b[k] for k in range(m)) / (m + 1))
    return b[n]


def zeta_even_exact(k: int) -> PiMonomial:
    """Riemann zeta(2k) = (-1)^(k+1) B_2k (2 pi)^(2k) / (2 (2k)!)."""
    if k < 1:
        raise ValueError("k must be positive")
    coef = (-1) ** (k + 1) * bernoulli(2 * k) * 2 ** (2 * k) / (2 * math.factorial(2 * k))
    return PiMonomial(coef, 2 * k)


def completed_zeta_q(s: int) -> PiMonomial:
    """Completed zeta pi^(-s/2) Gamma(s/2) zeta(s) of Q at even s >= 2, exactly."""
    if s < 2 or s % 2:
        raise ValueError("exact completed values are available at even s >= 2")
    gamma_half = Fraction(math.factorial(s // 2 - 1))
    return PiMonomial(gamma_half, Fraction(-s, 2)) * zeta_even_exact(s // 2)


def euler_product_zeta(s: float, bound: int = 10**6) -> tuple[float, float]:
    """Riemann zeta(s) for s > 1 as a product over primes below ``bound``, with a tail bound.

    The omitted factors multiply the product by at most exp(2 sum_{n >= bound} n^-s),
    and that sum is below bound^(1-s)/(s-1) + bound^-s.
    """
    if s <= 1:
        raise ValueError("the Euler product needs s > 1")
    sieve = np.ones(bound, dtype=bool)
    sieve[:2] = False
    for i in range(2, int(bound**0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = False
    primes = np.nonzero(sieve)[0].astype(float)
    log_val = -np.sum(np.log1p(-(primes ** (-s))))
    value = math.exp(float(log_val))
    tail = bound ** (1 - s) / (s - 1) + bound ** (-s)
    return value, value * math.expm1(2 * tail)


# --------------------------------------------------------------------------
# per-place constants
# --------------------------------------------------------------------------


def c_constant_exact(p: PlaceSpec) -> Exact:
    """Closed-table constant as an exact number."""
    if isinstance(p, UnramifiedPlace):
        return Fraction(1, p.q ** (5 * p.c))
    if isinstance(p, IIaPlace):
        return Fraction(1, p.q ** (1 + 5 * p.c)) / zeta_local_exact(p.q, 2) * zeta_local_exact(p.q, 4)
    if isinstance(p, DSPlace):
        l1, l2 = p.lambda1, p.lambda2
        return PiMonomial(Fraction(2) ** (l1 - l2 + 5) / (1 + l1 - l2), 3 * l1 - l2 + 5)
    if isinstance(p, PSPlace):
        return Fraction(1, 16)
    raise TypeError(f"not a place spec: {p!r}")


def c_constant(p: PlaceSpec) -> float:
    return float(c_constant_exact(p))


def local_whittaker_value(p: PlaceSpec) -> Exact:
    """W_v: q^c unramified, q^c (1+q)^-1 at the level, the real-place prefactor otherwise.

    Places in S carry the extra 1/2 of the theta lift of the pair (W, 0).
    """
    if isinstance(p, UnramifiedPlace):
        return Fraction(p.q**p.c)
    if isinstance(p, IIaPlace):
        return Fraction(p.q**p.c, 1 + p.q) / 2
    if isinstance(p, DSPlace):
        l1, l2 = p.lambda1, p.lambda2
        half = Fraction(1, 2) if p.in_S else Fraction(1)
        return PiMonomial(Fraction(2) ** (-l1 - 4) * half, Fraction(-3 * l1 + l2 - 5, 2))
    if isinstance(p, PSPlace):
        return Fraction(1)
    raise TypeError(f"not a place spec: {p!r}")


@lru_cache(maxsize=64)
def _ps_zeta_numeric(mu1: complex, mu2: complex) -> float:
    return archzeta.ps_rallis_zeta(archzeta.PSPairing(mu1, mu2))


def local_rallis_zeta(p: PlaceSpec, *, numeric_ps: bool = True) -> Exact | float:
    """Local zeta factor Z_v: exact at finite and discrete series places.

    At a principal series place the value comes from the numerical assembly
    when ``numeric_ps`` is set, and from the closed value 2^-4 otherwise.
    """
    if isinstance(p, UnramifiedPlace):
        return Fraction(1)
    if isinstance(p, IIaPlace):
        return padic.iia_rallis_zeta_closed(p.finite_place)
    if isinstance(p, DSPlace):
        w = p.weight.ordered()
        z = Fraction(1, 2 ** (w.lambda1 + w.lambda2 + 3) * (1 + w.kappa1))
        return z / 4 if p.in_S else z
    if isinstance(p, PSPlace):
        if not numeric_ps:
            return Fraction(1, 16)
        pr = p.pairing
        return _ps_zeta_numeric(pr.mu1, pr.mu2)
    raise TypeError(f"not a place spec: {p!r}")


def c_prime_constant(p: PlaceSpec) -> Exact:
    """q^(-5c) Z_v / (W_v / q^c)^2, with q^c = 1 at real places."""
    if isinstance(p, PSPlace):
        z = local_rallis_zeta(p, numeric_ps=False)
    else:
        z = local_rallis_zeta(p)
    w = local_whittaker_value(p)
    if isinstance(p, (UnramifiedPlace, IIaPlace)):
        qc = Fraction(p.q**p.c)
        return Fraction(1, p.q ** (5 * p.c)) * z / (w / qc) ** 2
    return PiMonomial.lift(z) / PiMonomial.lift(w) ** 2


# --------------------------------------------------------------------------
# global assembly
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class GlobalSpec:
    """Places, the endoscopic flag and the global scalars entering the assembly."""

    places: tuple
    endoscopic: bool = True
    discriminant: Fraction = Fraction(1)
    zeta2: float = field(default_factory=lambda: float(completed_zeta_q(2)))
    zeta4: float = field(default_factory=lambda: float(completed_zeta_q(4)))
    real_places: int = 1
    l_ad_at_1: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "places", tuple(self.places))
        object.__setattr__(self, "discriminant", Fraction(self.discriminant))
        if self.discriminant <= 0:
            raise ValueError("the discriminant must be positive")
        n_real = sum(1 for p in self.places if p.kind in _REAL_KINDS)
        if n_real != self.real_places:
            raise ValueError(f"expected {self.real_places} real place entries, got {n_real}")
        qs = [p.q for p in self.places if isinstance(p, IIaPlace)]
        if len(set(qs)) != len(qs):
            raise ValueError("level places must have distinct q")
        if self.zeta2 <= 0 or self.zeta4 <= 0:
            raise ValueError("global zeta values must be positive")


@dataclass(frozen=True)
class CheckReport:
    id: str
    paper_ref: str
    lhs: complex
    rhs: complex
    abs_err: float
    rel_err: float
    tol: float
    status: str

    @classmethod
    def compare(cls, id: str, ref: str, lhs, rhs, tol: float) -> "CheckReport":
        lhs_c, rhs_c = complex(float(lhs) if isinstance(lhs, (Fraction, PiMonomial)) else lhs), complex(
            float(rhs) if isinstance(rhs, (Fraction, PiMonomial)) else rhs
        )
        if isinstance(lhs, (Fraction, PiMonomial)) and isinstance(rhs, (Fraction, PiMonomial)):
            # exact comparison decides; the float errors are for display
            exact_ok = PiMonomial.lift(lhs) == PiMonomial.lift(rhs)
        else:
            exact_ok = None
        abs_err = abs(lhs_c - rhs_c)
        rel_err = abs_err / abs(rhs_c) if rhs_c != 0 else abs_err
        if exact_ok is not None:
            ok = exact_ok
            if ok:
                abs_err = rel_err = 0.0
        elif rhs_c == 0:
            ok = abs_err <= tol
        else:
            ok = rel_err <= tol
        return cls(id, ref, lhs_c, rhs_c, abs_err, rel_err, tol, "pass" if ok else "fail")

    @classmethod
    def skipped(cls, id: str, ref: str, tol: float) -> "CheckReport":
        nan = float("nan")
        return cls(id, ref, complex(nan), complex(nan), nan, nan, tol, "skipped")

    @property
    def passed(self) -> bool:
        return self.status == "pass"


def _in_s_count(g: GlobalSpec) -> int:
    return sum(1 for p in g.places if isinstance(p, IIaPlace) or (isinstance(p, DSPlace) and p.in_S))


def whittaker_theta_constant(g: GlobalSpec) -> float:
    """Scalar relating the theta lift to the translated cusp form.

    Built as the product of the per-place Whittaker values (W_v / q^c at
    finite places) times D^(-3/2) zeta(2)^-2.
    """
    total = PiMonomial(1)
    for p in g.places:
        w = local_whittaker_value(p)
        if isinstance(p, (UnramifiedPlace, IIaPlace)):
            w = w / p.q**p.c
        total = total * w
    return float(total) * float(g.discriminant) ** -1.5 * g.zeta2**-2


def rallis_target(g: GlobalSpec) -> Exact:
    """The product of local factors as displayed in the explicit Rallis formula."""
    total = PiMonomial(Fraction(1, 4 ** _in_s_count(g)))
    for p in g.places:
        if isinstance(p, IIaPlace):
            z = zeta_local_exact
            total = total * (Fraction(1, p.q**3) * z(p.q, 2) * z(p.q, 4) / z(p.q, 1) ** 2)
        elif isinstance(p, DSPlace):
            l1, l2 = p.lambda1, p.lambda2
            total = total * Fraction(1, 2 ** (l1 + l2 + 3) * (1 + l1 - l2))
        elif isinstance(p, PSPlace):
            total = total * Fraction(1, 16)
    return total


def rallis_assembly_check(g: GlobalSpec, tol: float = 1e-8, *, numeric_ps: bool = True) -> CheckReport:
    """Product of the local zeta factors against the explicit Rallis product."""
    if not g.endoscopic:
        raise ValueError("the Rallis assembly applies to endoscopic specs")
    lhs: Exact | float = PiMonomial(1)
    for p in g.places:
        z = local_rallis_zeta(p, numeric_ps=numeric_ps)
        lhs = float(lhs) * float(z) if isinstance(z, float) or isinstance(lhs, float) else lhs * z
    return CheckReport.compare(
        "constants.rallis_assembly", "explicit Rallis inner product, local factor product", lhs, rallis_target(g), tol
    )


def petersson_norm(g: GlobalSpec, L_ad_at_1: float | None = None) -> float:
    """2^c L(1, Ad) / (zeta(2) zeta(4)) times the product of the local constants."""
    L = g.l_ad_at_1 if L_ad_at_1 is None else L_ad_at_1
    if L is None:
        raise ValueError("the adjoint L-value at 1 is a required input")
    c = 2 if g.endoscopic else 1
    prod = PiMonomial(1)
    for p in g.places:
        prod = prod * c_constant_exact(p)
    return 2**c * L / (g.zeta2 * g.zeta4) * float(prod)


def random_endoscopic_spec(rng: np.random.Generator) -> GlobalSpec:
    """A random admissible endoscopic spec for property checks."""
    places: list = []
    for q in (2, 3, 5, 7):
        r = rng.random()
        if r < 0.35:
            places.append(IIaPlace(q, int(rng.integers(0, 2)), int(rng.integers(0, 2)), complex(rng.uniform(-0.4, 0.4))))
        elif r < 0.7:
            places.append(UnramifiedPlace(q, int(rng.integers(0, 2)), rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4)))
    if rng.random() < 0.75:
        l1 = int(rng.integers(2, 7))
        l2 = -int(rng.integers(0, l1))
        if (l1 - l2) % 2:
            l2 = l2 + 1 if l2 < 0 else l2 - 1
        in_S = bool(rng.integers(0, 2)) or l2 != 0
        places.append(DSPlace(l1, l2, in_S))
    else:
        # a handful of fixed tempered parameters keeps the quadrature cache warm
        choices = [(0.0, 0.0), (0.3j, 0.1j), (0.2, 0.1)]
        l1, l2 = choices[int(rng.integers(0, len(choices)))]
        places.append(PSPlace(l1, l2))
    disc = 1
    for p in places:
        if isinstance(p, (UnramifiedPlace, IIaPlace)):
            disc *= p.q**p.c
    return GlobalSpec(tuple(places), True, Fraction(disc))
