"""Finite-place computations.

Matrix coefficients of the Iwahori-spherical vector for type IIa data, Weil
representation coefficients, double-coset sizes, the resulting local Rallis
zeta integral (as a truncated cell sum and in closed form), Euler factors in
X = q^-s, and Satake exponent multisets.
"""

from __future__ import annotations

import cmath
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, combinations_with_replacement, product
from typing import Iterable, Literal, Sequence

from .special import LocalZetaPlace, PoleError, zeta_local, zeta_local_exact

__all__ = [
    "FinitePlace",
    "IIaParams",
    "Cell",
    "SingularityError",
    "ExactLFactor",
    "ExponentMultiset",
    "macdonald_iia",
    "macdonald_bracket",
    "weil_phi_finite",
    "coset_card",
    "iia_cells",
    "iia_rallis_zeta_series",
    "iia_rallis_zeta_closed",
    "z_subsum_series",
    "z_subsum_closed",
    "l_std_gl2pair",
    "satake_multisets",
    "tensor_decomp_check",
    "dP_dPcal_values",
    "euler_factor",
    "unram_formula_evaluators",
    "unram_local_constant",
]


class SingularityError(ZeroDivisionError):
    """A removable singularity hit without limit evaluation."""


@dataclass(frozen=True)
class FinitePlace:
    """Residue field size q and conductor exponent c of the additive character."""

    q: int
    c: int = 0

    def __post_init__(self) -> None:
        if int(self.q) != self.q or self.q < 2:
            raise ValueError("q must be an integer >= 2")
        if int(self.c) != self.c or self.c < 0:
            raise ValueError("c must be a non-negative integer")

    @property
    def zeta_place(self) -> LocalZetaPlace:
        return LocalZetaPlace.finite(self.q)


@dataclass(frozen=True)
class IIaParams:
    """Sign epsilon in {0, 1} and parameter lambda of a type IIa representation."""

    epsilon: int
    lam: complex

    def __post_init__(self) -> None:
        if self.epsilon not in (0, 1):
            raise ValueError("epsilon is 0 or 1")
        object.__setattr__(self, "lam", complex(self.lam))
        if not abs(self.lam.real) < 0.5:
            raise ValueError("need |Re lambda| < 1/2")

    @property
    def sign(self) -> int:
        """mu(varpi) = (-1)^epsilon."""
        return -1 if self.epsilon else 1

    def alpha(self, q: int) -> complex:
        """Satake value q^lambda."""
        return cmath.exp(self.lam * math.log(q))


@dataclass(frozen=True)
class Cell:
    """Double coset representative h_{n,m}, or h'_{n,m} when ``w`` is set."""

    n: int
    m: int
    w: bool = False


# --------------------------------------------------------------------------
# matrix coefficients and cell data
# --------------------------------------------------------------------------


def _laurent_u(alpha: complex, k: int) -> complex:
    """(alpha^(k+1) - alpha^-(k+1)) / (alpha - 1/alpha) as a finite Laurent sum."""
    if k == -1:
        return 0.0
    if k < -1:
        return -_laurent_u(alpha, -k - 2)
    return sum(alpha ** (k - 2 * j) for j in range(k + 1))


def macdonald_bracket(alpha: complex, q: int, k: int, *, limit: bool = False) -> complex:
    """alpha^k (1 - alpha^-2/q)/(1 - alpha^-2) + alpha^-k (1 - alpha^2/q)/(1 - alpha^2).

    At alpha^2 = 1 the two terms have cancelling poles. With ``limit`` the
    value comes from the equivalent Laurent polynomial U_k - U_{k-2}/q, which
    is finite everywhere.
    """
    if abs(alpha * alpha - 1) < 1e-9:
        if not limit:
            raise SingularityError("alpha^2 = 1: pass limit=True for the removable limit")
        return _laurent_u(alpha, k) - _laurent_u(alpha, k - 2) / q
    a2 = alpha * alpha
    return alpha**k * (1 - 1 / (a2 * q)) / (1 - 1 / a2) + alpha**-k * (1 - a2 / q) / (1 - a2)


def _zeta_ratio(q: int) -> Fraction:
    # zeta(2)/zeta(1) = (1 - 1/q)/(1 - 1/q^2)
    return zeta_local_exact(q, 2) / zeta_local_exact(q, 1)


def macdonald_iia(place: FinitePlace, p: IIaParams, cell: Cell, *, limit: bool = False) -> complex:
    """Normalized pairing of the translate of the newform with itself at a cell."""
    n, m, q = cell.n, cell.m, place.q
    if n + m < 0:
        raise ValueError("cells need n + m >= 0")
    alpha = p.alpha(q)
    dist = abs(n - m - 1) if cell.w else abs(n - m)
    head = float(_zeta_ratio(q)) * p.sign ** ((n - m) % 2) * q ** (-dist - (n + m) / 2) / (1 + 1 / q)
    value = head * macdonald_bracket(alpha, q, n + m, limit=limit)
    return -value if cell.w else value


def weil_phi_finite(
    place_type: Literal["unram", "div_n1", "div_n2"], place: FinitePlace, cell: Cell
) -> Fraction:
    """Weil representation matrix coefficient at a cell, as an exact q-power."""
    q = Fraction(place.q)
    n, m = cell.n, cell.m
    if place_type == "unram":
        if cell.w:
            raise ValueError("the unramified coefficient is only defined on h_{n,m}")
        return q ** (-2 * abs(n) - 2 * abs(m))
    if place_type not in ("div_n1", "div_n2"):
        raise ValueError(f"unknown place type {place_type!r}")
    if cell.w:
        return q ** (-abs(n) - abs(n - 1) - abs(m) - abs(m + 1) - 2)
    return q ** (-2 * abs(n) - 2 * abs(m) - 2)


def coset_card(place: FinitePlace, cell: Cell) -> Fraction:
    """Number of single cosets in the Iwahori-level double coset of a cell."""
    n, m = cell.n, cell.m
    if n + m < 0:
        raise ValueError("cells need n + m >= 0")
    q = Fraction(place.q)
    dist = abs(n - m - 1) if cell.w else abs(n - m)
    if n + m == 0:
        return q**dist
    return q ** (n + m + dist) * (1 + 1 / q)


def iia_cells(N: int) -> Iterable[Cell]:
    """All cells with |n|, |m| <= N and n + m >= 0, in a fixed order."""
    for n in range(-N, N + 1):
        for m in range(max(-N, -n), N + 1):
            yield Cell(n, m, False)
            yield Cell(n, m, True)


# --------------------------------------------------------------------------
# the local Rallis zeta integral
# --------------------------------------------------------------------------


def l_std_gl2pair(place: FinitePlace, p: IIaParams, s: complex | None = None):
    """L(s, sigma, std) = (1 - e alpha q^(-s-1/2))^-1 (1 - e alpha^-1 q^(-s-1/2))^-1.

    With ``s=None`` the factor is returned as an :class:`ExactLFactor` in X = q^-s.
    """
    q, e, alpha = place.q, p.sign, p.alpha(place.q)
    root = q**-0.5
    if s is None:
        return ExactLFactor.from_roots([e * alpha * root, e / alpha * root])
    x = cmath.exp(-(complex(s) + 0.5) * math.log(q))
    d1, d2 = 1 - e * alpha * x, 1 - e / alpha * x
    if d1 == 0 or d2 == 0:
        raise PoleError("L(s, sigma, std) has a pole here")
    return 1 / (d1 * d2)


def iia_rallis_zeta_series(
    place: FinitePlace,
    p: IIaParams,
    N: int = 40,
    place_type: Literal["div_n1", "div_n2"] = "div_n1",
    *,
    limit: bool = False,
) -> complex:
    """Truncated cell sum for the local zeta integral at a place dividing the level."""
    if N < 1:
        raise ValueError("N must be >= 1")
    q = place.q
    total = 0j
    for cell in iia_cells(N):
        phi = float(weil_phi_finite(place_type, place, cell))
        card = float(coset_card(place, cell))
        total += phi * card * macdonald_iia(place, p, cell, limit=limit)
    zq = float(zeta_local_exact(q, 2) * zeta_local_exact(q, 4))
    vol = 1 / (1 + q)
    return 0.25 * zq / l_std_gl2pair(place, p, 1.0) * vol * total


def iia_rallis_zeta_closed(place: FinitePlace) -> Fraction:
    """2^-2 q^-3 zeta(2) zeta(4) / zeta(1)^2, exactly."""
    q = place.q
    z = zeta_local_exact
    return Fraction(1, 4) * Fraction(1, q**3) * z(q, 2) * z(q, 4) / z(q, 1) ** 2


def _bracket_sum(p: IIaParams, q: int):
    """The common closed form of the geometric sums in alpha."""
    e, alpha = p.sign, p.alpha(q)
    r = q**-1.5
    d = (1 - e * alpha * r) * (1 - e / alpha * r)
    if abs(d) < 1e-300:
        raise PoleError("geometric series denominator vanishes")
    return (e * r * (alpha + 1 / alpha) - q**-3.0 - q**-4.0) / d


def z_subsum_closed(place: FinitePlace, p: IIaParams, i: int) -> complex:
    """Closed forms of the four partial sums Z^(1), ..., Z^(4)."""
    q = place.q
    if i == 1:
        return (q - 1 / q) ** 2 / (q**4 - 1)
    b = _bracket_sum(p, q)
    head = q**-2.0 - q**-4.0
    if i == 2:
        return head * b
    if i == 3:
        return head / (q**4 - 1) * b
    if i == 4:
        return (q**-2.0 - 1) / (q**4 - 1) * b
    raise ValueError("subsum index is 1, 2, 3 or 4")


def z_subsum_series(place: FinitePlace, p: IIaParams, i: int, N: int = 60, *, limit: bool = False) -> complex:
    """The defining sums of Z^(1), ..., Z^(4), truncated at N."""
    q, e = place.q, p.sign
    alpha = p.alpha(q)

    def br(k: int) -> complex:
        return macdonald_bracket(alpha, q, k, limit=limit)

    if i == 1:
        return sum(q ** (-4 * abs(n) - 2.0) - q ** (-2 * abs(n) - 2 * abs(n - 1) - 2.0) for n in range(-N, N + 1))
    if i == 2:
        return (q**-2.0 - q**-4.0) * sum(e**m * q ** (-1.5 * m) * br(m) for m in range(1, N + 1))
    if i == 3:
        return (q**-2.0 - q**-4.0) * sum(
            e ** ((n + m) % 2) * q ** (-2.5 * n - 1.5 * m) * br(m - n)
            for n in range(1, N + 1)
            for m in range(n + 1, N + 1)
        )
    if i == 4:
        return (q**-2.0 - 1) * sum(
            e ** ((n + m) % 2) * q ** (-1.5 * n - 2.5 * m) * br(n - m)
            for m in range(1, N + 1)
            for n in range(m + 1, N + 1)
        )
    raise ValueError("subsum index is 1, 2, 3 or 4")


# --------------------------------------------------------------------------
# Euler factors and Satake exponents
# --------------------------------------------------------------------------


def _polymul(a: Sequence, b: Sequence) -> tuple:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return tuple(out)


def _trim(a: Sequence) -> tuple:
    a = list(a)
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return tuple(a)


@dataclass(frozen=True)
class ExactLFactor:
    """numerator(X) / denominator(X) with X = q^-s; coefficient lists start at X^0."""

    numerator: tuple = (1,)
    denominator: tuple = (1,)
    # reciprocal roots of the denominator when known; evaluation then uses the
    # product form, which avoids cancellation among expanded coefficients
    roots: tuple | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        num, den = _trim(self.numerator), _trim(self.denominator)
        if den[0] != 1:
            raise ValueError("the denominator must take the value 1 at X = 0")
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "denominator", den)

    @classmethod
    def from_roots(cls, roots: Iterable) -> "ExactLFactor":
        """prod (1 - r X)^-1."""
        roots = tuple(roots)
        den: tuple = (1,)
        for r in roots:
            den = _polymul(den, (1, -r))
        return cls((1,), den, roots)

    def __mul__(self, other: "ExactLFactor") -> "ExactLFactor":
        roots = None
        if self.roots is not None and other.roots is not None:
            roots = self.roots + other.roots
        return ExactLFactor(
            _polymul(self.numerator, other.numerator), _polymul(self.denominator, other.denominator), roots
        )

    def inverse(self) -> "ExactLFactor":
        if self.numerator[0] != 1:
            raise ValueError("only factors with numerator(0) = 1 can be inverted")
        return ExactLFactor(self.denominator, self.numerator)

    def at_x(self, x):
        if self.roots is not None and self.numerator == (1,):
            den = 1
            for r in self.roots:
                den = den * (1 - r * x)
            if den == 0:
                raise PoleError("Euler factor evaluated at a pole")
            return 1 / den
        num = sum(c * x**k for k, c in enumerate(self.numerator))
        den = sum(c * x**k for k, c in enumerate(self.denominator))
        if den == 0:
            raise PoleError("Euler factor evaluated at a pole")
        return num / den

    def __call__(self, q: int, s):
        """Value at s for residue field size q."""
        if isinstance(s, (int, Fraction)) and Fraction(s).denominator == 1:
            return self.at_x(Fraction(1, q) ** int(s) if s >= 0 else Fraction(q) ** int(-s))
        return self.at_x(cmath.exp(-complex(s) * math.log(q)))


Pair = tuple[Fraction, Fraction]


class ExponentMultiset:
    """Multiset of formal exponents u*lambda1 + v*lambda2, stored as (u, v) pairs."""

    def __init__(self, items: Iterable[tuple] = ()) -> None:
        self._c: Counter = Counter((Fraction(u), Fraction(v)) for u, v in items)

    @property
    def items(self) -> list[Pair]:
        return sorted(self._c.elements())

    def __len__(self) -> int:
        return sum(self._c.values())

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ExponentMultiset) and self._c == other._c

    def __repr__(self) -> str:
        inner = ", ".join(f"({u},{v})" for u, v in self.items)
        return f"ExponentMultiset[{inner}]"

    def union(self, other: "ExponentMultiset") -> "ExponentMultiset":
        out = ExponentMultiset()
        out._c = self._c + other._c
        return out

    __add__ = union

    def negate(self) -> "ExponentMultiset":
        return ExponentMultiset((-u, -v) for u, v in self.items)

    def total(self) -> Pair:
        return (sum((u for u, _ in self.items), Fraction(0)), sum((v for _, v in self.items), Fraction(0)))

    def tensor(self, other: "ExponentMultiset") -> "ExponentMultiset":
        return ExponentMultiset((a[0] + b[0], a[1] + b[1]) for a, b in product(self.items, other.items))

    def wedge2(self) -> "ExponentMultiset":
        return ExponentMultiset((a[0] + b[0], a[1] + b[1]) for a, b in combinations(self.items, 2))

    def sym2(self) -> "ExponentMultiset":
        return ExponentMultiset((a[0] + b[0], a[1] + b[1]) for a, b in combinations_with_replacement(self.items, 2))

    def specialize(self, lam1, lam2) -> list:
        """Numeric exponents u*lam1 + v*lam2."""
        return [u * lam1 + v * lam2 for u, v in self.items]

    def difference(self, other: "ExponentMultiset") -> tuple["ExponentMultiset", "ExponentMultiset"]:
        """(self - other, other - self) as multisets; both empty iff equal."""
        a, b = ExponentMultiset(), ExponentMultiset()
        a._c = self._c - other._c
        b._c = other._c - self._c
        return a, b


_H = Fraction(1, 2)


def satake_multisets(kind: Literal["spin", "std", "ad"]) -> ExponentMultiset:
    """Satake exponents of the spin (4), standard (5) and adjoint (10) representations."""
    if kind == "spin":
        return ExponentMultiset([(_H, _H), (-_H, -_H), (_H, -_H), (-_H, _H)])
    if kind == "std":
        return ExponentMultiset([(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)])
    if kind == "ad":
        return ExponentMultiset(
            [(0, 0), (0, 0), (1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1), (1, -1), (-1, 1)]
        )
    raise ValueError(f"unknown representation {kind!r}")


@dataclass(frozen=True)
class TensorCheck:
    ok: bool
    witness: dict


def tensor_decomp_check(lam1=None, lam2=None) -> TensorCheck:
    """spin x spin = 1 + std + ad, wedge^2 spin = 1 + std, Sym^2 spin = ad.

    Without arguments the identities are checked on formal exponents. With
    rational ``lam1, lam2`` they are checked after specialization, where
    collisions among exponents are allowed.
    """
    spin, std, ad = (satake_multisets(k) for k in ("spin", "std", "ad"))
    one = ExponentMultiset([(0, 0)])
    pairs = {
        "spin_x_spin": (spin.tensor(spin), one + std + ad),
        "wedge2": (spin.wedge2(), one + std),
        "sym2": (spin.sym2(), ad),
    }
    witness = {}
    for name, (lhs, rhs) in pairs.items():
        if lam1 is None:
            extra, missing = lhs.difference(rhs)
            if len(extra) or len(missing):
                witness[name] = (extra, missing)
        else:
            a = Counter(lhs.specialize(Fraction(lam1), Fraction(lam2)))
            b = Counter(rhs.specialize(Fraction(lam1), Fraction(lam2)))
            if a != b:
                witness[name] = (a - b, b - a)
    return TensorCheck(not witness, witness)


def euler_factor(q: int, exponents: Sequence[complex]) -> ExactLFactor:
    """prod over exponents e of (1 - q^e X)^-1."""
    return ExactLFactor.from_roots([cmath.exp(e * math.log(q)) for e in exponents])


# --------------------------------------------------------------------------
# normalizing factors and unramified closed forms
# --------------------------------------------------------------------------


def dP_dPcal_values(place: FinitePlace | LocalZetaPlace) -> tuple[tuple, tuple]:
    """((d_P(1/2), z2 z3 z4), (d_Pcal(1), z2 z3 z4^2)).

    Exact fractions at a finite place; floats at the real place.
    """
    if isinstance(place, FinitePlace):
        q = place.q

        def z(s):
            return zeta_local_exact(q, s)

        half = Fraction(1, 2)
        # d_P(s) = z(s+5/2) z(2s+1) z(2s+3); d_Pcal(s) = z(s+1) z(s+2) z(s+3) z(2s+2)
        d_p = z(int(half + Fraction(5, 2))) * z(int(2 * half + 1)) * z(int(2 * half + 3))
        d_pc = z(2) * z(3) * z(4) * z(4)
        return (d_p, z(2) * z(3) * z(4)), (d_pc, z(2) * z(3) * z(4) ** 2)

    def zr(s):
        return zeta_local(place, s)

    d_p = zr(0.5 + 2.5) * zr(2 * 0.5 + 1) * zr(2 * 0.5 + 3)
    d_pc = zr(1 + 1) * zr(1 + 2) * zr(1 + 3) * zr(2 * 1 + 2)
    return (d_p, zr(2) * zr(3) * zr(4)), (d_pc, zr(2) * zr(3) * zr(4) ** 2)


def _unram_pieces(place: FinitePlace, lam1: complex, lam2: complex):
    q = place.q
    spin, std, ad = (satake_multisets(k) for k in ("spin", "std", "ad"))
    l_std = euler_factor(q, std.specialize(lam1, lam2))
    l_ad = euler_factor(q, ad.specialize(lam1, lam2))
    l_pp = euler_factor(q, spin.tensor(spin).specialize(lam1, lam2))
    zp = place.zeta_place
    return l_std, l_ad, l_pp, (lambda s: zeta_local(zp, s))


def unram_formula_evaluators(
    place: FinitePlace,
    lam1: complex,
    lam2: complex,
    s: complex,
    *,
    whittaker_sq: float = 1.0,
) -> tuple[complex, complex]:
    """The unramified doubling and Jiang-type local zeta integrals at s.

    Sections are normalized as in the spherical case: the doubling section
    takes the value q^(-6c) at the identity and the Jiang section the value
    zeta(s+1) zeta(s+2) zeta(s+3). ``whittaker_sq`` is |W|^2 at the
    conductor-shifted torus element (1 for the normalized newform).
    """
    q, c = place.q, place.c
    l_std, _, l_pp, z = _unram_pieces(place, lam1, lam2)
    d_p = z(s + 2.5) * z(2 * s + 1) * z(2 * s + 3)
    d_pc = z(s + 1) * z(s + 2) * z(s + 3) * z(2 * s + 2)
    psr = q ** (-6 * c) * q ** (-5 * c) / (z(2) * z(4) * d_p) * l_std(q, s + 0.5)
    section = z(s + 1) * z(s + 2) * z(s + 3)
    jiang = (
        section
        * whittaker_sq
        * q ** ((1.5 * s - 13) * c)
        / (z(2) ** 2 * z(4) ** 2 * d_pc)
        * l_pp(q, (s + 1) / 2)
    )
    return complex(psr), complex(jiang)


def unram_local_constant(place: FinitePlace, lam1: complex, lam2: complex) -> complex:
    """C = z(1)^-1 z(3)^-1 z(4) L(1, Ad)^-1 (Jiang at 1)/(doubling at 1/2) q^(-9c/2)."""
    q, c = place.q, place.c
    _, l_ad, _, z = _unram_pieces(place, lam1, lam2)
    psr, _ = unram_formula_evaluators(place, lam1, lam2, 0.5)
    _, jiang = unram_formula_evaluators(place, lam1, lam2, 1.0)
    return z(4) / (z(1) * z(3) * l_ad(q, 1.0)) * jiang / psr * q ** (-4.5 * c)
