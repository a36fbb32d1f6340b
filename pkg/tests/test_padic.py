import cmath
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gsp4norms import padic as pa
from gsp4norms.special import LocalZetaPlace, zeta_local, zeta_local_exact

PRIMES = [2, 3, 5, 7]


class TestIIaZeta:
    def test_closed_value_q2(self):
        assert pa.iia_rallis_zeta_closed(pa.FinitePlace(2)) == Fraction(1, 90)

    @pytest.mark.parametrize("q", PRIMES)
    def test_closed_form_exact(self, q):
        z = zeta_local_exact
        expected = Fraction(1, 4 * q**3) * z(q, 2) * z(q, 4) / z(q, 1) ** 2
        assert pa.iia_rallis_zeta_closed(pa.FinitePlace(q)) - expected == 0

    def test_series_q2(self):
        val = pa.iia_rallis_zeta_series(pa.FinitePlace(2), pa.IIaParams(0, 0.2j), 40)
        assert val == pytest.approx(1 / 90, rel=1e-10)

    def test_geometric_convergence(self):
        place, p = pa.FinitePlace(3), pa.IIaParams(1, 0.1j)
        target = float(pa.iia_rallis_zeta_closed(place))
        errs = [abs(pa.iia_rallis_zeta_series(place, p, N) - target) for N in (4, 8, 12)]
        assert errs[0] > errs[1] > errs[2]
        # error shrinks by a roughly constant factor per added block of cells
        assert errs[2] / errs[1] < 0.2 and errs[1] / errs[0] < 0.2

    @settings(max_examples=10)
    @given(st.sampled_from(PRIMES), st.integers(0, 1), st.floats(-4.0, 4.0))
    def test_alpha_independence(self, q, eps, t):
        place = pa.FinitePlace(q)
        val = pa.iia_rallis_zeta_series(place, pa.IIaParams(eps, complex(0, t)), 40, limit=True)
        assert val == pytest.approx(float(pa.iia_rallis_zeta_closed(place)), rel=1e-10)

    @pytest.mark.parametrize("i", [1, 2, 3, 4])
    @pytest.mark.parametrize("q, eps, lam", [(2, 0, 0.3j), (5, 1, 0.35j), (3, 0, 0.2)])
    def test_subsums(self, i, q, eps, lam):
        place, p = pa.FinitePlace(q), pa.IIaParams(eps, lam)
        assert pa.z_subsum_series(place, p, i) == pytest.approx(pa.z_subsum_closed(place, p, i), rel=1e-12)

    def test_bad_truncation(self):
        with pytest.raises(ValueError):
            pa.iia_rallis_zeta_series(pa.FinitePlace(2), pa.IIaParams(0, 0.0), 0)


class TestMacdonald:
    @pytest.mark.parametrize("k", [0, 1, 2, 5])
    @pytest.mark.parametrize("q", [2, 7])
    def test_limit_is_continuous(self, k, q):
        # approaching alpha = 1 along the unit circle the gap closes like delta^2;
        # much closer than 1e-4 the cancelling poles cost more than that
        at = pa.macdonald_bracket(1.0, q, k, limit=True)
        gaps = [abs(pa.macdonald_bracket(cmath.exp(1j * d), q, k) - at) / abs(at) for d in (1e-2, 1e-3)]
        assert gaps[1] < 1e-5
        assert gaps[1] < 0.02 * gaps[0] or gaps[1] < 1e-11

    def test_singular_without_limit(self):
        with pytest.raises(pa.SingularityError):
            pa.macdonald_bracket(-1.0, 3, 2)

    @given(st.floats(0.1, 3.0), st.integers(0, 6))
    def test_inversion_symmetry(self, theta, k):
        # the bracket is symmetric under alpha -> 1/alpha
        a = cmath.exp(1j * theta)
        assert pa.macdonald_bracket(a, 5, k) == pytest.approx(pa.macdonald_bracket(1 / a, 5, k), rel=1e-10, abs=1e-12)


class TestParams:
    @pytest.mark.parametrize("q, c", [(1, 0), (2.5, 0), (3, -1)])
    def test_place_rejects(self, q, c):
        with pytest.raises(ValueError):
            pa.FinitePlace(q, c)

    def test_iia_rejects(self):
        with pytest.raises(ValueError):
            pa.IIaParams(2, 0.0)
        with pytest.raises(ValueError):
            pa.IIaParams(0, 0.6)


class TestExactLFactor:
    def test_from_roots_value(self):
        L = pa.ExactLFactor.from_roots([Fraction(1, 2), Fraction(1, 3)])
        assert L(2, 1) == 1 / ((1 - Fraction(1, 4)) * (1 - Fraction(1, 6)))

    def test_inverse(self):
        L = pa.ExactLFactor.from_roots([2, 3])
        prod = L * L.inverse()
        assert prod(5, 2) == 1

    def test_denominator_normalized(self):
        with pytest.raises(ValueError):
            pa.ExactLFactor((1,), (2, 1))


class TestSatake:
    @pytest.mark.parametrize("kind, size", [("spin", 4), ("std", 5), ("ad", 10)])
    def test_sizes_and_self_duality(self, kind, size):
        m = pa.satake_multisets(kind)
        assert len(m) == size
        assert m == m.negate()

    def test_formal_identities(self):
        res = pa.tensor_decomp_check()
        assert res.ok, res.witness

    def test_tensor_square_sums_to_zero(self):
        spin = pa.satake_multisets("spin")
        assert spin.tensor(spin).total() == (0, 0)
        assert len(spin.tensor(spin)) == 16

    @given(st.fractions(-2, 2, max_denominator=7), st.fractions(-2, 2, max_denominator=7))
    def test_specialized_identities(self, l1, l2):
        assert pa.tensor_decomp_check(l1, l2).ok

    def test_specialization_with_collisions(self):
        assert pa.tensor_decomp_check(Fraction(1, 3), Fraction(1, 3)).ok

    @settings(max_examples=20)
    @given(
        st.sampled_from(PRIMES),
        st.floats(-0.4, 0.4),
        st.floats(-1.0, 1.0),
        st.floats(1.2, 3.0),
    )
    def test_euler_product(self, q, l1, t2, s):
        spin, std, ad = (pa.satake_multisets(k) for k in ("spin", "std", "ad"))
        l2 = complex(0, t2)
        lhs = pa.euler_factor(q, spin.tensor(spin).specialize(l1, l2))(q, s)
        rhs = (
            zeta_local(LocalZetaPlace.finite(q), s)
            * pa.euler_factor(q, std.specialize(l1, l2))(q, s)
            * pa.euler_factor(q, ad.specialize(l1, l2))(q, s)
        )
        assert lhs == pytest.approx(rhs, rel=1e-12)


class TestNormalizingFactors:
    @pytest.mark.parametrize("q", [2, 5])
    def test_exact_at_finite_places(self, q):
        (a, b), (c, d) = pa.dP_dPcal_values(pa.FinitePlace(q))
        assert isinstance(a, Fraction)
        assert a == b and c == d

    def test_real_place(self):
        (a, b), (c, d) = pa.dP_dPcal_values(LocalZetaPlace.real())
        assert a == pytest.approx(b, rel=1e-12)
        assert c == pytest.approx(d, rel=1e-12)


class TestUnramified:
    @pytest.mark.parametrize("c", [0, 1, 2])
    @pytest.mark.parametrize("q, lam", [(2, (0.2j, 0.05j)), (3, (0.1, 0.3j)), (7, (0.0, 0.0))])
    def test_constant_is_q_power(self, q, c, lam):
        assert pa.unram_local_constant(pa.FinitePlace(q, c), *lam) == pytest.approx(q ** (-5 * c), rel=1e-12)

    def test_doubling_at_c0(self):
        # c = 0 leaves d_P^-1 L(s+1/2, std) / (z(2) z(4))
        place, lam = pa.FinitePlace(5), (0.1, 0.2j)
        s = 0.5
        psr, _ = pa.unram_formula_evaluators(place, *lam, s)
        std = pa.satake_multisets("std")
        z = lambda x: 1 / (1 - 5.0**-x)  # noqa: E731
        expected = pa.euler_factor(5, std.specialize(*lam))(5, s + 0.5) / (z(2) * z(4) * z(3) * z(2) * z(4))
        assert psr == pytest.approx(expected, rel=1e-13)

    def test_tensor_square_factorization_at_a_point(self):
        q, lam, s = 2, (0.2j, 0.05j), 1.0
        spin, std, ad = (pa.satake_multisets(k) for k in ("spin", "std", "ad"))
        lhs = pa.euler_factor(q, spin.tensor(spin).specialize(*lam))(q, s)
        rhs = 1 / (1 - q**-s) * pa.euler_factor(q, std.specialize(*lam))(q, s) * pa.euler_factor(q, ad.specialize(*lam))(q, s)
        assert lhs == pytest.approx(rhs, rel=1e-12)
        assert math.isfinite(abs(lhs))
