import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gsp4norms import whittaker as wh
from gsp4norms.numkit import ContourSpec, PrecisionConfig


class TestParams:
    @pytest.mark.parametrize("l1, l2", [(2, 1), (3, -3), (3, 0), (2.5, 0)])
    def test_ds_rejects(self, l1, l2):
        with pytest.raises(ValueError):
            wh.DSParams(l1, l2)

    def test_ds_kappa(self):
        p = wh.DSParams(4, -2)
        assert (p.kappa1, p.kappa2) == (6, 2)

    def test_ps_rejects(self):
        with pytest.raises(ValueError):
            wh.PSParams(0.6, 0.5)
        with pytest.raises(ValueError):
            wh.PSParams(0, 0, epsilon=2)

    def test_torus_positive(self):
        with pytest.raises(ValueError):
            wh.TorusPoint(0.0, 1.0)


class TestJ:
    @pytest.mark.parametrize("n, r", [(0, (1.0, 0.5, 0.2)), (3, (1.5, -0.4, 0.3)), (6, (0.5, 1.0, -0.5))])
    def test_against_mpmath(self, n, r):
        r1, r2, r3 = r

        def f(y):
            u = r1 * y + r2 / y
            return y ** (n - 2) * mpmath.hermite(n, mpmath.sqrt(mpmath.pi) * u) * mpmath.exp(
                -mpmath.pi * u**2 - mpmath.pi * r3 / y**2
            )

        ref = float(mpmath.quad(f, [0, 0.25, 1, 4, mpmath.inf]))
        assert wh.j_closed(n, *r) == pytest.approx(ref, rel=1e-10)

    @settings(max_examples=25)
    @given(
        st.integers(0, 6),
        st.floats(0.5, 2.0),
        st.floats(-0.5, 1.0),
        st.floats(0.0, 1.0),
    )
    def test_quad_equals_closed(self, n, r1, r2, extra):
        r3 = 0.1 - r2 * r2 + extra
        assert wh.j_quad(n, r1, r2, r3) == pytest.approx(wh.j_closed(n, r1, r2, r3), rel=1e-9)

    def test_domain(self):
        with pytest.raises(ValueError):
            wh.j_closed(0, -1.0, 0.0, 1.0)
        with pytest.raises(ValueError):
            wh.j_quad(0, 1.0, 0.1, -0.5)


class TestH:
    def test_h0_positive_and_decreasing(self):
        vals = [wh.h_fn(0, a1, 1.0) for a1 in np.linspace(1.0, 3.0, 6)]
        assert all(v > 0 for v in vals)
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_h_against_mpmath(self):
        n, a1, a2 = 2, 1.2, 0.9

        def f(y):
            s = mpmath.sqrt(a1**2 / y**2 + a2**2 * y**2)
            expo = y**2 + (a2 / y) * s - a2**2 + (y / a2) * s
            return a1 * a2 ** (n + 1) * y ** (-n - 2) * (s - a2 * y) ** n / s * mpmath.exp(-2 * mpmath.pi * expo)

        with mpmath.workdps(30):
            ref = float(mpmath.quad(f, [0, 0.5, 1, 2, mpmath.inf]))
        assert wh.h_fn(n, a1, a2) == pytest.approx(ref, rel=1e-10)

    @pytest.mark.parametrize("n, s1, s2", [(0, 1.0, -0.5), (1, 2.0, -1.0)])
    def test_mellin_identity(self, n, s1, s2):
        lhs, rhs = wh.h_mellin_check(n, s1, s2)
        assert lhs == pytest.approx(rhs, rel=1e-6)

    def test_mellin_rhs_pole_growth(self):
        vals = [abs(wh.h_mellin_rhs(0, 1.0, -e)) for e in (0.1, 0.01, 0.001)]
        assert vals[0] < vals[1] < vals[2]
        assert vals[2] / vals[1] == pytest.approx(10.0, rel=0.05)

    @pytest.mark.parametrize("s1, s2", [(0.0, -0.5), (1.0, 0.2), (0.2, -1.5)])
    def test_mellin_strip(self, s1, s2):
        with pytest.raises(wh.ContourError):
            wh.h_mellin_rhs(0, s1, s2)


class TestDSWhittaker:
    def test_direct_at_identity(self):
        # W(1) = 2 e^(-2 pi) h_1(1, 1) for the parameter (3, -1)
        p = wh.DSParams(3, -1)
        assert wh.ds_whittaker_direct(p, wh.TorusPoint()) == pytest.approx(
            2 * math.exp(-2 * math.pi) * wh.h_fn(1, 1.0, 1.0), rel=1e-12
        )

    @pytest.mark.parametrize("l1, l2, a1, a2", [(2, 0, 1.0, 1.0), (3, -1, 0.8, 1.25), (4, -2, 1.25, 1.0)])
    def test_mb_vs_direct(self, l1, l2, a1, a2):
        p, t = wh.DSParams(l1, l2), wh.TorusPoint(a1, a2)
        assert wh.ds_whittaker_mb(p, t) == pytest.approx(wh.ds_whittaker_direct(p, t), rel=1e-6)

    def test_contour_shift(self):
        p, t = wh.DSParams(3, -1), wh.TorusPoint()
        a = wh.ds_whittaker_mb(p, t)
        b = wh.ds_whittaker_mb(p, t, (ContourSpec(2.0, 26.0, 416), ContourSpec(-0.25, 26.0, 416)))
        assert a == pytest.approx(b, rel=1e-8)

    def test_normalization_ratio(self):
        p = wh.DSParams(2, 0)
        ratio = wh.ds_whittaker_direct(p, wh.TorusPoint()) / wh.ds_normalization(p)
        assert ratio == pytest.approx(wh.ds_prefactor(p), rel=1e-6)

    def test_normalization_positive(self):
        assert wh.ds_normalization(wh.DSParams(2, 0)) > 0

    def test_bad_contour(self):
        with pytest.raises(ValueError):
            wh.ds_whittaker_mb(
                wh.DSParams(2, 0), wh.TorusPoint(), (ContourSpec(-1.0, 20.0, 320), ContourSpec(-0.5, 20.0, 320))
            )


class TestPSWhittaker:
    def test_mb_vs_direct(self):
        p, t = wh.PSParams(0.2, 0.1), wh.TorusPoint()
        assert wh.ps_whittaker_mb(p, t, refine=False) == pytest.approx(wh.ps_whittaker_direct(p, t), rel=1e-5)

    def test_real_parameters_real_value(self):
        v = wh.ps_whittaker_mb(wh.PSParams(0.2, 0.1), wh.TorusPoint(), refine=False)
        assert abs(v.imag) < 1e-8 * abs(v)

    def test_trivial_parameter_positive(self):
        v = wh.ps_normalization(wh.PSParams(0, 0), refine=False)
        assert v.real > 0 and abs(v.imag) < 1e-10 * v.real

    @pytest.mark.parametrize("swap", [lambda a, b: (b, a), lambda a, b: (-a, b), lambda a, b: (-b, -a)])
    def test_weyl_invariance(self, swap):
        l1, l2 = 0.3j, 0.1j
        base = wh.ps_normalization(wh.PSParams(l1, l2), refine=False)
        other = wh.ps_normalization(wh.PSParams(*swap(l1, l2)), refine=False)
        assert other == pytest.approx(base, rel=1e-6)

    def test_contour_constraint(self):
        p = wh.PSParams(0.4, 0.0)
        with pytest.raises(ValueError):
            wh.ps_whittaker_mb(p, wh.TorusPoint(), (ContourSpec(0.2, 10.0, 80), ContourSpec(1.0, 10.0, 80)))
