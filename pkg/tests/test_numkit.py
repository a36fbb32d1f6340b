import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from gsp4norms.numkit import (
    ContourSpec,
    NonConvergenceError,
    PrecisionConfig,
    QuadratureRule,
    contour_line,
    contour_plane,
    gauss_legendre_panels,
    integrate_halfline,
    integrate_halfline_nd,
    integrate_tensor_hermite,
)


class TestConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"target_rel_tol": 0.0},
            {"target_rel_tol": 1.5},
            {"max_nodes": 8},
            {"working_mode": "quad"},
        ],
    )
    def test_rejects(self, kwargs):
        with pytest.raises(ValueError):
            PrecisionConfig(**kwargs)

    def test_contour_spec_rejects_few_nodes(self):
        with pytest.raises(ValueError):
            ContourSpec(1.0, nodes=10)

    def test_unknown_rule(self):
        with pytest.raises(ValueError):
            QuadratureRule("simpson")


@pytest.mark.parametrize(
    "f, exact",
    [
        (lambda x: np.exp(-x), 1.0),
        (lambda x: 1.0 / (1.0 + x * x), math.pi / 2),
        (lambda x: x**-0.5 * np.exp(-x), math.sqrt(math.pi)),
        (lambda x: np.exp(-x * x), math.sqrt(math.pi) / 2),
    ],
    ids=["exp", "cauchy", "endpoint-singular", "gaussian"],
)
def test_halfline_known_integrals(f, exact):
    res = integrate_halfline(f, cfg=PrecisionConfig(1e-12, 20000))
    assert res.converged
    assert res.value == pytest.approx(exact, rel=1e-11)


def test_halfline_extended_mode_agrees():
    f = lambda x: np.exp(-x) * np.cos(x)  # noqa: E731
    a = integrate_halfline(f, cfg=PrecisionConfig(1e-12, 20000)).value
    b = integrate_halfline(f, cfg=PrecisionConfig(1e-12, 20000, "extended")).value
    assert a == pytest.approx(0.5, rel=1e-11)
    assert b == pytest.approx(0.5, rel=1e-11)


def test_halfline_node_cap_raises():
    # oscillatory tail defeats the rule under a tiny node budget
    with pytest.raises(NonConvergenceError):
        integrate_halfline(lambda x: np.sin(x) / (1 + x), cfg=PrecisionConfig(1e-14, 16))


def test_halfline_non_strict_reports():
    res = integrate_halfline(lambda x: np.sin(x) / (1 + x), cfg=PrecisionConfig(1e-14, 16), strict=False)
    assert not res.converged


def test_halfline_nd_product():
    res = integrate_halfline_nd(lambda x, y: np.exp(-x - 2 * y), 2, PrecisionConfig(1e-10, 10**6))
    assert complex(res.value).real == pytest.approx(0.5, rel=1e-10)


@given(st.integers(min_value=1, max_value=12), st.integers(min_value=0, max_value=23))
def test_gauss_hermite_polynomial_exactness(order, degree):
    assume(degree <= 2 * order - 1)
    got = integrate_tensor_hermite(lambda x: x**degree, order, 1)
    scale = math.gamma((degree + 1) / 2)  # integral of |x|^degree e^(-x^2)
    exact = 0.0 if degree % 2 else scale
    assert abs(got - exact) <= 1e-12 * scale


def test_gauss_hermite_tensor_2d():
    got = integrate_tensor_hermite(lambda x, y: x**2 * y**4, 4, 2)
    assert got == pytest.approx(math.gamma(1.5) * math.gamma(2.5), rel=1e-13)


def test_legendre_panels_integrate_polynomials():
    t, w = gauss_legendre_panels(6.0, 96)
    assert np.sum(w) == pytest.approx(12.0, rel=1e-14)
    assert np.sum(w * t**4) == pytest.approx(2 * 6.0**5 / 5, rel=1e-13)


def _cahen_mellin(s):
    # (1/2 pi i) int Gamma(s) x^-s ds over Re s = c > 0 gives e^-x; here x = 1
    from gsp4norms.special import gamma

    return gamma(s)


@given(st.floats(min_value=0.3, max_value=3.0))
def test_contour_shift_invariance(c):
    res = contour_line(_cahen_mellin, ContourSpec(c, height=40.0, nodes=1024), PrecisionConfig(1e-10))
    assert complex(res.value).real == pytest.approx(math.exp(-1), rel=1e-10)


def test_contour_plane_separable():
    from gsp4norms.special import gamma

    spec = ContourSpec(1.0, height=40.0, nodes=512)
    res = contour_plane(lambda s1, s2: gamma(s1) * gamma(s2) * 2.0**-s2, spec, spec)
    assert complex(res.value).real == pytest.approx(math.exp(-1) * math.exp(-2), rel=1e-9)
    assert res.converged
