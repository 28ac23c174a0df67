import math

import numpy as np
import pytest
from numpy.polynomial import chebyshev as C

from circren import config
from circren.chebseries import (
    Interval,
    MONOTONE_INC,
    cheb_affine,
    cheb_compose,
    cheb_derivative,
    cheb_eval,
    cheb_fit,
    cheb_invert,
    identity_piece,
    refit,
    restrict,
)
from circren.errors import (
    CompositionRangeError,
    DomainError,
    NonFiniteSampleError,
)

UNIT = Interval(-1.0, 1.0)


def projection_coefficient(f, k, n_quad=4000):
    """Quadrature oracle: k-th Chebyshev coefficient of f on [-1,1]."""
    theta = (np.arange(n_quad) + 0.5) * np.pi / n_quad
    vals = f(np.cos(theta)) * np.cos(k * theta)
    c = 2.0 / n_quad * np.sum(vals)
    return c / 2.0 if k == 0 else c


class TestFit:
    def test_identity_is_t1(self):
        p = cheb_fit(lambda x: x, UNIT, 8)
        expect = np.zeros(9)
        expect[1] = 1.0
        assert np.allclose(p.coeffs, expect, atol=1e-15)

    def test_cube_is_t1_t3_combination(self):
        p = cheb_fit(lambda x: x**3, UNIT, 8)
        expect = np.zeros(9)
        expect[1] = 0.75
        expect[3] = 0.25
        assert np.allclose(p.coeffs, expect, atol=1e-15)

    def test_cos_matches_projection_oracle(self):
        p = cheb_fit(np.cos, UNIT, 16)
        for k in range(17):
            assert p.coeffs[k] == pytest.approx(
                projection_coefficient(np.cos, k), abs=1e-14)

    def test_nonfinite_sample_rejected(self):
        with pytest.raises(NonFiniteSampleError) as err:
            cheb_fit(lambda x: 1.0 / (x - x + 0.0) if np.isscalar(x) else 1.0 / (x * 0.0),
                     UNIT, 4)
        assert err.value.node is not None

    def test_tail_estimate_is_last_two_coeffs(self):
        p = cheb_fit(np.exp, UNIT, 20)
        assert p.tail == pytest.approx(np.max(np.abs(p.coeffs[-2:])))
        assert p.converged

    def test_roundtrip_at_nodes(self):
        dom = Interval(0.3, 2.1)
        f = lambda x: np.sin(x) + x**2
        p = cheb_fit(f, dom, 32)
        j = np.arange(33)
        x = dom.from_unit(np.cos(np.pi * (2 * j + 1) / 66.0))
        rel = np.abs(cheb_eval(p, x) - f(x)) / np.maximum(np.abs(f(x)), 1.0)
        assert np.max(rel) < 1e-13


class TestEval:
    def test_cube_at_half(self):
        p = cheb_fit(lambda x: x**3, UNIT, 8)
        assert cheb_eval(p, 0.5) == pytest.approx(0.125, abs=1e-14)

    def test_identity_complex_continuation(self):
        p = cheb_fit(lambda x: x, UNIT, 8)
        assert cheb_eval(p, 0.3j) == pytest.approx(0.3j, abs=1e-14)

    def test_cos_value(self):
        p = cheb_fit(np.cos, UNIT, 16)
        assert cheb_eval(p, 0.7) == pytest.approx(math.cos(0.7), abs=1e-12)

    def test_far_outside_domain_raises_with_distance(self):
        p = cheb_fit(np.cos, UNIT, 8)
        with pytest.raises(DomainError) as err:
            cheb_eval(p, 3.0)
        assert err.value.distance == pytest.approx(2.0)

    def test_outside_ellipse_raises(self):
        p = cheb_fit(np.cos, UNIT, 8)
        with pytest.raises(DomainError):
            cheb_eval(p, 0.0 + 10.0j)


class TestDerivative:
    def test_cube_derivative_at_half(self):
        p = cheb_fit(lambda x: x**3, UNIT, 8)
        dp = cheb_derivative(p)
        assert cheb_eval(dp, 0.5) == pytest.approx(0.75, abs=1e-13)

    def test_constant_derivative_is_zero(self):
        p = cheb_fit(lambda x: np.full_like(np.asarray(x, dtype=float), 2.5),
                     UNIT, 4)
        dp = cheb_derivative(p)
        assert np.max(np.abs(dp.coeffs)) < 1e-14

    def test_matches_finite_differences(self):
        dom = Interval(0.1, 0.9)
        f = lambda x: x + 0.05 * np.sin(2 * np.pi * x)
        p = cheb_fit(f, dom, 40)
        dp = cheb_derivative(p)
        h = 1e-6
        for x in np.linspace(0.15, 0.85, 11):
            fd = (cheb_eval(p, x + h) - cheb_eval(p, x - h)) / (2 * h)
            assert cheb_eval(dp, x) == pytest.approx(fd, rel=1e-7)


class TestCompose:
    def test_cube_of_identity(self):
        cube = cheb_fit(lambda x: x**3, UNIT, 8)
        ident = cheb_fit(lambda x: x, UNIT, 8)
        comp = cheb_compose(cube, ident, 8)
        assert np.allclose(comp.coeffs, cube.coeffs, atol=1e-14)

    def test_shift_cancellation(self):
        plus = cheb_fit(lambda x: x + 1.0, Interval(-2.0, 2.0), 8)
        minus = cheb_fit(lambda x: x - 1.0, UNIT, 8)
        comp = cheb_compose(plus, minus, 8)
        ident = identity_piece(UNIT)
        x = np.linspace(-1, 1, 33)
        assert np.max(np.abs(cheb_eval(comp, x) - cheb_eval(ident, x))) < 1e-14

    def test_random_monotone_cubics_vs_pointwise_oracle(self):
        rng = np.random.default_rng(7)
        for _ in range(3):
            a, b = rng.uniform(0.2, 1.0, size=2)
            f = lambda x: x + a * 0.1 * x**3
            g = lambda x: x + b * 0.1 * x**3
            outer_dom = Interval(-1.5, 1.5)
            pf = cheb_fit(f, outer_dom, 24)
            pg = cheb_fit(g, UNIT, 24)
            comp = cheb_compose(pf, pg, 48)
            x = np.linspace(-1, 1, 100)
            assert np.max(np.abs(cheb_eval(comp, x) - f(g(x)))) < 1e-11

    def test_range_escape_raises(self):
        small = cheb_fit(np.cos, Interval(-0.1, 0.1), 8)
        big = cheb_fit(lambda x: x, UNIT, 8)
        with pytest.raises(CompositionRangeError) as err:
            cheb_compose(small, big, 8)
        assert err.value.escape > 0.5

    def test_associativity_at_probes(self):
        h = cheb_fit(lambda x: x + 0.02 * np.sin(x), Interval(-2, 2), 32)
        g = cheb_fit(lambda x: 1.1 * x, Interval(-1.5, 1.5), 32)
        f = cheb_fit(lambda x: x - 0.01 * x**2, UNIT, 32)
        left = cheb_compose(cheb_compose(h, g, 48), f, 48)
        right = cheb_compose(h, cheb_compose(g, f, 48), 48)
        x = np.linspace(-1, 1, 33)
        bound = max(left.tail + right.tail, 1e-12)
        assert np.max(np.abs(cheb_eval(left, x) - cheb_eval(right, x))) < 10 * bound


class TestInvert:
    def test_invert_scaling(self):
        p = cheb_fit(lambda x: 2.0 * x, UNIT, 8)
        q = cheb_invert(p, 8)
        assert q.domain.lo == pytest.approx(-2.0)
        assert q.domain.hi == pytest.approx(2.0)
        x = np.linspace(-2, 2, 17)
        assert np.max(np.abs(cheb_eval(q, x) - x / 2.0)) < 1e-13

    def test_involution(self):
        dom = Interval(0.0, 1.0)
        f = lambda x: x + 0.02 * np.sin(2 * np.pi * x) + 0.3
        p = cheb_fit(f, dom, 64)
        assert p.monotone_flag == MONOTONE_INC
        q = cheb_invert(p, 64)
        back = cheb_invert(q, 64)
        x = np.linspace(0.01, 0.99, 41)
        assert np.max(np.abs(cheb_eval(back, x) - cheb_eval(p, x))) < 1e-10

    def test_against_scalar_newton_oracle(self):
        dom = Interval(0.0, 1.0)
        f = lambda x: x + 0.1 * x**2
        p = cheb_fit(f, dom, 24)
        q = cheb_invert(p, 24)

        def oracle(y):
            x = y
            for _ in range(80):
                x = x - (x + 0.1 * x * x - y) / (1.0 + 0.2 * x)
            return x

        for y in np.linspace(0.0, 1.1, 23):
            assert cheb_eval(q, y) == pytest.approx(oracle(y), abs=1e-12)

    def test_qpx_is_x(self):
        dom = Interval(0.2, 1.4)
        p = cheb_fit(lambda x: np.sinh(x), dom, 40)
        q = cheb_invert(p, 40)
        x = np.linspace(0.2, 1.4, 31)
        assert np.max(np.abs(cheb_eval(q, cheb_eval(p, x)) - x)) < 1e-12


class TestAffine:
    def test_post_scale_doubles_coeffs(self):
        p = cheb_fit(np.cos, UNIT, 12)
        q = cheb_affine(p, post=(2.0, 0.0))
        assert np.allclose(q.coeffs, 2.0 * p.coeffs, atol=0.0)

    def test_pre_identity_keeps_coeffs(self):
        p = cheb_fit(np.cos, UNIT, 12)
        q = cheb_affine(p, pre=(1.0, 0.0))
        assert np.allclose(q.coeffs, p.coeffs, atol=1e-14)

    def test_rescale_matches_direct_fit(self):
        dom = Interval(0.0, 1.0)
        f = lambda x: x + 0.05 * np.sin(2 * np.pi * x)
        p = cheb_fit(f, dom, 48)
        a, b, c, d = 0.5, 0.1, 2.0, -0.3
        q = cheb_affine(p, pre=(a, b), post=(c, d))
        direct = cheb_fit(lambda x: c * f(a * x + b) + d,
                          Interval((0.0 - b) / a, (1.0 - b) / a), 48)
        x = np.linspace(q.domain.lo, q.domain.hi, 33)
        assert np.max(np.abs(cheb_eval(q, x) - cheb_eval(direct, x))) < 1e-12

    def test_negative_pre_slope_flips_domain(self):
        p = cheb_fit(lambda x: x, Interval(0.0, 1.0), 4)
        q = cheb_affine(p, pre=(-1.0, 0.0), post=(-1.0, 0.0))
        assert q.domain.lo == pytest.approx(-1.0)
        assert q.domain.hi == pytest.approx(0.0)
        x = np.linspace(-1.0, 0.0, 9)
        assert np.max(np.abs(cheb_eval(q, x) - x)) < 1e-14


class TestHelpers:
    def test_restrict_preserves_values(self):
        p = cheb_fit(np.exp, Interval(-1, 1), 32)
        r = restrict(p, Interval(0.0, 0.5))
        x = np.linspace(0.0, 0.5, 21)
        assert np.max(np.abs(cheb_eval(r, x) - cheb_eval(p, x))) < 1e-13

    def test_refit_changes_degree_only(self):
        p = cheb_fit(np.exp, UNIT, 40)
        r = refit(p, 20)
        assert r.degree == 20
        x = np.linspace(-1, 1, 33)
        assert np.max(np.abs(cheb_eval(r, x) - cheb_eval(p, x))) < 1e-13

    def test_monotone_positive_derivative_assertable(self):
        dom = Interval(0.0, 1.0)
        p = cheb_fit(lambda x: x + 0.2 * x**2, dom, 16)
        assert p.monotone_flag == MONOTONE_INC
        dp = cheb_derivative(p)
        t = np.cos(np.pi * (2 * np.arange(17) + 1) / 34.0)
        assert np.all(cheb_eval(dp, dom.from_unit(t)) > 0)
