import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from specmax.cpoly import (
    Poly,
    RootCluster,
    active_set,
    elementary,
    lex_leq,
    poly_from_json,
    poly_root_max,
    poly_to_json,
    roots,
    taylor_coeff,
)
from specmax.generators import builtin

finite = st.floats(min_value=-10, max_value=10, allow_nan=False)
cplx = st.builds(complex, finite, finite)


class TestLexOrder:
    def test_real_part_decides(self):
        assert lex_leq(0, 1 + 1j)

    def test_imag_breaks_ties(self):
        assert not lex_leq(1, 1 - 1j)

    def test_reflexive(self):
        assert lex_leq(2 + 3j, 2 + 3j)

    @given(cplx, cplx)
    def test_total(self, a, b):
        assert lex_leq(a, b) or lex_leq(b, a)

    @given(cplx, cplx)
    def test_antisymmetric(self, a, b):
        if lex_leq(a, b) and lex_leq(b, a):
            assert a == b

    @given(cplx, cplx, cplx)
    def test_transitive(self, a, b, c):
        if lex_leq(a, b) and lex_leq(b, c):
            assert lex_leq(a, c)


class TestElementary:
    def test_degree_zero_is_one(self):
        assert elementary(0, 3 + 4j).coeffs == (1 + 0j,)

    def test_square_at_one(self):
        assert elementary(2, 1.0).coeffs == (1 + 0j, -2 + 0j, 1 + 0j)

    def test_cube_at_i_matches_repeated_multiplication(self):
        # oracle: repeated convolution with (lambda - i)
        acc = np.array([1 + 0j])
        for _ in range(3):
            acc = np.convolve(acc, np.array([-1j, 1 + 0j]))
        got = np.asarray(elementary(3, 1j).coeffs)
        assert np.allclose(got, acc, atol=0)
        assert np.allclose(got, [1j, -3, -3j, 1])

    def test_negative_degree_rejected(self):
        with pytest.raises(ValueError):
            elementary(-1, 0)


class TestTaylor:
    def test_leading_coefficient_of_own_monomial(self):
        p = elementary(4, 2 - 1j)
        assert taylor_coeff(p, 4, 2 - 1j) == pytest.approx(1)

    def test_lower_orders_vanish_at_the_root(self):
        p = elementary(4, 2 - 1j)
        for k in range(4):
            assert abs(taylor_coeff(p, k, 2 - 1j)) < 1e-12

    def test_first_derivative_example(self):
        # p = lambda^2 + 1, p'(1) = 2
        assert taylor_coeff(Poly((1 + 0j, 0j, 1 + 0j)), 1, 1.0) == pytest.approx(2)

    def test_out_of_range_order(self):
        with pytest.raises(ValueError):
            taylor_coeff(Poly((1 + 0j,)), 2, 0)

    def test_reconstruction_from_taylor_coefficients(self):
        rng = np.random.default_rng(0)
        for _ in range(25):
            deg = rng.integers(1, 9)
            p = Poly(tuple(rng.standard_normal(deg + 1) + 1j * rng.standard_normal(deg + 1)))
            lam0 = complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5))
            rebuilt = Poly.zero(deg)
            for k in range(deg + 1):
                rebuilt = rebuilt + taylor_coeff(p, k, lam0) * elementary(k, lam0, degree_bound=deg)
            assert np.linalg.norm(rebuilt.array() - p.array()) < 1e-12 * max(1, p.coeff_norm())


class TestRoots:
    def test_perfect_square(self):
        c = roots(Poly((1 + 0j, -2 + 0j, 1 + 0j)), cluster_tol=1e-6)
        assert c.mults == (2,)
        assert abs(c.roots[0] - 1) < 1e-6

    def test_two_simple_roots_in_lex_order(self):
        c = roots(Poly((0j, 1 + 0j, 1 + 0j)), cluster_tol=1e-6)  # lambda(lambda+1)
        assert c.mults == (1, 1)
        assert abs(c.roots[0] + 1) < 1e-12 and abs(c.roots[1]) < 1e-12

    def test_perturbed_coefficients_cluster(self):
        # (lambda-1)^2 (lambda+1) with a 1e-12 coefficient perturbation
        p = RootCluster((-1 + 0j, 1 + 0j), (1, 2)).as_poly()
        p = p + Poly((1e-12, 0j, 0j, 0j))
        c = roots(p, cluster_tol=1e-5)
        assert c.mults == (1, 2)
        assert abs(c.roots[0] + 1) < 1e-5 and abs(c.roots[1] - 1) < 1e-5

    def test_zero_polynomial_rejected(self):
        with pytest.raises(ValueError):
            roots(Poly.zero(3))

    def test_roundtrip_with_separated_clusters(self):
        rng = np.random.default_rng(1)
        tol = 1e-3
        for _ in range(20):
            m = rng.integers(1, 4)
            pts = []
            while len(pts) < m:
                z = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
                if all(abs(z - w) >= 10 * tol for w in pts):
                    pts.append(z)
            mults = [int(rng.integers(1, 4)) for _ in pts]
            cluster = RootCluster.sorted(zip(pts, mults))
            back = roots(cluster.as_poly(), cluster_tol=tol)
            assert back.mults == cluster.mults
            assert all(abs(a - b) < tol for a, b in zip(back.roots, cluster.roots))


class TestActiveSet:
    def test_abscissa_picks_the_right_root(self):
        p = RootCluster((-1 + 0j, 1 + 0j), (1, 1)).as_poly()
        value, idx = active_set(p, builtin("abscissa"))
        assert value == pytest.approx(1.0)
        assert idx == {1}

    def test_modulus_ties_both_roots(self):
        p = RootCluster((-1 + 0j, 1 + 0j), (1, 1)).as_poly()
        value, idx = active_set(p, builtin("radius"))
        assert value == pytest.approx(1.0)
        assert idx == {0, 1}

    def test_half_squared_modulus(self):
        # lambda^2 (lambda - 1/2), f = |.|^2/2: value 1/8 at the root 1/2
        p = RootCluster((0j, 0.5 + 0j), (2, 1)).as_poly()
        value, idx = active_set(p, builtin("radius2"))
        assert value == pytest.approx(1 / 8)
        assert idx == {1}

    def test_out_of_domain_root_flags_inf(self):
        def partial(z):
            return math.inf if z.real < 0 else z.real

        p = RootCluster((-1 + 0j, 1 + 0j), (1, 1)).as_poly()
        value, idx = active_set(p, partial)
        assert math.isinf(value) and idx == {0}


class TestPolyRootMax:
    def test_pure_power_abscissa(self):
        assert poly_root_max(Poly((0j, 0j, 0j, 1 + 0j)), builtin("abscissa")) == pytest.approx(0)

    def test_two_active_modulus_fixture(self):
        # char poly of the 3x3 two-active fixture: (lambda-1)^2 (lambda+1)
        p = RootCluster((-1 + 0j, 1 + 0j), (1, 2)).as_poly()
        assert poly_root_max(p, builtin("radius")) == pytest.approx(1.0)

    def test_direct_modulus_evaluation(self):
        p = RootCluster((-1 + 0j, 2j), (1, 1)).as_poly()
        assert poly_root_max(p, builtin("radius")) == pytest.approx(2.0)

    @given(st.floats(min_value=0.1, max_value=10), st.floats(min_value=-3, max_value=3))
    @settings(max_examples=30, deadline=None)
    def test_invariant_under_nonzero_scaling(self, mag, ang):
        p = RootCluster((-1 + 0j, 0.5 + 0.5j), (1, 2)).as_poly()
        scale = mag * complex(math.cos(ang), math.sin(ang))
        a = poly_root_max(p, builtin("radius"))
        b = poly_root_max(scale * p, builtin("radius"))
        assert b == pytest.approx(a, rel=1e-9, abs=1e-9)


def test_json_roundtrip():
    p = Poly((1 + 2j, 0j, -3.5 + 0j))
    assert poly_from_json(poly_to_json(p)).coeffs == p.coeffs
    with pytest.raises(ValueError):
        poly_from_json([[1.0], [2.0]])
