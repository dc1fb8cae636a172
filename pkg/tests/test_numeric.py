import math

import numpy as np
import pytest

from palinscan import BracketError, ConvergenceError, NonFiniteError, SingularMatrixError
from palinscan.numeric import derivative, find_root, mat_inv, mat_pow, spectral_radius


class TestMatPow:
    def test_zero_power_is_identity(self, rng):
        m = rng.random((4, 4))
        assert np.allclose(mat_pow(m, 0), np.eye(4))

    def test_matches_repeated_product(self, rng):
        m = rng.random((3, 3))
        expected = m @ m @ m @ m @ m
        assert np.allclose(mat_pow(m, 5), expected, rtol=1e-12)

    def test_negative_power_rejected(self):
        with pytest.raises(ValueError):
            mat_pow(np.eye(2), -1)


class TestMatInv:
    def test_inverse_property(self, rng):
        m = rng.random((4, 4)) + 4.0 * np.eye(4)
        inv = mat_inv(m)
        assert np.allclose(m @ inv, np.eye(4), atol=1e-10)

    def test_singular_matrix(self):
        m = np.ones((3, 3))
        with pytest.raises(SingularMatrixError):
            mat_inv(m)

    def test_near_singular_matrix(self):
        m = np.array([[1.0, 1.0], [1.0, 1.0 + 1e-15]])
        with pytest.raises(SingularMatrixError):
            mat_inv(m)

    def test_scale_invariance(self):
        # a well-conditioned matrix times a tiny scalar must still invert
        m = 1e-12 * (np.eye(3) + 0.1)
        inv = mat_inv(m)
        assert np.allclose(m @ inv, np.eye(3), atol=1e-8)


class TestSpectralRadius:
    def test_matches_eigvals_on_random_nonnegative(self, rng):
        for _ in range(25):
            m = rng.random((4, 4))
            expected = np.abs(np.linalg.eigvals(m)).max()
            assert spectral_radius(m) == pytest.approx(expected, rel=1e-8)

    def test_diagonal(self):
        assert spectral_radius(np.diag([0.2, 0.7, 0.1, 0.05])) == pytest.approx(0.7)

    def test_zero_matrix(self):
        assert spectral_radius(np.zeros((4, 4))) == 0.0

    def test_nilpotent(self):
        m = np.zeros((3, 3))
        m[0, 1] = m[1, 2] = 1.0
        assert spectral_radius(m) == 0.0

    def test_rejects_negative_entries(self):
        with pytest.raises(ValueError):
            spectral_radius(np.array([[1.0, -0.1], [0.0, 1.0]]))


class TestFindRoot:
    def test_polynomial(self):
        root = find_root(lambda x: x**3 - 2.0, 0.0, 2.0)
        assert root == pytest.approx(2.0 ** (1.0 / 3.0), abs=1e-10)

    def test_convex_exponential_no_stagnation(self):
        # steep convex functions defeat plain regula falsi; the bracket must
        # still shrink via forced bisection
        f = lambda x: math.exp(20.0 * x) - 1e-4
        root = find_root(f, -2.0, 1.0, tol=1e-13)
        assert root == pytest.approx(math.log(1e-4) / 20.0, abs=1e-9)

    def test_infinite_endpoint_tolerated(self):
        f = lambda x: math.exp(x) - 5.0 if x < 700 else float("inf")
        root = find_root(f, 0.0, 1000.0)
        assert root == pytest.approx(math.log(5.0), abs=1e-8)

    def test_exact_endpoint_roots(self):
        assert find_root(lambda x: x, 0.0, 1.0) == 0.0
        assert find_root(lambda x: x - 1.0, 0.0, 1.0) == 1.0

    def test_no_bracket(self):
        with pytest.raises(BracketError):
            find_root(lambda x: x * x + 1.0, -1.0, 1.0)

    def test_nan_inside(self):
        with pytest.raises(NonFiniteError):
            find_root(lambda x: float("nan") if 0 < x < 1 else x - 0.5, -1.0, 2.0)

    def test_both_endpoints_nonfinite(self):
        with pytest.raises(BracketError):
            find_root(lambda x: float("inf"), 0.0, 1.0)

    def test_iteration_cap(self):
        # a discontinuous sign flip with no root keeps the bracket wide
        f = lambda x: -1.0 if x < math.pi / 10 else 1.0
        with pytest.raises(ConvergenceError):
            find_root(f, 0.0, 1.0, tol=0.0, max_iter=20)


class TestDerivative:
    def test_first_derivative(self):
        assert derivative(math.sin, 0.3, order=1) == pytest.approx(
            math.cos(0.3), abs=1e-9
        )

    def test_second_derivative(self):
        assert derivative(math.sin, 0.3, order=2) == pytest.approx(
            -math.sin(0.3), abs=1e-6
        )

    def test_exponential_growth(self):
        assert derivative(math.exp, 2.0, order=1) == pytest.approx(
            math.exp(2.0), rel=1e-9
        )

    def test_order_validation(self):
        with pytest.raises(ValueError):
            derivative(math.sin, 0.0, order=3)

    def test_nonfinite_stencil(self):
        f = lambda x: math.sqrt(x)  # complex left of 0 -> ValueError -> guard
        with pytest.raises((NonFiniteError, ValueError)):
            derivative(f, 0.0, order=1)
