import numpy as np
import pytest

from cointegra.errors import NotPositiveDefinite, RankDeficient
from cointegra.linalg import cholesky, generalized_sym_eig, ols


class TestOls:
    def test_constant_regressor_recovers_mean(self):
        x = np.ones((4, 1))
        y = np.array([1.0, 2.0, 3.0, 4.0])
        fit = ols(x, y)
        assert fit.coefficients == pytest.approx([2.5])

    def test_identity_design_is_exact(self):
        fit = ols(np.vstack([np.eye(3), np.eye(3)]), np.vstack([np.eye(3), np.eye(3)]))
        assert np.allclose(fit.coefficients, np.eye(3))
        assert np.allclose(fit.residuals, 0.0)

    def test_line_fit_matches_normal_equations(self):
        # Hand-solved: X'X = [[3,3],[3,5]], X'y = [9,13] -> b = (1, 2).
        x = np.array([[1.0, 0.0], [1.0, 1.0], [1.0, 2.0]])
        y = np.array([1.0, 3.0, 5.0])
        fit = ols(x, y)
        assert fit.coefficients == pytest.approx([1.0, 2.0], abs=1e-12)

    def test_covariance_uses_t_divisor(self):
        fit = ols(np.ones((4, 1)), np.array([1.0, 2.0, 3.0, 4.0]))
        # residuals (-1.5, -.5, .5, 1.5), sum of squares 5, divided by T=4
        assert fit.residual_covariance[0, 0] == pytest.approx(1.25)

    def test_duplicate_column_raises(self):
        x = np.ones((5, 2))
        with pytest.raises(RankDeficient):
            ols(x, np.arange(5.0))

    def test_more_regressors_than_rows_raises(self):
        with pytest.raises(RankDeficient):
            ols(np.ones((2, 3)), np.arange(2.0))

    def test_reconstruction_property(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            t = int(rng.integers(10, 40))
            p = int(rng.integers(1, 5))
            n = int(rng.integers(1, 4))
            x = rng.standard_normal((t, p))
            y = rng.standard_normal((t, n))
            fit = ols(x, y)
            scale = max(1.0, float(np.abs(y).max()))
            assert np.abs(x @ fit.coefficients + fit.residuals - y).max() < 1e-10 * scale


class TestCholesky:
    def test_identity(self):
        assert np.allclose(cholesky(np.eye(3)), np.eye(3))

    def test_hand_factorization(self):
        l = cholesky(np.array([[4.0, 2.0], [2.0, 5.0]]))
        assert np.allclose(l, [[2.0, 0.0], [1.0, 2.0]])

    def test_indefinite_raises(self):
        with pytest.raises(NotPositiveDefinite):
            cholesky(np.array([[1.0, 2.0], [2.0, 1.0]]))

    def test_asymmetric_raises(self):
        with pytest.raises(NotPositiveDefinite):
            cholesky(np.array([[1.0, 0.5], [0.1, 1.0]]))

    def test_reconstruction_property(self):
        rng = np.random.default_rng(5)
        for _ in range(25):
            n = int(rng.integers(1, 7))
            m = rng.standard_normal((n + 2, n))
            a = m.T @ m + 1e-6 * np.eye(n)
            l = cholesky(a)
            assert np.tril(l) == pytest.approx(l)
            assert np.abs(l @ l.T - a).max() <= 1e-9 * max(np.abs(a).max(), 1.0)
            assert np.diag(l).min() > 0


class TestGeneralizedSymEig:
    def test_identity_pair(self):
        w, _ = generalized_sym_eig(np.eye(2), np.eye(2))
        assert w == pytest.approx([1.0, 1.0])

    def test_diagonal_standard(self):
        w, v = generalized_sym_eig(np.diag([3.0, 1.0]), np.eye(2))
        assert w == pytest.approx([3.0, 1.0])
        assert np.abs(v) == pytest.approx(np.eye(2), abs=1e-12)

    def test_diagonal_ratio(self):
        w, _ = generalized_sym_eig(np.diag([2.0, 2.0]), np.diag([4.0, 1.0]))
        assert w == pytest.approx([2.0, 0.5])

    def test_non_pd_b_raises(self):
        with pytest.raises(NotPositiveDefinite):
            generalized_sym_eig(np.eye(2), np.array([[1.0, 2.0], [2.0, 1.0]]))

    def test_matches_standard_solver_when_b_is_identity(self):
        rng = np.random.default_rng(17)
        for _ in range(10):
            m = rng.standard_normal((5, 5))
            a = (m + m.T) / 2
            w, _ = generalized_sym_eig(a, np.eye(5))
            expected = np.sort(np.linalg.eigvalsh(a))[::-1]
            assert w == pytest.approx(expected, abs=1e-9)

    def test_residual_orthonormality_and_trace_properties(self):
        rng = np.random.default_rng(23)
        for _ in range(20):
            n = 5
            ma = rng.standard_normal((n + 3, n))
            mb = rng.standard_normal((n + 3, n))
            a = ma.T @ ma
            b = mb.T @ mb + 1e-3 * np.eye(n)
            w, v = generalized_sym_eig(a, b)
            assert np.all(np.diff(w) <= 1e-12)
            for i in range(n):
                resid = a @ v[:, i] - w[i] * (b @ v[:, i])
                assert np.linalg.norm(resid) <= 1e-8 * np.linalg.norm(a)
            assert np.abs(v.T @ b @ v - np.eye(n)).max() < 1e-8
            assert w.sum() == pytest.approx(np.trace(np.linalg.solve(b, a)), rel=1e-8)
