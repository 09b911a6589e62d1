"""Tests for the matrix-free restarted GMRES solver."""

import numpy as np
import pytest

from dnls2d.krylov import NoConvergence, gmres_solve


def well_conditioned(n, rng, complex_entries=False):
    """Random diagonally dominant matrix, safely invertible."""
    a = rng.standard_normal((n, n))
    if complex_entries:
        a = a + 1j * rng.standard_normal((n, n))
    return a + n * np.eye(n)


class TestDirectSolves:
    def test_matches_dense_solve_real(self):
        rng = np.random.default_rng(7)
        a = well_conditioned(40, rng)
        b = rng.standard_normal(40)
        x = gmres_solve(lambda v: a @ v, b, tol=1e-12)
        assert np.allclose(x, np.linalg.solve(a, b), atol=1e-9)

    def test_matches_dense_solve_complex(self):
        rng = np.random.default_rng(8)
        a = well_conditioned(40, rng, complex_entries=True)
        b = rng.standard_normal(40) + 1j * rng.standard_normal(40)
        x = gmres_solve(lambda v: a @ v, b, tol=1e-12)
        assert np.allclose(x, np.linalg.solve(a, b), atol=1e-9)

    def test_identity_operator(self):
        b = np.arange(1.0, 9.0)
        x = gmres_solve(lambda v: v, b)
        assert np.allclose(x, b, atol=1e-14)

    def test_residual_meets_relative_tolerance(self):
        rng = np.random.default_rng(9)
        a = well_conditioned(60, rng)
        b = 1e6 * rng.standard_normal(60)
        tol = 1e-10
        x = gmres_solve(lambda v: a @ v, b, tol=tol)
        assert np.linalg.norm(a @ x - b) <= tol * np.linalg.norm(b)

    def test_two_dimensional_unknowns(self):
        # operators in this package act on grid-shaped arrays, not flat vectors
        rng = np.random.default_rng(10)
        d = 2.0 + rng.random((8, 8))

        def op(v):
            return d * v + 0.1 * np.roll(v, 1, axis=0)

        b = rng.standard_normal((8, 8))
        x = gmres_solve(op, b, tol=1e-12)
        assert x.shape == (8, 8)
        assert np.linalg.norm(op(x) - b) <= 1e-10 * np.linalg.norm(b)


class TestEdgeCases:
    def test_zero_rhs_returns_zero_without_matvec(self):
        calls = []

        def op(v):
            calls.append(1)
            return v

        x = gmres_solve(op, np.zeros(5))
        assert np.array_equal(x, np.zeros(5))
        assert not calls

    def test_nonpositive_tol_rejected(self):
        with pytest.raises(ValueError):
            gmres_solve(lambda v: v, np.ones(3), tol=0.0)
        with pytest.raises(ValueError):
            gmres_solve(lambda v: v, np.ones(3), tol=-1e-12)

    def test_warm_start_at_solution(self):
        rng = np.random.default_rng(11)
        a = well_conditioned(20, rng)
        b = rng.standard_normal(20)
        x_exact = np.linalg.solve(a, b)
        calls = []

        def op(v):
            calls.append(1)
            return a @ v

        x = gmres_solve(op, b, tol=1e-10, x0=x_exact)
        assert np.allclose(x, x_exact, atol=1e-12)
        # only the initial residual evaluation happens
        assert len(calls) == 1

    def test_two_eigenvalue_operator_converges_in_two_steps(self):
        # Krylov theory: a matrix with k distinct eigenvalues needs k iterations
        d = np.array([1.0] * 10 + [3.0] * 10)
        inner = []

        def op(v):
            inner.append(1)
            return d * v

        b = np.ones(20)
        x = gmres_solve(op, b, tol=1e-13)
        assert np.allclose(x, b / d, atol=1e-12)
        # one matvec for the outer residual, two for the Arnoldi steps,
        # one for the post-restart residual check
        assert len(inner) <= 4


class TestRestartsAndFailure:
    def test_restarted_cycles_still_converge(self):
        rng = np.random.default_rng(12)
        a = well_conditioned(30, rng)
        b = rng.standard_normal(30)
        x = gmres_solve(lambda v: a @ v, b, tol=1e-10, restart=5, maxiter=600)
        assert np.linalg.norm(a @ x - b) <= 1e-10 * np.linalg.norm(b)

    def test_budget_exhaustion_raises_with_best_iterate(self):
        rng = np.random.default_rng(13)
        a = well_conditioned(50, rng)
        b = rng.standard_normal(50)
        with pytest.raises(NoConvergence) as info:
            gmres_solve(lambda v: a @ v, b, tol=1e-14, restart=4, maxiter=8)
        err = info.value
        assert err.iterations == 8
        assert err.best.shape == b.shape
        # the attached iterate really achieves the reported relative residual
        rel = np.linalg.norm(a @ err.best - b) / np.linalg.norm(b)
        assert rel == pytest.approx(err.residual_norm, rel=1e-12)
        # and it is better than the zero initial guess
        assert rel < 1.0

    def test_noconvergence_message_mentions_iterations(self):
        a = np.diag(np.arange(1.0, 41.0))
        with pytest.raises(NoConvergence, match="4 iterations"):
            gmres_solve(lambda v: a @ v, np.ones(40), tol=1e-15, restart=2, maxiter=4)
