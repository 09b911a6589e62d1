"""Matrix-free restarted GMRES."""

from __future__ import annotations

from typing import Callable

import numpy as np

__all__ = ["gmres_solve", "NoConvergence"]


class NoConvergence(Exception):
    """GMRES ran out of iterations; carries the best iterate found."""

    def __init__(self, best, residual_norm: float, iterations: int):
        super().__init__(
            f"gmres did not converge in {iterations} iterations "
            f"(relative residual {residual_norm:.3e})"
        )
        self.best = best
        self.residual_norm = residual_norm
        self.iterations = iterations


def gmres_solve(
    matvec: Callable[[np.ndarray], np.ndarray],
    rhs: np.ndarray,
    tol: float = 1e-12,
    restart: int = 30,
    maxiter: int = 200,
    x0: np.ndarray | None = None,
) -> np.ndarray:
    """Solve matvec(x) = rhs to ||matvec(x) - rhs||_2 <= tol * ||rhs||_2.

    Modified Gram-Schmidt Arnoldi with Givens rotations, restarted every
    `restart` inner iterations, at most `maxiter` matvecs total. Raises
    NoConvergence (best iterate attached) when the budget is exhausted.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    rhs = np.asarray(rhs)
    b_norm = np.linalg.norm(rhs)
    if b_norm == 0.0:
        return np.zeros_like(rhs)

    x = np.zeros_like(rhs) if x0 is None else x0.copy()
    dtype = np.result_type(rhs.dtype, np.float64)
    done = 0
    best_x, best_res = x.copy(), np.inf

    while done < maxiter:
        r = rhs - matvec(x)
        r_norm = np.linalg.norm(r)
        if r_norm <= tol * b_norm:
            return x
        if r_norm < best_res:
            best_res, best_x = r_norm, x.copy()

        m = min(restart, maxiter - done)
        V = np.empty((m + 1,) + rhs.shape, dtype=dtype)
        H = np.zeros((m + 1, m), dtype=dtype)
        cs = np.zeros(m, dtype=dtype)
        sn = np.zeros(m, dtype=dtype)
        g = np.zeros(m + 1, dtype=dtype)
        V[0] = r / r_norm
        g[0] = r_norm

        k_used = 0
        breakdown = False
        for k in range(m):
            w = matvec(V[k])
            done += 1
            for j in range(k + 1):
                H[j, k] = np.vdot(V[j], w)
                w = w - H[j, k] * V[j]
            H[k + 1, k] = np.linalg.norm(w)
            if H[k + 1, k] > 0:
                V[k + 1] = w / H[k + 1, k]
            else:
                breakdown = True
            # apply accumulated rotations, then the new one
            for j in range(k):
                t = cs[j] * H[j, k] + sn[j] * H[j + 1, k]
                H[j + 1, k] = -np.conj(sn[j]) * H[j, k] + np.conj(cs[j]) * H[j + 1, k]
                H[j, k] = t
            denom = np.hypot(abs(H[k, k]), abs(H[k + 1, k]))
            if denom == 0.0:
                cs[k], sn[k] = 1.0, 0.0
            elif H[k, k] == 0:
                cs[k], sn[k] = 0.0, 1.0
            else:
                cs[k] = abs(H[k, k]) / denom
                sn[k] = (H[k, k] / abs(H[k, k])) * np.conj(H[k + 1, k]) / denom
            H[k, k] = cs[k] * H[k, k] + sn[k] * H[k + 1, k]
            H[k + 1, k] = 0.0
            g[k + 1] = -np.conj(sn[k]) * g[k]
            g[k] = cs[k] * g[k]
            k_used = k + 1
            if abs(g[k + 1]) <= tol * b_norm or breakdown or done >= maxiter:
                break

        # back substitution on the k_used x k_used triangle
        y = np.zeros(k_used, dtype=dtype)
        for i in range(k_used - 1, -1, -1):
            y[i] = (g[i] - H[i, i + 1 : k_used] @ y[i + 1 : k_used]) / H[i, i]
        x = x + np.tensordot(y, V[:k_used], axes=(0, 0))

        r_norm = np.linalg.norm(rhs - matvec(x))
        if r_norm <= tol * b_norm:
            return x
        if r_norm < best_res:
            best_res, best_x = r_norm, x.copy()
        if breakdown:
            break

    raise NoConvergence(best_x, best_res / b_norm, done)
