"""Stationary states Q of the profile equation, by Newton-Krylov continuation.

A stationary solution u(t, x) = e^{it} Q(x) has profile satisfying

    P Q = Laplace(Q) + (1 + i delta.grad)(|Q|^(2 sigma) Q),

which in Fourier variables is the fixed point  Q_hat = Gamma_hat * DFT(|Q|^(2 sigma) Q).
Splitting Q = alpha + i beta into real fields gives two coupled equations whose
formal halves are exposed by fixed_point_residual; the solver drives their
complex combination (the transform of Q - Gamma_op(|Q|^(2 sigma) Q), which
vanishes exactly at solutions) to zero with a damped-free Newton iteration,
each linear system solved by matrix-free restarted GMRES over the real
variables (alpha, beta).

Residual norms are reported as the max modulus of spectral coefficients in
amplitude scale, i.e. raw forward-DFT output divided by N1*N2.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Tuple

import numpy as np
import scipy.fft as _fft

from .krylov import NoConvergence, gmres_solve
from .spectral import Field, Grid, ModelParams, gamma_symbol

__all__ = [
    "StationaryProblem",
    "StationaryState",
    "ContinuationSchedule",
    "MaxIterExceeded",
    "ConvergedToZero",
    "ContinuationStalled",
    "fixed_point_residual",
    "jacobian_vector_product",
    "newton_solve",
    "newton_residual_history",
    "initial_iterate",
    "continuation_solve",
    "delta2_schedule",
    "steepening_schedule",
]

ZERO_SOLUTION_THRESHOLD = 1e-6
# Largest relative residual at which a stalled GMRES solve is still taken
# as an inexact Newton step rather than an error.
INEXACT_STEP_LIMIT = 1e-6


class MaxIterExceeded(Exception):
    def __init__(self, iterations: int, residual_norm: float, history):
        super().__init__(
            f"Newton did not converge in {iterations} iterations "
            f"(residual {residual_norm:.3e})"
        )
        self.iterations = iterations
        self.residual_norm = residual_norm
        self.history = history


class ConvergedToZero(Exception):
    """The iteration collapsed onto the trivial zero fixed point."""


class ContinuationStalled(Exception):
    def __init__(self, leg: int, params: ModelParams):
        super().__init__(f"continuation stalled at leg {leg} ({params})")
        self.leg = leg
        self.params = params


@dataclass(frozen=True)
class StationaryProblem:
    grid: Grid
    params: ModelParams
    omega: float = 1.0

    def __post_init__(self) -> None:
        if self.omega != 1.0:
            raise ValueError("omega is fixed at 1")


@dataclass(frozen=True)
class StationaryState:
    Q: Field  # physical-space complex profile
    residual_norm: float
    iterations: int
    continuation_path: Tuple[Tuple[ModelParams, float], ...] = ()


@dataclass(frozen=True)
class ContinuationSchedule:
    """Ordered ModelParams waypoints; `step` bounds per-leg parameter motion.

    `step` is also the granularity used when a failed leg is subdivided.
    """

    waypoints: Tuple[ModelParams, ...]
    step: float = 0.2

    def __post_init__(self) -> None:
        object.__setattr__(self, "waypoints", tuple(self.waypoints))
        if not self.step > 0:
            raise ValueError("step must be positive")


# ---------------------------------------------------------------------------
# residual and Jacobian action


def _sigma_power(rho: np.ndarray, sigma: float) -> np.ndarray:
    if sigma == 1.0:
        return rho
    if sigma == 2.0:
        return rho * rho
    if sigma == 3.0:
        return rho * rho * rho
    return rho**sigma


def fixed_point_residual(
    q_hat: Tuple[Field, Field], problem: StationaryProblem
) -> Tuple[Field, Field]:
    """Formal halves (alpha_hat - Gamma*DFT(rho^sigma alpha), same for beta).

    rho = alpha^2 + beta^2.  At a true stationary state the two halves do not
    vanish individually when delta != 0; their complex combination
    R_alpha + i R_beta does, and that combination is what newton_solve drives
    to zero.
    """
    a_hat, b_hat = q_hat
    g, params = problem.grid, problem.params
    gam = gamma_symbol(g, params).values
    a = _fft.ifft2(a_hat.values)
    b = _fft.ifft2(b_hat.values)
    w = _sigma_power(a * a + b * b, params.sigma)
    ra = a_hat.values - gam * _fft.fft2(w * a)
    rb = b_hat.values - gam * _fft.fft2(w * b)
    return (Field(ra, "spectral"), Field(rb, "spectral"))


def jacobian_vector_product(
    q_hat: Tuple[Field, Field],
    h_hat: Tuple[Field, Field],
    problem: StationaryProblem,
) -> Tuple[Field, Field]:
    """Exact directional derivative of fixed_point_residual at q_hat along h_hat.

    Uses the pointwise linearization of rho^sigma (alpha, beta):
    D = rho^sigma I + 2 sigma rho^(sigma-1) (alpha,beta)(alpha,beta)^T.
    """
    a_hat, b_hat = q_hat
    ha_hat, hb_hat = h_hat
    g, params = problem.grid, problem.params
    sigma = params.sigma
    gam = gamma_symbol(g, params).values
    a = _fft.ifft2(a_hat.values)
    b = _fft.ifft2(b_hat.values)
    ha = _fft.ifft2(ha_hat.values)
    hb = _fft.ifft2(hb_hat.values)
    rho = a * a + b * b
    w = _sigma_power(rho, sigma)
    if sigma == 1.0:
        coef = 2.0
    else:
        coef = 2.0 * sigma * _sigma_power(rho, sigma - 1.0)
    cross = coef * (a * ha + b * hb)
    da = w * ha + cross * a
    db = w * hb + cross * b
    ja = ha_hat.values - gam * _fft.fft2(da)
    jb = hb_hat.values - gam * _fft.fft2(db)
    return (Field(ja, "spectral"), Field(jb, "spectral"))


def initial_iterate(grid: Grid, kind: str = "sech2") -> Field:
    """Analytic bump used to seed the Newton iteration."""
    if kind != "sech2":
        raise ValueError(f"unknown initial iterate kind {kind!r}")
    x1, x2 = grid.meshgrid()
    r = np.sqrt(x1 * x1 + x2 * x2)
    return Field(1.0 / np.cosh(r) ** 2, "physical")


# ---------------------------------------------------------------------------
# Newton-Krylov driver (real variables, combined complex residual)

PREPARE_SWITCH = 1e-4
PREPARE_MAXITER = 200


class _CombinedSystem:
    """Residual/Jacobian of the combined complex equation over (alpha, beta)."""

    def __init__(self, problem: StationaryProblem):
        self.grid = problem.grid
        self.params = problem.params
        self.gam = gamma_symbol(self.grid, self.params).values
        self.norm = float(self.grid.N1 * self.grid.N2)

    def residual(self, Q: np.ndarray):
        """Returns (physical residual, spectral residual, residual_norm)."""
        rho = Q.real * Q.real + Q.imag * Q.imag
        w = _sigma_power(rho, self.params.sigma)
        r_hat = _fft.fft2(Q) - self.gam * _fft.fft2(w * Q)
        r = _fft.ifft2(r_hat)
        return r, r_hat, float(np.abs(r_hat).max() / self.norm)

    def jacobian_matvec(self, Q: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
        sigma = self.params.sigma
        rho = Q.real * Q.real + Q.imag * Q.imag
        w = _sigma_power(rho, sigma)
        coef = 2.0 if sigma == 1.0 else 2.0 * sigma * _sigma_power(rho, sigma - 1.0)
        cQ = coef * Q
        gam = self.gam
        shape = Q.shape
        n = Q.size

        def matvec(vec: np.ndarray) -> np.ndarray:
            h = (vec[:n] + 1j * vec[n:]).reshape(shape)
            dh = w * h + (Q.real * h.real + Q.imag * h.imag) * cQ
            jh = h - _fft.ifft2(gam * _fft.fft2(dh))
            return np.concatenate([jh.real.ravel(), jh.imag.ravel()])

        return matvec


def _stabilized_warmstart(
    Q: np.ndarray, sys_: _CombinedSystem, switch: float, maxiter: int
):
    """Stabilized fixed-point iterations pulling far seeds into the Newton basin.

    For delta = 0 the linear part L = 1/Gamma_hat is positive, so the scheme

        q <- S^g L^{-1} N(q),  S = <L q, q> / <N(q), q>,  g = (2s+1)/(2s),

    with N(q) = rho^s q contracts onto the nontrivial ground state from
    generic positive bumps, where a plain Newton step from the same seed would
    collapse onto the zero solution. Returns the prepared iterate and one
    residual-norm entry per step performed.
    """
    sigma = sys_.params.sigma
    gexp = (2.0 * sigma + 1.0) / (2.0 * sigma)
    gam = sys_.gam
    hist = []
    for _ in range(maxiter):
        _, _, rn = sys_.residual(Q)
        if rn < switch:
            break
        hist.append(rn)
        q_hat = _fft.fft2(Q)
        rho = Q.real * Q.real + Q.imag * Q.imag
        n_hat = _fft.fft2(_sigma_power(rho, sigma) * Q)
        num = float(np.sum(np.abs(q_hat) ** 2 / gam.real))
        den = float(np.sum(np.conj(q_hat) * n_hat).real)
        if not np.isfinite(den) or den <= 0.0:
            break
        Q = _fft.ifft2((num / den) ** gexp * gam * n_hat)
    return Q, hist


def newton_solve(
    q0: Field,
    problem: StationaryProblem,
    tol: float = 1e-10,
    maxiter: int = 30,
    gmres_tol: float = 1e-12,
    gmres_restart: int = 30,
    gmres_maxiter: int = 200,
    prepare: bool = True,
) -> StationaryState:
    """Newton iteration q <- q - J^{-1} M(q), J applied matrix-free via GMRES.

    Stops when the max-modulus residual (amplitude-normalized spectral scale)
    drops to `tol`. Convergence onto the zero solution (max|Q| < 1e-6) is a
    detected failure, not a success.

    With `prepare` on (the default), a real seed far from any solution in a
    delta = 0 problem first runs a few stabilized fixed-point iterations;
    plain Newton's basin around the nontrivial ground state is small and
    analytic bump seeds otherwise fall into the zero solution. The prepared
    steps count toward the reported iteration total.
    """
    state, _ = newton_residual_history(
        q0,
        problem,
        tol=tol,
        maxiter=maxiter,
        gmres_tol=gmres_tol,
        gmres_restart=gmres_restart,
        gmres_maxiter=gmres_maxiter,
        prepare=prepare,
    )
    return state


def newton_residual_history(
    q0: Field,
    problem: StationaryProblem,
    tol: float = 1e-10,
    maxiter: int = 30,
    gmres_tol: float = 1e-12,
    gmres_restart: int = 30,
    gmres_maxiter: int = 200,
    prepare: bool = True,
) -> Tuple[StationaryState, list]:
    """newton_solve plus the residual-norm sequence (for convergence studies)."""
    if q0.space != "physical":
        raise ValueError("newton_solve expects a physical-space initial iterate")
    if q0.values.shape != problem.grid.shape:
        raise ValueError("initial iterate shape does not match the problem grid")
    sys_ = _CombinedSystem(problem)
    Q = q0.values.astype(np.complex128).copy()
    history: list = []
    if (
        prepare
        and max(abs(problem.params.delta[0]), abs(problem.params.delta[1])) == 0.0
        and np.abs(Q.imag).max() <= 1e-10 * max(np.abs(Q.real).max(), 1e-300)
    ):
        Q, warm_hist = _stabilized_warmstart(Q, sys_, PREPARE_SWITCH, PREPARE_MAXITER)
        history.extend(warm_hist)
    res_norm = np.inf
    for n in range(maxiter + 1):
        r, _, res_norm = sys_.residual(Q)
        history.append(res_norm)
        if res_norm <= tol:
            if np.abs(Q).max() < ZERO_SOLUTION_THRESHOLD:
                raise ConvergedToZero(
                    f"converged with max|Q| = {np.abs(Q).max():.3e} "
                    f"< {ZERO_SOLUTION_THRESHOLD}"
                )
            state = StationaryState(
                Q=Field(np.ascontiguousarray(Q), "physical"),
                residual_norm=res_norm,
                iterations=len(history) - 1,
                continuation_path=((problem.params, res_norm),),
            )
            return state, history
        if n == maxiter:
            break
        rhs = np.concatenate([r.real.ravel(), r.imag.ravel()])
        try:
            step = gmres_solve(
                sys_.jacobian_matvec(Q),
                rhs,
                tol=gmres_tol,
                restart=gmres_restart,
                maxiter=gmres_maxiter,
            )
        except NoConvergence as stall:
            # A stalled solve with a near-target iterate is still an
            # excellent Newton direction; only a genuinely bad one aborts.
            if stall.residual_norm > INEXACT_STEP_LIMIT:
                raise
            step = stall.best
        m = Q.size
        Q = Q - (step[:m] + 1j * step[m:]).reshape(Q.shape)
    raise MaxIterExceeded(maxiter, res_norm, history)


# ---------------------------------------------------------------------------
# continuation


def _interpolate_params(a: ModelParams, b: ModelParams, frac: float) -> ModelParams:
    if a.axes != b.axes:
        raise ValueError("cannot interpolate between different axis sets")
    lerp = lambda u, v: (1.0 - frac) * u + frac * v
    return ModelParams(
        epsilon=lerp(a.epsilon, b.epsilon),
        axes=a.axes,
        delta=(lerp(a.delta[0], b.delta[0]), lerp(a.delta[1], b.delta[1])),
        sigma=lerp(a.sigma, b.sigma),
    )


def steepening_schedule(
    base: ModelParams, target_delta: Tuple[float, float], step: float = 0.2
) -> ContinuationSchedule:
    """Waypoints stepping the steepening vector from its base value to the target.

    Legs are equispaced so that the sup-norm increment per leg does not
    exceed `step`.
    """
    gap = max(abs(target_delta[0] - base.delta[0]), abs(target_delta[1] - base.delta[1]))
    n = max(1, int(np.ceil(gap / step - 1e-12)))
    pts = []
    for k in range(1, n + 1):
        frac = k / n
        d = (
            base.delta[0] + (target_delta[0] - base.delta[0]) * frac,
            base.delta[1] + (target_delta[1] - base.delta[1]) * frac,
        )
        pts.append(replace(base, delta=d))
    return ContinuationSchedule(tuple(pts), step=step)


def delta2_schedule(
    base: ModelParams, target_delta2: float, step: float = 0.2
) -> ContinuationSchedule:
    """Waypoints stepping delta_2 from its base value to the target."""
    return steepening_schedule(base, (base.delta[0], target_delta2), step=step)


def continuation_solve(
    schedule: ContinuationSchedule,
    seed: StationaryState,
    grid: Grid,
    tol: float = 1e-10,
    maxiter: int = 30,
    max_halvings: int = 4,
    **gmres_kwargs,
) -> StationaryState:
    """Walk the waypoints, re-solving each leg from the previous solution.

    A failed leg is bisected (up to `max_halvings` times) before giving up
    with ContinuationStalled. The returned state carries the full converged
    path (params, residual_norm per leg).
    """
    if not seed.continuation_path:
        raise ValueError("seed state carries no parameter information")
    cur_params = seed.continuation_path[-1][0]
    state = seed
    path = list(seed.continuation_path)

    def solve_leg(q0: Field, frm: ModelParams, to: ModelParams, depth: int, leg: int):
        problem = StationaryProblem(grid, to)
        try:
            st = newton_solve(q0, problem, tol=tol, maxiter=maxiter, **gmres_kwargs)
            return st
        except (MaxIterExceeded, NoConvergence, ConvergedToZero):
            if depth >= max_halvings:
                raise ContinuationStalled(leg, to)
            mid = _interpolate_params(frm, to, 0.5)
            st_mid = solve_leg(q0, frm, mid, depth + 1, leg)
            path.append((mid, st_mid.residual_norm))
            return solve_leg(st_mid.Q, mid, to, depth + 1, leg)

    for leg, wp in enumerate(schedule.waypoints):
        state = solve_leg(state.Q, cur_params, wp, 0, leg)
        path.append((wp, state.residual_norm))
        cur_params = wp
    return StationaryState(
        Q=state.Q,
        residual_norm=state.residual_norm,
        iterations=state.iterations,
        continuation_path=tuple(path),
    )
