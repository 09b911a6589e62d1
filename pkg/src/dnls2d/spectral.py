"""Grids, Fourier transforms, multiplier symbols and the spectral right-hand side.

The model solved by this package is

    i P du/dt + Laplace(u) + (1 + i delta.grad)(|u|^(2 sigma) u) = 0,

posed on the periodic box [-pi L1, pi L1] x [-pi L2, pi L2], where
P = 1 - eps^2 * sum_{j in axes} d^2/dx_j^2 acts on a configurable subset of
the two axes.  In Fourier variables the equation is diagonal in its linear
part,

    du_hat/dt = L u_hat + N(u_hat),
    L(xi)     = -i |xi|^2 / p(xi),
    N(u_hat)  = i (1 - delta.xi) / p(xi) * DFT(|u|^(2 sigma) u),

with p(xi) = 1 + eps^2 * sum_{j in axes} xi_j^2.  Everything downstream
(stationary solver, time integrators, diagnostics) is built from the
primitives in this module.

Conventions, fixed once and documented here:

* ``values[i, j]`` samples position ``(x1[i], x2[j])``; arrays are C-order,
  so the x2 index varies fastest.
* Forward DFT is unscaled, the inverse carries the 1/(N1*N2) factor.
  Parseval: sum |u|^2 = (1/(N1*N2)) * sum |u_hat|^2.
* Wavenumbers along axis a are {m / L_a : m = -N_a/2 .. N_a/2 - 1} stored in
  standard FFT order (0, 1, ..., N/2-1, -N/2, ..., -1, divided by L_a).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Tuple

import numpy as np
import scipy.fft as _fft

__all__ = [
    "Grid",
    "ModelParams",
    "Field",
    "SymbolField",
    "build_grid",
    "forward_transform",
    "inverse_transform",
    "p_symbol",
    "gamma_symbol",
    "l_symbol",
    "apply_nonlinearity",
    "rhs_spectral",
    "krasny_filter",
    "resolution_indicator",
    "dealias_mask",
]


def _is_power_of_two(n: int) -> bool:
    return n >= 2 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Periodic computational domain [-pi L1, pi L1] x [-pi L2, pi L2].

    Node spacing along axis a is 2 pi L_a / N_a; dual wavenumbers are the
    integer multiples of 1/L_a in standard FFT ordering.
    """

    L1: float
    L2: float
    N1: int
    N2: int

    def __post_init__(self) -> None:
        for name in ("L1", "L2"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        for name in ("N1", "N2"):
            n = getattr(self, name)
            if not isinstance(n, (int, np.integer)) or not _is_power_of_two(int(n)):
                raise ValueError(f"{name} must be a power of two >= 2, got {n!r}")
        object.__setattr__(self, "N1", int(self.N1))
        object.__setattr__(self, "N2", int(self.N2))
        object.__setattr__(self, "L1", float(self.L1))
        object.__setattr__(self, "L2", float(self.L2))

    # -- nodes and wavenumbers (1D arrays; broadcast against each other) ----

    @cached_property
    def x1(self) -> np.ndarray:
        return -np.pi * self.L1 + (2.0 * np.pi * self.L1 / self.N1) * np.arange(self.N1)

    @cached_property
    def x2(self) -> np.ndarray:
        return -np.pi * self.L2 + (2.0 * np.pi * self.L2 / self.N2) * np.arange(self.N2)

    @cached_property
    def xi1(self) -> np.ndarray:
        return np.fft.fftfreq(self.N1, d=self.L1 / self.N1)

    @cached_property
    def xi2(self) -> np.ndarray:
        return np.fft.fftfreq(self.N2, d=self.L2 / self.N2)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.N1, self.N2)

    @property
    def cell_area(self) -> float:
        return (2.0 * np.pi) ** 2 * self.L1 * self.L2 / (self.N1 * self.N2)

    @property
    def spectral_weight(self) -> float:
        """Quadrature weight per spectral coefficient in Parseval sums."""
        return self.cell_area / (self.N1 * self.N2)

    def meshgrid(self) -> Tuple[np.ndarray, np.ndarray]:
        return self.x1[:, None], self.x2[None, :]

    def xi_meshgrid(self) -> Tuple[np.ndarray, np.ndarray]:
        return self.xi1[:, None], self.xi2[None, :]


_VALID_AXES = ("x1", "x2")


@dataclass(frozen=True)
class ModelParams:
    """(eps, axes, delta, sigma): the full parameterization of the PDE family.

    ``axes`` names the coordinates the regularizing operator P acts on; an
    empty tuple makes P the identity so the evolution coincides with the
    classical (derivative) NLS regardless of ``epsilon``.
    """

    epsilon: float = 0.0
    axes: Tuple[str, ...] = ()
    delta: Tuple[float, float] = (0.0, 0.0)
    sigma: float = 1.0

    def __post_init__(self) -> None:
        axes = tuple(sorted(set(self.axes)))
        for a in axes:
            if a not in _VALID_AXES:
                raise ValueError(f"axes entries must be in {_VALID_AXES}, got {a!r}")
        object.__setattr__(self, "axes", axes)
        if not self.epsilon >= 0:
            raise ValueError("epsilon must be nonnegative")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        d = tuple(float(v) for v in self.delta)
        if len(d) != 2 or not all(np.isfinite(d)):
            raise ValueError("delta must be a finite 2-vector")
        object.__setattr__(self, "delta", d)
        object.__setattr__(self, "epsilon", float(self.epsilon))
        object.__setattr__(self, "sigma", float(self.sigma))


@dataclass(frozen=True)
class Field:
    """Complex lattice function tagged as physical- or spectral-space."""

    values: np.ndarray
    space: str  # "physical" | "spectral"

    def __post_init__(self) -> None:
        if self.space not in ("physical", "spectral"):
            raise ValueError(f"space must be 'physical' or 'spectral', got {self.space!r}")
        v = np.ascontiguousarray(self.values, dtype=np.complex128)
        if v.ndim != 2:
            raise ValueError("field values must be a 2D array")
        object.__setattr__(self, "values", v)

    @classmethod
    def physical(cls, values: np.ndarray) -> "Field":
        return cls(values, "physical")

    @classmethod
    def spectral(cls, values: np.ndarray) -> "Field":
        return cls(values, "spectral")


@dataclass(frozen=True)
class SymbolField:
    """A Fourier multiplier sampled on the wavenumber lattice."""

    values: np.ndarray
    description: str


def build_grid(L1: float, L2: float, N1: int, N2: int) -> Grid:
    return Grid(L1, L2, N1, N2)


def _check_shape(f: Field, g: Grid) -> None:
    if f.values.shape != g.shape:
        raise ValueError(f"field shape {f.values.shape} does not match grid {g.shape}")


def forward_transform(f: Field, g: Grid) -> Field:
    """Physical -> spectral; unscaled forward DFT."""
    _check_shape(f, g)
    if f.space != "physical":
        raise ValueError("forward_transform expects a physical-space field")
    return Field(_fft.fft2(f.values), "spectral")


def inverse_transform(f: Field, g: Grid) -> Field:
    """Spectral -> physical; carries the 1/(N1*N2) factor."""
    _check_shape(f, g)
    if f.space != "spectral":
        raise ValueError("inverse_transform expects a spectral-space field")
    return Field(_fft.ifft2(f.values), "physical")


def p_symbol(g: Grid, params: ModelParams, power: float = 1.0) -> SymbolField:
    """(1 + eps^2 sum_{j in axes} xi_j^2)^power on the wavenumber lattice."""
    xi1, xi2 = g.xi_meshgrid()
    acc = np.zeros(g.shape)
    if "x1" in params.axes:
        acc = acc + xi1 * xi1
    if "x2" in params.axes:
        acc = acc + xi2 * xi2
    base = 1.0 + params.epsilon**2 * acc
    vals = base if power == 1.0 else base**power
    return SymbolField(vals, f"p_hat^{power:g}")


def gamma_symbol(g: Grid, params: ModelParams) -> SymbolField:
    """Fixed-point multiplier (1 - delta.xi) / (1 + |xi|^2 + eps^2 sum_axes xi_j^2)."""
    xi1, xi2 = g.xi_meshgrid()
    d1, d2 = params.delta
    p = p_symbol(g, params, 1.0).values
    denom = p + xi1 * xi1 + xi2 * xi2
    vals = (1.0 - d1 * xi1 - d2 * xi2) / denom
    return SymbolField(vals, "gamma_hat")


def l_symbol(g: Grid, params: ModelParams) -> SymbolField:
    """Diagonal linear part L(xi) = -i |xi|^2 / p(xi); purely imaginary, Im <= 0."""
    xi1, xi2 = g.xi_meshgrid()
    p = p_symbol(g, params, 1.0).values
    vals = -1j * (xi1 * xi1 + xi2 * xi2) / p
    return SymbolField(vals, "l_eps")


def _density_power(rho: np.ndarray, sigma: float) -> np.ndarray:
    # |u|^(2 sigma) from rho = |u|^2, with cheap paths for the preset powers
    if sigma == 1.0:
        return rho
    if sigma == 2.0:
        return rho * rho
    if sigma == 3.0:
        return rho * rho * rho
    return rho**sigma


def nonlinearity_values(u: np.ndarray, sigma: float) -> np.ndarray:
    """Pointwise |u|^(2 sigma) u on a raw array (hot-path helper)."""
    rho = u.real * u.real + u.imag * u.imag
    return _density_power(rho, sigma) * u


def apply_nonlinearity(u: Field, sigma: float) -> Field:
    if u.space != "physical":
        raise ValueError("apply_nonlinearity expects a physical-space field")
    return Field(nonlinearity_values(u.values, sigma), "physical")


def dealias_mask(g: Grid) -> np.ndarray:
    """2/3-rule mask (True = keep). Off by default everywhere; exposed as an option."""
    m1 = np.abs(np.fft.fftfreq(g.N1, d=1.0 / g.N1))
    m2 = np.abs(np.fft.fftfreq(g.N2, d=1.0 / g.N2))
    keep1 = m1 <= g.N1 / 3.0
    keep2 = m2 <= g.N2 / 3.0
    return keep1[:, None] & keep2[None, :]


def rhs_spectral(u_hat: Field, g: Grid, params: ModelParams, dealias: bool = False) -> Field:
    """L u_hat + N(u_hat), the full spectral right-hand side.

    The nonlinear term is evaluated pseudospectrally: inverse transform,
    pointwise |u|^(2 sigma) u, forward transform, multiply by the symbol
    i (1 - delta.xi) / p(xi).
    """
    _check_shape(u_hat, g)
    if u_hat.space != "spectral":
        raise ValueError("rhs_spectral expects a spectral-space field")
    xi1, xi2 = g.xi_meshgrid()
    pinv = p_symbol(g, params, -1.0).values
    d1, d2 = params.delta
    lin = (-1j) * (xi1 * xi1 + xi2 * xi2) * pinv
    ncoef = 1j * (1.0 - d1 * xi1 - d2 * xi2) * pinv
    u = _fft.ifft2(u_hat.values)
    w_hat = _fft.fft2(nonlinearity_values(u, params.sigma))
    if dealias:
        w_hat *= dealias_mask(g)
    return Field(lin * u_hat.values + ncoef * w_hat, "spectral")


def krasny_filter(u_hat: Field, tau: float = 1e-10) -> Field:
    """Zero every coefficient with modulus strictly below tau (tau itself survives)."""
    if u_hat.space != "spectral":
        raise ValueError("krasny_filter expects a spectral-space field")
    if not tau > 0:
        raise ValueError("tau must be positive")
    v = u_hat.values.copy()
    v[np.abs(v) < tau] = 0.0
    return Field(v, "spectral")


def _outer_band_mask(shape: Tuple[int, int]) -> np.ndarray:
    # outer third of wavenumber magnitudes along either axis
    n1, n2 = shape
    m1 = np.abs(np.fft.fftfreq(n1, d=1.0 / n1))
    m2 = np.abs(np.fft.fftfreq(n2, d=1.0 / n2))
    band1 = m1 >= (2.0 / 3.0) * (n1 / 2.0)
    band2 = m2 >= (2.0 / 3.0) * (n2 / 2.0)
    return band1[:, None] | band2[None, :]


def resolution_indicator(u_hat: Field) -> float:
    """Max modulus in the outer-third wavenumber band over max modulus overall.

    Small values mean the Fourier coefficients have decayed by the edge of the
    resolved band; values near 1 flag an under-resolved (or noise-dominated)
    field. Returns 0.0 for the zero field.
    """
    if u_hat.space != "spectral":
        raise ValueError("resolution_indicator expects a spectral-space field")
    mod = np.abs(u_hat.values)
    overall = mod.max()
    if overall == 0.0:
        return 0.0
    return float(mod[_outer_band_mask(mod.shape)].max() / overall)
