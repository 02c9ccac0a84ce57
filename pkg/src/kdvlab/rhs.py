"""Semi-discrete right-hand side, implicit Euler residual and its Jacobian.

The scheme advances

    du/dt + D3 u + beta (k+1)/(k+2) [u^k D0 u + D0 u^(k+1)] + eta h Lap_h^2 u = 0

with ``D3 = D+ D0 D-``.  With ``eta = 1`` this is the semi-discrete scheme the
convergence theory is stated for; ``eta`` scales the stabilization.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import Boundary, Grid, GridFunction, pad, second_differences
from .linalg import BandedMatrix

__all__ = [
    "ModelParams",
    "Residual",
    "nonlinear_term",
    "semidiscrete_rhs",
    "implicit_residual",
    "jacobian",
]


@dataclass(frozen=True)
class ModelParams:
    """Exponent ``k``, flux coefficient ``beta`` and stabilization ``eta``.

    ``beta = 0`` is only accepted with ``linear=True``, a relaxation used to
    isolate the linear part of the scheme in tests.
    """

    k: int = 1
    beta: float = 1.0
    eta: float = 1.0
    linear: bool = False

    def __post_init__(self):
        if self.k not in (1, 2):
            raise ValueError(f"k must be 1 (KdV) or 2 (mKdV), got {self.k}")
        if not math.isfinite(self.beta) or (self.beta == 0 and not self.linear):
            raise ValueError("beta must be a finite nonzero number")
        if not (math.isfinite(self.eta) and self.eta >= 0):
            raise ValueError(f"eta must be >= 0, got {self.eta}")

    @property
    def flux_factor(self) -> float:
        return self.beta * (self.k + 1) / (self.k + 2)


@dataclass(frozen=True)
class Residual:
    values: GridFunction
    norm_inf: float


# Raw-array kernels shared with the stepper's Newton loop.

def _terms(u: np.ndarray, grid: Grid, params: ModelParams):
    """Dispersive, nonlinear and dissipative parts of the spatial operator."""
    h = grid.h
    p = pad(u, grid.boundary)
    s = second_differences(p)  # s[i] belongs to node i-1
    disp = (s[2:] - s[:-2]) / (2.0 * h**3)
    diss = second_differences(s) * (params.eta / h**3)
    k = params.k
    um, uc, up = p[1:-3], p[2:-2], p[3:-1]
    flux = (uc**k * (up - um) + (up ** (k + 1) - um ** (k + 1))) * (params.flux_factor / (2.0 * h))
    return disp, flux, diss


def _spatial(u: np.ndarray, grid: Grid, params: ModelParams) -> np.ndarray:
    disp, flux, diss = _terms(u, grid, params)
    return disp + flux + diss


def _residual(u_next: np.ndarray, u_prev: np.ndarray, tau: float, grid: Grid, params: ModelParams):
    return (u_next - u_prev) / tau + _spatial(u_next, grid, params)


def _check_finite(values: np.ndarray, what: str):
    if not np.all(np.isfinite(values)):
        raise FloatingPointError(f"{what} produced non-finite values")


def nonlinear_term(u: GridFunction, k: int, beta: float) -> GridFunction:
    """``beta (k+1)/(k+2) (u^k D0 u + D0 u^(k+1))``."""
    params = ModelParams(k=k, beta=beta, eta=0.0, linear=beta == 0)
    _, flux, _ = _terms(u.values, u.grid, params)
    _check_finite(flux, "nonlinear term")
    return GridFunction(u.grid, flux)


def semidiscrete_rhs(u: GridFunction, params: ModelParams) -> GridFunction:
    """``du/dt`` of the semi-discrete scheme."""
    out = -_spatial(u.values, u.grid, params)
    _check_finite(out, "semi-discrete right-hand side")
    return GridFunction(u.grid, out)


def implicit_residual(u_next: GridFunction, u_prev: GridFunction, tau: float, params: ModelParams) -> Residual:
    """``F = (u_next - u_prev)/tau - rhs(u_next)``; an implicit Euler step solves ``F = 0``."""
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    if u_next.grid != u_prev.grid:
        raise ValueError("states live on different grids")
    f = _residual(u_next.values, u_prev.values, tau, u_next.grid, params)
    _check_finite(f, "implicit residual")
    return Residual(GridFunction(u_next.grid, f), float(np.max(np.abs(f))))


def _jacobian_bands(u: np.ndarray, tau: float, grid: Grid, params: ModelParams) -> np.ndarray:
    h, k, eta = grid.h, params.k, params.eta
    p = pad(u, grid.boundary)
    um, uc, up = p[1:-3], p[2:-2], p[3:-1]
    g = params.flux_factor / (2.0 * h)
    ih3 = 1.0 / h**3
    n = u.shape[0]
    bands = np.empty((5, n))
    bands[0] = -0.5 * ih3 + eta * ih3
    bands[1] = ih3 - 4.0 * eta * ih3 - g * (uc**k + (k + 1) * um**k)
    bands[2] = 1.0 / tau + 6.0 * eta * ih3 + g * k * uc ** (k - 1) * (up - um)
    bands[3] = -ih3 - 4.0 * eta * ih3 + g * (uc**k + (k + 1) * up**k)
    bands[4] = 0.5 * ih3 + eta * ih3
    return bands


def jacobian(u_next: GridFunction, tau: float, params: ModelParams) -> BandedMatrix:
    """``dF/du_next`` as a pentadiagonal matrix.

    Periodic grids give a cyclic matrix; in zero-extension mode couplings to
    nodes outside the grid are dropped.
    """
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    grid = u_next.grid
    bands = _jacobian_bands(u_next.values, tau, grid, params)
    _check_finite(bands, "Jacobian assembly")
    return BandedMatrix(bands, cyclic=grid.boundary is Boundary.PERIODIC)
