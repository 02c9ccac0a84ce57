"""Closed-form reference data: solitons, the discontinuous initial data whose
Miura image is a point mass, and the discrete Miura transform."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import Grid, GridFunction, d0

__all__ = [
    "SolitonParams",
    "TsutsumiParams",
    "soliton",
    "pde_residual",
    "soliton_residual",
    "tsutsumi_data",
    "tsutsumi_profile",
    "delta_mass",
    "miura_transform",
]


@dataclass(frozen=True)
class SolitonParams:
    k: int = 1
    c: float = 1.0

    def __post_init__(self):
        if self.k not in (1, 2):
            raise ValueError(f"k must be 1 or 2, got {self.k}")
        if not self.c > 0:
            raise ValueError(f"soliton parameter c must be positive, got {self.c}")

    @property
    def speed(self) -> float:
        return self.c**2


@dataclass(frozen=True)
class TsutsumiParams:
    """Parameters ``(c, eps)``; ``eps = 1`` is the one-parameter family."""

    c: float
    eps: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.c) and math.isfinite(self.eps)):
            raise ValueError("c and eps must be finite")
        if self.c == 0:
            raise ValueError("c must be nonzero")


def soliton(x, t, p: SolitonParams):
    """Travelling wave ``[(k+2)/2 c^2 sech^2(k c (x - c^2 t)/2)]^(1/k)`` (beta = 1)."""
    z = 0.5 * p.k * p.c * (np.asarray(x, dtype=float) - p.speed * t)
    base = 0.5 * (p.k + 2) * p.c**2 / np.cosh(z) ** 2
    out = base if p.k == 1 else np.sqrt(base)
    return float(out) if np.ndim(out) == 0 else out


# fourth-order central stencils as (offsets, weights)
_D1 = (np.array([-2, -1, 1, 2]), np.array([1.0, -8.0, 8.0, -1.0]) / 12.0)
_D3 = (np.array([-3, -2, -1, 1, 2, 3]), np.array([1.0, -8.0, 13.0, -13.0, 8.0, -1.0]) / 8.0)


def pde_residual(func, x, t, k: int, delta: float, beta: float = 1.0):
    """``u_t + u_xxx + beta (u^(k+1))_x`` of ``func(x, t)`` by fourth-order central differences."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)

    def diff(g, stencil, order):
        offs, w = stencil
        return sum(wi * g(oi * delta) for oi, wi in zip(offs, w)) / delta**order

    ut = diff(lambda s: func(x, t + s), _D1, 1)
    uxxx = diff(lambda s: func(x + s, t), _D3, 3)
    flux = diff(lambda s: func(x + s, t) ** (k + 1), _D1, 1)
    return ut + uxxx + beta * flux


def soliton_residual(p: SolitonParams, x, t, delta: float = 1e-3):
    """PDE residual of the closed-form soliton; small when the formula is transcribed right."""
    return pde_residual(lambda xx, tt: soliton(xx, tt, p), x, t, p.k, delta)


def tsutsumi_profile(x, p: TsutsumiParams):
    """``(c+eps)/((c+eps) x + c)`` for x > 0 and ``1/(x + c)`` for x < 0.

    At ``x = 0`` the mean of the one-sided limits ``(c+eps)/c`` and ``1/c``
    is returned.
    """
    x = np.asarray(x, dtype=float)
    a = p.c + p.eps
    right_den = a * x + p.c
    left_den = x + p.c
    bad = ((x > 0) & (right_den == 0)) | ((x < 0) & (left_den == 0))
    if bad.any():
        raise ValueError(
            f"(c, eps) = ({p.c}, {p.eps}) puts a pole at sampled x={float(x[bad][0])!r}"
        )
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(x > 0, a / right_den, 1.0 / left_den)
    out = np.where(x == 0, 0.5 * (a / p.c + 1.0 / p.c), out)
    return float(out) if out.ndim == 0 else out


def tsutsumi_data(grid: Grid, p: TsutsumiParams) -> GridFunction:
    xs = grid.x
    if not (xs[0] < 0 < xs[-1] or 0 in (xs[0], xs[-1])):
        raise ValueError("grid must straddle x = 0")
    return GridFunction(grid, tsutsumi_profile(xs, p))


def delta_mass(p: TsutsumiParams) -> float:
    """Weight ``N = (c + eps - 1)/c`` of the point mass in the Miura image of the data."""
    if p.c == 0:
        raise ZeroDivisionError("c must be nonzero")
    return (p.c + p.eps - 1.0) / p.c


def miura_transform(u: GridFunction) -> GridFunction:
    """Discrete Miura map ``D0 u + u^2``."""
    return d0(u) + u * u
