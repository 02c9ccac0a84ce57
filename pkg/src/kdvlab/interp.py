"""Piecewise-constant (P0) and piecewise-linear (P1) interpolation of grid
functions, and L2 error measurement against continuous functions."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .grid import GridFunction, compensated_sum, d_plus

__all__ = ["Kind", "Interpolant", "p0", "p1", "p1_derivative", "l2_error", "l2_distance", "l2_norm"]


class Kind(enum.Enum):
    P0 = 0
    P1 = 1


@dataclass(frozen=True)
class Interpolant:
    kind: Kind
    source: GridFunction

    def __call__(self, x):
        return eval_interp(self, x)


def p0(u: GridFunction) -> Interpolant:
    return Interpolant(Kind.P0, u)


def p1(u: GridFunction) -> Interpolant:
    return Interpolant(Kind.P1, u)


def _locate(grid, x):
    """Cell index ``j`` and local coordinate ``theta in [0, 1)`` for each x.

    Returns a mask of points outside the domain (zero-extension only).
    """
    x = np.asarray(x, dtype=float)
    s = (x - grid.x0) / grid.h
    if grid.periodic:
        s = np.mod(s, grid.n)
        outside = np.zeros(s.shape, dtype=bool)
    else:
        outside = (s < 0) | (s > grid.n - 1)
        s = np.clip(s, 0, grid.n - 1)
    # snap coordinates that are a node up to rounding
    r = np.rint(s)
    s = np.where(np.abs(s - r) <= 1e-10, r, s)
    j = np.floor(s).astype(np.int64)
    # guard against s rounding up to n in the periodic wrap
    j = np.minimum(j, grid.n - 1)
    theta = s - j
    return j, theta, outside


def eval_interp(interp: Interpolant, x):
    """Evaluate at scalar or array ``x``.

    Periodic grids wrap ``x``; on zero-extension grids points outside
    ``[x_0, x_{n-1}]`` evaluate to 0.
    """
    u = interp.source.values
    grid = interp.source.grid
    scalar = np.ndim(x) == 0
    j, theta, outside = _locate(grid, x)
    if interp.kind is Kind.P0:
        val = u[j]
    else:
        right = u[(j + 1) % grid.n] if grid.periodic else u[np.minimum(j + 1, grid.n - 1)]
        val = u[j] + theta * (right - u[j])
        # nodes are reproduced exactly
        val = np.where(theta == 0.0, u[j], val)
    val = np.where(outside, 0.0, val)
    return float(val) if scalar else val


def p1_derivative(u: GridFunction) -> Interpolant:
    """The weak derivative of ``P1 u``, which is ``P0`` applied to ``D+ u``."""
    return p0(d_plus(u))


def _window(R) -> tuple[float, float]:
    if np.ndim(R) == 0:
        if not R > 0:
            raise ValueError(f"R must be positive, got {R}")
        return -float(R), float(R)
    a, b = (float(v) for v in R)
    if not a < b:
        raise ValueError(f"empty window ({a}, {b})")
    return a, b


def _breakpoints(grid, a: float, b: float) -> np.ndarray:
    """Grid nodes inside ``(a, b)`` plus the end points, for cellwise quadrature."""
    if grid.periodic:
        j_lo = math.ceil((a - grid.x0) / grid.h)
        j_hi = math.floor((b - grid.x0) / grid.h)
        nodes = grid.x0 + grid.h * np.arange(j_lo, j_hi + 1)
    else:
        nodes = grid.x
    nodes = nodes[(nodes > a) & (nodes < b)]
    return np.concatenate(([a], nodes, [b]))


def _nodes_and_weights(edges: np.ndarray, quad_points_per_cell: int):
    if quad_points_per_cell < 2:
        raise ValueError("need at least 2 quadrature points per cell")
    t, w = np.polynomial.legendre.leggauss(quad_points_per_cell)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = 0.5 * (hi - lo)
    return 0.5 * (hi + lo) + half * t, half * w


def _checked(f, xq):
    fx = np.broadcast_to(np.asarray(f(xq), dtype=float), xq.shape)
    bad = ~np.isfinite(fx)
    if bad.any():
        raise ValueError(f"reference function is not finite at x={float(xq[bad][0])!r}")
    return fx


def l2_error(
    u: GridFunction,
    f,
    R,
    quad_points_per_cell: int = 4,
    relative: bool = False,
) -> float:
    """``||P1 u - f||`` in L2 over ``(-R, R)``, or over ``(a, b)`` if ``R`` is a pair.

    Integrals use composite Gauss-Legendre quadrature on every grid cell
    (clipped at the window ends).  With ``relative=True`` the result is
    divided by ``||f||`` over the same window.
    """
    a, b = _window(R)
    xq, wq = _nodes_and_weights(_breakpoints(u.grid, a, b), quad_points_per_cell)
    fx = _checked(f, xq)
    err = math.sqrt(compensated_sum(wq * (p1(u)(xq) - fx) ** 2))
    if not relative:
        return err
    ref = math.sqrt(compensated_sum(wq * fx**2))
    if ref == 0.0:
        raise ZeroDivisionError("reference function has zero norm on the window")
    return err / ref


def l2_distance(first: Interpolant, second: Interpolant, R, quad_points_per_cell: int = 4) -> float:
    """L2 distance between two interpolants over a window.

    Breakpoints of both grids are merged so the integrand is polynomial on
    every subinterval.
    """
    a, b = _window(R)
    edges = np.union1d(
        _breakpoints(first.source.grid, a, b), _breakpoints(second.source.grid, a, b)
    )
    xq, wq = _nodes_and_weights(edges, quad_points_per_cell)
    return math.sqrt(compensated_sum(wq * (first(xq) - second(xq)) ** 2))


def l2_norm(interp: Interpolant, R, quad_points_per_cell: int = 4) -> float:
    """L2 norm of an interpolant over ``(-R, R)`` or the window ``R = (a, b)``."""
    a, b = _window(R)
    xq, wq = _nodes_and_weights(_breakpoints(interp.source.grid, a, b), quad_points_per_cell)
    return math.sqrt(compensated_sum(wq * interp(xq) ** 2))
