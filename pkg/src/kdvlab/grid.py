"""Uniform 1-D grids, grid functions and the difference-operator calculus.

All stencils reach at most two nodes away from the centre.  Reads outside
``0..n-1`` are resolved by the grid's boundary mode: ``PERIODIC`` wraps the
index modulo ``n`` and ``ZERO_EXTENSION`` treats the sequence as zero there,
which is how a decaying sequence on the whole lattice is truncated.

Operators are evaluated on a copy of the values padded by two ghost nodes on
each side, so in zero-extension mode every operator is the exact restriction
of the corresponding operator on the infinite lattice.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Boundary",
    "Grid",
    "GridFunction",
    "shift",
    "d_plus",
    "d_minus",
    "d0",
    "laplacian",
    "d3",
    "bilaplacian",
    "inner_product",
    "norm_lp",
    "norm_lp_truncated",
    "compensated_sum",
]

STENCIL_RADIUS = 2


class Boundary(enum.Enum):
    PERIODIC = "periodic"
    ZERO_EXTENSION = "zero-extension"

    @classmethod
    def parse(cls, value: "Boundary | str") -> "Boundary":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-")
        for member in cls:
            if member.value == key:
                return member
        raise ValueError(f"unknown boundary mode {value!r}; expected 'periodic' or 'zero-extension'")


@dataclass(frozen=True)
class Grid:
    """Uniform lattice ``x_j = x0 + j*h`` for ``j = 0..n-1``."""

    h: float
    x0: float
    n: int
    boundary: Boundary = Boundary.PERIODIC

    def __post_init__(self):
        if not (math.isfinite(self.h) and self.h > 0):
            raise ValueError(f"grid spacing must be positive, got h={self.h}")
        if not math.isfinite(self.x0):
            raise ValueError("x0 must be finite")
        if int(self.n) != self.n or self.n < 2 * STENCIL_RADIUS + 1:
            raise ValueError(f"need at least {2 * STENCIL_RADIUS + 1} points, got n={self.n}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "boundary", Boundary.parse(self.boundary))

    @classmethod
    def from_domain(cls, x_min: float, x_max: float, n: int, boundary="periodic") -> "Grid":
        """Grid covering ``[x_min, x_max]``.

        With periodic boundaries ``x_max`` is identified with ``x_min`` and is
        not a node, so ``h = (x_max - x_min)/n``.  Otherwise both ends are
        nodes and ``h = (x_max - x_min)/(n - 1)``.
        """
        if not x_min < x_max:
            raise ValueError(f"empty domain [{x_min}, {x_max}]")
        boundary = Boundary.parse(boundary)
        cells = n if boundary is Boundary.PERIODIC else n - 1
        return cls(h=(x_max - x_min) / cells, x0=float(x_min), n=n, boundary=boundary)

    @property
    def periodic(self) -> bool:
        return self.boundary is Boundary.PERIODIC

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.h * np.arange(self.n)

    @property
    def length(self) -> float:
        """Period for periodic grids, distance between end nodes otherwise."""
        return self.n * self.h if self.periodic else (self.n - 1) * self.h

    def function(self, values) -> "GridFunction":
        return GridFunction(self, values)

    def sample(self, f) -> "GridFunction":
        """Nodal sampling ``u_j = f(x_j)``."""
        return GridFunction(self, f(self.x))

    def zeros(self) -> "GridFunction":
        return GridFunction(self, np.zeros(self.n))


class GridFunction:
    """A real sequence attached to a :class:`Grid`.

    Values are stored in a read-only array; arithmetic returns new objects.
    """

    __slots__ = ("grid", "values")

    def __init__(self, grid: Grid, values):
        arr = np.array(values, dtype=float)
        if arr.ndim == 0:
            arr = np.full(grid.n, float(arr))
        if arr.shape != (grid.n,):
            raise ValueError(f"expected {grid.n} values, got shape {arr.shape}")
        arr.setflags(write=False)
        self.grid = grid
        self.values = arr

    def __repr__(self):
        return f"GridFunction(n={self.grid.n}, h={self.grid.h:g}, {self.grid.boundary.value})"

    def __len__(self):
        return self.grid.n

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def _other(self, other):
        if isinstance(other, GridFunction):
            _check_same_grid(self, other)
            return other.values
        return other

    def _new(self, values) -> "GridFunction":
        return GridFunction(self.grid, values)

    def __add__(self, other):
        return self._new(self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self._new(self.values - self._other(other))

    def __rsub__(self, other):
        return self._new(self._other(other) - self.values)

    def __mul__(self, other):
        return self._new(self.values * self._other(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._new(self.values / self._other(other))

    def __neg__(self):
        return self._new(-self.values)

    def __pow__(self, p):
        return self._new(self.values**p)

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.values)))


def _check_same_grid(u: GridFunction, v: GridFunction):
    if u.grid != v.grid:
        raise ValueError("grid functions live on different grids")


def pad(values: np.ndarray, boundary: Boundary, width: int = STENCIL_RADIUS) -> np.ndarray:
    """Values with ``width`` ghost nodes on each side, filled per ``boundary``."""
    if boundary is Boundary.PERIODIC:
        return np.concatenate((values[-width:], values, values[:width]))
    return np.pad(values, width)


def _result(u: GridFunction, values: np.ndarray) -> GridFunction:
    out = GridFunction(u.grid, values)
    if u.is_finite() and not out.is_finite():
        raise FloatingPointError("difference operator produced non-finite values")
    return out


def shift(u: GridFunction, offset: int) -> GridFunction:
    """Translation ``(S u)_j = u_{j+offset}`` for ``|offset| <= 2``."""
    if int(offset) != offset or abs(offset) > STENCIL_RADIUS:
        raise ValueError(f"shift offset must be an integer in [-2, 2], got {offset}")
    p = pad(u.values, u.grid.boundary)
    r = STENCIL_RADIUS
    return GridFunction(u.grid, p[r + offset : r + offset + u.grid.n])


def d_plus(u: GridFunction) -> GridFunction:
    p = pad(u.values, u.grid.boundary, 1)
    return _result(u, (p[2:] - p[1:-1]) / u.grid.h)


def d_minus(u: GridFunction) -> GridFunction:
    p = pad(u.values, u.grid.boundary, 1)
    return _result(u, (p[1:-1] - p[:-2]) / u.grid.h)


def d0(u: GridFunction) -> GridFunction:
    p = pad(u.values, u.grid.boundary, 1)
    return _result(u, (p[2:] - p[:-2]) / (2.0 * u.grid.h))


def second_differences(p: np.ndarray) -> np.ndarray:
    """``s_i = (p_{i+1} - p_i) - (p_i - p_{i-1})`` for interior entries of ``p``."""
    d = np.diff(p)
    return d[1:] - d[:-1]


def laplacian(u: GridFunction) -> GridFunction:
    p = pad(u.values, u.grid.boundary, 1)
    return _result(u, second_differences(p) / u.grid.h**2)


def d3(u: GridFunction) -> GridFunction:
    """``D+ D0 D-``, i.e. ``(u_{j+2} - 2u_{j+1} + 2u_{j-1} - u_{j-2}) / (2h^3)``."""
    s = second_differences(pad(u.values, u.grid.boundary))
    return _result(u, (s[2:] - s[:-2]) / (2.0 * u.grid.h**3))


def bilaplacian(u: GridFunction) -> GridFunction:
    s = second_differences(pad(u.values, u.grid.boundary))
    return _result(u, second_differences(s) / u.grid.h**4)


def compensated_sum(values) -> float:
    return math.fsum(np.asarray(values, dtype=float).ravel().tolist())


def inner_product(u: GridFunction, v: GridFunction) -> float:
    """``(u, v)_h = sum_j h u_j v_j`` with compensated summation."""
    _check_same_grid(u, v)
    return u.grid.h * compensated_sum(u.values * v.values)


def norm_lp(u: GridFunction, p: float = 2) -> float:
    if p == math.inf:
        return float(np.max(np.abs(u.values)))
    if p < 1:
        raise ValueError(f"p must lie in [1, inf], got {p}")
    a = np.abs(u.values)
    return (u.grid.h * compensated_sum(a**p)) ** (1.0 / p)


def norm_lp_truncated(u: GridFunction, p: float, R: float) -> float:
    """The norm restricted to nodes with ``|x_j| <= R``."""
    if not R > 0:
        raise ValueError(f"R must be positive, got {R}")
    mask = np.abs(u.grid.x) <= R
    a = np.abs(u.values[mask])
    if p == math.inf:
        return float(a.max()) if a.size else 0.0
    if p < 1:
        raise ValueError(f"p must lie in [1, inf], got {p}")
    return (u.grid.h * compensated_sum(a**p)) ** (1.0 / p)
