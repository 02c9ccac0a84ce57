"""Pentadiagonal (bandwidth 2) LU factorization and solves.

Band storage is row oriented: ``bands[m + 2, i] = A[i, i + m]`` for
``m = -2..2``.  In a cyclic matrix the column index is taken modulo ``n``, so
the wrapped entries of the first two and last two rows hold the corner
couplings; entries that fall outside ``0..n-1`` of a non-cyclic matrix are
ignored.

The non-cyclic factorization is Gaussian elimination with partial pivoting
restricted to the band; row interchanges widen the upper band of ``U`` to 4.
A cyclic matrix is written as ``B + U C`` where ``B`` is its band part and the
rank <= 4 term carries the corners; solves use the Woodbury identity.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

__all__ = [
    "BandedMatrix",
    "BandedLU",
    "SingularMatrixError",
    "matvec",
    "lu_factor",
    "solve",
]

OFFSETS = (-2, -1, 0, 1, 2)


class SingularMatrixError(np.linalg.LinAlgError):
    pass


@dataclass
class BandedMatrix:
    bands: np.ndarray
    cyclic: bool = False

    def __post_init__(self):
        self.bands = np.ascontiguousarray(self.bands, dtype=float)
        if self.bands.ndim != 2 or self.bands.shape[0] != 5:
            raise ValueError(f"bands must have shape (5, n), got {self.bands.shape}")
        if self.cyclic and self.n < 5:
            raise ValueError("cyclic pentadiagonal matrices need n >= 5")
        if not self.cyclic:
            # entries pointing outside the matrix are structurally zero
            for row, m in enumerate(OFFSETS):
                if m < 0:
                    self.bands[row, : -m] = 0.0
                elif m > 0:
                    self.bands[row, self.n - m :] = 0.0

    @property
    def n(self) -> int:
        return self.bands.shape[1]

    @classmethod
    def from_stencil(cls, stencil, n: int, cyclic: bool = False) -> "BandedMatrix":
        """Constant-coefficient matrix whose row ``i`` applies ``stencil[m+2]`` to ``x_{i+m}``."""
        bands = np.repeat(np.asarray(stencil, dtype=float)[:, None], n, axis=1)
        return cls(bands, cyclic)

    @classmethod
    def identity(cls, n: int, cyclic: bool = False) -> "BandedMatrix":
        return cls.from_stencil([0, 0, 1, 0, 0], n, cyclic)

    @classmethod
    def from_dense(cls, a: np.ndarray, cyclic: bool = False) -> "BandedMatrix":
        a = np.asarray(a, dtype=float)
        n = a.shape[0]
        i = np.arange(n)
        bands = np.zeros((5, n))
        for row, m in enumerate(OFFSETS):
            j = i + m
            if cyclic:
                bands[row] = a[i, j % n]
            else:
                ok = (j >= 0) & (j < n)
                bands[row, ok] = a[i[ok], j[ok]]
        return cls(bands, cyclic)

    def to_dense(self) -> np.ndarray:
        n = self.n
        a = np.zeros((n, n))
        i = np.arange(n)
        for row, m in enumerate(OFFSETS):
            j = i + m
            if self.cyclic:
                a[i, j % n] += self.bands[row]
            else:
                ok = (j >= 0) & (j < n)
                a[i[ok], j[ok]] += self.bands[row, ok]
        return a

    def norm_inf(self) -> float:
        return float(np.max(np.sum(np.abs(self.bands), axis=0)))

    def band_part(self) -> "BandedMatrix":
        """The non-cyclic matrix obtained by dropping the corner couplings."""
        return BandedMatrix(self.bands.copy(), cyclic=False)

    def corners(self) -> tuple[np.ndarray, np.ndarray]:
        """Factors ``(U, C)`` with ``A = band_part + U @ C``; ``U`` is n x 4 of unit columns."""
        n = self.n
        rows = np.array([0, 1, n - 2, n - 1])
        U = np.zeros((n, 4))
        U[rows, np.arange(4)] = 1.0
        C = np.zeros((4, n))
        b = self.bands
        C[0, n - 2] = b[0, 0]
        C[0, n - 1] = b[1, 0]
        C[1, n - 1] = b[0, 1]
        C[2, 0] = b[4, n - 2]
        C[3, 0] = b[3, n - 1]
        C[3, 1] = b[4, n - 1]
        return U, C


@njit(cache=True)
def _matvec(bands, x, cyclic):
    n = x.shape[0]
    y = np.zeros(n)
    for i in range(n):
        acc = 0.0
        for r in range(5):
            j = i + r - 2
            if cyclic:
                j = j % n
            elif j < 0 or j >= n:
                continue
            acc += bands[r, i] * x[j]
        y[i] = acc
    return y


def matvec(a: BandedMatrix, w) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.shape != (a.n,):
        raise ValueError(f"dimension mismatch: matrix is {a.n}x{a.n}, vector has shape {w.shape}")
    return _matvec(a.bands, w, a.cyclic)


# Working rows hold columns i-2 .. i+4 of row i: W[i, c - i + 2].
@njit(cache=True)
def _gbtrf(bands):
    n = bands.shape[1]
    W = np.zeros((n, 7))
    for i in range(n):
        for r in range(5):
            j = i + r - 2
            if 0 <= j < n:
                W[i, r] = bands[r, i]
    L = np.zeros((n, 2))
    piv = np.arange(n)
    amax = 0.0
    for i in range(n):
        for r in range(5):
            amax = max(amax, abs(W[i, r]))
    umax = 0.0
    for k in range(n):
        last = min(k + 2, n - 1)
        p = k
        best = abs(W[k, 2])
        for i in range(k + 1, last + 1):
            v = abs(W[i, k - i + 2])
            if v > best:
                best = v
                p = i
        if best == 0.0:
            return W, L, piv, -1.0, k
        piv[k] = p
        if p != k:
            for c in range(k, min(k + 5, n)):
                tmp = W[k, c - k + 2]
                W[k, c - k + 2] = W[p, c - p + 2]
                W[p, c - p + 2] = tmp
        pivot = W[k, 2]
        for i in range(k + 1, last + 1):
            lik = W[i, k - i + 2] / pivot
            L[k, i - k - 1] = lik
            W[i, k - i + 2] = 0.0
            if lik != 0.0:
                for c in range(k + 1, min(k + 5, n)):
                    W[i, c - i + 2] -= lik * W[k, c - k + 2]
        for c in range(2, 7):
            umax = max(umax, abs(W[k, c]))
    growth = umax / amax if amax > 0.0 else 1.0
    return W, L, piv, growth, -1


@njit(cache=True)
def _gbtrs(W, L, piv, b):
    n = b.shape[0]
    y = b.copy()
    for k in range(n):
        p = piv[k]
        if p != k:
            tmp = y[k]
            y[k] = y[p]
            y[p] = tmp
        yk = y[k]
        if k + 1 < n:
            y[k + 1] -= L[k, 0] * yk
        if k + 2 < n:
            y[k + 2] -= L[k, 1] * yk
    x = np.empty(n)
    for k in range(n - 1, -1, -1):
        acc = y[k]
        for c in range(k + 1, min(k + 5, n)):
            acc -= W[k, c - k + 2] * x[c]
        x[k] = acc / W[k, 2]
    return x


@dataclass
class BandedLU:
    """LU factors of a :class:`BandedMatrix`.

    ``valid`` is True after a successful factorization; ``pivot_growth`` is
    ``max|U| / max|A|`` over the band part.
    """

    n: int
    cyclic: bool
    valid: bool
    pivot_growth: float
    _w: np.ndarray = field(repr=False)
    _l: np.ndarray = field(repr=False)
    _piv: np.ndarray = field(repr=False)
    _u: np.ndarray | None = field(default=None, repr=False)
    _c: np.ndarray | None = field(default=None, repr=False)
    _z: np.ndarray | None = field(default=None, repr=False)
    _cap: np.ndarray | None = field(default=None, repr=False)

    def _band_solve(self, b):
        return _gbtrs(self._w, self._l, self._piv, b)


def lu_factor(a: BandedMatrix) -> BandedLU:
    """Factor ``a``; raises :class:`SingularMatrixError` on an exact zero pivot."""
    if not np.all(np.isfinite(a.bands)):
        raise ValueError("matrix has non-finite entries")
    W, L, piv, growth, bad = _gbtrf(a.bands)
    if bad >= 0:
        raise SingularMatrixError(f"zero pivot in column {bad}")
    lu = BandedLU(a.n, a.cyclic, True, growth, W, L, piv)
    if a.cyclic:
        U, C = a.corners()
        Z = np.column_stack([lu._band_solve(U[:, q].copy()) for q in range(4)])
        cap = np.eye(4) + C @ Z
        if not np.all(np.isfinite(cap)) or np.linalg.cond(cap) > 1e14:
            raise SingularMatrixError("cyclic correction is singular")
        lu._u, lu._c, lu._z, lu._cap = U, C, Z, cap
    return lu


def solve(lu: BandedLU, b) -> np.ndarray:
    b = np.asarray(b, dtype=float)
    if b.shape != (lu.n,):
        raise ValueError(f"dimension mismatch: factorization is {lu.n}x{lu.n}, rhs has shape {b.shape}")
    if not np.all(np.isfinite(b)):
        raise ValueError("right-hand side has non-finite entries")
    y = lu._band_solve(b)
    if lu.cyclic:
        y = y - lu._z @ np.linalg.solve(lu._cap, lu._c @ y)
    return y
