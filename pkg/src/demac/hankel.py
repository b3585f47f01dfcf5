"""Structured (multi-level) Hankel operators and their exact pseudoinverses.

A length-N signal (or a d-way array) maps to a block Hankel matrix whose
rank equals the number of exponential components in the signal. The
"double" variant adjoins the Hankel matrix of the conjugated, reversed
signal, which is the forward-backward trick: the augmented matrix stays
low rank only when every pole sits on the unit circle or comes with its
conjugate-reciprocal partner.

Conventions
-----------
* A shape is one ``(N_j, N_j1, N_j2)`` triple per dimension with
  ``N_j1 + N_j2 = N_j + 1``.
* Rows of the Hankel matrix are indexed by the first-block multi-index
  (dimension 1 slowest), columns by the second block, so the d-level
  matrix is exactly the recursive Hankel-block-Hankel construction.
* Reversal matrices are never materialized in the hot paths: reversing
  every per-dimension index equals reversing the row-major linear index,
  so ``J1 @ conj(G) @ J2 == conj(G)[::-1, ::-1]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "LevelShape",
    "DoubleHankelMatrix",
    "default_split",
    "level_hankel",
    "conj_backward",
    "double_hankel",
    "antidiag_weights",
    "level_hankel_pinv",
    "double_hankel_pinv",
    "reversal_matrix",
    "write_matrix_csv",
]


def default_split(n, fraction=0.6):
    """Split ``n + 1`` into ``(n1, n2)`` with ``n1 ~ fraction * (n + 1)``.

    The 0.6 default gives the taller-than-wide aspect that keeps the
    augmented matrix close to square and performs well in practice.
    """
    if n < 1:
        raise ValueError(f"grid size must be >= 1, got {n}")
    n1 = int(np.floor(fraction * (n + 1)))
    n1 = min(max(n1, 1), n)
    return n1, n + 1 - n1


@dataclass(frozen=True)
class LevelShape:
    """Per-dimension Hankel block geometry.

    Parameters
    ----------
    levels : tuple of (N_j, N_j1, N_j2)
        One triple per dimension; each must satisfy ``N_j1 + N_j2 = N_j + 1``
        with both parts >= 1.
    """

    levels: tuple

    def __post_init__(self):
        levels = tuple(tuple(int(v) for v in level) for level in self.levels)
        object.__setattr__(self, "levels", levels)
        if not levels:
            raise ValueError("LevelShape needs at least one dimension")
        for n, n1, n2 in levels:
            if n1 < 1 or n2 < 1 or n1 + n2 != n + 1:
                raise ValueError(
                    f"invalid Hankel split (N={n}, N1={n1}, N2={n2}): "
                    "need N1 + N2 = N + 1 with N1, N2 >= 1"
                )

    @classmethod
    def for_dims(cls, dims, fraction=0.6):
        """Default split per dimension."""
        return cls(tuple((int(n), *default_split(int(n), fraction)) for n in dims))

    @classmethod
    def from_splits(cls, dims, n1s):
        """Explicit first-block sizes per dimension."""
        if len(dims) != len(n1s):
            raise ValueError("dims and n1s length mismatch")
        return cls(tuple((int(n), int(n1), int(n) + 1 - int(n1)) for n, n1 in zip(dims, n1s)))

    @property
    def d(self):
        return len(self.levels)

    @property
    def dims(self):
        return tuple(n for n, _, _ in self.levels)

    @property
    def row_dims(self):
        return tuple(n1 for _, n1, _ in self.levels)

    @property
    def col_dims(self):
        return tuple(n2 for _, _, n2 in self.levels)

    @property
    def rows(self):
        return int(np.prod(self.row_dims))

    @property
    def cols(self):
        return int(np.prod(self.col_dims))

    @property
    def size(self):
        return int(np.prod(self.dims))


class _Plan:
    """Precomputed index tables for one LevelShape (internal)."""

    __slots__ = ("shape", "table", "counts", "rev", "denom_single", "denom_double")

    def __init__(self, shape):
        dims = shape.dims
        n = shape.size
        r, c = shape.rows, shape.cols
        row_multi = np.array(np.unravel_index(np.arange(r), shape.row_dims))
        col_multi = np.array(np.unravel_index(np.arange(c), shape.col_dims))
        combined = row_multi[:, :, None] + col_multi[:, None, :]
        self.shape = shape
        self.table = np.ravel_multi_index(tuple(combined), dims)
        self.counts = np.bincount(self.table.ravel(), minlength=n).astype(float)
        rev_slices = (slice(None, None, -1),) * shape.d
        self.rev = np.arange(n).reshape(dims)[rev_slices].ravel()
        self.denom_single = self.counts
        self.denom_double = self.counts + self.counts[self.rev]


@lru_cache(maxsize=64)
def _plan(shape):
    return _Plan(shape)


def _check_signal(y, shape):
    y = np.asarray(y)
    if y.shape != shape.dims:
        raise ValueError(f"signal shape {y.shape} does not match grid {shape.dims}")
    return np.ascontiguousarray(y, dtype=complex)


def _sum_antidiags(g, table, n):
    """Sum matrix entries grouped by their antidiagonal linear index."""
    flat = np.asarray(g).ravel()
    idx = table.ravel()
    return (
        np.bincount(idx, weights=flat.real, minlength=n)
        + 1j * np.bincount(idx, weights=flat.imag, minlength=n)
    )


def level_hankel(y, shape):
    """Forward map: d-way array -> (rows x cols) d-level Hankel matrix.

    For d = 1 the entry at (i, j) is ``y[i + j]`` (0-based); for d >= 2
    the matrix is the block Hankel matrix of the (d-1)-level matrices of
    the subarrays along the first axis.
    """
    plan = _plan(shape)
    y = _check_signal(y, shape)
    return y.ravel()[plan.table]


def conj_backward(y):
    """Conjugated, fully reversed copy of a d-way array.

    Satisfies ``level_hankel(conj_backward(y)) == conj(level_hankel(y))[::-1, ::-1]``
    entrywise exactly, and is an involution.
    """
    y = np.asarray(y)
    rev = (slice(None, None, -1),) * y.ndim
    return np.conj(y[rev])


@dataclass(frozen=True)
class DoubleHankelMatrix:
    """Forward-backward augmented Hankel matrix ``[G1 | G2]``.

    ``G2 == J1 @ conj(G1) @ J2`` whenever the matrix was produced by the
    forward map; the blocks are stored side by side as one rows x 2*cols
    array.
    """

    matrix: np.ndarray
    shape: LevelShape

    @property
    def g1(self):
        return self.matrix[:, : self.shape.cols]

    @property
    def g2(self):
        return self.matrix[:, self.shape.cols :]

    def __array__(self, dtype=None, copy=None):
        if dtype is not None:
            return self.matrix.astype(dtype)
        return self.matrix


def double_hankel(y, shape):
    """Forward map onto the augmented matrix ``[H y | J1 conj(H y) J2]``."""
    g1 = level_hankel(y, shape)
    g2 = np.conj(g1)[::-1, ::-1]
    return DoubleHankelMatrix(np.concatenate([g1, g2], axis=1), shape)


def antidiag_weights(shape):
    """Number of Hankel entries covering each signal position.

    For d = 1 this is ``min(n, N + 1 - n, N1, N2)`` at 1-based position
    n; in general the product of the per-dimension counts. Returned as an
    integer array over the grid.
    """
    plan = _plan(shape)
    return plan.counts.astype(int).reshape(shape.dims)


def level_hankel_pinv(g, shape):
    """Least-squares inverse of `level_hankel`: antidiagonal averages.

    Solves ``min_y || H y - G ||_F`` exactly; applied to ``H y`` it
    returns ``y`` up to rounding.
    """
    plan = _plan(shape)
    g = np.asarray(g)
    if g.shape != (shape.rows, shape.cols):
        raise ValueError(f"matrix shape {g.shape} does not match {(shape.rows, shape.cols)}")
    sums = _sum_antidiags(g, plan.table, shape.size)
    return (sums / plan.denom_single).reshape(shape.dims)


def double_hankel_pinv(g, shape):
    """Least-squares inverse of `double_hankel`.

    Solves ``min_y ||H y - G1||_F^2 + ||J1 conj(H y) J2 - G2||_F^2``. The
    backward block is conjugate-linear in y, so the problem is a
    real-linear least squares; its exact solution is the weighted
    antidiagonal average below (position n pools the antidiagonal n of
    G1 with the conjugate of antidiagonal rev(n) of G2).
    """
    plan = _plan(shape)
    if isinstance(g, DoubleHankelMatrix):
        g = g.matrix
    g = np.asarray(g)
    c = shape.cols
    if g.shape != (shape.rows, 2 * c):
        raise ValueError(f"matrix shape {g.shape} does not match {(shape.rows, 2 * c)}")
    s1 = _sum_antidiags(g[:, :c], plan.table, shape.size)
    s2 = _sum_antidiags(g[:, c:], plan.table, shape.size)
    y = (s1 + np.conj(s2)[plan.rev]) / plan.denom_double
    return y.reshape(shape.dims)


def reversal_matrix(n):
    """n x n exchange matrix (ones on the antidiagonal)."""
    return np.eye(n)[::-1].copy()


def write_matrix_csv(path, m):
    """Debug export: one ``row,col,re,im`` line per entry, 1-based."""
    m = np.asarray(m)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("row,col,re,im\n")
        for i in range(m.shape[0]):
            for j in range(m.shape[1]):
                v = complex(m[i, j])
                fh.write(f"{i + 1},{j + 1},{v.real!r},{v.imag!r}\n")
