"""Diagnostics: incoherence parameters, shape factor, numeric rank.

These quantities drive experiment design: the incoherence parameter and
shape factor enter the sample-complexity bounds, and the numeric rank
backs every low-rank assertion in the test suites.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log

import numpy as np

from .hankel import LevelShape

__all__ = [
    "IncoherenceReport",
    "incoherence",
    "shape_factor",
    "numeric_rank",
    "sample_bound_estimate",
    "write_reports_csv",
]


@dataclass(frozen=True)
class IncoherenceReport:
    """Gram-matrix eigenvalue summary for one instance.

    ``mu1`` is the reciprocal of the smaller of the two normalized Gram
    minimum eigenvalues; ``lambda_min_g2prime`` is the plain (single
    block) counterpart, never larger than ``lambda_min_g2``.
    """

    k: int
    n: int
    lambda_min_g1: float
    lambda_min_g2: float
    lambda_min_g2prime: float
    mu1: float
    c_s: float

    def sample_bound(self, c1=1.0):
        """Order-level sample-size estimate ``c1 * mu1 * c_s * K * log(N)^4``.

        The universal constant is not identifiable from experiments, so
        it is exposed as a caller-supplied factor (default 1); only the
        scaling in K and N is meaningful.
        """
        return sample_bound_estimate(self.mu1, self.c_s, self.k, self.n, c1)


def sample_bound_estimate(mu1, c_s, k, n, c1=1.0):
    return float(c1 * mu1 * c_s * k * log(n) ** 4)


def _khatri_rao(mats):
    out = mats[0]
    for m in mats[1:]:
        out = (out[:, None, :] * m[None, :, :]).reshape(-1, out.shape[1])
    return out


def _vandermonde(z, n):
    return z[None, :] ** np.arange(n)[:, None]


def incoherence(params, shape):
    """Gram eigenvalue report for an on-circle instance.

    Builds the two Vandermonde factors of the augmented matrix: the row
    factor A1 and the stacked column factor [A2; A2 * prod_j z_j^(1-N_j)
    * sgn(s)^-2], normalizes their Grams by the corresponding block
    sizes, and reports minimum eigenvalues. ``mu1 = 1`` is the best
    possible value and is attained at K = 1.
    """
    if not isinstance(shape, LevelShape):
        shape = LevelShape(tuple(shape))
    if params.k < 1:
        raise ValueError("need K >= 1")
    if params.d != shape.d:
        raise ValueError("params/shape dimension mismatch")
    if not params.on_circle:
        raise ValueError("incoherence is defined for on-circle instances")
    if np.any(params.amps == 0):
        raise ValueError("amplitudes must be nonzero (sign undefined)")
    z = params.poles  # (K, d)
    a1 = _khatri_rao([_vandermonde(z[:, j], n1) for j, (_, n1, _) in enumerate(shape.levels)])
    a2 = _khatri_rao([_vandermonde(z[:, j], n2) for j, (_, _, n2) in enumerate(shape.levels)])
    zpow = np.prod([z[:, j] ** (1 - n) for j, n in enumerate(shape.dims)], axis=0)
    sgn = params.amps / np.abs(params.amps)
    stilde = sgn ** (-2.0)
    a2_tilde = np.vstack([a2, a2 * (zpow * stilde)[None, :]])
    g1 = a1.conj().T @ a1 / shape.rows
    g2 = np.conj(a2_tilde.conj().T @ a2_tilde) / (2.0 * shape.cols)
    g2p = np.conj(a2.conj().T @ a2) / shape.cols
    lam1 = float(np.linalg.eigvalsh(g1)[0])
    lam2 = float(np.linalg.eigvalsh(g2)[0])
    lam2p = float(np.linalg.eigvalsh(g2p)[0])
    mu1 = 1.0 / min(lam1, lam2) if min(lam1, lam2) > 0 else np.inf
    return IncoherenceReport(
        k=params.k,
        n=shape.size,
        lambda_min_g1=lam1,
        lambda_min_g2=lam2,
        lambda_min_g2prime=lam2p,
        mu1=mu1,
        c_s=shape_factor(shape),
    )


def shape_factor(shape):
    """Aspect factor ``max(N / rows, N / (2 cols))`` of the augmented matrix.

    Measures how far the matrix is from square; small values (close to
    1) are preferred and are reached for first-block sizes between half
    and two thirds of the grid.
    """
    if not isinstance(shape, LevelShape):
        shape = LevelShape(tuple(shape))
    n = shape.size
    return float(max(n / shape.rows, n / (2.0 * shape.cols)))


def numeric_rank(m, tol=1e-10):
    """Count of singular values above ``tol`` relative to the largest.

    Returns ``(rank, singular_values)``; the zero matrix has rank 0.
    """
    if not (0.0 < tol < 1.0):
        raise ValueError("tol must be in (0, 1)")
    m = np.asarray(m)
    s = np.linalg.svd(m, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0, s
    return int(np.count_nonzero(s / s[0] >= tol)), s


def write_reports_csv(path, reports):
    """One row per instance with every report field."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("k,n,lambda_min_g1,lambda_min_g2,lambda_min_g2prime,mu1,c_s,sample_bound_c1\n")
        for r in reports:
            fh.write(
                f"{r.k},{r.n},{r.lambda_min_g1!r},{r.lambda_min_g2!r},"
                f"{r.lambda_min_g2prime!r},{r.mu1!r},{r.c_s!r},{r.sample_bound()!r}\n"
            )
