"""Pole and amplitude retrieval from a recovered signal.

ESPRIT on the leading left singular vectors of the structured matrix:
with the augmented (forward-backward) matrix the backward data is built
in, so no separate smoothing pass is needed. In d >= 2 each dimension
contributes its own shift-invariance equation and the estimates are
paired through a shared eigenvector basis.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .hankel import LevelShape, double_hankel, level_hankel
from .model import SpectralParams

__all__ = [
    "PoleEstimates",
    "DegenerateRankError",
    "ConditioningWarning",
    "estimate_poles",
    "fit_amplitudes",
    "distance_to_torus",
    "freq_error",
    "wrap_distance",
    "write_poles_csv",
]


class DegenerateRankError(RuntimeError):
    """Signal subspace has lower numerical rank than the requested order."""

    def __init__(self, rank, requested):
        super().__init__(
            f"signal subspace is numerically rank {rank}, cannot extract K={requested} poles"
        )
        self.rank = rank
        self.requested = requested


class ConditioningWarning(UserWarning):
    """Amplitude fit is poorly conditioned (nearly coincident poles)."""


@dataclass(frozen=True)
class PoleEstimates:
    """Estimated poles with fitted amplitudes.

    ``poles`` is K x d complex; ``circle_dist`` stores the per-pole
    squared deviation of the magnitudes from 1, summed over dimensions.
    """

    poles: np.ndarray
    amps: np.ndarray

    def __post_init__(self):
        poles = np.atleast_2d(np.asarray(self.poles, dtype=complex))
        amps = np.atleast_1d(np.asarray(self.amps, dtype=complex))
        if poles.shape[0] != amps.shape[0]:
            raise ValueError("poles and amps length mismatch")
        if poles.size and np.any(poles == 0):
            raise ValueError("poles must be nonzero")
        object.__setattr__(self, "poles", poles)
        object.__setattr__(self, "amps", amps)

    @property
    def k(self):
        return self.poles.shape[0]

    @property
    def d(self):
        return self.poles.shape[1]

    @property
    def freqs(self):
        """Frequencies angle(z)/2pi wrapped to [0, 1)."""
        return np.mod(np.angle(self.poles) / (2.0 * np.pi), 1.0)

    @property
    def magnitudes(self):
        return np.abs(self.poles)

    @property
    def circle_dist(self):
        return np.sum((self.magnitudes - 1.0) ** 2, axis=1)


def _shift_pair(u, row_dims, axis):
    """Rows of U for the unshifted/shifted selection along one dimension."""
    k = u.shape[1]
    cube = u.reshape(*row_dims, k)
    sl_lo = [slice(None)] * len(row_dims)
    sl_hi = [slice(None)] * len(row_dims)
    sl_lo[axis] = slice(0, row_dims[axis] - 1)
    sl_hi[axis] = slice(1, row_dims[axis])
    lo = cube[tuple(sl_lo)].reshape(-1, k)
    hi = cube[tuple(sl_hi)].reshape(-1, k)
    return lo, hi


def estimate_poles(y_hat, k, shape, model="double-hankel", seed=0):
    """Extract K poles from a signal estimate by subspace rotation.

    Builds the structured matrix of ``y_hat`` (augmented forward-backward
    by default, plain Hankel with ``model="single-hankel"``), takes the K
    leading left singular vectors, and solves the shift-invariance
    equation(s). Magnitudes are reported as estimated, never projected
    onto the circle: how close they land to 1 is a measured outcome.

    Raises
    ------
    ValueError
        If K exceeds the usable subspace for some shift.
    DegenerateRankError
        If the K-th singular value collapses (sigma_K/sigma_1 < 1e-12).
    """
    if not isinstance(shape, LevelShape):
        shape = LevelShape(tuple(shape))
    if k < 1:
        raise ValueError("K must be >= 1")
    if model == "double-hankel":
        mat = double_hankel(np.asarray(y_hat), shape).matrix
    elif model == "single-hankel":
        mat = level_hankel(np.asarray(y_hat), shape)
    else:
        raise ValueError(f"unknown model {model!r}")
    row_dims = shape.row_dims
    if k > min(mat.shape):
        raise ValueError(f"K={k} exceeds matrix rank bound {min(mat.shape)}")
    for axis, n1 in enumerate(row_dims):
        usable = (n1 - 1) * int(np.prod(row_dims)) // n1
        if k > usable:
            raise ValueError(
                f"K={k} exceeds the usable shifted subspace ({usable}) along dimension {axis + 1}"
            )
    u, s, _ = np.linalg.svd(mat, full_matrices=False)
    rank = int(np.count_nonzero(s >= 1e-12 * s[0])) if s[0] > 0 else 0
    if rank < k:
        raise DegenerateRankError(rank, k)
    uk = u[:, :k]
    psis = []
    for axis in range(shape.d):
        lo, hi = _shift_pair(uk, row_dims, axis)
        psis.append(np.linalg.pinv(lo) @ hi)
    if shape.d == 1:
        poles = np.linalg.eigvals(psis[0])[:, None]
    else:
        w1, t = np.linalg.eig(psis[0])
        gaps = np.abs(w1[:, None] - w1[None, :]) + np.eye(k)
        if gaps.min() < 1e-8 * max(1.0, np.abs(w1).max()):
            # repeated first-dimension poles: diagonalize a random
            # unit-modulus combination instead, deterministic given seed
            rng = np.random.default_rng(seed)
            gammas = np.exp(2j * np.pi * rng.uniform(size=shape.d))
            mix = sum(g * p for g, p in zip(gammas, psis))
            _, t = np.linalg.eig(mix)
        cols = []
        for psi in psis:
            cols.append(np.diag(np.linalg.solve(t, psi @ t)))
        poles = np.stack(cols, axis=1)
    amps = fit_amplitudes(y_hat, poles, dims=shape.dims)
    return PoleEstimates(poles=poles, amps=amps)


def fit_amplitudes(y_hat, poles, dims=None):
    """Least-squares amplitudes for given poles on the sampling grid.

    Exact when ``y_hat`` is exactly the K-component mixture with these
    poles. Nearly coincident poles make the design rank deficient; that
    is reported as a `ConditioningWarning`, not an error.
    """
    y_hat = np.asarray(y_hat, dtype=complex)
    if dims is None:
        dims = y_hat.shape
    poles = np.atleast_2d(np.asarray(poles, dtype=complex))
    k = poles.shape[0]
    if poles.shape[1] != len(dims):
        raise ValueError("poles dimension count does not match the grid")
    design = np.ones((1, k), dtype=complex)
    for l, n in enumerate(dims):
        v = poles[:, l][None, :] ** np.arange(n)[:, None]  # (n, k)
        design = (design[:, None, :] * v[None, :, :]).reshape(-1, k)
    amps, _, rank, sv = np.linalg.lstsq(design, y_hat.ravel(), rcond=None)
    if k and (rank < k or sv[-1] < 1e-10 * sv[0]):
        warnings.warn(
            "amplitude fit is rank deficient (nearly coincident poles)", ConditioningWarning
        )
    return amps


def distance_to_torus(poles):
    """Aggregate distance of pole magnitudes from 1.

    1-D uses the mean absolute deviation ``mean_k ||z_k| - 1|``; in
    higher dimension the root mean square over components and dimensions
    ``sqrt(mean_k sum_l (|z_kl| - 1)^2)``. Zero iff every magnitude is
    exactly 1.
    """
    if isinstance(poles, PoleEstimates):
        poles = poles.poles
    poles = np.atleast_2d(np.asarray(poles, dtype=complex))
    if poles.shape[0] < 1:
        raise ValueError("need at least one pole")
    dev = np.abs(poles) - 1.0
    if poles.shape[1] == 1:
        return float(np.mean(np.abs(dev)))
    return float(np.sqrt(np.mean(np.sum(dev**2, axis=1))))


def wrap_distance(a, b):
    """Distance on the unit torus: min(|a-b| mod 1, 1 - |a-b| mod 1)."""
    d = np.abs(np.asarray(a) - np.asarray(b)) % 1.0
    return np.minimum(d, 1.0 - d)


def _freq_array(obj):
    if isinstance(obj, SpectralParams):
        return np.asarray(obj.freqs, dtype=float)
    if isinstance(obj, PoleEstimates):
        return np.asarray(obj.freqs, dtype=float)
    f = np.asarray(obj, dtype=float)
    return np.atleast_2d(f.T).T if f.ndim == 1 else f


def freq_error(true_params, est):
    """Best-assignment RMS wrap-around frequency error.

    Minimizes the root mean square torus distance over all matchings of
    estimated to true components (optimal assignment, any K). Both
    arguments may be parameter objects or raw K x d frequency arrays.
    """
    ft = _freq_array(true_params)
    if ft.ndim == 1:
        ft = ft[:, None]
    fe = _freq_array(est)
    if fe.ndim == 1:
        fe = fe[:, None]
    if ft.shape != fe.shape:
        raise ValueError(f"frequency sets differ in shape: {ft.shape} vs {fe.shape}")
    k = ft.shape[0]
    if k == 0:
        return 0.0
    cost = np.zeros((k, k))
    for l in range(ft.shape[1]):
        cost += wrap_distance(ft[:, l][:, None], fe[:, l][None, :]) ** 2
    rows, cols = linear_sum_assignment(cost)
    return float(np.sqrt(cost[rows, cols].sum() / k))


def write_poles_csv(path, est):
    """One ``k,dim,pole_re,pole_im,amp_re,amp_im,abs_minus_1`` row per (k, dim)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("k,dim,pole_re,pole_im,amp_re,amp_im,abs_minus_1\n")
        for k in range(est.k):
            a = complex(est.amps[k])
            for l in range(est.d):
                z = complex(est.poles[k, l])
                fh.write(
                    f"{k + 1},{l + 1},{z.real!r},{z.imag!r},{a.real!r},{a.imag!r},{abs(z) - 1.0!r}\n"
                )
