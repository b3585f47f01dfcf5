"""Signal recovery solvers over single and double Hankel models.

Two families:

* `iht` minimizes the least-squares misfit under a rank-K constraint by
  iterative hard thresholding with a decaying step, for the full
  sampling case.
* `demac` solves the convex surrogates by ADMM with singular value
  soft thresholding: nuclear norm minimization under exact data
  consistency, an l2 misfit ball (noisy data), or joint recovery of the
  signal and a sparse outlier component (robust mode).

``model="single-hankel"`` runs the same algorithms on the plain Hankel
matrix, which is the classical variant the double model improves on;
having both behind one interface is what makes the head-to-head
benchmarks meaningful.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import log, sqrt

import numpy as np

from .hankel import LevelShape, _plan
from .model import SampleSet

__all__ = [
    "SolveOptions",
    "SolveReport",
    "Exact",
    "Bounded",
    "Robust",
    "hard_threshold",
    "soft_threshold",
    "iht",
    "demac",
]

MODELS = ("double-hankel", "single-hankel")


@dataclass(frozen=True)
class SolveOptions:
    """Knobs shared by the solvers.

    ``None`` fields fall back to per-solver defaults: IHT stops on a
    relative change below 1e-5 or 3000 iterations; the ADMM solvers stop
    on relative residuals below 1e-8 or 5000 iterations with penalty
    1/sqrt(N) and residual-balancing updates.
    """

    model: str = "double-hankel"
    shape: LevelShape = None
    max_iters: int = None
    tol_rel: float = None
    rho: float = None
    adaptive_rho: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.max_iters is not None and self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.tol_rel is not None and self.tol_rel <= 0:
            raise ValueError("tol_rel must be > 0")
        if self.rho is not None and self.rho <= 0:
            raise ValueError("rho must be > 0")

    def resolve_shape(self, dims):
        if self.shape is not None:
            if self.shape.dims != tuple(dims):
                raise ValueError(f"options shape {self.shape.dims} does not match grid {tuple(dims)}")
            return self.shape
        return LevelShape.for_dims(dims)


@dataclass
class SolveReport:
    """Solver output: recovered signal plus convergence bookkeeping."""

    y_hat: np.ndarray
    iters: int
    converged: bool
    objective_trace: np.ndarray
    residuals: dict = field(default_factory=dict)
    e_hat: np.ndarray = None


# --- recovery modes for the convex solvers ---


@dataclass(frozen=True)
class Exact:
    """Observed entries are trusted exactly."""


@dataclass(frozen=True)
class Bounded:
    """Observed misfit bounded in l2 norm by eta."""

    eta: float

    def __post_init__(self):
        if self.eta < 0:
            raise ValueError("eta must be >= 0")


@dataclass(frozen=True)
class Robust:
    """A few observed entries are outliers; recover them jointly.

    ``lam="auto"`` uses 1/sqrt(M log N), the scale at which a constant
    corruption fraction is provably tolerated.
    """

    lam: object = "auto"

    def __post_init__(self):
        if self.lam != "auto" and not (isinstance(self.lam, (int, float)) and self.lam > 0):
            raise ValueError("lam must be 'auto' or a positive number")


def hard_threshold(m, k):
    """Best rank-k approximation by truncated SVD.

    Ties between equal singular values follow the SVD's descending
    order, so results are deterministic. ``k`` at or above the matrix
    rank returns the input unchanged.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    m = np.asarray(m)
    if k == 0:
        return np.zeros_like(m)
    if k >= min(m.shape):
        return m.copy()
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    return (u[:, :k] * s[:k]) @ vh[:k]


def soft_threshold(x, tau):
    """Complex soft thresholding: shrink magnitudes by tau toward zero."""
    mag = np.abs(x)
    scale = np.maximum(mag - tau, 0.0)
    out = np.zeros_like(x)
    nz = mag > 0
    out[nz] = x[nz] * (scale[nz] / mag[nz])
    return out


def _svt(m, tau):
    """Singular value soft thresholding; returns (matrix, nuclear norm).

    Uses the Gram eigendecomposition on the short side and reconstructs
    only the surviving components, M = Q f(S) Q^H A, which avoids the
    long singular factor entirely. Agreement with a direct SVD is at the
    rounding level because the shrinkage weights are flat wherever the
    squared spectrum is clustered.
    """
    a = m
    flip = a.shape[0] > a.shape[1]
    if flip:
        a = a.conj().T
    gram = a @ a.conj().T
    lam, q = np.linalg.eigh(gram)
    s = np.sqrt(np.maximum(lam[::-1], 0.0))
    keep = s > tau
    if not keep.any():
        return np.zeros_like(m), 0.0
    q = q[:, ::-1][:, keep]
    sk = s[keep]
    out = (q * ((sk - tau) / sk)) @ (q.conj().T @ a)
    return (out.conj().T if flip else out), float((sk - tau).sum())


class _Operator:
    """Flat-signal forward/pseudoinverse pair for one shape and model."""

    def __init__(self, shape, model):
        self.plan = _plan(shape)
        self.shape = shape
        self.double = model == "double-hankel"
        self.n = shape.size
        self.matrix_shape = (shape.rows, 2 * shape.cols if self.double else shape.cols)

    def forward(self, yflat):
        g1 = yflat[self.plan.table]
        if not self.double:
            return g1
        return np.concatenate([g1, np.conj(g1)[::-1, ::-1]], axis=1)

    def pinv(self, b):
        plan = self.plan
        c = self.shape.cols
        if not self.double:
            s1 = self._sums(b)
            return s1 / plan.denom_single
        s1 = self._sums(b[:, :c])
        s2 = self._sums(b[:, c:])
        return (s1 + np.conj(s2)[plan.rev]) / plan.denom_double

    def _sums(self, g):
        idx = self.plan.table.ravel()
        flat = g.ravel()
        return np.bincount(idx, weights=flat.real, minlength=self.n) + 1j * np.bincount(
            idx, weights=flat.imag, minlength=self.n
        )


def iht(samples, k, opts=None):
    """Rank-constrained recovery by iterative hard thresholding.

    Starting from the data, each iteration takes a gradient step toward
    the observations with step 1/sqrt(t), projects the structured matrix
    onto rank K, and maps back to signal space through the exact
    pseudoinverse. Requires full sampling.
    """
    opts = opts or SolveOptions()
    if not isinstance(samples, SampleSet):
        samples = SampleSet.full(np.asarray(samples))
    if not samples.is_full:
        raise ValueError("iht requires full sampling (every grid entry observed)")
    if k < 1:
        raise ValueError("K must be >= 1")
    shape = opts.resolve_shape(samples.dims)
    op = _Operator(shape, opts.model)
    if k >= min(op.matrix_shape):
        raise ValueError(f"K={k} makes rank-{k} thresholding vacuous for matrix {op.matrix_shape}")
    max_iters = opts.max_iters if opts.max_iters is not None else 3000
    tol = opts.tol_rel if opts.tol_rel is not None else 1e-5
    ytil = samples.values.copy()
    y = ytil.copy()
    trace = []
    rel_trace = []
    converged = False
    it = 0
    for t in range(1, max_iters + 1):
        it = t
        alpha = 1.0 / sqrt(t)
        d = op.forward(y + alpha * (ytil - y))
        g = hard_threshold(d, k)
        y_next = op.pinv(g)
        denom = np.linalg.norm(y)
        rel = np.linalg.norm(y_next - y) / denom if denom > 0 else np.linalg.norm(y_next)
        y = y_next
        trace.append(0.5 * np.linalg.norm(y - ytil) ** 2)
        rel_trace.append(rel)
        if rel < tol:
            converged = True
            break
    return SolveReport(
        y_hat=y.reshape(samples.dims),
        iters=it,
        converged=converged,
        objective_trace=np.asarray(trace),
        residuals={"rel_change": np.asarray(rel_trace)},
    )


def _auto_lambda(m, n):
    return 1.0 / sqrt(m * log(n))


def _ball_project_weighted(a, center, w, radius):
    """Minimize sum w_n |y_n - a_n|^2 subject to ||y - center||_2 <= radius.

    KKT gives y = (w a + mu c) / (w + mu) with a single multiplier mu >= 0
    fixed by the radius; the feasibility gap is strictly decreasing in mu,
    so bisection nails it to machine precision.
    """
    r = a - center
    if np.linalg.norm(r) <= radius:
        return a
    if radius == 0.0:
        return center.astype(complex, copy=True)
    rw2 = (w * np.abs(r)) ** 2
    # Newton on phi(mu) = g(mu)^(-1/2) - 1/radius with g(mu) = sum
    # rw2/(w+mu)^2: phi is increasing and concave, so iterating from
    # mu = 0 converges monotonically from below in a few steps
    mu = 0.0
    for _ in range(60):
        d = w + mu
        terms = rw2 / (d * d)
        g = float(terms.sum())
        gprime = -2.0 * float((terms / d).sum())
        phi = g**-0.5 - 1.0 / radius
        dphi = -gprime / (2.0 * g**1.5)
        step = -phi / dphi
        mu += step
        if step <= 1e-14 * (1.0 + mu):
            break
    y = (w * a + mu * center) / (w + mu)
    # exact feasibility: clip the residual to the ball (length change is
    # at the rounding level after Newton has converged)
    delta = y - center
    nd = np.linalg.norm(delta)
    if nd > radius:
        y = center + delta * (radius / nd)
    return y


def demac(samples, mode=Exact(), opts=None):
    """Nuclear norm recovery over the structured matrix by ADMM.

    The splitting variable is the structured matrix itself: its update
    is singular value soft thresholding at level 1/rho, and the signal
    update is the exact weighted antidiagonal least squares with the
    data handled per mode (observed entries overwritten when exact,
    projected onto the misfit ball when bounded, shared with the outlier
    component when robust). Non-convergence is reported, not raised.
    """
    opts = opts or SolveOptions()
    if not isinstance(samples, SampleSet):
        raise TypeError("demac expects a SampleSet")
    if samples.m == 0:
        raise ValueError("empty sampling set")
    if isinstance(mode, str):
        mode = {"exact": Exact()}.get(mode)
        if mode is None:
            raise ValueError("string modes: pass 'exact', or Bounded(eta)/Robust(lam) instances")
    shape = opts.resolve_shape(samples.dims)
    op = _Operator(shape, opts.model)
    n = samples.n
    omega = samples.omega
    ytil = samples.values
    max_iters = opts.max_iters if opts.max_iters is not None else 5000
    tol = opts.tol_rel if opts.tol_rel is not None else 1e-8
    rho = opts.rho if opts.rho is not None else 1.0 / sqrt(n)

    robust = isinstance(mode, Robust)
    bounded = isinstance(mode, Bounded)
    if robust:
        lam = _auto_lambda(samples.m, n) if mode.lam == "auto" else float(mode.lam)
        # the augmented matrix doubles the outlier penalty's weight
        lam_eff = 2.0 * lam if opts.model == "double-hankel" else lam
        op_e = _Operator(shape, "single-hankel")
        e = np.zeros(n, dtype=complex)
        he = op_e.forward(e)
        s_mat = he.copy()
        u_s = np.zeros_like(he)

    y = np.zeros(n, dtype=complex)
    y[omega] = ytil
    hy = op.forward(y)
    m_mat = hy.copy()
    u = np.zeros_like(hy)

    # the joint signal/outlier update mixes the two least-squares targets
    # with weights set by how often each unknown appears in its matrix
    y_weight = 2.0 if opts.model == "double-hankel" else 1.0

    trace = []
    primal_trace = []
    dual_trace = []
    converged = False
    it = 0
    eps = 1e-12
    for t in range(1, max_iters + 1):
        it = t
        m_mat, nuc = _svt(hy - u, 1.0 / rho)
        obj = nuc
        if robust:
            s_mat = soft_threshold(he - u_s, lam_eff / rho)
            obj = nuc + lam_eff * float(np.abs(s_mat).sum())
            a = op.pinv(m_mat + u)
            b = op_e.pinv(s_mat + u_s)
            y_new = a
            y_new[omega] = (y_weight * a[omega] + (ytil - b[omega])) / (y_weight + 1.0)
            e_new = np.zeros(n, dtype=complex)
            e_new[omega] = ytil - y_new[omega]
            he_new = op_e.forward(e_new)
        else:
            y_new = op.pinv(m_mat + u)
            if bounded:
                w_obs = y_weight * op.plan.counts[omega]
                y_new[omega] = _ball_project_weighted(y_new[omega], ytil, w_obs, mode.eta)
            else:
                y_new[omega] = ytil
        hy_new = op.forward(y_new)
        r2 = np.linalg.norm(m_mat - hy_new) ** 2
        s2 = np.linalg.norm(hy_new - hy) ** 2
        r_scale = max(np.linalg.norm(m_mat), np.linalg.norm(hy_new), eps)
        u = u + m_mat - hy_new
        d_scale = max(rho * np.linalg.norm(u), eps)
        if robust:
            r2 += np.linalg.norm(s_mat - he_new) ** 2
            s2 += np.linalg.norm(he_new - he) ** 2
            r_scale = max(r_scale, np.linalg.norm(s_mat), np.linalg.norm(he_new))
            u_s = u_s + s_mat - he_new
            d_scale = max(d_scale, rho * np.linalg.norm(u_s))
            he = he_new
            e = e_new
        hy = hy_new
        y = y_new
        r_rel = sqrt(r2) / r_scale
        s_rel = rho * sqrt(s2) / d_scale
        trace.append(obj)
        primal_trace.append(r_rel)
        dual_trace.append(s_rel)
        if max(r_rel, s_rel) < tol:
            converged = True
            break
        if opts.adaptive_rho and t % 10 == 0:
            if r_rel > 10.0 * s_rel and rho < 1e4:
                rho *= 2.0
                u /= 2.0
                if robust:
                    u_s /= 2.0
            elif s_rel > 10.0 * r_rel and rho > 1e-4:
                rho /= 2.0
                u *= 2.0
                if robust:
                    u_s *= 2.0
    return SolveReport(
        y_hat=y.reshape(samples.dims),
        iters=it,
        converged=converged,
        objective_trace=np.asarray(trace),
        residuals={"primal": np.asarray(primal_trace), "dual": np.asarray(dual_trace)},
        e_hat=e.reshape(samples.dims) if robust else None,
    )
