"""Spectrally sparse signal generation, sampling, and corruption.

Ground-truth side of every experiment: exponential mixtures with poles
``z = r * exp(i 2 pi f)`` on (or off) the unit circle, uniform random
frequency draws with a wrap-around separation constraint, and the three
corruption mechanisms used by the solvers' test protocols (subsampling,
additive complex Gaussian noise, sparse outliers).

All randomized operations take an explicit ``seed`` and are bit
reproducible; ``seed`` may be an int, a ``numpy.random.SeedSequence``,
or an existing ``Generator``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import reduce

import numpy as np

__all__ = [
    "SpectralParams",
    "SampleSet",
    "Subsample",
    "GaussianNoise",
    "SparseNoise",
    "GenerationError",
    "synthesize",
    "random_params",
    "corrupt",
    "write_signal_csv",
    "read_signal_csv",
    "write_sample_csv",
    "read_sample_csv",
    "write_params_csv",
    "read_params_csv",
]


class GenerationError(RuntimeError):
    """Raised when a random instance cannot satisfy its constraints."""


def _freeze(a):
    a = np.array(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class SpectralParams:
    """Ground-truth poles and amplitudes of a spectrally sparse signal.

    Attributes
    ----------
    freqs : (K, d) float array
        Frequencies in cycles/sample, each in [0, 1); rows pairwise
        distinct.
    amps : (K,) complex array
        Component amplitudes.
    damping : (K, d) float array
        Pole magnitudes; all ones means every pole is on the unit circle
        (torus).
    """

    freqs: np.ndarray
    amps: np.ndarray
    damping: np.ndarray = None

    def __post_init__(self):
        freqs = np.atleast_2d(np.asarray(self.freqs, dtype=float))
        amps = np.atleast_1d(np.asarray(self.amps, dtype=complex))
        damping = self.damping
        if damping is None:
            damping = np.ones_like(freqs)
        damping = np.atleast_2d(np.asarray(damping, dtype=float))
        if freqs.ndim != 2:
            raise ValueError("freqs must be a K x d array")
        k, d = freqs.shape
        if amps.shape != (k,):
            raise ValueError(f"amps length {amps.shape} does not match K={k}")
        if damping.shape != (k, d):
            raise ValueError(f"damping shape {damping.shape} does not match freqs {freqs.shape}")
        if k and (freqs.min() < 0.0 or freqs.max() >= 1.0):
            raise ValueError("frequencies must lie in [0, 1)")
        if k and damping.min() <= 0.0:
            raise ValueError("damping (pole magnitude) must be positive")
        # distinctness is a property of the poles: equal frequency tuples
        # are allowed exactly when the magnitudes differ (reciprocal-pair
        # fixtures), which coincides with frequency distinctness on-circle
        seen = {(tuple(f), tuple(r)) for f, r in zip(freqs, damping)}
        if len(seen) != k:
            raise ValueError("pole tuples (frequency, damping) must be pairwise distinct")
        object.__setattr__(self, "freqs", _freeze(freqs))
        object.__setattr__(self, "amps", _freeze(amps))
        object.__setattr__(self, "damping", _freeze(damping))

    @property
    def k(self):
        return self.freqs.shape[0]

    @property
    def d(self):
        return self.freqs.shape[1]

    @property
    def poles(self):
        """(K, d) complex poles ``r * exp(i 2 pi f)``."""
        return self.damping * np.exp(2j * np.pi * self.freqs)

    @property
    def on_circle(self):
        return bool(np.all(self.damping == 1.0))


@dataclass(frozen=True)
class SampleSet:
    """Observed entries of a (possibly corrupted) signal on a grid.

    ``omega`` holds 0-based, strictly increasing row-major linear
    indices; the 1-based convention appears only in the CSV format.
    """

    dims: tuple
    omega: np.ndarray
    values: np.ndarray
    noise_meta: tuple = ()

    def __post_init__(self):
        dims = tuple(int(n) for n in self.dims)
        omega = np.asarray(self.omega, dtype=np.int64)
        values = np.asarray(self.values, dtype=complex)
        n = int(np.prod(dims))
        if omega.ndim != 1 or values.shape != omega.shape:
            raise ValueError("omega and values must be 1-D arrays of equal length")
        if omega.size:
            if omega[0] < 0 or omega[-1] >= n:
                raise ValueError("sample indices out of bounds")
            if np.any(np.diff(omega) <= 0):
                raise ValueError("sample indices must be strictly increasing")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "omega", _freeze(omega))
        object.__setattr__(self, "values", _freeze(values))
        object.__setattr__(self, "noise_meta", tuple(self.noise_meta))

    @property
    def n(self):
        return int(np.prod(self.dims))

    @property
    def m(self):
        return int(self.omega.size)

    @property
    def is_full(self):
        return self.m == self.n

    @classmethod
    def full(cls, signal, noise_meta=()):
        signal = np.asarray(signal)
        return cls(signal.shape, np.arange(signal.size), signal.ravel(), noise_meta)

    def embed(self):
        """Zero-filled full grid with observed values in place."""
        out = np.zeros(self.n, dtype=complex)
        out[self.omega] = self.values
        return out.reshape(self.dims)


# --- corruption step descriptors ---


@dataclass(frozen=True)
class Subsample:
    """Keep ``m`` entries chosen uniformly without replacement."""

    m: int


@dataclass(frozen=True)
class GaussianNoise:
    """Additive complex Gaussian noise on the observed entries.

    Exactly one of ``snr_db`` (expected-power scaling) or ``eta`` (the
    realized l2 norm of the noise, matched exactly) must be given.
    """

    snr_db: float = None
    eta: float = None

    def __post_init__(self):
        if (self.snr_db is None) == (self.eta is None):
            raise ValueError("specify exactly one of snr_db or eta")
        if self.eta is not None and self.eta < 0:
            raise ValueError("eta must be >= 0")


@dataclass(frozen=True)
class SparseNoise:
    """Additive outliers on a few observed entries.

    Outlier values are complex Gaussian with standard deviation equal to
    the RMS of the clean signal, i.e. on the scale of the data itself.
    """

    count: int = None
    fraction: float = None

    def __post_init__(self):
        if (self.count is None) == (self.fraction is None):
            raise ValueError("specify exactly one of count or fraction")
        if self.fraction is not None and not (0.0 <= self.fraction <= 1.0):
            raise ValueError("corruption fraction must be in [0, 1]")
        if self.count is not None and self.count < 0:
            raise ValueError("corruption count must be >= 0")


def synthesize(params, dims):
    """Evaluate the exponential mixture on a regular grid.

    The entry at (0-based) multi-index ``(j_1, ..., j_d)`` is
    ``sum_k amps[k] * prod_l poles[k, l] ** j_l``.
    """
    dims = tuple(int(n) for n in dims)
    if any(n < 1 for n in dims):
        raise ValueError("grid sizes must be positive")
    if params.d != len(dims):
        raise ValueError(f"params have d={params.d} but {len(dims)} grid sizes were given")
    y = np.zeros(dims, dtype=complex)
    poles = params.poles
    pows = [poles[:, l][None, :] ** np.arange(n)[:, None] for l, n in enumerate(dims)]
    for k in range(params.k):
        term = reduce(np.multiply.outer, (p[:, k] for p in pows))
        y += params.amps[k] * term
    return y


def _separated_circle(rng, k, delta, exact_pair):
    """K points on the unit-circumference circle, all circular gaps >= delta.

    Drawn by the spacings construction (equivalent to i.i.d. uniforms
    conditioned on the separation), so no rejection loop is needed. With
    ``exact_pair`` one gap is pinned to exactly delta.
    """
    if k == 0:
        return np.empty(0)
    if delta < 0:
        raise ValueError("min separation must be >= 0")
    if k * delta > 1.0:
        raise GenerationError(f"cannot place K={k} frequencies with separation {delta} on the torus")
    if delta == 0.0 or k == 1:
        f = rng.uniform(size=k)
        if exact_pair and k >= 2:
            # zero separation: the constraint is vacuous, keep plain draws
            pass
        return f
    excess = 1.0 - k * delta
    if exact_pair:
        if k == 2:
            gaps = np.array([delta, 1.0 - delta])
        else:
            cuts = np.sort(rng.uniform(0.0, excess, size=k - 2))
            rest = np.diff(np.concatenate(([0.0], cuts, [excess]))) + delta
            j = rng.integers(0, k)
            gaps = np.insert(rest, j, delta)
    else:
        cuts = np.sort(rng.uniform(0.0, excess, size=k - 1))
        gaps = np.diff(np.concatenate(([0.0], cuts, [excess]))) + delta
    start = rng.uniform()
    f = (start + np.concatenate(([0.0], np.cumsum(gaps[:-1])))) % 1.0
    rng.shuffle(f)
    return f


def random_params(k, dims, min_sep=0.0, amp_law=None, seed=None, exact_pair=False):
    """Random on-circle instance with wrap-around frequency separation.

    Per dimension, every pair of frequencies satisfies
    ``min(|fa - fb|, 1 - |fa - fb|) >= min_sep`` (0 means unconstrained).
    Amplitudes follow ``(0.5 + |w|) * exp(i phi)`` with w standard normal
    (real) and phi uniform, unless ``amp_law(rng, k)`` is supplied.

    With ``exact_pair`` (1-D only) the minimum pairwise distance equals
    ``min_sep`` exactly, as used by the phase-transition protocol.
    """
    dims = tuple(int(n) for n in dims)
    d = len(dims)
    if k < 0:
        raise ValueError("K must be >= 0")
    if exact_pair and d != 1:
        raise ValueError("exact_pair separation is only defined for 1-D instances")
    if exact_pair and min_sep > 0.5:
        raise ValueError("exact_pair requires min_sep <= 1/2")
    rng = np.random.default_rng(seed)
    for _ in range(100):
        cols = []
        for _dim in range(d):
            f = _separated_circle(rng, k, min_sep, exact_pair)
            cols.append(f)
        freqs = np.stack(cols, axis=1) if k else np.empty((0, d))
        if k == 0 or len({tuple(row) for row in freqs}) == k:
            break
    else:
        raise GenerationError("could not draw pairwise distinct frequency tuples")
    if amp_law is not None:
        amps = np.asarray(amp_law(rng, k), dtype=complex)
    else:
        mag = 0.5 + np.abs(rng.standard_normal(k))
        phase = rng.uniform(0.0, 2.0 * np.pi, size=k)
        amps = mag * np.exp(1j * phase)
    return SpectralParams(freqs=freqs, amps=amps, damping=np.ones((k, d)))


def _as_steps(spec):
    if isinstance(spec, (Subsample, GaussianNoise, SparseNoise)):
        return (spec,)
    steps = tuple(spec)
    for s in steps:
        if not isinstance(s, (Subsample, GaussianNoise, SparseNoise)):
            raise TypeError(f"unknown corruption step {s!r}")
    return steps


def corrupt(signal, spec, seed=None):
    """Apply sampling/noise steps to a clean signal, returning a SampleSet.

    ``spec`` is a single step or a sequence applied in order; typical
    pipelines are ``Subsample(m)`` then ``GaussianNoise(...)`` and/or
    ``SparseNoise(...)``. In ``eta`` mode the realized noise norm
    ``||e||_2`` over the observed entries equals eta exactly.
    """
    signal = np.asarray(signal, dtype=complex)
    rng = np.random.default_rng(seed)
    n = signal.size
    omega = np.arange(n)
    values = signal.ravel().copy()
    clean_rms = np.sqrt(np.mean(np.abs(signal) ** 2)) if n else 0.0
    meta = []
    for step in _as_steps(spec):
        m = omega.size
        if isinstance(step, Subsample):
            if step.m > n:
                raise ValueError(f"cannot subsample {step.m} of {n} entries")
            if step.m < 0:
                raise ValueError("sample size must be >= 0")
            keep = np.sort(rng.choice(n, size=step.m, replace=False))
            omega = keep
            values = signal.ravel()[keep].copy()
            meta.append({"kind": "subsample", "m": int(step.m)})
        elif isinstance(step, GaussianNoise):
            raw = rng.standard_normal(m) + 1j * rng.standard_normal(m)
            if step.eta is not None:
                nrm = np.linalg.norm(raw)
                e = raw * (step.eta / nrm) if (step.eta > 0 and nrm > 0) else np.zeros(m, complex)
                meta.append({"kind": "gaussian", "eta": float(step.eta)})
            else:
                power = np.mean(np.abs(values) ** 2)
                sigma2 = power / (10.0 ** (step.snr_db / 10.0))
                e = np.sqrt(sigma2 / 2.0) * raw
                meta.append({"kind": "gaussian", "snr_db": float(step.snr_db)})
            values = values + e
        elif isinstance(step, SparseNoise):
            count = step.count if step.count is not None else int(round(step.fraction * m))
            if count > m:
                raise ValueError(f"cannot corrupt {count} of {m} observed entries")
            pos = np.sort(rng.choice(m, size=count, replace=False))
            outliers = clean_rms * (rng.standard_normal(count) + 1j * rng.standard_normal(count)) / np.sqrt(2.0)
            values = values.copy()
            values[pos] += outliers
            meta.append({"kind": "sparse", "count": int(count), "positions": tuple(int(p) for p in pos)})
    return SampleSet(signal.shape, omega, values, tuple(meta))


# --- CSV serialization (1-based indices in files) ---


def write_signal_csv(path, y):
    """Full-grid signal as ``index,re,im`` rows, row-major 1-based index."""
    y = np.asarray(y, dtype=complex).ravel()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("index,re,im\n")
        for i, v in enumerate(y, start=1):
            v = complex(v)
            fh.write(f"{i},{v.real!r},{v.imag!r}\n")


def read_signal_csv(path, dims):
    dims = tuple(int(n) for n in dims)
    n = int(np.prod(dims))
    y = np.zeros(n, dtype=complex)
    seen = np.zeros(n, dtype=bool)
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            i = int(row["index"]) - 1
            y[i] = float(row["re"]) + 1j * float(row["im"])
            seen[i] = True
    if not seen.all():
        raise ValueError(f"signal file {path} does not cover the full grid {dims}")
    return y.reshape(dims)


def write_sample_csv(path, samples):
    """Observed entries only, same ``index,re,im`` format."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("index,re,im\n")
        for i, v in zip(samples.omega, samples.values):
            v = complex(v)
            fh.write(f"{int(i) + 1},{v.real!r},{v.imag!r}\n")


def read_sample_csv(path, dims):
    idx = []
    vals = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            idx.append(int(row["index"]) - 1)
            vals.append(float(row["re"]) + 1j * float(row["im"]))
    order = np.argsort(idx)
    return SampleSet(tuple(dims), np.asarray(idx)[order], np.asarray(vals)[order])


def write_params_csv(path, params):
    """One ``k,dim,freq,amp_re,amp_im,damping`` row per (component, dim)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("k,dim,freq,amp_re,amp_im,damping\n")
        for k in range(params.k):
            a = complex(params.amps[k])
            for l in range(params.d):
                fh.write(
                    f"{k + 1},{l + 1},{float(params.freqs[k, l])!r},{a.real!r},{a.imag!r},"
                    f"{float(params.damping[k, l])!r}\n"
                )


def read_params_csv(path):
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            rows.append(row)
    if not rows:
        return SpectralParams(freqs=np.empty((0, 1)), amps=np.empty(0, complex))
    kmax = max(int(r["k"]) for r in rows)
    dmax = max(int(r["dim"]) for r in rows)
    freqs = np.zeros((kmax, dmax))
    damping = np.ones((kmax, dmax))
    amps = np.zeros(kmax, dtype=complex)
    for r in rows:
        k, l = int(r["k"]) - 1, int(r["dim"]) - 1
        freqs[k, l] = float(r["freq"])
        damping[k, l] = float(r["damping"])
        amps[k] = float(r["amp_re"]) + 1j * float(r["amp_im"])
    return SpectralParams(freqs=freqs, amps=amps, damping=damping)
