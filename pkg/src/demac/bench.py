"""Monte-Carlo experiment campaigns with deterministic CSV output.

A campaign is a grid of cells (sparsity, separation, sample size, noise
level, corruption count) times a trial count times a method list. Every
trial draws its own instance from a seed derived by stable hashing of
the cell parameters, so any cell can be reproduced in isolation and
reruns are bit identical regardless of worker count.

Per-trial rows carry a wall-clock column for profiling; timing is the
one intentionally non-reproducible field. Aggregates contain no timing
and are byte-stable.
"""

from __future__ import annotations

import hashlib
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .hankel import LevelShape
from .model import (
    GaussianNoise,
    GenerationError,
    SampleSet,
    SparseNoise,
    Subsample,
    corrupt,
    random_params,
    synthesize,
)
from .retrieve import DegenerateRankError, distance_to_torus, estimate_poles, freq_error
from .solve import Bounded, Exact, Robust, SolveOptions, demac, iht

__all__ = ["ExperimentConfig", "run_experiment", "run_trial", "nmse", "parse_config"]

KINDS = ("phase_transition", "error_curve", "sparse_noise_phase", "nd_curve", "circle_histogram")
METHOD_NAMES = ("iht", "demac", "noisy-demac", "robust-demac")
MODEL_ALIASES = {
    "double": "double-hankel",
    "single": "single-hankel",
    "double-hankel": "double-hankel",
    "single-hankel": "single-hankel",
}
TRIAL_HEADER = (
    "kind,K,delta_f,M,eta,tau,method,model,trial,seed,nmse,freq_rmse,"
    "circle_dist,iters,converged,wall_ms"
)
AGG_HEADER = (
    "kind,K,delta_f,M,eta,tau,method,model,trials,success_rate,mean_nmse,"
    "mean_freq_rmse,mean_circle_dist,skipped"
)


def nmse(a, b):
    """Normalized squared error ||a - b||^2 / ||b||^2."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    ref = np.linalg.norm(b)
    if ref == 0:
        raise ValueError("reference signal has zero norm")
    return float(np.linalg.norm(a - b) ** 2 / ref**2)


@dataclass(frozen=True)
class ExperimentConfig:
    """Campaign description; grids default to a single unconstrained cell.

    ``delta_f`` values are in units of 1/N. ``sep_mode`` controls how the
    separation constraint is applied when drawing frequencies: "spaced"
    enforces the minimum, "exact-pair" additionally pins one pair to the
    minimum exactly, "random" ignores it.
    """

    kind: str = "phase_transition"
    dims: tuple = (65,)
    split: float = 0.6
    n1: tuple = None
    trials: int = 20
    seed: int = 0
    methods: tuple = (("demac", "double-hankel"),)
    k_values: tuple = (3,)
    delta_f: tuple = (0.0,)
    m_values: tuple = (None,)
    eta: tuple = (None,)
    outliers: tuple = (None,)
    snr_db: float = None
    sep_mode: str = "exact-pair"
    success_nmse: float = 1e-6
    circle_tol: float = 1e-4
    lam: object = "auto"
    tol_rel: float = None
    max_iters: int = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.success_nmse <= 0 or self.circle_tol <= 0:
            raise ValueError("thresholds must be positive")
        if self.sep_mode not in ("random", "spaced", "exact-pair"):
            raise ValueError("sep_mode must be random, spaced, or exact-pair")
        for name, model in self.methods:
            if name not in METHOD_NAMES or model not in MODEL_ALIASES.values():
                raise ValueError(f"unknown method/model pair {(name, model)}")
        for grid in (self.methods, self.k_values, self.delta_f, self.m_values, self.eta, self.outliers):
            if len(grid) == 0:
                raise ValueError("grids must be nonempty")

    @property
    def n(self):
        return int(np.prod(self.dims))

    def shape(self):
        if self.n1 is not None:
            return LevelShape.from_splits(self.dims, self.n1)
        return LevelShape.for_dims(self.dims, self.split)

    def cells(self):
        out = []
        for k in self.k_values:
            for df in self.delta_f:
                for m in self.m_values:
                    for eta in self.eta:
                        for c in self.outliers:
                            out.append(Cell(k=k, delta_f=df, m=m, eta=eta, outliers=c))
        return out


@dataclass(frozen=True)
class Cell:
    k: int
    delta_f: float
    m: object
    eta: object
    outliers: object


def _trial_seed(config, cell, trial):
    material = repr(
        (
            config.seed,
            config.kind,
            config.dims,
            config.sep_mode,
            config.snr_db,
            cell.k,
            float(cell.delta_f),
            cell.m,
            cell.eta,
            cell.outliers,
            trial,
        )
    )
    digest = hashlib.sha256(material.encode()).digest()
    return int.from_bytes(digest[:8], "big")


def _fmt(x):
    if x is None:
        return "nan"
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def run_trial(config, cell, trial):
    """One instance solved by every configured method.

    Returns ``(rows, skipped)`` where rows are per-method value tuples in
    the per-trial CSV column order; an infeasible draw yields no rows and
    ``skipped=True``.
    """
    n = config.n
    seed = _trial_seed(config, cell, trial)
    rng = np.random.default_rng(seed)
    delta_abs = float(cell.delta_f) / n
    min_sep = 0.0 if config.sep_mode == "random" else delta_abs
    exact_pair = config.sep_mode == "exact-pair" and min_sep > 0 and len(config.dims) == 1
    try:
        params = random_params(cell.k, config.dims, min_sep=min_sep, seed=rng, exact_pair=exact_pair)
    except GenerationError:
        return [], True
    y0 = synthesize(params, config.dims)
    steps = []
    if cell.m is not None and cell.m < n:
        steps.append(Subsample(int(cell.m)))
    if cell.eta is not None:
        steps.append(GaussianNoise(eta=float(cell.eta)))
    elif config.snr_db is not None:
        steps.append(GaussianNoise(snr_db=float(config.snr_db)))
    if cell.outliers:
        steps.append(SparseNoise(count=int(cell.outliers)))
    samples = corrupt(y0, steps, seed=rng) if steps else SampleSet.full(y0)
    shape = config.shape()
    m_eff = samples.m
    rows = []
    for method, model in config.methods:
        opts = SolveOptions(
            model=model, shape=shape, tol_rel=config.tol_rel, max_iters=config.max_iters
        )
        t0 = time.perf_counter()
        if method == "iht":
            report = iht(samples, cell.k, opts)
        elif method == "demac":
            report = demac(samples, Exact(), opts)
        elif method == "noisy-demac":
            eta = float(cell.eta) if cell.eta is not None else 0.0
            report = demac(samples, Bounded(eta), opts)
        else:
            report = demac(samples, Robust(config.lam), opts)
        wall_ms = (time.perf_counter() - t0) * 1e3
        err = nmse(report.y_hat, y0)
        try:
            est = estimate_poles(report.y_hat, cell.k, shape, model=model)
            f_rmse = freq_error(params, est)
            c_dist = distance_to_torus(est)
        except (DegenerateRankError, ValueError):
            f_rmse = None
            c_dist = None
        tau = (cell.outliers / m_eff) if cell.outliers else None
        rows.append(
            (
                config.kind,
                cell.k,
                delta_abs,
                m_eff,
                cell.eta,
                tau,
                method,
                model,
                trial,
                seed,
                err,
                f_rmse,
                c_dist,
                report.iters,
                report.converged,
                wall_ms,
            )
        )
    return rows, False


def _success(config, row):
    if config.kind == "circle_histogram":
        c_dist = row[12]
        return c_dist is not None and c_dist < config.circle_tol
    return row[10] <= config.success_nmse


def _aggregate(config, cell, method, model, rows, skipped):
    done = [r for r in rows if r[6] == method and r[7] == model]
    succ = sum(1 for r in done if _success(config, r))
    def mean_of(idx):
        vals = [r[idx] for r in done if r[idx] is not None]
        return float(np.mean(vals)) if vals else None
    rate = succ / len(done) if done else None
    tau = (cell.outliers / done[0][3]) if (done and cell.outliers) else None
    return (
        config.kind,
        cell.k,
        float(cell.delta_f) / config.n,
        done[0][3] if done else (cell.m if cell.m is not None else config.n),
        cell.eta,
        tau,
        method,
        model,
        len(done),
        rate,
        mean_of(10),
        mean_of(11),
        mean_of(12),
        skipped,
    )


def _run_cell(args):
    config, cell_idx, cell = args
    rows = []
    skipped = 0
    for trial in range(config.trials):
        trial_rows, skip = run_trial(config, cell, trial)
        skipped += int(skip)
        rows.extend(trial_rows)
    return cell_idx, rows, skipped


def run_experiment(config, out_dir, threads=1):
    """Run a campaign and write ``trials.csv`` and ``aggregate.csv``.

    Returns the two paths. Identical (config, seed) reruns produce byte
    identical aggregates; per-trial files differ only in the wall-clock
    column.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cells = config.cells()
    work = [(config, i, cell) for i, cell in enumerate(cells)]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_run_cell, work))
    else:
        results = [_run_cell(w) for w in work]
    results.sort(key=lambda r: r[0])
    trials_path = out_dir / "trials.csv"
    agg_path = out_dir / "aggregate.csv"
    with open(trials_path, "w", encoding="utf-8") as fh:
        fh.write(TRIAL_HEADER + "\n")
        for _, rows, _ in results:
            for row in rows:
                fh.write(",".join(_fmt(v) for v in row) + "\n")
    with open(agg_path, "w", encoding="utf-8") as fh:
        fh.write(AGG_HEADER + "\n")
        for cell_idx, rows, skipped in results:
            cell = cells[cell_idx]
            for method, model in config.methods:
                agg = _aggregate(config, cell, method, model, rows, skipped)
                fh.write(",".join(_fmt(v) for v in agg) + "\n")
    return trials_path, agg_path


# --- flat key=value config files ---


def _parse_values(text):
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            start, step, stop = (float(v) for v in part.split(":"))
            count = int(round((stop - start) / step)) + 1
            out.extend(start + i * step for i in range(count))
        else:
            out.append(part)
    return out


def _as_number(v):
    if isinstance(v, float):
        return v
    s = str(v)
    if s.lower() in ("none", "nan", ""):
        return None
    f = float(s)
    return int(f) if f == int(f) and "." not in s and "e" not in s.lower() else f


def parse_config(path=None, overrides=(), text=None):
    """Build an ExperimentConfig from ``key = value`` lines plus overrides."""
    raw = {}
    if text is None and path is not None:
        text = Path(path).read_text(encoding="utf-8")
    for line in (text or "").splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"bad config line: {line!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        raw[key] = val
    for item in overrides:
        if "=" not in item:
            raise ValueError(f"bad override (expected key=value): {item!r}")
        key, val = (s.strip() for s in item.split("=", 1))
        raw[key] = val
    kwargs = {}
    for key, val in raw.items():
        if key == "kind":
            kwargs["kind"] = val
        elif key in ("n", "dims"):
            kwargs["dims"] = tuple(int(float(v)) for v in _parse_values(val))
        elif key == "n1":
            kwargs["n1"] = tuple(int(float(v)) for v in _parse_values(val))
        elif key == "split":
            kwargs["split"] = float(val)
        elif key == "trials":
            kwargs["trials"] = int(val)
        elif key == "seed":
            kwargs["seed"] = int(val)
        elif key == "methods":
            pairs = []
            for item in val.split(","):
                name, _, model = item.strip().partition(":")
                model = MODEL_ALIASES.get(model.strip() or "double", model.strip())
                pairs.append((name.strip(), model))
            kwargs["methods"] = tuple(pairs)
        elif key == "k":
            kwargs["k_values"] = tuple(int(float(v)) for v in _parse_values(val))
        elif key == "delta_f":
            kwargs["delta_f"] = tuple(float(v) for v in _parse_values(val))
        elif key == "m":
            kwargs["m_values"] = tuple(_as_number(v) for v in _parse_values(val))
        elif key == "eta":
            kwargs["eta"] = tuple(_as_number(v) for v in _parse_values(val))
        elif key == "outliers":
            kwargs["outliers"] = tuple(_as_number(v) for v in _parse_values(val))
        elif key == "snr_db":
            kwargs["snr_db"] = None if val.lower() in ("inf", "none") else float(val)
        elif key == "sep_mode":
            kwargs["sep_mode"] = val
        elif key == "success_nmse":
            kwargs["success_nmse"] = float(val)
        elif key == "circle_tol":
            kwargs["circle_tol"] = float(val)
        elif key == "lambda":
            kwargs["lam"] = "auto" if val == "auto" else float(val)
        elif key == "tol_rel":
            kwargs["tol_rel"] = float(val)
        elif key == "max_iters":
            kwargs["max_iters"] = int(val)
        else:
            raise ValueError(f"unknown config key {key!r}")
    return ExperimentConfig(**kwargs)
