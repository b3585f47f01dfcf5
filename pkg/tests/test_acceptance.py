"""Acceptance suite: one test per criterion, one printed line each.

Run with ``pytest -s tests/test_acceptance.py`` to see the PASS/FAIL
lines live. The heavy recovery campaigns (criteria 5-10) dominate the
runtime; the whole file finishes well inside the per-criterion budgets
on a single core.
"""

import time

import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

from demac.bench import ExperimentConfig, nmse, run_experiment
from demac.diag import incoherence, shape_factor
from demac.hankel import (
    LevelShape,
    conj_backward,
    double_hankel,
    double_hankel_pinv,
    level_hankel,
    level_hankel_pinv,
    reversal_matrix,
)
from demac.model import (
    GaussianNoise,
    SampleSet,
    SparseNoise,
    SpectralParams,
    Subsample,
    corrupt,
    random_params,
    synthesize,
)
from demac.retrieve import distance_to_torus, estimate_poles, freq_error, wrap_distance
from demac.solve import Bounded, Exact, Robust, SolveOptions, demac, iht

from test_hankel import dense_forward_matrix, oracle_pinv


def _report(num, desc, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    suffix = f" [{detail}]" if detail else ""
    print(f"ACCEPTANCE {num:02d} {status}: {desc}{suffix}")
    assert ok, f"criterion {num}: {desc}{suffix}"


def _random_signal(rng, dims):
    return rng.standard_normal(dims) + 1j * rng.standard_normal(dims)


def _max_freq_error(params, est):
    """Largest per-dimension wrap error under the best matching."""
    ft = params.freqs
    fe = est.freqs
    k = ft.shape[0]
    cost = np.zeros((k, k))
    for l in range(ft.shape[1]):
        cost += wrap_distance(ft[:, l][:, None], fe[:, l][None, :]) ** 2
    rows, cols = linear_sum_assignment(cost)
    worst = 0.0
    for i, j in zip(rows, cols):
        for l in range(ft.shape[1]):
            worst = max(worst, float(wrap_distance(ft[i, l], fe[j, l])))
    return worst


# criterion 8 audits the noisy solves performed for criterion 7
_THEOREM3 = {"checked": 0, "violations": 0}


def test_c01_structural_identities_exact():
    t0 = time.perf_counter()
    rng = np.random.default_rng(101)
    ok = True
    for trial in range(100):
        if trial % 2 == 0:
            n = int(rng.integers(4, 17))
            n1 = int(rng.integers(2, n))
            shape = LevelShape.from_splits((n,), (n1,))
        else:
            dims = (int(rng.integers(3, 7)), int(rng.integers(3, 7)))
            n1s = tuple(int(rng.integers(2, d)) for d in dims)
            shape = LevelShape.from_splits(dims, n1s)
        y = _random_signal(rng, shape.dims)
        g = level_hankel(y, shape)
        back = level_hankel(conj_backward(y), shape)
        flipped = np.conj(g)[::-1, ::-1]
        # conjugate-backward identity, entrywise bit-for-bit
        ok &= np.array_equal(back, flipped)
        # explicit reversal matrices, built as Kronecker products of the
        # per-dimension exchanges, realize the same map exactly
        j1 = reversal_matrix(shape.row_dims[0])
        j2 = reversal_matrix(shape.col_dims[0])
        for d in range(1, shape.d):
            j1 = np.kron(j1, reversal_matrix(shape.row_dims[d]))
            j2 = np.kron(j2, reversal_matrix(shape.col_dims[d]))
        ok &= np.array_equal(j1 @ np.conj(g) @ j2, flipped)
    dt = time.perf_counter() - t0
    _report(1, "conjugate-backward and Kronecker reversal identities exact", ok and dt < 1.0,
            f"100 signals, {dt:.2f}s")


def test_c02_rank_law():
    t0 = time.perf_counter()
    shape = LevelShape.for_dims((65,))
    worst = 0.0
    for trial in range(200):
        k = trial % 10 + 1
        params = random_params(k, (65,), seed=2000 + trial)
        y = synthesize(params, (65,))
        sv = np.linalg.svd(double_hankel(y, shape).matrix, compute_uv=False)
        worst = max(worst, sv[k] / sv[0])
    dt = time.perf_counter() - t0
    _report(2, "rank of the augmented matrix never exceeds K", worst < 1e-10 and dt < 10.0,
            f"worst sigma ratio {worst:.2e}, {dt:.1f}s")


def test_c03_pinv_against_dense_least_squares():
    t0 = time.perf_counter()
    rng = np.random.default_rng(303)
    shapes = [
        LevelShape.from_splits((5,), (3,)),
        LevelShape.from_splits((6,), (2,)),
        LevelShape.from_splits((7,), (4,)),
        LevelShape.from_splits((8,), (5,)),
        LevelShape.from_splits((4, 2), (2, 2)),
    ]
    worst = 0.0
    for trial in range(50):
        shape = shapes[trial % len(shapes)]
        g = _random_signal(rng, (shape.rows, 2 * shape.cols))
        got = double_hankel_pinv(g, shape)
        want = oracle_pinv(g, shape, double=True)
        worst = max(worst, np.linalg.norm(got - want) / np.linalg.norm(want))
    dt = time.perf_counter() - t0
    _report(3, "double pseudoinverse matches the dense real-linear solver", worst < 1e-12 and dt < 5.0,
            f"worst rel err {worst:.2e}, {dt:.1f}s")


def test_c04_full_sampling_frequency_recovery():
    t0 = time.perf_counter()
    det_shape = LevelShape.from_splits((17,), (9,))
    det_ok = 0
    for trial in range(100):
        params = random_params(8, (17,), seed=4000 + trial)
        y = synthesize(params, (17,))
        est = estimate_poles(y, 8, det_shape)
        det_ok += _max_freq_error(params, est) < 1e-8
    prob_shape = LevelShape.from_splits((9,), (7,))
    prob_ok = 0
    for trial in range(100):
        params = random_params(6, (9,), seed=4600 + trial)
        y = synthesize(params, (9,))
        est = estimate_poles(y, 6, prob_shape)
        prob_ok += _max_freq_error(params, est) < 1e-6
    dt = time.perf_counter() - t0
    _report(4, "full-order frequency recovery (deterministic and probabilistic branches)",
            det_ok == 100 and prob_ok == 100 and dt < 30.0,
            f"det {det_ok}/100, prob {prob_ok}/100, {dt:.1f}s")


def test_c05_on_circle_restoration_at_0db():
    t0 = time.perf_counter()
    shape = LevelShape.from_splits((65,), (33,))
    passes = {"double-hankel": 0, "single-hankel": 0}
    for trial in range(100):
        params = random_params(3, (65,), min_sep=4 / 65, seed=5000 + trial)
        y0 = synthesize(params, (65,))
        samples = corrupt(y0, GaussianNoise(snr_db=0.0), seed=5500 + trial)
        for model in passes:
            rep = iht(samples, 3, SolveOptions(model=model, shape=shape))
            est = estimate_poles(rep.y_hat, 3, shape, model=model)
            passes[model] += distance_to_torus(est) < 1e-4
    dt = time.perf_counter() - t0
    ok = passes["double-hankel"] >= 95 and passes["single-hankel"] <= 10 and dt < 300.0
    _report(5, "0 dB pole magnitudes land on the circle only with the augmented model", ok,
            f"double {passes['double-hankel']}/100, single {passes['single-hankel']}/100, {dt:.0f}s")


def test_c06_phase_transition_spot_cells():
    t0 = time.perf_counter()
    shape = LevelShape.for_dims((65,))
    results = {}
    for k in (3, 18):
        succ = 0
        for trial in range(20):
            params = random_params(k, (65,), min_sep=1.5 / 65, seed=6000 + 100 * k + trial,
                                   exact_pair=True)
            y0 = synthesize(params, (65,))
            samples = corrupt(y0, Subsample(30), seed=6500 + 100 * k + trial)
            rep = demac(samples, Exact(), SolveOptions(shape=shape))
            succ += nmse(rep.y_hat, y0) <= 1e-6
        results[k] = succ
    dt = time.perf_counter() - t0
    ok = results[3] >= 18 and results[18] <= 2 and dt < 1200.0
    _report(6, "noiseless completion succeeds at K=3 and fails at K=18 (30 of 65 samples)", ok,
            f"K=3: {results[3]}/20, K=18: {results[18]}/20, {dt:.0f}s")


def test_c07_augmented_model_dominates_under_noise():
    t0 = time.perf_counter()
    n = 65
    eta = 1.0
    shape = LevelShape.from_splits((n,), (33,))
    seps = [round(0.1 + 0.2 * i, 1) for i in range(10)]  # 0.1 .. 1.9 in units of 1/N
    wins = 0
    for si, sep in enumerate(seps):
        errs = {"double-hankel": [], "single-hankel": []}
        for trial in range(20):
            params = random_params(2, (n,), min_sep=sep / n, seed=7000 + 100 * si + trial,
                                   exact_pair=True)
            y0 = synthesize(params, (n,))
            samples = corrupt(y0, [Subsample(30), GaussianNoise(eta=eta)],
                              seed=7500 + 100 * si + trial)
            for model in errs:
                rep = demac(samples, Bounded(eta), SolveOptions(model=model, shape=shape))
                errs[model].append(nmse(rep.y_hat, y0))
                herr = np.linalg.norm(level_hankel(rep.y_hat, shape) - level_hankel(y0, shape))
                _THEOREM3["checked"] += 1
                _THEOREM3["violations"] += herr > 5 * n**3 * eta
        if np.mean(errs["double-hankel"]) <= np.mean(errs["single-hankel"]):
            wins += 1
    dt = time.perf_counter() - t0
    ok = wins >= 8 and dt < 1800.0
    _report(7, "augmented model error never worse across the separation sweep", ok,
            f"{wins}/10 separation points, {dt:.0f}s")


def test_c08_noisy_recovery_error_bound():
    checked = _THEOREM3["checked"]
    violations = _THEOREM3["violations"]
    if checked == 0:
        pytest.skip("run together with criterion 7, whose solves this criterion audits")
    _report(8, "structured error bound 5 N^3 eta holds for every noisy solve",
            violations == 0, f"{checked} solves audited, {violations} violations")


def test_c09_sparse_outlier_recovery():
    t0 = time.perf_counter()
    n = 65
    shape = LevelShape.from_splits((n,), (33,))
    succ = 0
    for trial in range(20):
        params = random_params(2, (n,), min_sep=2 / n, seed=9000 + trial)
        y0 = synthesize(params, (n,))
        samples = corrupt(y0, SparseNoise(count=6), seed=9500 + trial)
        rep = demac(samples, Robust("auto"), SolveOptions(shape=shape))
        succ += nmse(rep.y_hat, y0) <= 1e-6
    dt = time.perf_counter() - t0
    _report(9, "six corrupted samples removed exactly with the automatic penalty",
            succ >= 18 and dt < 600.0, f"{succ}/20, {dt:.0f}s")


def test_c10_two_dimensional_recovery():
    t0 = time.perf_counter()
    dims = (11, 11)
    shape = LevelShape.from_splits(dims, (6, 6))
    succ = 0
    for trial in range(20):
        params = random_params(3, dims, seed=10_000 + trial)
        y0 = synthesize(params, dims)
        rep = iht(SampleSet.full(y0), 3, SolveOptions(shape=shape))
        est = estimate_poles(rep.y_hat, 3, shape)
        succ += (_max_freq_error(params, est) <= 1e-6) and (distance_to_torus(est) < 1e-6)
    errs = {"double-hankel": [], "single-hankel": []}
    for trial in range(20):
        params = random_params(3, dims, seed=10_500 + trial)
        y0 = synthesize(params, dims)
        samples = corrupt(y0, [Subsample(120), GaussianNoise(eta=1.0)], seed=10_900 + trial)
        for model in errs:
            rep = demac(samples, Bounded(1.0), SolveOptions(model=model, shape=shape))
            errs[model].append(nmse(rep.y_hat, y0))
    mean_d = float(np.mean(errs["double-hankel"]))
    mean_s = float(np.mean(errs["single-hankel"]))
    dt = time.perf_counter() - t0
    ok = succ >= 19 and mean_d <= mean_s and dt < 900.0
    _report(10, "2-D recovery: exact pole pairing noiselessly, smaller error under noise", ok,
            f"noiseless {succ}/20, noisy mean {mean_d:.3e} vs {mean_s:.3e}, {dt:.0f}s")


def test_c11_incoherence_facts():
    shape = LevelShape.from_splits((65,), (33,))
    # K = 1 with an exactly representable pole: mu1 is exactly 1
    rep = incoherence(SpectralParams(freqs=[[0.0]], amps=[1.0 + 0j]), shape)
    exact_one = rep.mu1 == 1.0
    near_one = True
    for trial in range(20):
        p = random_params(1, (65,), seed=11_000 + trial)
        near_one &= abs(incoherence(p, shape).mu1 - 1.0) < 1e-12
    chain = True
    for trial in range(500):
        k = trial % 5 + 2
        p = random_params(k, (65,), seed=11_500 + trial)
        r = incoherence(p, shape)
        chain &= r.lambda_min_g2 >= r.lambda_min_g2prime - 1e-10
    cs_ok = abs(shape_factor(shape) - 65 / 33) < 1e-12
    _report(11, "incoherence is perfect at K=1, augmented Gram dominates, shape factor exact",
            exact_one and near_one and chain and cs_ok,
            f"chain on 500 instances, c_s dev {abs(shape_factor(shape) - 65 / 33):.1e}")


def test_c12_campaign_determinism(tmp_path):
    config = ExperimentConfig(
        kind="phase_transition",
        dims=(65,),
        trials=2,
        seed=12,
        methods=(("demac", "double-hankel"), ("iht", "double-hankel")),
        k_values=(1, 3),
        delta_f=(1.5,),
        m_values=(None,),
        sep_mode="exact-pair",
        max_iters=500,
    )
    t1, a1 = run_experiment(config, tmp_path / "run1")
    t2, a2 = run_experiment(config, tmp_path / "run2", threads=2)
    agg_same = a1.read_bytes() == a2.read_bytes()

    def strip_wall(path):
        lines = path.read_text().splitlines()
        head = lines[0].split(",")
        keep = [i for i, name in enumerate(head) if name != "wall_ms"]
        return ["," .join(line.split(",")[i] for i in keep) for line in lines]

    trial_same = strip_wall(t1) == strip_wall(t2)
    _report(12, "campaign reruns are byte-identical (aggregates; trials up to wall clock)",
            agg_same and trial_same)
