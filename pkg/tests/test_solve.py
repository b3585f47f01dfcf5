import numpy as np
import pytest

from demac.bench import nmse
from demac.hankel import LevelShape, double_hankel, double_hankel_pinv, level_hankel
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
from demac.solve import (
    Bounded,
    Exact,
    Robust,
    SolveOptions,
    SolveReport,
    demac,
    hard_threshold,
    iht,
    soft_threshold,
)


def shape1(n, n1):
    return LevelShape.from_splits((n,), (n1,))


class TestHardThreshold:
    def test_rank_zero(self):
        m = np.arange(6.0).reshape(2, 3)
        assert np.array_equal(hard_threshold(m, 0), np.zeros((2, 3)))

    def test_diagonal(self):
        m = np.diag([3.0, 2.0, 1.0])
        assert np.allclose(hard_threshold(m, 2), np.diag([3.0, 2.0, 0.0]), atol=1e-14)

    def test_k_at_least_rank_returns_input(self):
        m = np.arange(12.0).reshape(3, 4)
        assert np.array_equal(hard_threshold(m, 3), m)

    def test_tail_energy_identity(self):
        rng = np.random.default_rng(0)
        m = rng.standard_normal((10, 10)) + 1j * rng.standard_normal((10, 10))
        k = 4
        s = np.linalg.svd(m, compute_uv=False)
        err = np.linalg.norm(m - hard_threshold(m, k)) ** 2
        want = np.sum(s[k:] ** 2)
        assert abs(err - want) / want < 1e-10

    def test_negative_k(self):
        with pytest.raises(ValueError):
            hard_threshold(np.eye(2), -1)


def test_soft_threshold_complex():
    x = np.array([3.0, -1.0 + 0j, 0.5j, 0.0])
    out = soft_threshold(x, 1.0)
    assert np.allclose(out, [2.0, 0.0, 0.0, 0.0])
    big = 2.0 * np.exp(1j * 0.7)
    assert abs(soft_threshold(np.array([big]), 0.5)[0] - 1.5 * np.exp(1j * 0.7)) < 1e-14


class TestIht:
    def test_noiseless_single_component(self):
        p = SpectralParams(freqs=[[0.3]], amps=[1.0])
        y0 = synthesize(p, (65,))
        rep = iht(SampleSet.full(y0), 1, SolveOptions(shape=shape1(65, 33)))
        assert nmse(rep.y_hat, y0) < 1e-10
        from demac.retrieve import estimate_poles

        est = estimate_poles(rep.y_hat, 1, shape1(65, 33))
        assert abs(est.magnitudes[0, 0] - 1.0) < 1e-8

    def test_sparse_input_is_fixed_point(self):
        p = random_params(3, (33,), min_sep=0.05, seed=0)
        y0 = synthesize(p, (33,))
        rep = iht(SampleSet.full(y0), 3, SolveOptions(shape=shape1(33, 17)))
        assert rep.converged and rep.iters <= 2
        assert nmse(rep.y_hat, y0) < 1e-20

    def test_iterates_live_on_rank_k_preimages(self):
        p = random_params(2, (33,), min_sep=0.05, seed=1)
        y0 = synthesize(p, (33,))
        s = corrupt(y0, GaussianNoise(snr_db=5.0), seed=2)
        shape = shape1(33, 17)
        rep = iht(s, 2, SolveOptions(shape=shape, max_iters=50))
        # the returned iterate equals pinv(rank-K matrix); applying
        # forward/pinv once more must not move it
        roundtrip = double_hankel_pinv(
            hard_threshold(double_hankel(rep.y_hat, shape).matrix, 2), shape
        )
        proj = double_hankel_pinv(double_hankel(rep.y_hat, shape), shape)
        assert np.allclose(proj, rep.y_hat, atol=1e-12)
        assert roundtrip.shape == rep.y_hat.shape

    def test_trace_and_report_shape(self):
        p = random_params(2, (33,), min_sep=0.05, seed=3)
        y0 = synthesize(p, (33,))
        s = corrupt(y0, GaussianNoise(snr_db=0.0), seed=4)
        rep = iht(s, 2, SolveOptions(shape=shape1(33, 17)))
        assert isinstance(rep, SolveReport)
        assert len(rep.objective_trace) == rep.iters
        assert len(rep.residuals["rel_change"]) == rep.iters

    def test_requires_full_sampling(self):
        p = random_params(1, (9,), seed=0)
        s = corrupt(synthesize(p, (9,)), Subsample(5), seed=1)
        with pytest.raises(ValueError):
            iht(s, 1, SolveOptions(shape=shape1(9, 5)))

    def test_vacuous_rank_rejected(self):
        y = np.ones(9, dtype=complex)
        with pytest.raises(ValueError):
            iht(SampleSet.full(y), 5, SolveOptions(shape=shape1(9, 5)))

    def test_circle_restoration_beats_plain_model(self):
        # miniature of the on-circle histogram protocol at 0 dB
        from demac.retrieve import distance_to_torus, estimate_poles

        shape = shape1(65, 33)
        double_pass = single_pass = 0
        for seed in range(5):
            p = random_params(3, (65,), min_sep=4 / 65, seed=seed)
            y0 = synthesize(p, (65,))
            s = corrupt(y0, GaussianNoise(snr_db=0.0), seed=100 + seed)
            for model, counter in (("double-hankel", "d"), ("single-hankel", "s")):
                rep = iht(s, 3, SolveOptions(model=model, shape=shape))
                est = estimate_poles(rep.y_hat, 3, shape, model=model)
                ok = distance_to_torus(est) < 1e-4
                if model == "double-hankel":
                    double_pass += ok
                else:
                    single_pass += ok
        assert double_pass >= 4
        assert single_pass <= 1


class TestDemacExact:
    def test_full_sampling_returns_data(self):
        p = random_params(2, (21,), min_sep=0.05, seed=0)
        y0 = synthesize(p, (21,))
        rep = demac(SampleSet.full(y0), Exact(), SolveOptions(shape=shape1(21, 11)))
        assert np.array_equal(rep.y_hat, y0)

    def test_small_instance_recovery(self):
        p = random_params(1, (9,), seed=1)
        y0 = synthesize(p, (9,))
        s = corrupt(y0, Subsample(7), seed=2)
        rep = demac(s, Exact(), SolveOptions(shape=shape1(9, 5)))
        assert nmse(rep.y_hat, y0) < 1e-8

    def test_observed_entries_exact(self):
        p = random_params(2, (33,), min_sep=0.05, seed=3)
        y0 = synthesize(p, (33,))
        s = corrupt(y0, Subsample(20), seed=4)
        rep = demac(s, Exact(), SolveOptions(shape=shape1(33, 17), max_iters=60))
        assert np.array_equal(rep.y_hat.ravel()[s.omega], s.values)

    def test_single_model_emac(self):
        p = random_params(1, (21,), seed=5)
        y0 = synthesize(p, (21,))
        s = corrupt(y0, Subsample(12), seed=6)
        rep = demac(s, Exact(), SolveOptions(model="single-hankel", shape=shape1(21, 11)))
        assert nmse(rep.y_hat, y0) < 1e-8

    def test_objective_trace_properties(self):
        p = random_params(3, (33,), min_sep=0.05, seed=7)
        y0 = synthesize(p, (33,))
        s = corrupt(y0, Subsample(20), seed=8)
        rep = demac(s, Exact(), SolveOptions(shape=shape1(33, 17)))
        trace = rep.objective_trace
        assert len(trace) == rep.iters
        assert np.all(np.isfinite(trace))
        # after burn-in the running minimum has settled: the best value
        # seen in the last half is no better than 1% below the final one
        half = trace[len(trace) // 2 :]
        assert half.min() >= trace[-1] * 0.99

    def test_nonconvergence_is_reported_not_raised(self):
        p = random_params(2, (33,), min_sep=0.05, seed=9)
        y0 = synthesize(p, (33,))
        s = corrupt(y0, Subsample(20), seed=10)
        rep = demac(s, Exact(), SolveOptions(shape=shape1(33, 17), max_iters=3))
        assert rep.converged is False and rep.iters == 3

    def test_empty_sampling_rejected(self):
        s = SampleSet((9,), np.empty(0, dtype=int), np.empty(0, dtype=complex))
        with pytest.raises(ValueError):
            demac(s, Exact(), SolveOptions(shape=shape1(9, 5)))


class TestDemacBounded:
    def test_feasible_by_construction(self):
        p = random_params(2, (33,), min_sep=2 / 33, seed=0)
        y0 = synthesize(p, (33,))
        s = corrupt(y0, [Subsample(20), GaussianNoise(eta=0.5)], seed=1)
        rep = demac(s, Bounded(0.5), SolveOptions(shape=shape1(33, 17), max_iters=800))
        mis = np.linalg.norm(rep.y_hat.ravel()[s.omega] - s.values)
        assert mis <= 0.5 + 1e-9

    def test_eta_zero_matches_exact_mode(self):
        p = random_params(1, (21,), seed=2)
        y0 = synthesize(p, (21,))
        s = corrupt(y0, Subsample(14), seed=3)
        opts = SolveOptions(shape=shape1(21, 11))
        r_exact = demac(s, Exact(), opts)
        r_bounded = demac(s, Bounded(0.0), opts)
        assert nmse(r_bounded.y_hat, r_exact.y_hat) < 1e-12

    def test_loose_error_bound_never_violated(self):
        n = 33
        shape = shape1(n, 17)
        for seed in range(5):
            p = random_params(2, (n,), min_sep=1.5 / n, seed=seed)
            y0 = synthesize(p, (n,))
            s = corrupt(y0, [Subsample(22), GaussianNoise(eta=1.0)], seed=20 + seed)
            rep = demac(s, Bounded(1.0), SolveOptions(shape=shape, max_iters=1000))
            herr = np.linalg.norm(level_hankel(rep.y_hat, shape) - level_hankel(y0, shape))
            assert herr <= 5 * n**3 * 1.0


class TestDemacRobust:
    def test_outlier_removal_exact_recovery(self):
        p = random_params(2, (65,), min_sep=2 / 65, seed=0)
        y0 = synthesize(p, (65,))
        s = corrupt(y0, SparseNoise(count=6), seed=1)
        rep = demac(s, Robust("auto"), SolveOptions(shape=shape1(65, 33)))
        assert nmse(rep.y_hat, y0) < 1e-6
        assert rep.e_hat is not None

    def test_split_consistency_invariant(self):
        p = random_params(2, (33,), min_sep=2 / 33, seed=2)
        y0 = synthesize(p, (33,))
        s = corrupt(y0, SparseNoise(count=3), seed=3)
        rep = demac(s, Robust("auto"), SolveOptions(shape=shape1(33, 17), max_iters=200))
        resid = (rep.y_hat + rep.e_hat).ravel()[s.omega] - s.values
        assert np.linalg.norm(resid) < 1e-10

    def test_auto_lambda_value(self):
        from demac.solve import _auto_lambda

        assert _auto_lambda(30, 65) == pytest.approx(1.0 / np.sqrt(30 * np.log(65)))

    def test_lambda_validation(self):
        with pytest.raises(ValueError):
            Robust(lam=-1.0)


class TestModelEquivalence:
    def test_symmetric_data_same_answer(self):
        # a component whose phase makes the signal equal its conjugated
        # reversal: the backward block adds no information, so both
        # models recover the same (exactly recoverable) signal
        n = 21
        f = 0.3
        psi = 2 * np.pi * f * (n - 1)
        amp = 1.3 * np.exp(-0.5j * psi)
        p = SpectralParams(freqs=[[f]], amps=[amp])
        y0 = synthesize(p, (n,))
        from demac.hankel import conj_backward

        assert np.allclose(conj_backward(y0), y0, atol=1e-12)
        omega = np.sort(np.concatenate([np.arange(0, 14), np.array([n - 1 - i for i in range(0, 14)])]))
        omega = np.unique(omega)
        s = SampleSet((n,), omega, y0[omega])
        opts_d = SolveOptions(model="double-hankel", shape=shape1(n, 11))
        opts_s = SolveOptions(model="single-hankel", shape=shape1(n, 11))
        rd = demac(s, Exact(), opts_d)
        rs = demac(s, Exact(), opts_s)
        assert nmse(rd.y_hat, rs.y_hat) < 1e-10


class TestAgainstConicReference:
    """Independent check: a generic conic solver on tiny instances."""

    cvxpy = pytest.importorskip("cvxpy")

    def _blocks(self, yvar, shape):
        import cvxpy as cp

        from demac.hankel import _plan

        plan = _plan(shape)
        t = plan.table
        r, c = shape.rows, shape.cols
        g1 = cp.reshape(yvar[t.ravel()], (r, c), order="C")
        g2 = cp.reshape(cp.conj(yvar)[t[::-1, ::-1].ravel()], (r, c), order="C")
        return g1, g2

    def test_exact_mode_agrees(self):
        import cvxpy as cp

        shape = shape1(9, 5)
        p = random_params(1, (9,), seed=1)
        y0 = synthesize(p, (9,))
        s = corrupt(y0, Subsample(7), seed=2)
        yv = cp.Variable(9, complex=True)
        g1, g2 = self._blocks(yv, shape)
        prob = cp.Problem(cp.Minimize(cp.normNuc(cp.hstack([g1, g2]))), [yv[s.omega] == s.values])
        prob.solve(solver=cp.SCS, eps=1e-10, max_iters=100000)
        rep = demac(s, Exact(), SolveOptions(shape=shape))
        assert np.linalg.norm(yv.value - rep.y_hat) / np.linalg.norm(yv.value) < 1e-6
        assert nmse(rep.y_hat, y0) < 1e-8

    def test_bounded_mode_agrees(self):
        import cvxpy as cp

        shape = shape1(9, 5)
        p = random_params(1, (9,), seed=1)
        y0 = synthesize(p, (9,))
        s = corrupt(y0, [Subsample(7), GaussianNoise(eta=0.3)], seed=5)
        yv = cp.Variable(9, complex=True)
        g1, g2 = self._blocks(yv, shape)
        prob = cp.Problem(
            cp.Minimize(cp.normNuc(cp.hstack([g1, g2]))),
            [cp.norm(yv[s.omega] - s.values, 2) <= 0.3],
        )
        prob.solve(solver=cp.SCS, eps=1e-10, max_iters=100000)
        rep = demac(s, Bounded(0.3), SolveOptions(shape=shape, max_iters=20000))
        assert np.linalg.norm(yv.value - rep.y_hat) / np.linalg.norm(yv.value) < 1e-5

    def test_robust_mode_agrees(self):
        import cvxpy as cp

        from demac.hankel import _plan

        shape = shape1(13, 7)
        p = random_params(1, (13,), seed=3)
        y0 = synthesize(p, (13,))
        s = corrupt(y0, SparseNoise(count=1), seed=7)
        lam = 1 / np.sqrt(13 * np.log(13))
        yv = cp.Variable(13, complex=True)
        ev = cp.Variable(13, complex=True)
        g1, g2 = self._blocks(yv, shape)
        plan = _plan(shape)
        he = cp.reshape(ev[plan.table.ravel()], (shape.rows, shape.cols), order="C")
        prob = cp.Problem(
            cp.Minimize(cp.normNuc(cp.hstack([g1, g2])) + 2 * lam * cp.sum(cp.abs(he))),
            [yv + ev == s.values],
        )
        prob.solve(solver=cp.SCS, eps=1e-10, max_iters=100000)
        rep = demac(s, Robust("auto"), SolveOptions(shape=shape, max_iters=20000))
        assert np.linalg.norm(yv.value - rep.y_hat) / np.linalg.norm(yv.value) < 1e-6


class TestSolveOptions:
    def test_validation(self):
        with pytest.raises(ValueError):
            SolveOptions(model="triple-hankel")
        with pytest.raises(ValueError):
            SolveOptions(max_iters=0)
        with pytest.raises(ValueError):
            SolveOptions(tol_rel=0.0)
        with pytest.raises(ValueError):
            SolveOptions(rho=-1.0)

    def test_shape_mismatch_detected(self):
        opts = SolveOptions(shape=shape1(9, 5))
        with pytest.raises(ValueError):
            opts.resolve_shape((11,))

    def test_bounded_eta_validation(self):
        with pytest.raises(ValueError):
            Bounded(-0.1)
