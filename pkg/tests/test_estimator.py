import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from moranmix import (
    AbortedError,
    Configuration,
    EstimatorConfig,
    InvalidConfigError,
    ProcessParams,
    certified_auto_config,
    complete_graph,
    cycle_graph,
    estimate,
    solve,
    star_graph,
    sweep,
    wilson_interval,
)
from moranmix._util import mix64, mix64_array


def test_mix64_vectorized_matches_scalar():
    idx = np.arange(1000, dtype=np.uint64)
    vec = mix64_array(12345, idx)
    assert vec.dtype == np.uint64
    for i in (0, 1, 17, 999):
        assert int(vec[i]) == mix64(12345, i)


def test_mix64_distinct_streams():
    vals = {mix64(7, i) for i in range(10000)}
    assert len(vals) == 10000


class TestWilson:
    def test_known_values(self):
        lo, hi = wilson_interval(0, 100)
        assert lo == 0.0 and hi == pytest.approx(0.0370, abs=5e-4)
        lo, hi = wilson_interval(100, 100)
        assert hi == 1.0 and lo == pytest.approx(0.9630, abs=5e-4)
        lo, hi = wilson_interval(50, 100)
        assert lo == pytest.approx(0.4038, abs=5e-4)
        assert hi == pytest.approx(0.5962, abs=5e-4)

    def test_validation(self):
        with pytest.raises(ValueError):
            wilson_interval(1, 0)

    @settings(max_examples=60, deadline=None)
    @given(trials=st.integers(1, 10**6), frac=st.floats(0, 1))
    def test_contains_point_estimate(self, trials, frac):
        successes = int(round(frac * trials))
        lo, hi = wilson_interval(successes, trials)
        assert 0 <= lo <= successes / trials <= hi <= 1

    def test_wider_z_is_wider(self):
        lo1, hi1 = wilson_interval(20, 200)
        lo2, hi2 = wilson_interval(20, 200, z=3.29)
        assert lo2 < lo1 and hi2 > hi1


class TestConfig:
    def test_manual_validation(self):
        with pytest.raises(InvalidConfigError):
            EstimatorConfig.manual(0)
        with pytest.raises(InvalidConfigError):
            EstimatorConfig.manual(10, cutoff=0)

    def test_auto_validation(self):
        with pytest.raises(InvalidConfigError):
            EstimatorConfig.auto(0.0, 1, 4, 1, 1)
        with pytest.raises(InvalidConfigError):
            EstimatorConfig.auto(1.5, 1, 4, 1, 1)
        with pytest.raises(InvalidConfigError):
            EstimatorConfig.auto(0.1, 1, 4, -1, 1)

    def test_resolve_formulas(self):
        cfg = EstimatorConfig.auto(0.1, 1, 4, 1.0, 2.0)
        n = 5
        num, cutoff = cfg.resolve(n, 2.0)
        assert num == math.ceil(math.log(16) / (2 * 0.01) * 25)
        assert cutoff == math.ceil(8 * 2.0 * num * n**4)

    def test_manual_default_cutoff(self):
        cfg = EstimatorConfig.manual(100)
        num, cutoff = cfg.resolve(4, 1.0)
        assert num == 100 and cutoff == 100 * 4**4


class TestAutoRegimes:
    def test_half_mixing_regime(self):
        g = complete_graph(5)
        s0 = Configuration.from_vertices([0], 5)
        cfg = certified_auto_config(g, ProcessParams(0.5, 2), s0, epsilon=0.2)
        assert (cfg.c1, cfg.c2) == (1, 4)
        assert cfg.c_fp == 1.0
        assert cfg.c_tau == pytest.approx(2.0)

    def test_half_mixing_neutral(self):
        g = cycle_graph(5)
        s0 = Configuration.from_vertices([0, 1], 5)
        cfg = certified_auto_config(g, ProcessParams(0.5, 1), s0, epsilon=0.2)
        assert cfg.c_fp == 2.0 and cfg.c_tau == 0.25

    def test_almost_regular_regime(self):
        g = cycle_graph(6)  # regular: alpha = 1
        s0 = Configuration.from_vertices([0], 6)
        cfg = certified_auto_config(g, ProcessParams(0.25, 2), s0, epsilon=0.2)
        assert (cfg.c1, cfg.c2) == (2, 4)
        assert cfg.c_tau == pytest.approx(8.0)

    def test_refuses_disadvantageous(self):
        g = cycle_graph(6)
        s0 = Configuration.from_vertices([0], 6)
        with pytest.raises(InvalidConfigError):
            certified_auto_config(g, ProcessParams(0.5, 0.5), s0, epsilon=0.2)

    def test_refuses_outside_regimes(self, example5):
        # alpha = 4 and r < alpha^2 with lam != 1/2: nothing is certified
        s0 = Configuration.from_vertices([2], 5)
        with pytest.raises(InvalidConfigError):
            certified_auto_config(example5, ProcessParams(0.25, 2), s0, epsilon=0.2)

    def test_estimate_rejects_wrong_constants(self):
        g = cycle_graph(5)
        s0 = Configuration.from_vertices([0], 5)
        bad = EstimatorConfig.auto(0.2, 2, 4, 1.0, 10.0)  # wrong c1 for lam=1/2
        with pytest.raises(InvalidConfigError):
            estimate(g, s0, ProcessParams(0.5, 2), bad)
        bad_cfp = EstimatorConfig.auto(0.2, 1, 4, 3.0, 10.0)  # c_fp > |S0|
        with pytest.raises(InvalidConfigError):
            estimate(g, s0, ProcessParams(0.5, 2), bad_cfp)


class TestEstimate:
    def test_trivial_starts(self, example5):
        cfg = EstimatorConfig.manual(50, base_seed=1)
        rep = estimate(example5, Configuration.full(5), ProcessParams(0.5, 1), cfg)
        assert rep.fp_hat == 1.0 and rep.mean_steps == 0.0
        rep = estimate(example5, Configuration.empty(5), ProcessParams(0.5, 1), cfg)
        assert rep.fp_hat == 0.0 and rep.fixations == 0

    def test_counts_sum(self, example5):
        cfg = EstimatorConfig.manual(500, base_seed=3)
        rep = estimate(example5, Configuration.from_vertices([2], 5),
                       ProcessParams(0.5, 1), cfg)
        assert rep.fixations + rep.extinctions + rep.cutoffs == rep.num_runs == 500
        assert rep.wilson_low <= rep.fp_hat <= rep.wilson_high
        assert not rep.aborted

    def test_determinism_and_thread_independence(self, example5):
        s0 = Configuration.from_vertices([2], 5)
        params = ProcessParams(0.5, 2)
        a = estimate(example5, s0, params, EstimatorConfig.manual(2000, base_seed=11))
        b = estimate(example5, s0, params, EstimatorConfig.manual(2000, base_seed=11))
        c = estimate(example5, s0, params,
                     EstimatorConfig.manual(2000, base_seed=11, threads=1))
        assert a == b == c
        d = estimate(example5, s0, params, EstimatorConfig.manual(2000, base_seed=12))
        assert d != a

    def test_golden_example_estimate(self, example5):
        # 1e5 replicates at equal mixing, neutral fitness: fp ~ 1/5
        cfg = EstimatorConfig.manual(100_000, cutoff=100_000, base_seed=2024)
        rep = estimate(example5, Configuration.from_vertices([2], 5),
                       ProcessParams(0.5, 1), cfg)
        assert rep.fp_hat == pytest.approx(0.200, abs=0.005)
        assert rep.wilson_low < 0.2 < rep.wilson_high
        assert rep.cutoffs == 0

    def test_strict_cutoff_aborts(self):
        g = cycle_graph(6)
        s0 = Configuration.from_vertices([0, 1, 2], 6)
        cfg = EstimatorConfig.manual(200, cutoff=1, base_seed=5, strict_cutoff=True)
        with pytest.raises(AbortedError) as exc:
            estimate(g, s0, ProcessParams(0.5, 1), cfg)
        rep = exc.value.report
        assert rep.aborted and rep.cutoffs > 0
        assert rep.fixations + rep.extinctions + rep.cutoffs == 200

    def test_tolerant_cutoff_brackets(self):
        g = cycle_graph(6)
        s0 = Configuration.from_vertices([0, 1, 2], 6)
        cfg = EstimatorConfig.manual(200, cutoff=1, base_seed=5)
        rep = estimate(g, s0, ProcessParams(0.5, 1), cfg)
        assert not rep.aborted and rep.cutoffs > 0
        assert rep.bracket_low == rep.fixations / 200
        assert rep.bracket_high == (rep.fixations + rep.cutoffs) / 200
        assert rep.bracket_high > rep.bracket_low

    def test_matches_exact_within_interval(self):
        g = star_graph(4)
        s0 = Configuration.from_vertices([0], 5)
        for lam, r in ((0.0, 2.0), (1.0, 2.0), (0.5, 0.5)):
            params = ProcessParams(lam, r)
            truth = solve(g, params).fp_of(s0)
            rep = estimate(g, s0, params, EstimatorConfig.manual(20_000, base_seed=77))
            lo, hi = wilson_interval(rep.fixations, rep.num_runs, z=4.0)
            assert lo <= truth <= hi


class TestCompiledStepper:
    def test_one_step_flip_frequencies_match_kernel(self, example5):
        # 1e6 one-step samples from the compiled stepper vs the analytic
        # one-step kernel, per flip category, within 4.5 sigma
        from moranmix import transition_distribution
        from moranmix._simulate import sample_flips
        from moranmix._util import mix64_array

        params = ProcessParams(0.5, 1)
        start = Configuration.from_vertices([2], 5)
        dist = transition_distribution(example5, start, params)
        n_samples = 1_000_000
        seeds = mix64_array(555, np.arange(n_samples, dtype=np.uint64))
        indptr, indices, _, _ = example5.csr()
        flips = sample_flips(indptr, indices, start.as_bool_array().astype(np.uint8),
                             params.lam, params.r, seeds)
        for v in range(5):
            for p, count in ((dist.gain[v], int((flips == v + 1).sum())),
                             (dist.loss[v], int((flips == -(v + 1)).sum()))):
                sigma = np.sqrt(n_samples * p * (1 - p))
                assert abs(count - n_samples * p) <= 4.5 * sigma + 1e-9
        stay_count = int((flips == 0).sum())
        sigma = np.sqrt(n_samples * dist.stay * (1 - dist.stay))
        assert abs(stay_count - n_samples * dist.stay) <= 4.5 * sigma

    def test_large_graph_against_high_budget_reference(self):
        # n = 30 exceeds the exact solver: the oracle is a high-replicate
        # reference run; the test estimate must agree within combined
        # intervals at z = 4
        from moranmix import generate_connected_gnp

        g = generate_connected_gnp(30, 0.5, seed=1)
        s0 = Configuration.from_vertices([0], 30)
        for lam in (0.0, 0.5, 1.0):
            params = ProcessParams(lam, 2.0)
            ref = estimate(g, s0, params, EstimatorConfig.manual(150_000, base_seed=71))
            rep = estimate(g, s0, params, EstimatorConfig.manual(15_000, base_seed=72))
            ref_lo, ref_hi = wilson_interval(ref.fixations, ref.num_runs, z=4.0)
            lo, hi = wilson_interval(rep.fixations, rep.num_runs, z=4.0)
            assert max(lo, ref_lo) <= min(hi, ref_hi), (lam, ref.fp_hat, rep.fp_hat)


class TestSweep:
    def test_single_cell_matches_direct(self, example5):
        s0 = Configuration.from_vertices([2], 5)
        cfg = EstimatorConfig.manual(300, base_seed=9)
        rows = sweep(example5, s0, [0.5], [2.0], cfg)
        assert len(rows) == 1
        lam, r, rep = rows[0]
        direct = estimate(example5, s0, ProcessParams(0.5, 2.0),
                          EstimatorConfig.manual(300, base_seed=mix64(9, 0, 0)))
        assert (lam, r) == (0.5, 2.0)
        assert rep == direct

    def test_grid_shape_and_determinism(self, example5):
        s0 = Configuration.from_vertices([2], 5)
        cfg = EstimatorConfig.manual(200, base_seed=4)
        rows = sweep(example5, s0, [0.0, 1.0], [1.0, 2.0, 4.0], cfg)
        assert [(lam, r) for lam, r, _ in rows] == [
            (0.0, 1.0), (0.0, 2.0), (0.0, 4.0), (1.0, 1.0), (1.0, 2.0), (1.0, 4.0)]
        again = sweep(example5, s0, [0.0, 1.0], [1.0, 2.0, 4.0], cfg)
        assert rows == again
