import math

import numpy as np
import pytest

from relaysense.mcsim import (
    CHUNK,
    MCEstimate,
    _chunk_rng,
    _pair_exponentials,
    mc_clipped_gain,
    mc_detection,
    mc_frame_energy,
    mc_harvest,
    mc_outage,
)
from relaysense.scenario import preset, scenario_from_conf

from test_sensing import fig3_setup, rel_noise_db, N0
from test_transmission import fig4_setup


class TestMCEstimate:
    def test_validation(self):
        with pytest.raises(ValueError):
            MCEstimate(mean=0.0, stderr=-1.0, trials=10, seed=1)
        with pytest.raises(ValueError):
            MCEstimate(mean=0.0, stderr=math.inf, trials=10, seed=1)
        with pytest.raises(ValueError):
            MCEstimate(mean=0.0, stderr=0.0, trials=0, seed=1)

    def test_z_score(self):
        est = MCEstimate(mean=1.0, stderr=0.5, trials=10, seed=1)
        assert est.z_score(0.0) == pytest.approx(2.0)
        degenerate = MCEstimate(mean=1.0, stderr=0.0, trials=10, seed=1)
        assert degenerate.z_score(1.0) == 0.0
        assert degenerate.z_score(0.9) == math.inf


class TestDeterminism:
    def test_same_seed_same_bits(self):
        links, primary, policy = fig3_setup()
        a = mc_detection(links, primary, policy, policy.threshold, 200,
                         trials=100_000, seed=99)
        b = mc_detection(links, primary, policy, policy.threshold, 200,
                         trials=100_000, seed=99)
        assert a.mean == b.mean
        assert a.stderr == b.stderr

    def test_different_seed_different_draws(self):
        links, primary, policy = fig3_setup()
        a = mc_detection(links, primary, policy, policy.threshold, 200,
                         trials=100_000, seed=99)
        b = mc_detection(links, primary, policy, policy.threshold, 200,
                         trials=100_000, seed=100)
        assert a.mean != b.mean

    def test_worker_count_is_invisible(self):
        # chunked counter streams: the thread pool must not change a bit
        links, primary, policy = fig4_setup()
        gamma = rel_noise_db(3.0)
        serial = mc_outage(links, primary, policy, gamma, 0.95, 0.9,
                           trials=300_000, seed=7, workers=1)
        pooled = mc_outage(links, primary, policy, gamma, 0.95, 0.9,
                           trials=300_000, seed=7, workers=4)
        assert serial.mean == pooled.mean
        assert serial.stderr == pooled.stderr

    def test_worker_count_is_invisible_for_frame_energy(self):
        m = scenario_from_conf(preset("fig7")).energy_model()
        serial = mc_frame_energy(m, 0, 0.02, trials=100_000, seed=3, workers=1)
        pooled = mc_frame_energy(m, 0, 0.02, trials=100_000, seed=3, workers=3)
        assert serial.mean == pooled.mean
        assert serial.stderr == pooled.stderr

    def test_partial_tail_chunk(self):
        # trials deliberately not a multiple of the chunk size
        links, primary, policy = fig3_setup()
        est = mc_detection(links, primary, policy, policy.threshold, 200,
                           trials=CHUNK + 17, seed=5)
        assert est.trials == CHUNK + 17
        assert 0.0 <= est.mean <= 1.0


class TestStderrScaling:
    def test_quadrupling_trials_halves_stderr(self):
        links, primary, policy = fig3_setup()
        lam = 2.0 * policy.threshold
        small = mc_detection(links, primary, policy, lam, 200,
                             trials=100_000, seed=11)
        big = mc_detection(links, primary, policy, lam, 200,
                           trials=400_000, seed=11)
        assert big.stderr == pytest.approx(0.5 * small.stderr, rel=0.2)

    def test_stderr_nonnegative_everywhere(self):
        links, primary, policy = fig3_setup()
        for lam in (0.0, policy.threshold, 100.0 * policy.threshold):
            est = mc_detection(links, primary, policy, lam, 200,
                               trials=50_000, seed=2)
            assert est.stderr >= 0.0
            assert 0.0 <= est.mean <= 1.0


class TestDegenerateCases:
    def test_zero_threshold_always_detects(self):
        links, primary, policy = fig3_setup()
        est = mc_detection(links, primary, policy, 0.0, 200, trials=50_000, seed=3)
        assert est.mean == 1.0

    def test_hopeless_threshold_never_detects(self):
        links, primary, policy = fig3_setup()
        est = mc_detection(links, primary, policy, 1e12 * N0, 1, trials=50_000, seed=3)
        assert est.mean == 0.0
        # a zero-hit run quotes the one-count scale instead of a zero bar
        assert est.stderr > 0.0


class TestPairedExponentials:
    def test_marginals_and_correlation(self):
        rng = _chunk_rng(123, 1, 0)
        m, rho, n = 2.5, 0.7, 1_000_000
        est, true = _pair_exponentials(rng, n, m * np.ones(1), rho)
        for v in (est, true):
            assert float(np.mean(v)) == pytest.approx(m, rel=0.01)
        corr = float(np.corrcoef(est.ravel(), true.ravel())[0, 1])
        # squared-magnitude pairs correlate as rho^2
        assert corr == pytest.approx(rho * rho, abs=0.005)

    def test_independent_at_zero(self):
        rng = _chunk_rng(123, 1, 0)
        est, true = _pair_exponentials(rng, 500_000, np.ones(1), 0.0)
        corr = float(np.corrcoef(est.ravel(), true.ravel())[0, 1])
        assert abs(corr) < 0.005

    def test_locked_at_one(self):
        rng = _chunk_rng(123, 1, 0)
        est, true = _pair_exponentials(rng, 1000, np.ones(1), 1.0)
        np.testing.assert_allclose(est, true, rtol=1e-10)


class TestEstimatorRanges:
    def test_outage_in_unit_interval(self):
        links, primary, policy = fig4_setup()
        est = mc_outage(links, primary, policy, rel_noise_db(3.0), 0.95, 0.9,
                        trials=100_000, seed=13)
        assert 0.0 <= est.mean <= 1.0

    def test_harvest_positive(self):
        links, primary, policy = fig3_setup()
        est = mc_harvest(links, primary, policy, 0, 0.9, trials=100_000, seed=17)
        assert est.mean > 0.0

    def test_clipped_gain_positive(self):
        links, primary, policy = fig3_setup()
        est = mc_clipped_gain(links, primary, policy, 0, 5.0, 100.0,
                              trials=100_000, seed=19)
        assert est.mean > 0.0

    def test_frame_energy_accounts(self):
        m = scenario_from_conf(preset("fig7")).energy_model()
        harv = mc_frame_energy(m, 0, 0.02, trials=100_000, seed=23, harvesting=True)
        bare = mc_frame_energy(m, 0, 0.02, trials=100_000, seed=23, harvesting=False)
        assert harv.mean < bare.mean
