"""Pilot observation synthesis and SNR calibration."""

import numpy as np
import numpy.testing as npt
import pytest

from fas_che import (ArrayGeometry, sample_ssc_channel, sequential_schedule,
                     sigma_for_snr, stack, synthesize_observation)


def full_selector(n):
    return stack(sequential_schedule(n, n, 1))


class TestSynthesizeObservation:

    def test_noiseless_is_exact_selection(self):
        sel = stack(sequential_schedule(8, 2, 3))
        h = np.arange(8) + 1j * np.arange(8)[::-1]
        obs = synthesize_observation(h, sel, sigma=0.0, sweep_count=1)
        assert np.array_equal(obs.snapshots[0], sel.apply(h))

    def test_noise_variance_matches_sigma(self):
        # Monte-Carlo variance oracle on a zero channel
        sel = full_selector(8)
        rng = np.random.default_rng(31)
        sigma = 0.37
        obs = synthesize_observation(np.zeros(8), sel, sigma, sweep_count=10_000, rng=rng)
        per_entry = np.mean(np.abs(obs.snapshots) ** 2, axis=0)
        npt.assert_allclose(per_entry, sigma, rtol=0.05)

    def test_noise_split_between_parts(self):
        sel = full_selector(4)
        rng = np.random.default_rng(32)
        obs = synthesize_observation(np.zeros(4), sel, 1.0, sweep_count=20_000, rng=rng)
        npt.assert_allclose(np.var(obs.snapshots.real), 0.5, rtol=0.05)
        npt.assert_allclose(np.var(obs.snapshots.imag), 0.5, rtol=0.05)

    def test_noise_is_white(self):
        # cross-covariance of distinct entries within 5 standard errors of zero
        sel = full_selector(4)
        rng = np.random.default_rng(33)
        t = 10_000
        obs = synthesize_observation(np.zeros(4), sel, 1.0, sweep_count=t, rng=rng)
        y = obs.snapshots
        bound = 5.0 / np.sqrt(t)
        for i in range(4):
            for j in range(4):
                if i != j:
                    assert abs(np.mean(y[:, i] * np.conj(y[:, j]))) < bound

    def test_deterministic_given_seed(self):
        sel = full_selector(6)
        h = np.ones(6, dtype=complex)
        a = synthesize_observation(h, sel, 0.5, 3, np.random.default_rng(9))
        b = synthesize_observation(h, sel, 0.5, 3, np.random.default_rng(9))
        assert np.array_equal(a.snapshots, b.snapshots)

    def test_rejects_negative_sigma(self):
        with pytest.raises(ValueError):
            synthesize_observation(np.ones(4), full_selector(4), -1.0)

    def test_snapshot_shape(self):
        sel = stack(sequential_schedule(8, 2, 3))
        obs = synthesize_observation(np.ones(8, dtype=complex), sel, 0.1, 5,
                                     np.random.default_rng(1))
        assert obs.snapshots.shape == (5, 6)
        assert obs.sweep_count == 5


class TestSigmaForSnr:

    def test_unit_power_at_zero_db(self):
        h = np.ones(4)  # ||h||^2 / N = 1
        assert sigma_for_snr(h, 0.0) == pytest.approx(1.0)

    def test_unit_power_at_ten_db(self):
        assert sigma_for_snr(np.ones(4), 10.0) == pytest.approx(0.1)

    def test_model_normalization_default(self):
        assert sigma_for_snr(None, 20.0) == pytest.approx(0.01)

    def test_ensemble_average_matches_model(self):
        # relies on the clustered model's E[||h||^2] = N oracle
        geom = ArrayGeometry(16, 2.0)
        rng = np.random.default_rng(41)
        ensemble = np.array([sample_ssc_channel(geom, 3, 5, 0.09, rng).h
                             for _ in range(10_000)])
        sigma = sigma_for_snr(ensemble, 7.0)
        assert abs(sigma / 10 ** (-0.7) - 1.0) < 0.05

    def test_strictly_decreasing_in_snr(self):
        values = [sigma_for_snr(None, s) for s in np.linspace(-10, 30, 41)]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_rejects_zero_power(self):
        with pytest.raises(ValueError):
            sigma_for_snr(np.zeros(4), 10.0)
