import numpy as np
import pytest

from fifogrand.channel import (ChannelParams, compute_llrs, ebn0_to_sigma2,
                               hard_demod, modulate, transmit, trial_rng)


class TestEbn0ToSigma2:
    def test_zero_db_rate_one(self):
        assert ebn0_to_sigma2(0.0, 1.0) == pytest.approx(1.0)

    def test_zero_db_rate_234_256(self):
        # 1 / (234/256) computed by hand
        assert ebn0_to_sigma2(0.0, 234 / 256) == pytest.approx(256 / 234)
        assert ebn0_to_sigma2(0.0, 234 / 256) == pytest.approx(1.09402, abs=1e-5)

    def test_three_db_halves(self):
        assert ebn0_to_sigma2(10 * np.log10(2), 1.0) == pytest.approx(0.5)

    def test_rejects_nonpositive_rate(self):
        with pytest.raises(ValueError):
            ebn0_to_sigma2(0.0, 0.0)

    def test_params_carry_invariant(self):
        params = ChannelParams.from_ebn0(2.5, 0.5)
        assert params.sigma2 == pytest.approx(1 / (0.5 * 10 ** 0.25))


class TestModulate:
    def test_zero_codeword(self):
        assert np.array_equal(modulate(np.zeros(5, dtype=np.uint8)), np.ones(5))

    def test_example(self):
        out = modulate(np.array([0, 1, 1, 0], dtype=np.uint8))
        assert np.array_equal(out, [1.0, -1.0, -1.0, 1.0])

    def test_noiseless_roundtrip(self):
        rng = np.random.default_rng(0)
        bits = rng.integers(0, 2, 64, dtype=np.uint8)
        assert np.array_equal(hard_demod(modulate(bits)), bits)


class TestTransmit:
    def test_vanishing_noise(self):
        symbols = modulate(np.array([0, 1, 0, 1], dtype=np.uint8))
        out = transmit(symbols, 1e-12, np.random.default_rng(0))
        assert np.max(np.abs(out - symbols)) < 1e-4

    def test_noise_statistics(self):
        sigma2 = 0.7
        noise = transmit(np.zeros(10**6), sigma2, np.random.default_rng(42))
        sigma = np.sqrt(sigma2)
        assert abs(noise.mean()) < 4 * sigma / 1000
        assert noise.var() == pytest.approx(sigma2, rel=0.01)

    def test_deterministic_given_seed(self):
        symbols = np.ones(100)
        a = transmit(symbols, 0.5, np.random.default_rng(7))
        b = transmit(symbols, 0.5, np.random.default_rng(7))
        assert np.array_equal(a, b)

    def test_rejects_nonpositive_sigma2(self):
        with pytest.raises(ValueError):
            transmit(np.ones(4), 0.0, np.random.default_rng(0))


class TestComputeLlrs:
    def test_unit_scaling(self):
        block = compute_llrs(np.array([1.0, -1.0]), 2.0)
        assert np.array_equal(block.llrs, [1.0, -1.0])

    def test_half_sigma(self):
        block = compute_llrs(np.array([0.5]), 0.5)
        assert block.llrs[0] == pytest.approx(2.0)

    def test_sign_preserved(self):
        rng = np.random.default_rng(1)
        y = rng.normal(0, 1, 200)
        block = compute_llrs(y, 0.37)
        assert np.array_equal(np.sign(block.llrs), np.sign(y))

    def test_arrival_index_recorded(self):
        assert compute_llrs(np.zeros(3), 1.0, arrival_index=17).arrival_index == 17


class TestHardDemod:
    def test_example(self):
        assert np.array_equal(hard_demod(np.array([0.7, -0.3])), [0, 1])

    def test_zero_ties_to_zero(self):
        assert np.array_equal(hard_demod(np.array([0.0])), [0])

    def test_llr_scaling_invariance(self):
        rng = np.random.default_rng(2)
        y = rng.normal(0, 1, 500)
        for sigma2 in (0.1, 1.0, 5.0):
            block = compute_llrs(y, sigma2)
            assert np.array_equal(hard_demod(block.llrs), hard_demod(y))


class TestTrialRng:
    def test_repeatable(self):
        a = trial_rng(5, 3).standard_normal(8)
        b = trial_rng(5, 3).standard_normal(8)
        assert np.array_equal(a, b)

    def test_streams_differ(self):
        draws = {tuple(trial_rng(5, i, s).standard_normal(4))
                 for i in range(4) for s in range(2)}
        assert len(draws) == 8
