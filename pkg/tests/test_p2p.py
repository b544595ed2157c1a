import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from sparc_codes import SparcChannelCode, SparcQuantizer, awgn, distortion
from sparc_codes.core import synthesize_codeword
from sparc_codes.harness import ExperimentConfig, run_experiment

from oracles import all_patterns, brute_force_argmin, codewords


@pytest.fixture
def quantizer():
    return SparcQuantizer(n=8, M=4, L=2, sigma2=1.0, distortion=0.3, random_state=17).fit()


@pytest.fixture
def channel():
    return SparcChannelCode(n=8, M=4, L=2, power=2.0, noise=0.5, random_state=23).fit()


def test_distortion_examples():
    x = np.array([1.0, -2.0, 0.5])
    assert distortion(x, x) == 0
    assert distortion([1, 1], [0, 0]) == 1
    y = np.array([0.2, 0.1, -0.3])
    assert distortion(3 * x, 3 * y) == pytest.approx(9 * distortion(x, y))
    with pytest.raises(ValueError):
        distortion([1, 2], [1])


def test_quantizer_coefficient(quantizer):
    assert quantizer.layout_.coeff == pytest.approx(math.sqrt((1.0 - 0.3) / 2))
    assert quantizer.rate_ == pytest.approx(2 * math.log(4) / 8)


def test_quantizer_encodes_codeword_exactly(quantizer):
    p = np.array([[3, 1]])
    x = quantizer.inverse_transform(p)
    np.testing.assert_array_equal(quantizer.transform(x), p)


def test_quantizer_matches_oracle_and_is_optimal(quantizer):
    A = quantizer.design_
    X = np.random.default_rng(1).standard_normal((15, 8))
    P = quantizer.transform(X)
    book = codewords(A.entries, 4, A.layout.coeff, all_patterns(4, 2))
    for x, p in zip(X, P):
        expected, dist = brute_force_argmin(A.entries, 4, 2, A.layout.coeff, x)
        np.testing.assert_array_equal(p, expected)
        achieved = distortion(x, synthesize_codeword(A, p))
        assert achieved == pytest.approx(dist.min() / 8)
        assert all(achieved <= distortion(x, c) + 1e-12 for c in book)


def test_quantizer_validation():
    with pytest.raises(ValueError, match="distortion must be < sigma2"):
        SparcQuantizer(n=4, M=2, L=2, sigma2=1.0, distortion=1.0).fit()
    q = SparcQuantizer(n=4, M=2, L=2)
    with pytest.raises(NotFittedError):
        q.transform(np.zeros((1, 4)))
    q.fit()
    with pytest.raises(ValueError):
        q.transform(np.zeros((1, 5)))


def test_sklearn_params_round_trip(quantizer):
    params = quantizer.get_params()
    assert params == dict(n=8, M=4, L=2, sigma2=1.0, distortion=0.3, random_state=17)
    twin = clone(quantizer).fit()
    np.testing.assert_array_equal(twin.design_.entries, quantizer.design_.entries)
    other = clone(quantizer).set_params(random_state=18).fit()
    assert not np.array_equal(other.design_.entries, quantizer.design_.entries)


def test_fit_transform(quantizer):
    X = np.random.default_rng(4).standard_normal((3, 8))
    np.testing.assert_array_equal(clone(quantizer).fit_transform(X), quantizer.transform(X))


def test_random_state_none_draws_a_seed():
    a = SparcQuantizer(n=4, M=2, L=2).fit()
    assert isinstance(a.seed_, int)
    with pytest.raises(TypeError):
        SparcQuantizer(n=4, M=2, L=2, random_state=np.random.default_rng(0)).fit()


def test_channel_coefficient(channel):
    assert channel.layout_.coeff == pytest.approx(1.0)
    assert channel.capacity() == pytest.approx(0.5 * math.log(5))


def test_noiseless_channel_round_trip(channel):
    msgs = channel.sample_messages(20, rng=3)
    X = channel.encode(msgs)
    np.testing.assert_array_equal(channel.predict(awgn(X, 0.0, 5)), msgs)


def test_channel_decoder_matches_oracle(channel):
    A = channel.design_
    msgs = channel.sample_messages(15, rng=6)
    Y = awgn(channel.encode(msgs), 0.5, 99)
    for y, p in zip(Y, channel.predict(Y)):
        expected, _ = brute_force_argmin(A.entries, 4, 2, A.layout.coeff, y)
        np.testing.assert_array_equal(p, expected)


def test_awgn_noise_is_seeded():
    x = np.zeros(10_000)
    y1, y2 = awgn(x, 2.0, 7), awgn(x, 2.0, 7)
    np.testing.assert_array_equal(y1, y2)
    assert abs(y1.var() - 2.0) < 0.1
    with pytest.raises(ValueError):
        awgn(x, -1.0, 0)


def test_messages_cover_codebook_uniformly(channel):
    msgs = channel.sample_messages(16_000, rng=0)
    counts = np.bincount(msgs[:, 0] * 4 + msgs[:, 1], minlength=16)
    # each of the 16 messages expects 1000 draws; 5 sigma is about 150
    assert np.all(np.abs(counts - 1000) < 150)


def _snr_for(rate, fraction):
    return math.expm1(2 * rate / fraction)


def test_error_rate_lower_well_below_capacity():
    n, M, L = 8, 8, 2
    R = L * math.log(M) / n
    low = run_experiment(ExperimentConfig(
        scheme="awgn", n=n, M=M, L=L, power=1.0, noise=1 / _snr_for(R, 0.4), trials=2000, seed=3))
    high = run_experiment(ExperimentConfig(
        scheme="awgn", n=n, M=M, L=L, power=1.0, noise=1 / _snr_for(R, 0.9), trials=2000, seed=3))
    assert low.block_error_rate < high.block_error_rate


def test_distortion_non_increasing_in_rate():
    stats = [
        run_experiment(ExperimentConfig(
            scheme="rd", n=8, M=M, L=2, sigma2=1.0, dist=0.5, trials=2000, seed=12))
        for M in (2, 4, 8, 16)
    ]
    assert [s.realized_R1 for s in stats] == sorted(s.realized_R1 for s in stats)
    for lo, hi in zip(stats, stats[1:]):
        assert hi.mean_distortion <= lo.mean_distortion + lo.distortion_se


def test_channel_error_non_decreasing_in_rate():
    stats = [
        run_experiment(ExperimentConfig(
            scheme="awgn", n=8, M=M, L=2, power=1.0, noise=0.5, trials=2000, seed=13))
        for M in (2, 4, 8, 16)
    ]
    for lo, hi in zip(stats, stats[1:]):
        assert hi.block_error_rate >= lo.block_error_rate - lo.block_error_se
