import math

import numpy as np
import pytest
from sklearn.base import clone

from sparc_codes import BroadcastCode, DirtyPaperCode, MacCornerCode, WynerZivCode, awgn
from sparc_codes.core import bin_of, synthesize_codeword
from sparc_codes import theory

from oracles import bin_columns, brute_force_argmin


def _oracle(design, target, scale=1.0, allowed=None):
    lay = design.layout
    return brute_force_argmin(design.entries, lay.M, lay.L, lay.coeff, target, scale, allowed)[0]


@pytest.fixture
def wz():
    return WynerZivCode(n=8, M=8, L=2, m_prime=2, sigma2=1.0, noise=1.0, distortion=0.25,
                        random_state=31).fit()


@pytest.fixture
def dpc():
    return DirtyPaperCode(n=10, M=8, L=2, m_prime=2, power=1.0, noise=1.0, state_var=1.0,
                          alpha=0.5, random_state=37).fit()


def _side_info(n_blocks, n, noise, seed):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n_blocks, n))
    return X, X + math.sqrt(noise) * rng.standard_normal((n_blocks, n))


# Wyner-Ziv


def test_wz_coefficient_and_rates(wz):
    p = wz.params_
    assert wz.layout_.coeff == pytest.approx(math.sqrt((1.0 + p.Q) / 2))
    assert wz.rate_ == pytest.approx(2 * math.log(8) / 8)
    assert wz.inner_rate_ == pytest.approx(2 * math.log(2) / 8)
    assert wz.bin_rate_ == pytest.approx(wz.rate_ - wz.inner_rate_)


def test_wz_single_bin_sends_nothing():
    code = WynerZivCode(n=6, M=4, L=2, m_prime=4, random_state=1).fit()
    X, _ = _side_info(10, 6, 1.0, 2)
    assert np.all(code.transform(X) == 0)
    assert code.bin_rate_ == 0


def test_wz_quantizer_matches_oracle(wz):
    X, _ = _side_info(12, 8, 1.0, 3)
    for x, p, b in zip(X, wz.quantize(X), wz.transform(X)):
        expected = _oracle(wz.design_, x, wz.params_.a)
        np.testing.assert_array_equal(p, expected)
        np.testing.assert_array_equal(b, expected // 2)


def test_wz_decoder_matches_restricted_oracle(wz):
    X, Y = _side_info(12, 8, 1.0, 4)
    B = wz.encode(X)
    for y, b, p in zip(Y, B, wz.decode_codeword(B, Y)):
        expected = _oracle(wz.design_, y, wz.params_.a, bin_columns(b, 2))
        np.testing.assert_array_equal(p, expected)
        np.testing.assert_array_equal(bin_of(p, wz.nest_), b)


def test_wz_combine_is_linear_mmse(wz):
    p = wz.params_
    zero = np.zeros((1, 8))
    np.testing.assert_array_equal(wz.combine(zero, zero), zero)
    u, y = np.ones((1, 8)), 2 * np.ones((1, 8))
    expected = (1 / p.Q + 2 / p.N) / (1 / p.Q + 1 / p.sigma2 + 1 / p.N)
    np.testing.assert_allclose(wz.combine(u, y), expected)


def test_wz_distortion_validation():
    with pytest.raises(ValueError, match="Var\\(X\\|Y\\)"):
        WynerZivCode(sigma2=1.0, noise=1.0, distortion=0.5).fit()
    with pytest.raises(ValueError, match="divide"):
        WynerZivCode(M=8, m_prime=3).fit()


def test_wz_genie_reconstruction_distortion():
    code = WynerZivCode(n=16, M=16, L=2, m_prime=4, random_state=5).fit()
    X, Y = _side_info(300, 16, 1.0, 6)
    U = np.stack([synthesize_codeword(code.design_, p) for p in code.quantize(X)])
    d = ((X - code.combine(U, Y)) ** 2).mean()
    # decoding the wrong codeword inside the bin only adds error on average
    X_hat = code.decode(code.encode(X), Y)
    assert ((X - X_hat) ** 2).mean() >= d - 1e-12
    assert d < code.params_.var_x_given_y


# dirty paper


@pytest.mark.parametrize("alpha", [0.0, 1.0, -0.2, 1.5])
def test_dpc_rejects_alpha_outside_open_interval(alpha):
    with pytest.raises(ValueError):
        DirtyPaperCode(alpha=alpha).fit()


def test_dpc_default_alpha_is_costa():
    code = DirtyPaperCode(power=3.0, noise=1.0, random_state=0).fit()
    assert code.params_.alpha == pytest.approx(0.75)


def test_dpc_coefficient(dpc):
    assert dpc.layout_.coeff == pytest.approx(math.sqrt((1.0 + 0.25) / 2))


def test_dpc_quantizer_matches_restricted_oracle(dpc):
    rng = np.random.default_rng(7)
    S = rng.standard_normal((12, 10))
    B = dpc.sample_bins(12, rng=8)
    for s, b, p in zip(S, B, dpc.quantize(B, S)):
        expected = _oracle(dpc.design_, s, dpc.params_.kappa, bin_columns(b, 2))
        np.testing.assert_array_equal(p, expected)


def test_dpc_decoder_matches_full_oracle(dpc):
    rng = np.random.default_rng(9)
    S = rng.standard_normal((12, 10))
    B = dpc.sample_bins(12, rng=10)
    Y = awgn(dpc.encode(B, S) + S, 1.0, 11)
    scale = 1 + (1 - 0.5) * dpc.params_.kappa
    assert dpc.params_.decode_scale == pytest.approx(scale)
    for y, p, b in zip(Y, dpc.decode_codeword(Y), dpc.predict(Y)):
        expected = _oracle(dpc.design_, y, scale)
        np.testing.assert_array_equal(p, expected)
        np.testing.assert_array_equal(b, expected // 2)


def test_dpc_noiseless_zero_state_recovers_messages():
    code = DirtyPaperCode(n=16, M=8, L=2, m_prime=2, alpha=0.5, random_state=41).fit()
    B = code.sample_bins(40, rng=12)
    S = np.zeros((40, 16))
    np.testing.assert_array_equal(code.predict(code.encode(B, S)), B)


def test_dpc_encoder_output_is_codeword_minus_scaled_state(dpc):
    rng = np.random.default_rng(13)
    S = rng.standard_normal((3, 10))
    B = dpc.sample_bins(3, rng=14)
    U = np.stack([synthesize_codeword(dpc.design_, p) for p in dpc.quantize(B, S)])
    np.testing.assert_allclose(dpc.encode(B, S), U - 0.5 * S)


def test_nesting_duality(wz):
    # same nested layout: wz quantizes over all columns and decodes in a bin, dpc the reverse
    dpc = DirtyPaperCode(n=8, M=8, L=2, m_prime=2, random_state=31).fit()
    np.testing.assert_array_equal(wz.design_.entries, dpc.design_.entries)
    assert wz.nest_.n_bins == dpc.nest_.n_bins == 16


# multiple access


@pytest.fixture
def mac():
    return MacCornerCode(n=8, M1=4, L1=2, M2=2, L2=2, power=1.0, noise=0.2,
                         random_state=43).fit()


def test_mac_codebooks_are_independent(mac):
    assert mac.design1_.seed != mac.design2_.seed
    assert mac.layout1_.coeff == pytest.approx(math.sqrt(0.5))
    assert mac.rates_ == (pytest.approx(2 * math.log(4) / 8), pytest.approx(2 * math.log(2) / 8))


def test_mac_stages_match_oracles(mac):
    m1, m2 = mac.sample_messages(10, rng=15)
    X1, X2 = mac.encode(m1, m2)
    Y = awgn(X1 + X2, 0.2, 16)
    h1, h2 = mac.predict(Y)
    for y, p1, p2 in zip(Y, h1, h2):
        np.testing.assert_array_equal(p1, _oracle(mac.design1_, y))
        residue = y - synthesize_codeword(mac.design1_, p1)
        np.testing.assert_array_equal(p2, _oracle(mac.design2_, residue))


def test_mac_first_stage_exact_without_interference(mac):
    m1, m2 = mac.sample_messages(10, rng=17)
    X1, _ = mac.encode(m1, m2)
    np.testing.assert_array_equal(mac.predict(X1)[0], m1)


def test_mac_transmit_is_seeded(mac):
    m1, m2 = mac.sample_messages(5, rng=18)
    a = mac.transmit(m1, m2, 19)
    b = mac.transmit(m1, m2, 19)
    np.testing.assert_array_equal(a[0], b[0])
    np.testing.assert_array_equal(a[1], b[1])


# broadcast


def test_bc_validation():
    with pytest.raises(ValueError, match="noise1 <= noise2"):
        BroadcastCode(noise1=1.0, noise2=0.5).fit()
    with pytest.raises(ValueError):
        BroadcastCode(alpha=1.0).fit()


def test_bc_noiseless_with_single_weak_codeword():
    code = BroadcastCode(n=8, M1=4, L1=2, M2=1, L2=1, noise1=0.0, noise2=0.0,
                         random_state=47).fit()
    m1, m2 = code.sample_messages(20, rng=20)
    h1, h2 = code.transmit(m1, m2, (1, 2))
    np.testing.assert_array_equal(h1, m1)
    np.testing.assert_array_equal(h2, m2)


def test_bc_stages_match_oracles():
    code = BroadcastCode(n=8, M1=4, L1=2, M2=2, L2=2, random_state=53).fit()
    m1, m2 = code.sample_messages(10, rng=21)
    X = code.encode(m1, m2)
    Y1, Y2 = awgn(X, 0.1, 22), awgn(X, 0.5, 23)
    for y, p in zip(Y2, code.decode_weak(Y2)):
        np.testing.assert_array_equal(p, _oracle(code.design2_, y))
    s2, s1 = code.decode_strong(Y1)
    for y, p2, p1 in zip(Y1, s2, s1):
        np.testing.assert_array_equal(p2, _oracle(code.design2_, y))
        residue = y - synthesize_codeword(code.design2_, p2)
        np.testing.assert_array_equal(p1, _oracle(code.design1_, residue))


def test_bc_power_split():
    code = BroadcastCode(n=8, M1=4, L1=2, M2=2, L2=1, power=2.0, alpha=0.25,
                         random_state=0).fit()
    assert code.layout1_.coeff ** 2 * 2 == pytest.approx(0.5)
    assert code.layout2_.coeff ** 2 * 1 == pytest.approx(1.5)
    assert code.region_bounds() == theory.bc_bounds(2.0, 0.1, 0.5, 0.25)


@pytest.mark.parametrize("est", [
    WynerZivCode(random_state=1), DirtyPaperCode(random_state=1),
    MacCornerCode(random_state=1), BroadcastCode(random_state=1),
])
def test_estimators_clone_deterministically(est):
    a, b = clone(est).fit(), clone(est).fit()
    for name in ("design_", "design1_", "design2_"):
        if hasattr(a, name):
            np.testing.assert_array_equal(getattr(a, name).entries, getattr(b, name).entries)
    assert a.get_params() == est.get_params()
