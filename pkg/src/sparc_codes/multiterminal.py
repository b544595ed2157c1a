"""Binning and superposition with SPARCs.

Wyner-Ziv and dirty-paper coding both use a nested codebook, but in dual
roles: Wyner-Ziv quantizes over the full codebook and decodes inside a bin,
dirty-paper quantizes inside a bin and decodes over the full codebook.
The multiple-access and broadcast codes superpose two independent SPARCs
and decode by successive cancellation.
"""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._seeding import derive_seed, resolve_seed
from ._validation import (
    check_bins,
    check_blocks,
    check_count,
    check_nonnegative,
    check_patterns,
    check_positive,
    check_same_blocks,
)
from .core import (
    NestedLayout,
    SparcLayout,
    bin_of,
    nearest_codeword,
    sample_design_matrix,
    synthesize_codeword,
)
from .p2p import _SparcEstimator, awgn, sample_patterns
from . import theory


class _NestedEstimator(_SparcEstimator):
    def _draw_nested(self, coeff):
        self._draw(coeff)
        self.nest_ = NestedLayout(self.layout_, check_count("m_prime", self.m_prime))
        self.inner_rate_ = self.nest_.inner_rate
        self.bin_rate_ = self.nest_.bin_rate

    def sample_bins(self, n_blocks: int, rng=None) -> np.ndarray:
        """Uniform bin indices (messages), one row per block."""
        check_is_fitted(self, "nest_")
        rng = np.random.default_rng(rng)
        q = self.nest_.n_subsections
        return rng.integers(0, q, size=(n_blocks, self.layout_.L)).astype(np.intp)

    def codewords(self, P):
        """Codewords ``A beta`` for a batch of patterns, one row each."""
        return np.stack([synthesize_codeword(self.design_, p) for p in P]).reshape(
            len(P), self.layout_.n
        )


class WynerZivCode(TransformerMixin, _NestedEstimator):
    """Lossy compression of a Gaussian source with side information at the decoder.

    The encoder quantizes the source over the full codebook (scaled by
    ``a = sigma2 / (sigma2 + Q)``) and sends only the bin of the chosen
    codeword.  The decoder searches that bin for the codeword closest to the
    side information and forms the MMSE estimate of the source from the
    codeword and the side information.

    Parameters
    ----------
    n, M, L : int
    m_prime : int
        Subsection width; must divide ``M``.
    sigma2 : float, default=1.0
        Source variance.
    noise : float, default=1.0
        Variance of the side-information noise ``Y - X``.
    distortion : float, default=0.25
        Target distortion, below ``Var(X|Y)``.
    random_state : int or None

    Attributes
    ----------
    params_ : WzParams
    nest_ : NestedLayout
    design_ : DesignMatrix
    """

    def __init__(
        self, n=16, M=4, L=2, m_prime=2, sigma2=1.0, noise=1.0, distortion=0.25,
        random_state=None,
    ):
        self.n = n
        self.M = M
        self.L = L
        self.m_prime = m_prime
        self.sigma2 = sigma2
        self.noise = noise
        self.distortion = distortion
        self.random_state = random_state

    def fit(self, X=None, y=None):
        self.params_ = theory.wz_params(self.sigma2, self.noise, self.distortion)
        L = check_count("L", self.L)
        self._draw_nested(math.sqrt(self.params_.codeword_power / L))
        self._check_X_width(X)
        return self

    def quantize(self, X):
        """Full-codebook patterns minimizing ``||x - a A beta||^2``."""
        check_is_fitted(self, "nest_")
        X = check_blocks(X, self.n)
        a = self.params_.a
        out = np.empty((X.shape[0], self.layout_.L), dtype=np.intp)
        for i, x in enumerate(X):
            out[i] = nearest_codeword(self.design_, x, scale=a)
        return out

    def transform(self, X):
        """Bin index of each block's quantized codeword."""
        return np.array([bin_of(p, self.nest_) for p in self.quantize(X)], dtype=np.intp).reshape(
            -1, self.layout_.L
        )

    encode = transform

    def decode_codeword(self, bins, Y):
        """Patterns inside each bin closest (after scaling by ``a``) to ``Y``."""
        check_is_fitted(self, "nest_")
        B = check_bins(bins, self.nest_)
        Y = check_blocks(Y, self.n, "Y")
        check_same_blocks(B, Y, ("bins", "Y"))
        a = self.params_.a
        out = np.empty_like(B)
        for i, (b, y) in enumerate(zip(B, Y)):
            out[i] = nearest_codeword(self.design_, y, scale=a, restriction=(self.nest_, b))
        return out

    def combine(self, U, Y):
        """MMSE estimate of the source from codeword ``U`` and side information ``Y``."""
        check_is_fitted(self, "params_")
        U = np.asarray(U, dtype=float)
        Y = np.asarray(Y, dtype=float)
        if U.shape != Y.shape:
            raise ValueError(f"U and Y shapes differ: {U.shape} vs {Y.shape}")
        p = self.params_
        precision = 1.0 / p.Q + 1.0 / p.sigma2 + 1.0 / p.N
        return (U / p.Q + Y / p.N) / precision

    def decode(self, bins, Y):
        """Reconstruct the source blocks from bin indices and side information."""
        U = self.codewords(self.decode_codeword(bins, Y))
        return self.combine(U, check_blocks(Y, self.n, "Y"))


class DirtyPaperCode(_NestedEstimator):
    """Costa dirty-paper coding: messages index bins of a nested SPARC.

    To send a message the encoder quantizes the known state ``s`` with the
    codewords of the message's bin (scaled by ``kappa``) and transmits
    ``U - alpha s``.  The decoder searches the full codebook, scaled by
    ``1 + (1 - alpha) kappa``, and reads off the bin.

    Parameters
    ----------
    n, M, L, m_prime : int
    power : float, default=1.0
    noise : float, default=1.0
    state_var : float, default=1.0
        Variance of the interference known to the encoder.
    alpha : float or None, default=None
        Costa parameter in (0, 1); ``None`` uses ``power / (power + noise)``.
    random_state : int or None
    """

    def __init__(
        self, n=16, M=4, L=2, m_prime=2, power=1.0, noise=1.0, state_var=1.0, alpha=None,
        random_state=None,
    ):
        self.n = n
        self.M = M
        self.L = L
        self.m_prime = m_prime
        self.power = power
        self.noise = noise
        self.state_var = state_var
        self.alpha = alpha
        self.random_state = random_state

    def fit(self, X=None, y=None):
        alpha = self.alpha
        if alpha is None:
            alpha = theory.costa_alpha(self.power, self.noise)
        self.params_ = theory.dpc_params(self.power, self.noise, self.state_var, alpha)
        L = check_count("L", self.L)
        self._draw_nested(math.sqrt(self.params_.codeword_power / L))
        self._check_X_width(X)
        return self

    def quantize(self, bins, S):
        """In-bin patterns minimizing ``||s - kappa A_bin beta||^2``."""
        check_is_fitted(self, "nest_")
        B = check_bins(bins, self.nest_, "messages")
        S = check_blocks(S, self.n, "S")
        check_same_blocks(B, S, ("messages", "S"))
        kappa = self.params_.kappa
        out = np.empty_like(B)
        for i, (b, s) in enumerate(zip(B, S)):
            out[i] = nearest_codeword(self.design_, s, scale=kappa, restriction=(self.nest_, b))
        return out

    def encode(self, bins, S):
        """Channel inputs ``U - alpha s`` for messages ``bins`` and states ``S``."""
        U = self.codewords(self.quantize(bins, S))
        return U - self.params_.alpha * check_blocks(S, self.n, "S")

    def decode_codeword(self, Y):
        check_is_fitted(self, "nest_")
        Y = check_blocks(Y, self.n, "Y")
        scale = self.params_.decode_scale
        out = np.empty((Y.shape[0], self.layout_.L), dtype=np.intp)
        for i, y in enumerate(Y):
            out[i] = nearest_codeword(self.design_, y, scale=scale)
        return out

    def predict(self, Y):
        """Decoded message bins."""
        P = self.decode_codeword(Y)
        return np.array([bin_of(p, self.nest_) for p in P], dtype=np.intp).reshape(P.shape)

    decode = predict


class _TwoUserEstimator(BaseEstimator):
    def _draw_pair(self, coeff1, coeff2):
        n = check_count("n", self.n)
        self.seed_ = resolve_seed(self.random_state)
        self.layout1_ = SparcLayout(n, check_count("M1", self.M1), check_count("L1", self.L1), coeff1)
        self.layout2_ = SparcLayout(n, check_count("M2", self.M2), check_count("L2", self.L2), coeff2)
        # independent codebooks for the two users
        self.design1_ = sample_design_matrix(self.layout1_, derive_seed(self.seed_, 1))
        self.design2_ = sample_design_matrix(self.layout2_, derive_seed(self.seed_, 2))
        self.rates_ = (self.layout1_.rate, self.layout2_.rate)
        self.n_features_in_ = n

    def sample_messages(self, n_blocks: int, rng=None):
        check_is_fitted(self, "design1_")
        rng = np.random.default_rng(rng)
        return (
            sample_patterns(self.layout1_, n_blocks, rng),
            sample_patterns(self.layout2_, n_blocks, rng),
        )

    def _encode_users(self, m1, m2):
        check_is_fitted(self, "design1_")
        P1 = check_patterns(m1, self.layout1_, "m1")
        P2 = check_patterns(m2, self.layout2_, "m2")
        check_same_blocks(P1, P2, ("m1", "m2"))
        n = self.layout1_.n
        X1 = np.stack([synthesize_codeword(self.design1_, p) for p in P1]).reshape(len(P1), n)
        X2 = np.stack([synthesize_codeword(self.design2_, p) for p in P2]).reshape(len(P2), n)
        return X1, X2

    def _cancel_decode(self, y, first, second):
        """Decode ``first`` treating the rest as noise, subtract it, decode ``second``."""
        p_first = nearest_codeword(first, y)
        residue = y - synthesize_codeword(first, p_first)
        return p_first, nearest_codeword(second, residue)


class MacCornerCode(_TwoUserEstimator):
    """Two-user Gaussian multiple-access code at a corner of the capacity region.

    Both users send SPARC codewords with coefficients ``sqrt(power / L)``.
    The receiver decodes user 1 treating user 2 as noise, subtracts it and
    decodes user 2 from the residue.
    """

    def __init__(self, n=16, M1=4, L1=2, M2=4, L2=2, power=1.0, noise=1.0, random_state=None):
        self.n = n
        self.M1 = M1
        self.L1 = L1
        self.M2 = M2
        self.L2 = L2
        self.power = power
        self.noise = noise
        self.random_state = random_state

    def fit(self, X=None, y=None):
        P = check_positive("power", self.power)
        check_nonnegative("noise", self.noise)
        L1 = check_count("L1", self.L1)
        L2 = check_count("L2", self.L2)
        self._draw_pair(math.sqrt(P / L1), math.sqrt(P / L2))
        return self

    def encode(self, m1, m2):
        """Per-user channel inputs ``(X1, X2)``."""
        return self._encode_users(m1, m2)

    def predict(self, Y):
        """Successive-cancellation decode; returns ``(m1_hat, m2_hat)``."""
        check_is_fitted(self, "design1_")
        Y = check_blocks(Y, self.n, "Y")
        out1 = np.empty((len(Y), self.layout1_.L), dtype=np.intp)
        out2 = np.empty((len(Y), self.layout2_.L), dtype=np.intp)
        for i, y in enumerate(Y):
            out1[i], out2[i] = self._cancel_decode(y, self.design1_, self.design2_)
        return out1, out2

    decode = predict

    def transmit(self, m1, m2, noise_seed: int):
        """Send one block per row through the channel and decode it."""
        X1, X2 = self.encode(m1, m2)
        Y = awgn(X1 + X2, self.noise, noise_seed)
        return self.predict(Y)

    def corner(self):
        return theory.mac_corner(self.power, self.noise)


class BroadcastCode(_TwoUserEstimator):
    """Two-receiver degraded Gaussian broadcast code by superposition.

    User 1 (the stronger receiver, noise ``noise1``) gets power fraction
    ``alpha``, user 2 the rest.  Receiver 2 decodes its own message treating
    user 1 as noise; receiver 1 first decodes and cancels user 2's codeword,
    then decodes its own.
    """

    def __init__(
        self, n=16, M1=4, L1=2, M2=4, L2=2, power=1.0, noise1=0.1, noise2=0.5, alpha=0.5,
        random_state=None,
    ):
        self.n = n
        self.M1 = M1
        self.L1 = L1
        self.M2 = M2
        self.L2 = L2
        self.power = power
        self.noise1 = noise1
        self.noise2 = noise2
        self.alpha = alpha
        self.random_state = random_state

    def fit(self, X=None, y=None):
        P = check_positive("power", self.power)
        N1 = check_nonnegative("noise1", self.noise1)
        N2 = check_nonnegative("noise2", self.noise2)
        if N1 > N2:
            raise ValueError(f"broadcast requires noise1 <= noise2, got {N1} > {N2}")
        alpha = float(self.alpha)
        if not 0.0 < alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1) so both users carry power, got {alpha}")
        L1 = check_count("L1", self.L1)
        L2 = check_count("L2", self.L2)
        self._draw_pair(math.sqrt(alpha * P / L1), math.sqrt((1.0 - alpha) * P / L2))
        return self

    def encode(self, m1, m2):
        """Superposed channel input ``A1 beta1 + A2 beta2``."""
        X1, X2 = self._encode_users(m1, m2)
        return X1 + X2

    def decode_weak(self, Y2):
        """Receiver 2's estimate of user 2's message."""
        check_is_fitted(self, "design2_")
        Y2 = check_blocks(Y2, self.n, "Y2")
        return np.stack([nearest_codeword(self.design2_, y) for y in Y2]).reshape(
            len(Y2), self.layout2_.L
        )

    def decode_strong(self, Y1):
        """Receiver 1's estimates ``(m2_hat, m1_hat)``: user 2 first, then user 1."""
        check_is_fitted(self, "design1_")
        Y1 = check_blocks(Y1, self.n, "Y1")
        out2 = np.empty((len(Y1), self.layout2_.L), dtype=np.intp)
        out1 = np.empty((len(Y1), self.layout1_.L), dtype=np.intp)
        for i, y in enumerate(Y1):
            out2[i], out1[i] = self._cancel_decode(y, self.design2_, self.design1_)
        return out2, out1

    def transmit(self, m1, m2, noise_seeds):
        """Send blocks to both receivers; returns ``(m1_hat at rx 1, m2_hat at rx 2)``."""
        seed1, seed2 = noise_seeds
        X = self.encode(m1, m2)
        Y1 = awgn(X, self.noise1, seed1)
        Y2 = awgn(X, self.noise2, seed2)
        _, m1_hat = self.decode_strong(Y1)
        return m1_hat, self.decode_weak(Y2)

    def region_bounds(self):
        return theory.bc_bounds(self.power, self.noise1, self.noise2, self.alpha)
