"""Point-to-point SPARC codecs: Gaussian source quantizer and AWGN channel code."""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._seeding import resolve_seed
from ._validation import (
    check_blocks,
    check_count,
    check_nonnegative,
    check_patterns,
    check_positive,
)
from .core import SparcLayout, nearest_codeword, sample_design_matrix, synthesize_codeword
from . import theory


def distortion(x, xhat) -> float:
    """Normalized squared error ``(1/n) sum (x_i - xhat_i)^2``."""
    x = np.asarray(x, dtype=float)
    xhat = np.asarray(xhat, dtype=float)
    if x.shape != xhat.shape:
        raise ValueError(f"length mismatch: {x.shape} vs {xhat.shape}")
    return float(np.mean((x - xhat) ** 2))


def awgn(x, N: float, noise_seed: int) -> np.ndarray:
    """Add i.i.d. N(0, N) noise drawn from ``noise_seed``'s own generator."""
    N = check_nonnegative("noise variance", N)
    x = np.asarray(x, dtype=float)
    rng = np.random.default_rng(noise_seed)
    return x + math.sqrt(N) * rng.standard_normal(x.shape)


def sample_patterns(layout: SparcLayout, n_blocks: int, rng) -> np.ndarray:
    """Uniform messages over the codebook via independent per-section draws."""
    rng = np.random.default_rng(rng)
    return rng.integers(0, layout.M, size=(n_blocks, layout.L)).astype(np.intp)


class _SparcEstimator(BaseEstimator):
    """Shared fit logic: validate dimensions and draw the design matrix."""

    def _check_dims(self):
        return (
            check_count("n", self.n),
            check_count("M", self.M),
            check_count("L", self.L),
        )

    def _draw(self, coeff: float):
        n, M, L = self._check_dims()
        self.seed_ = resolve_seed(self.random_state)
        self.layout_ = SparcLayout(n, M, L, coeff)
        self.design_ = sample_design_matrix(self.layout_, self.seed_)
        self.n_features_in_ = n
        self.rate_ = self.layout_.rate

    def _check_X_width(self, X):
        if X is not None:
            check_blocks(X, self.n)


class SparcQuantizer(TransformerMixin, _SparcEstimator):
    """Minimum-distance SPARC quantizer for an i.i.d. Gaussian source.

    Non-zero coefficients equal ``sqrt((sigma2 - distortion) / L)`` so that
    codewords have the power of the ideal reconstruction.

    Parameters
    ----------
    n, M, L : int
        Block length, columns per section and number of sections.
    sigma2 : float, default=1.0
        Source variance.
    distortion : float, default=0.25
        Target mean-squared distortion, ``0 < distortion < sigma2``.
    random_state : int or None
        Seed of the design matrix.

    Attributes
    ----------
    design_ : DesignMatrix
    layout_ : SparcLayout
    rate_ : float
        Realized rate ``L ln M / n``.
    """

    def __init__(self, n=16, M=4, L=2, sigma2=1.0, distortion=0.25, random_state=None):
        self.n = n
        self.M = M
        self.L = L
        self.sigma2 = sigma2
        self.distortion = distortion
        self.random_state = random_state

    def fit(self, X=None, y=None):
        """Draw the codebook.  ``X`` is only checked for its block length."""
        sigma2 = check_positive("sigma2", self.sigma2)
        D = check_positive("distortion", self.distortion)
        if not D < sigma2:
            raise ValueError(f"distortion must be < sigma2, got {D} >= {sigma2}")
        L = check_count("L", self.L)
        self._draw(math.sqrt((sigma2 - D) / L))
        self._check_X_width(X)
        return self

    def transform(self, X):
        """Encode each row of ``X`` to the pattern of its nearest codeword."""
        check_is_fitted(self, "design_")
        X = check_blocks(X, self.n)
        out = np.empty((X.shape[0], self.layout_.L), dtype=np.intp)
        for i, x in enumerate(X):
            out[i] = nearest_codeword(self.design_, x)
        return out

    def inverse_transform(self, patterns):
        """Reconstruct ``A beta`` for each row of ``patterns``."""
        check_is_fitted(self, "design_")
        P = check_patterns(patterns, self.layout_)
        return np.stack([synthesize_codeword(self.design_, p) for p in P]).reshape(
            len(P), self.layout_.n
        )

    def rd_rate(self) -> float:
        return theory.rd_rate(self.sigma2, self.distortion)


class SparcChannelCode(_SparcEstimator):
    """SPARC code for the AWGN channel with exact minimum-distance decoding.

    Non-zero coefficients equal ``sqrt(power / L)``; codewords are sent
    as-is, without power normalization.

    Parameters
    ----------
    n, M, L : int
    power : float, default=1.0
    noise : float, default=1.0
        Channel noise variance, used for :meth:`capacity`.
    random_state : int or None
    """

    def __init__(self, n=16, M=4, L=2, power=1.0, noise=1.0, random_state=None):
        self.n = n
        self.M = M
        self.L = L
        self.power = power
        self.noise = noise
        self.random_state = random_state

    def fit(self, X=None, y=None):
        P = check_positive("power", self.power)
        check_nonnegative("noise", self.noise)
        self._draw(math.sqrt(P / check_count("L", self.L)))
        self._check_X_width(X)
        return self

    def encode(self, messages):
        """Channel inputs ``A beta``, one row per message pattern."""
        check_is_fitted(self, "design_")
        P = check_patterns(messages, self.layout_, "messages")
        return np.stack([synthesize_codeword(self.design_, p) for p in P]).reshape(
            len(P), self.layout_.n
        )

    def predict(self, Y):
        """Minimum-distance decode each received row."""
        check_is_fitted(self, "design_")
        Y = check_blocks(Y, self.n, "Y")
        out = np.empty((Y.shape[0], self.layout_.L), dtype=np.intp)
        for i, y in enumerate(Y):
            out[i] = nearest_codeword(self.design_, y)
        return out

    decode = predict

    def sample_messages(self, n_blocks: int, rng=None) -> np.ndarray:
        check_is_fitted(self, "design_")
        return sample_patterns(self.layout_, n_blocks, rng)

    def capacity(self) -> float:
        if self.noise == 0:
            return math.inf
        return theory.awgn_capacity(self.power / self.noise)
