"""Closed-form rates, thresholds and capacity regions (natural logarithms)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from scipy.optimize import bisect

_XTOL = 1e-10
NATS_PER_BIT = math.log(2.0)


def _positive(**kwargs):
    for name, value in kwargs.items():
        if not (value > 0 and math.isfinite(value)):
            raise ValueError(f"{name} must be > 0, got {value}")


def to_bits(rate_nats: float) -> float:
    return rate_nats / NATS_PER_BIT


def rd_rate(sigma2: float, D: float) -> float:
    """Gaussian rate-distortion function ``0.5 ln(sigma2 / D)``."""
    _positive(sigma2=sigma2, D=D)
    if D > sigma2:
        raise ValueError(f"D must be <= sigma2, got D={D}, sigma2={sigma2}")
    return 0.5 * math.log(sigma2 / D)


def _x_star_equation(x: float) -> float:
    return 1.0 + 0.5 * math.log(x) - x


def _v_star_equation(v: float) -> float:
    return (1.0 + v) * math.log1p(v) - 3.0 * v


def solve_x_star() -> float:
    return bisect(_x_star_equation, 1e-3, 1.0 - 1e-3, xtol=_XTOL)


def solve_v_star() -> float:
    return bisect(_v_star_equation, 1.0, 100.0, xtol=_XTOL)


@lru_cache(maxsize=None)
def x_star() -> float:
    """Root in (0, 1) of ``1 + 0.5 ln x = x`` (about 0.2032)."""
    return solve_x_star()


@lru_cache(maxsize=None)
def v_star() -> float:
    """Root in (1, 100) of ``(1 + v) ln(1 + v) = 3v`` (about 15.8)."""
    return solve_v_star()


def rsp_rate(sigma2: float, D: float) -> float:
    """Smallest rate at which minimum-distance SPARC quantization is guaranteed."""
    _positive(sigma2=sigma2, D=D)
    if not D < sigma2:
        raise ValueError(f"D must be < sigma2, got D={D}, sigma2={sigma2}")
    return max(0.5 * math.log(sigma2 / D), 1.0 - D / sigma2)


def b1_min(R: float, sigma2: float, D: float) -> float:
    """Lower bound on the exponent ``b`` (with ``M = L**b``) for source coding."""
    if not R > rsp_rate(sigma2, D):
        raise ValueError("R must exceed rsp_rate(sigma2, D)")
    return 2.5 * R / (R - 1.0 + D / sigma2)


def awgn_capacity(v: float) -> float:
    _positive(v=v)
    return 0.5 * math.log1p(v)


def b0(v: float) -> float:
    """Lower bound on ``b`` for channel coding at signal-to-noise ratio ``v``."""
    _positive(v=v)
    g = (1.0 + v) * math.log1p(v)
    if v < v_star():
        return 4.0 * v * g / (g - v) ** 2
    return g / (g - 2.0 * v)


def costa_alpha(P: float, N: float) -> float:
    _positive(P=P, N=N)
    return P / (P + N)


@dataclass(frozen=True)
class WzParams:
    """Wyner-Ziv test-channel parameters for a Gaussian source with noisy side information.

    ``var_x_given_y`` is the conditional variance of the source given the
    side information, ``Q`` the variance of the auxiliary noise, ``a`` the
    quantizer scaling and ``snr`` the signal-to-noise ratio of the decoder's
    within-bin channel decoding problem.
    """

    sigma2: float
    N: float
    D: float
    var_x_given_y: float
    Q: float
    a: float
    snr: float
    D_star: float
    R1_min: float
    R2_max: float

    @property
    def codeword_power(self) -> float:
        """Expected codeword power ``sigma2 + Q``, split evenly over sections."""
        return self.sigma2 + self.Q

    @property
    def wz_rate(self) -> float:
        return 0.5 * math.log(self.var_x_given_y / self.D)

    @property
    def quantizer_distortion(self) -> float:
        """Distortion the encoder must hit, ``sigma2 Q / (sigma2 + Q)``."""
        return self.sigma2 * self.Q / (self.sigma2 + self.Q)

    def b_min(self, R1: float, R2: float) -> float:
        frac = self.sigma2 / (self.sigma2 + self.Q)
        if not R1 > frac or not R2 > 0:
            raise ValueError("b_min needs R1 > sigma2/(sigma2+Q) and R2 > 0")
        return max(2.5 * R1 / (R1 - frac), R1 / R2 * b0(self.snr))


def wz_params(sigma2: float, N: float, D: float) -> WzParams:
    _positive(sigma2=sigma2, N=N, D=D)
    var = sigma2 * N / (sigma2 + N)
    if not D < var:
        raise ValueError(f"D must be < Var(X|Y) = {var:.6g}, got D={D}")
    Q = var * D / (var - D)
    a = sigma2 / (sigma2 + Q)
    snr = sigma2**2 / (sigma2 * Q + (sigma2 + Q) * N)
    xs = x_star()
    return WzParams(
        sigma2=sigma2,
        N=N,
        D=D,
        var_x_given_y=var,
        Q=Q,
        a=a,
        snr=snr,
        D_star=xs * sigma2 / (1.0 + xs * sigma2 / N),
        R1_min=max(0.5 * math.log((sigma2 + Q) / Q), sigma2 / (sigma2 + Q)),
        R2_max=0.5 * math.log1p(snr),
    )


@dataclass(frozen=True)
class DpcParams:
    """Dirty-paper parameters: Costa scaling ``alpha``, reverse-channel ``kappa``,
    and the decoder's effective signal-to-noise ratio ``snr``."""

    P: float
    N: float
    sigma_s2: float
    alpha: float
    kappa: float
    snr: float
    R1_max: float
    R2_min: float

    @property
    def codeword_power(self) -> float:
        return self.P + self.alpha**2 * self.sigma_s2

    @property
    def decode_scale(self) -> float:
        return 1.0 + (1.0 - self.alpha) * self.kappa

    @property
    def quantizer_distortion(self) -> float:
        """Target state-quantization distortion ``P sigma_s2 / (P + alpha^2 sigma_s2)``."""
        return self.P * self.sigma_s2 / self.codeword_power

    @property
    def corollary_condition(self) -> bool:
        """Whether ``P sigma_s2 / (P + N)^2 >= 1/x* - 1``."""
        return dpc_capacity_condition(self.P, self.N, self.sigma_s2)

    def b_min(self, R1: float, R2: float) -> float:
        frac = self.alpha**2 * self.sigma_s2 / self.codeword_power
        if not R2 > frac:
            raise ValueError("b_min needs R2 > alpha^2 sigma_s2 / (P + alpha^2 sigma_s2)")
        return max(2.5 * R1 / (R2 - frac), b0(self.snr))


def dpc_capacity_condition(P: float, N: float, sigma_s2: float) -> bool:
    _positive(P=P, N=N, sigma_s2=sigma_s2)
    return P * sigma_s2 / (P + N) ** 2 >= 1.0 / x_star() - 1.0


def dpc_params(P: float, N: float, sigma_s2: float, alpha: float) -> DpcParams:
    _positive(P=P, N=N, sigma_s2=sigma_s2)
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    u_var = P + alpha**2 * sigma_s2
    kappa = alpha * sigma_s2 / u_var
    x_prime_var = P * sigma_s2 / u_var
    gain = 1.0 + (1.0 - alpha) * kappa
    snr = gain**2 * u_var / ((1.0 - alpha) ** 2 * x_prime_var + N)
    return DpcParams(
        P=P,
        N=N,
        sigma_s2=sigma_s2,
        alpha=alpha,
        kappa=kappa,
        snr=snr,
        R1_max=0.5 * math.log1p(snr),
        R2_min=max(0.5 * math.log1p(alpha**2 * sigma_s2 / P), alpha**2 * sigma_s2 / u_var),
    )


def mac_corner(P: float, N: float) -> tuple:
    """Corner rate pair reached by decoding user 1 first."""
    _positive(P=P, N=N)
    return 0.5 * math.log1p(P / (P + N)), 0.5 * math.log1p(P / N)


def mac_region_contains(R1: float, R2: float, P: float, N: float) -> bool:
    _positive(P=P, N=N)
    single = 0.5 * math.log1p(P / N)
    return R1 < single and R2 < single and R1 + R2 < 0.5 * math.log1p(2.0 * P / N)


def bc_bounds(P: float, N1: float, N2: float, alpha: float) -> tuple:
    """Rate bounds for the stronger (1) and weaker (2) receivers under power split ``alpha``."""
    _positive(P=P, N1=N1, N2=N2)
    if N1 > N2:
        raise ValueError(f"broadcast requires N1 <= N2, got N1={N1}, N2={N2}")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    return (
        0.5 * math.log1p(alpha * P / N1),
        0.5 * math.log1p((1.0 - alpha) * P / (alpha * P + N2)),
    )


def bc_region_contains(R1: float, R2: float, P: float, N1: float, N2: float, alpha: float) -> bool:
    c1, c2 = bc_bounds(P, N1, N2, alpha)
    return R1 < c1 and R2 < c2
