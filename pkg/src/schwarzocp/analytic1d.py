"""Closed-form one-dimensional convergence rates for two overlapping
intervals (0, s) and (r, 1), 0 < r < s < 1.

For the coupled state/adjoint sweep the per-sweep contraction of the merit
is rho_c = L(r, s) * R(r, s) built from g(z) = sinh^2(z) + sin^2(z) at the
frequency gamma = (sqrt(2)/2) * alpha^(-1/4); for the plain equation it is
rho_e = r(1-s) / (s(1-r)), and for the zeroth-order-shifted equation
-w'' + beta^2 w = 0 it is a ratio of sinh values.  Large arguments are
evaluated in log space: alpha = 1e-8 already puts gamma around 70, where
sinh^2 overflows doubles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

#: switch to the asymptotic form exp(2z)/4 beyond this argument
_LOG_FORM_SWITCH = 20.0


def gamma_of_alpha(alpha: float) -> float:
    """Frequency/decay scale gamma = (sqrt(2)/2) * alpha^(-1/4)."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    return math.sqrt(2.0) / 2.0 * alpha ** -0.25


@dataclass(frozen=True)
class Analytic1DConfig:
    """Interface pair and regularization weight for the 1D closed forms."""

    r: float
    s: float
    alpha: float

    def __post_init__(self):
        if not (0.0 < self.r < self.s < 1.0):
            raise ValueError("need 0 < r < s < 1")
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")

    @property
    def gamma(self) -> float:
        return gamma_of_alpha(self.alpha)


def g(z: float) -> float:
    """sinh^2(z) + sin^2(z) = (cosh(2z) - cos(2z)) / 2; increasing, convex."""
    if z < 0:
        raise ValueError("z must be nonnegative")
    if z < _LOG_FORM_SWITCH:
        return 0.5 * (math.cosh(2.0 * z) - math.cos(2.0 * z))
    return 0.25 * math.exp(2.0 * z)


def log_g(z: float) -> float:
    if z < 0:
        raise ValueError("z must be nonnegative")
    if z < _LOG_FORM_SWITCH:
        val = g(z)
        return math.log(val) if val > 0 else -math.inf
    return 2.0 * z - math.log(4.0)


def _g_ratio(num: float, den: float) -> float:
    """g(num) / g(den), formed in log space when either argument is large."""
    if max(num, den) < _LOG_FORM_SWITCH:
        return g(num) / g(den)
    return math.exp(log_g(num) - log_g(den))


def decay_left(x: float, s: float, gamma: float) -> float:
    """L(x, s): merit transfer from the interface s to the point x in [0, s]."""
    if not 0.0 <= x <= s:
        raise ValueError("need 0 <= x <= s")
    return _g_ratio(gamma * x, gamma * s)


def decay_right(r: float, x: float, gamma: float) -> float:
    """R(r, x): merit transfer from the interface r to the point x in [r, 1]."""
    if not r <= x <= 1.0:
        raise ValueError("need r <= x <= 1")
    return _g_ratio(gamma * (1.0 - x), gamma * (1.0 - r))


def rho_c_gamma(r: float, s: float, gamma: float) -> float:
    """Coupled-sweep rate L(r, s) * R(r, s) at an explicit gamma."""
    if not (0.0 < r < s < 1.0):
        raise ValueError("need 0 < r < s < 1")
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    return decay_left(r, s, gamma) * decay_right(r, s, gamma)


def rho_c(config_or_r, s: float | None = None, alpha: float | None = None) -> float:
    """Coupled-sweep contraction rate; accepts a config or (r, s, alpha)."""
    if isinstance(config_or_r, Analytic1DConfig):
        cfg = config_or_r
    else:
        cfg = Analytic1DConfig(config_or_r, s, alpha)
    return rho_c_gamma(cfg.r, cfg.s, cfg.gamma)


def rho_e(r: float, s: float) -> float:
    """Equation-sweep rate r(1-s) / (s(1-r)); in (0, 1) for 0 < r < s < 1."""
    if not (0.0 < r < s < 1.0):
        raise ValueError("need 0 < r < s < 1")
    return r * (1.0 - s) / (s * (1.0 - r))


def _log_sinh(x: float) -> float:
    # log(sinh x) for x > 0, overflow-safe
    return x + math.log1p(-math.exp(-2.0 * x)) - math.log(2.0)


def rho_e_beta(r: float, s: float, beta: float) -> float:
    """Equation-sweep rate with zeroth-order shift beta^2; beta = 0 gives rho_e."""
    if not (0.0 < r < s < 1.0):
        raise ValueError("need 0 < r < s < 1")
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    if beta == 0.0:
        return rho_e(r, s)
    log_val = (
        _log_sinh(beta * r)
        + _log_sinh(beta * (1.0 - s))
        - _log_sinh(beta * s)
        - _log_sinh(beta * (1.0 - r))
    )
    return math.exp(log_val)


def rate_vs_gamma_scan(r: float, s: float, gamma_lo: float, gamma_hi: float,
                       count: int) -> list:
    """Sampled (gamma, rho_c) curve on a geometric gamma grid.

    rho_c is strictly decreasing in gamma, so the second column of the scan
    decreases; endpoints chosen across enough decades bracket rho_e^2 (small
    gamma) and zero (large gamma).
    """
    if not (0.0 < gamma_lo < gamma_hi):
        raise ValueError("need 0 < gamma_lo < gamma_hi")
    if count < 2:
        raise ValueError("count must be >= 2")
    ratio = (gamma_hi / gamma_lo) ** (1.0 / (count - 1))
    out = []
    for k in range(count):
        gam = gamma_lo * ratio ** k
        out.append((gam, rho_c_gamma(r, s, gam)))
    return out


def better_estimate_pairing(r: float, s: float, alpha: float) -> tuple:
    """(rho_c, shifted-equation rate at beta = 2*gamma = sqrt(2)*alpha^(-1/4)).

    The pair approaches equality as alpha -> 0 and rho_c approaches the
    square of the second entry as alpha -> infinity.
    """
    cfg = Analytic1DConfig(r, s, alpha)
    return rho_c(cfg), rho_e_beta(r, s, 2.0 * cfg.gamma)
