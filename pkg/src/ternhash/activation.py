"""Smoothed ternary activation, its hard limit, and the sharpening schedule.

The smooth function tanh((x/alpha)^k) interpolates, as the odd exponent k
grows, toward a three-level quantizer that maps x to +1 at x >= alpha, -1 at
x <= -alpha, and 0 in between. Training sharpens k stepwise; testing uses the
hard quantizer directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ActivationConfig:
    """Scale/threshold alpha and odd sharpness exponent k."""

    alpha: float = 0.5
    k: int = 3

    def __post_init__(self):
        if not (isinstance(self.alpha, (int, float)) and math.isfinite(self.alpha)) or self.alpha <= 0:
            raise ValueError(f"alpha must be a positive finite real, got {self.alpha!r}")
        if not isinstance(self.k, int) or self.k < 3 or self.k % 2 == 0:
            raise ValueError(f"k must be an odd integer >= 3, got {self.k!r}")


@dataclass(frozen=True)
class ContinuationSchedule:
    """Piecewise-constant schedule stepping k by 2 every stride_epochs, clamped at k_end."""

    k_start: int = 3
    k_end: int = 11
    stride_epochs: int = 30
    total_epochs: int = 150

    def __post_init__(self):
        for name in ("k_start", "k_end"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 3 or v % 2 == 0:
                raise ValueError(f"{name} must be an odd integer >= 3, got {v!r}")
        if self.k_start > self.k_end:
            raise ValueError(f"k_start ({self.k_start}) must not exceed k_end ({self.k_end})")
        if self.stride_epochs < 1:
            raise ValueError(f"stride_epochs must be positive, got {self.stride_epochs!r}")
        if self.total_epochs < 1:
            raise ValueError(f"total_epochs must be positive, got {self.total_epochs!r}")


def _as_finite(x) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValueError("input must be finite")
    return arr


def _signed_power(u: np.ndarray, k: int) -> np.ndarray:
    # sign(u)^k * |u|^k via exp(k*log|u|), guarded at u = 0; overflow saturates
    # to inf, which tanh maps to the correct +-1 limit.
    with np.errstate(divide="ignore"):
        mag = np.exp(k * np.log(np.abs(u)))
    mag = np.where(u == 0.0, 0.0, mag)
    if k % 2:
        return np.copysign(mag, u)
    return mag


def smooth_ternary(x, cfg: ActivationConfig):
    """tanh((x/alpha)^k), the differentiable surrogate of the hard quantizer.

    Odd in x, strictly inside (-1, 1) until float saturation. Accepts scalars
    or arrays; non-finite input is rejected.
    """
    arr = _as_finite(x)
    out = np.tanh(_signed_power(arr / cfg.alpha, cfg.k))
    return float(out) if arr.ndim == 0 else out


def smooth_ternary_grad(x, cfg: ActivationConfig):
    """Analytic derivative: (1 - tanh^2(u^k)) * k * u^(k-1) / alpha, u = x/alpha.

    Nonnegative everywhere (k odd makes u^(k-1) even-powered) and 0 at x = 0.
    Where tanh has saturated, the sech^2 factor kills the polynomial one, so
    the product is taken as exactly 0.
    """
    arr = _as_finite(x)
    u = arr / cfg.alpha
    sech2 = 1.0 - np.tanh(_signed_power(u, cfg.k)) ** 2
    poly = (cfg.k / cfg.alpha) * _signed_power(u, cfg.k - 1)
    with np.errstate(invalid="ignore"):
        out = np.where(sech2 > 0.0, sech2 * poly, 0.0)
    return float(out) if arr.ndim == 0 else out


def hard_ternary(x, alpha: float):
    """Three-level quantizer: +1 at x >= alpha, -1 at x <= -alpha, else 0.

    Boundaries are inclusive. Scalar input returns an int, arrays return int8.
    """
    if not (isinstance(alpha, (int, float)) and math.isfinite(alpha)) or alpha <= 0:
        raise ValueError(f"alpha must be a positive finite real, got {alpha!r}")
    arr = _as_finite(x)
    out = np.zeros(arr.shape, dtype=np.int8)
    out[arr >= alpha] = 1
    out[arr <= -alpha] = -1
    return int(out) if arr.ndim == 0 else out


def schedule_k(epoch: int, sched: ContinuationSchedule) -> int:
    """Exponent in force at a given epoch: k_start + 2*floor(epoch/stride), clamped at k_end."""
    if not isinstance(epoch, int) or epoch < 0 or epoch >= sched.total_epochs:
        raise ValueError(f"epoch must be in [0, {sched.total_epochs}), got {epoch!r}")
    return min(sched.k_end, sched.k_start + 2 * (epoch // sched.stride_epochs))
