"""Analytically exact score models and the annealed noise-level ladder.

These stand in for trained score networks: both models return the exact
gradient of the log of the sigma-smoothed density, so any quality difference
between sampling schemes is attributable to the scheme itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .core import ImageDataset, NoiseSource


class ScoreModel:
    """Interface: exact score of the sigma-smoothed target plus target draws."""

    def score(self, x: np.ndarray, sigma: float) -> np.ndarray:
        raise NotImplementedError

    def sample_target(self, src: NoiseSource) -> np.ndarray:
        raise NotImplementedError


@dataclass
class GaussianScore(ScoreModel):
    """Target N(mu, s0^2 I); the sigma-smoothed density is N(mu, (s0^2 + sigma^2) I)."""

    mu: np.ndarray
    s0: float

    def score(self, x, sigma=0.0):
        return -(x - self.mu) / (self.s0**2 + sigma**2)

    def log_density(self, x, sigma=0.0):
        var = self.s0**2 + sigma**2
        d = x.size
        return -0.5 * np.sum((x - self.mu) ** 2) / var - 0.5 * d * np.log(2 * np.pi * var)

    def sample_target(self, src):
        return self.mu + self.s0 * src.normal(np.shape(self.mu))


@dataclass
class EmpiricalScore(ScoreModel):
    """Exact score of the Gaussian-smoothed empirical distribution of a dataset.

    p_sigma(x) = (1/N) sum_i N(x; x_i, sigma^2 I); the score is a softmax-weighted
    combination of (x_i - x)/sigma^2, computed in log space for stability.
    Weights below exp(-700) relative to the max underflow to zero harmlessly.
    """

    ds: ImageDataset
    _flat: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self._flat = self.ds.items.reshape(len(self.ds), -1)

    def _log_weights(self, x_flat, sigma):
        # (B, N) squared distances via the expansion ||x - xi||^2.
        sq = (
            np.sum(x_flat**2, axis=1, keepdims=True)
            + np.sum(self._flat**2, axis=1)[None, :]
            - 2.0 * x_flat @ self._flat.T
        )
        logits = -sq / (2.0 * sigma**2)
        return logits - logsumexp(logits, axis=1, keepdims=True)

    def score_batch(self, x: np.ndarray, sigma: float) -> np.ndarray:
        if sigma <= 0:
            raise ValueError("empirical score needs sigma > 0 (density is atomic at 0)")
        batch_shape = x.shape[: x.ndim - 3]
        x_flat = x.reshape(-1, self._flat.shape[1])
        w = np.exp(self._log_weights(x_flat, sigma))
        weighted_mean = w @ self._flat
        out = (weighted_mean - x_flat) / sigma**2
        return out.reshape(batch_shape + self.ds.shape)

    def score(self, x, sigma):
        return self.score_batch(x[None], sigma)[0]

    def log_density(self, x, sigma):
        if sigma <= 0:
            raise ValueError("empirical score needs sigma > 0")
        x_flat = x.reshape(1, -1)
        sq = np.sum((x_flat[:, None, :] - self._flat[None]) ** 2, axis=2)
        d = self._flat.shape[1]
        log_norm = -0.5 * d * np.log(2 * np.pi * sigma**2)
        return float(logsumexp(-sq[0] / (2 * sigma**2)) - np.log(len(self.ds)) + log_norm)

    def sample_target(self, src):
        return self.ds[src.integers(0, len(self.ds))].copy()


@dataclass(frozen=True)
class NoiseLevels:
    """Strictly decreasing sigma ladder with a fixed inner-step count per level."""

    sigmas: tuple
    steps_per_level: int

    def __post_init__(self):
        sig = tuple(float(s) for s in self.sigmas)
        object.__setattr__(self, "sigmas", sig)
        if len(sig) < 1 or any(s <= 0 for s in sig):
            raise ValueError("need at least one positive sigma")
        if any(nxt >= prev for prev, nxt in zip(sig, sig[1:])):
            raise ValueError("sigmas must be strictly decreasing")
        if self.steps_per_level < 1:
            raise ValueError("steps_per_level must be >= 1")

    @property
    def levels(self) -> int:
        return len(self.sigmas)

    @property
    def total_steps(self) -> int:
        return self.levels * self.steps_per_level

    @property
    def sigma_min(self) -> float:
        return self.sigmas[-1]


def geometric_levels(sigma_max: float, sigma_min: float, levels: int, steps_per_level: int = 1) -> NoiseLevels:
    """Geometric ladder sigma_i = sigma_max * (sigma_min/sigma_max)^((i-1)/(L-1))."""
    if levels < 1:
        raise ValueError("levels must be >= 1")
    if levels == 1:
        return NoiseLevels((sigma_max,), steps_per_level)
    if not sigma_max > sigma_min > 0:
        raise ValueError(f"need sigma_max > sigma_min > 0, got {sigma_max}, {sigma_min}")
    ratio = (sigma_min / sigma_max) ** (1.0 / (levels - 1))
    return NoiseLevels(tuple(sigma_max * ratio**i for i in range(levels)), steps_per_level)
