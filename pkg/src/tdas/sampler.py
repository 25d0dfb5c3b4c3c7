"""Annealed Langevin sampling: the plain loop, its filtered variant, and the
conjugated (transform-domain) variant used by the equivalence harness.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import NoiseSource, draw_normal
from .filters import DCT, SpaceFilter, apply_tdas, identity_space_mask
from .scores import NoiseLevels, ScoreModel
from .transforms import Dct2Map, OrthogonalMap


class DivergenceError(Exception):
    def __init__(self, step: int):
        super().__init__(f"non-finite state at sampling step {step}")
        self.step = step


@dataclass(frozen=True)
class SamplerConfig:
    """Annealed Langevin schedule.

    Step size at level i is accel_factor * eps0 * sigma_i^2 / sigma_L^2
    (sigma_L = smallest level). accel_factor k compensates a k-fold iteration
    reduction by scaling every step linearly, keeping sum(eps) constant.
    """

    levels: NoiseLevels
    eps0: float
    accel_factor: float = 1.0
    transform: str = DCT
    record_trajectory: bool = False
    denoise_final: bool = False

    def __post_init__(self):
        if self.eps0 <= 0 or self.accel_factor <= 0:
            raise ValueError("eps0 and accel_factor must be positive")

    @property
    def total_steps(self) -> int:
        return self.levels.total_steps

    def schedule(self):
        """Yield (step_index, sigma_i, eps_t) over the full run."""
        smin2 = self.levels.sigma_min**2
        t = 0
        for sigma in self.levels.sigmas:
            eps = self.accel_factor * self.eps0 * sigma**2 / smin2
            for _ in range(self.levels.steps_per_level):
                yield t, sigma, eps
                t += 1


@dataclass
class Trajectory:
    states: list = field(default_factory=list)

    def append(self, x):
        self.states.append(np.array(x, copy=True))

    def __len__(self):
        return len(self.states)

    def __getitem__(self, i):
        return self.states[i]


def _score_fn(model: ScoreModel, batched: bool):
    if not batched or hasattr(model, "score_batch"):
        return getattr(model, "score_batch", model.score)
    return lambda x, sigma: np.stack([model.score(xi, sigma) for xi in x])


def _check_finite(x, step):
    if not np.all(np.isfinite(x)):
        raise DivergenceError(step)


def langevin_sample(model, cfg: SamplerConfig, src: NoiseSource, space: SpaceFilter,
                    freq: np.ndarray, max_steps=None):
    """Filtered annealed Langevin loop: init and every noise pass through the masks."""
    shape = space.mask.shape
    z = draw_normal(src, shape)
    x = apply_tdas(z, space, freq, cfg.transform)
    traj = Trajectory() if cfg.record_trajectory else None
    if traj is not None:
        traj.append(x)
    for t, sigma, eps in cfg.schedule():
        if max_steps is not None and t >= max_steps:
            break
        z = draw_normal(src, shape)
        eta = apply_tdas(z, space, freq, cfg.transform)
        x = x + (eps / 2.0) * model.score(x, sigma) + np.sqrt(eps) * eta
        _check_finite(x, t)
        if traj is not None:
            traj.append(x)
    if cfg.denoise_final:
        x = x + cfg.levels.sigma_min**2 * model.score(x, cfg.levels.sigma_min)
    return (x, traj) if traj is not None else x


def vanilla_sample(model, cfg: SamplerConfig, src: NoiseSource, shape, max_steps=None):
    """Unfiltered annealed Langevin loop (the all-ones-mask special case, written out)."""
    x = draw_normal(src, shape)
    traj = Trajectory() if cfg.record_trajectory else None
    if traj is not None:
        traj.append(x)
    for t, sigma, eps in cfg.schedule():
        if max_steps is not None and t >= max_steps:
            break
        eta = draw_normal(src, shape)
        x = x + (eps / 2.0) * model.score(x, sigma) + np.sqrt(eps) * eta
        _check_finite(x, t)
        if traj is not None:
            traj.append(x)
    if cfg.denoise_final:
        x = x + cfg.levels.sigma_min**2 * model.score(x, cfg.levels.sigma_min)
    return (x, traj) if traj is not None else x


def freq_domain_sample(model, cfg: SamplerConfig, src: NoiseSource, shape,
                       fmap: OrthogonalMap | None = None, max_steps=None):
    """Langevin loop conjugated by an orthogonal map: state lives in the transform
    domain, the score is evaluated by mapping back, and noise enters as F[z]."""
    if fmap is None:
        fmap = Dct2Map()
    z = draw_normal(src, shape)
    xt = fmap.forward(z)
    traj = Trajectory() if cfg.record_trajectory else None
    if traj is not None:
        traj.append(xt)
    for t, sigma, eps in cfg.schedule():
        if max_steps is not None and t >= max_steps:
            break
        z = draw_normal(src, shape)
        score = fmap.forward(model.score(fmap.inverse(xt), sigma))
        xt = xt + (eps / 2.0) * score + np.sqrt(eps) * fmap.forward(z)
        _check_finite(xt, t)
        if traj is not None:
            traj.append(xt)
    x = fmap.inverse(xt)
    return (x, traj) if traj is not None else x


def sample_batch(model, cfg: SamplerConfig, master_seed: int, n_chains: int,
                 space: SpaceFilter | None = None, freq: np.ndarray | None = None,
                 shape=None):
    """Run n_chains independent filtered chains with per-chain derived seeds.

    Noise is drawn chain-by-chain from per-chain streams (so results do not
    depend on batching or scheduling), while score evaluation is vectorized.
    Returns an (n_chains, C, H, W) stack.
    """
    if space is None:
        if shape is None:
            raise ValueError("need either a space mask or an explicit shape")
        space = identity_space_mask(shape)
    shape = space.mask.shape
    if freq is None:
        freq = np.ones(shape)
    sources = [NoiseSource.for_worker(master_seed, i) for i in range(n_chains)]
    score = _score_fn(model, batched=True)

    def draw_block():
        return np.stack([draw_normal(s, shape) for s in sources])

    x = apply_tdas(draw_block(), space, freq, cfg.transform)
    for t, sigma, eps in cfg.schedule():
        eta = apply_tdas(draw_block(), space, freq, cfg.transform)
        x = x + (eps / 2.0) * score(x, sigma) + np.sqrt(eps) * eta
        _check_finite(x, t)
    if cfg.denoise_final:
        x = x + cfg.levels.sigma_min**2 * score(x, cfg.levels.sigma_min)
    return x
