"""Synthetic structured datasets: spectra dominated by low frequencies, a
face-like shared spatial layout, and an unstructured white-noise control.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ImageDataset, NoiseSource
from .transforms import idct2

LOW_FREQ_BLOBS = "low_freq_blobs"
FACE_LIKE = "face_like"
UNSTRUCTURED = "unstructured"

KINDS = (LOW_FREQ_BLOBS, FACE_LIKE, UNSTRUCTURED)


@dataclass(frozen=True)
class SynthSpec:
    kind: str
    count: int
    shape: tuple
    spectral_decay: float = 2.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}; choose from {KINDS}")
        if self.count < 1:
            raise ValueError("count must be >= 1")
        if len(self.shape) != 3:
            raise ValueError("shape must be (C, H, W)")
        if self.spectral_decay <= 0:
            raise ValueError("spectral_decay must be positive")


def _decay_magnitude(height, width, p):
    """DCT-coefficient magnitude profile (1 + r)^(-p/2) with r the radial index
    distance to the DC bin, so binned spectral power falls off like r^(-p)."""
    h = np.arange(height, dtype=np.float64)[:, None]
    w = np.arange(width, dtype=np.float64)[None, :]
    r = np.sqrt(h**2 + w**2)
    return (1.0 + r) ** (-p / 2.0)


def _oval_template(shape):
    c, height, width = shape
    hh = (np.arange(height)[:, None] - (height - 1) / 2.0) / (height / 2.0)
    ww = (np.arange(width)[None, :] - (width - 1) / 2.0) / (width / 2.0)
    inside = (hh / 0.75) ** 2 + (ww / 0.55) ** 2 <= 1.0
    template = np.where(inside, 0.8, 0.1)
    return np.broadcast_to(template, shape).astype(np.float64)


def generate(spec: SynthSpec) -> ImageDataset:
    src = NoiseSource(spec.seed)
    c, height, width = spec.shape
    if spec.kind == UNSTRUCTURED:
        items = np.stack([src.normal(spec.shape) for _ in range(spec.count)])
    elif spec.kind == LOW_FREQ_BLOBS:
        mag = _decay_magnitude(height, width, spec.spectral_decay)
        items = np.stack(
            [idct2(mag * src.normal(spec.shape)) for _ in range(spec.count)]
        )
    else:  # FACE_LIKE
        template = _oval_template(spec.shape)
        mag = _decay_magnitude(height, width, spec.spectral_decay)
        items = np.stack(
            [template + 0.1 * idct2(mag * src.normal(spec.shape)) for _ in range(spec.count)]
        )
    return ImageDataset(items)


def radial_power_profile(power: np.ndarray, n_bins: int = 16):
    """Bin an H x W power grid by radial index distance to the DC bin.

    Returns (bin center radii, mean power per bin), skipping empty bins.
    """
    height, width = power.shape
    h = np.arange(height)[:, None]
    w = np.arange(width)[None, :]
    r = np.sqrt(h**2 + w**2).ravel()
    p = power.ravel()
    edges = np.linspace(0.0, r.max() + 1e-9, n_bins + 1)
    centers, means = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        sel = (r >= lo) & (r < hi)
        if sel.any():
            centers.append(0.5 * (lo + hi))
            means.append(float(p[sel].mean()))
    return np.array(centers), np.array(means)
