"""Orthonormal DCT-II / DFT transforms with brute-force reference versions.

Fast paths delegate to scipy.fft / numpy.fft, which handle arbitrary
(including odd) lengths via mixed-radix and Bluestein plans. The ``*_naive``
functions implement the O(d^2) definitions directly and exist as independent
oracles; tests compare the two routes.

The 1D DCT is the orthonormal type-II variant: the 1/sqrt(2) weight sits on
the k = 0 output coefficient, so the transform matrix is orthogonal and the
2D transform preserves the L2 norm.
"""

from __future__ import annotations

import numpy as np
import scipy.fft


def dct1(v: np.ndarray) -> np.ndarray:
    """Orthonormal 1D DCT-II of a length-d real vector."""
    return scipy.fft.dct(np.asarray(v, dtype=np.float64), type=2, norm="ortho")


def idct1(v: np.ndarray) -> np.ndarray:
    """Inverse (= transpose) of dct1."""
    return scipy.fft.idct(np.asarray(v, dtype=np.float64), type=2, norm="ortho")


def dct1_naive(v: np.ndarray) -> np.ndarray:
    """O(d^2) matrix-product DCT-II, straight from the definition."""
    v = np.asarray(v, dtype=np.float64)
    return dct_matrix(v.shape[-1]) @ v


def dct_matrix(d: int) -> np.ndarray:
    """The d x d orthonormal DCT-II matrix."""
    k = np.arange(d)[:, None]
    n = np.arange(d)[None, :]
    m = np.sqrt(2.0 / d) * np.cos(np.pi * (n + 0.5) * k / d)
    m[0, :] /= np.sqrt(2.0)
    return m


def dct2(t: np.ndarray) -> np.ndarray:
    """Separable orthonormal 2D DCT-II over the last two axes, per channel."""
    return scipy.fft.dctn(np.asarray(t, dtype=np.float64), type=2, norm="ortho", axes=(-2, -1))


def idct2(t: np.ndarray) -> np.ndarray:
    return scipy.fft.idctn(np.asarray(t, dtype=np.float64), type=2, norm="ortho", axes=(-2, -1))


def dft2(t: np.ndarray) -> np.ndarray:
    """Standard (unnormalized-forward) 2D DFT over the last two axes."""
    return np.fft.fft2(np.asarray(t, dtype=np.float64), axes=(-2, -1))


def idft2_real(s: np.ndarray) -> np.ndarray:
    """Real part of the inverse 2D DFT."""
    return np.fft.ifft2(np.asarray(s), axes=(-2, -1)).real


def dft2_naive(t: np.ndarray) -> np.ndarray:
    """Double-sum 2D DFT per channel; O((HW)^2)."""
    t = np.asarray(t, dtype=np.float64)
    h, w = t.shape[-2:]
    fh = np.exp(-2j * np.pi * np.outer(np.arange(h), np.arange(h)) / h)
    fw = np.exp(-2j * np.pi * np.outer(np.arange(w), np.arange(w)) / w)
    return np.einsum("kh,...hw,wl->...kl", fh, t, fw)


class OrthogonalMap:
    """Invertible linear map on (C, H, W) tensors with orthogonal representation matrix."""

    def forward(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def inverse(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class Dct2Map(OrthogonalMap):
    def forward(self, t):
        return dct2(t)

    def inverse(self, t):
        return idct2(t)


class PermutationMap(OrthogonalMap):
    """Coordinate permutation of the flattened tensor; orthogonal by construction."""

    def __init__(self, shape, seed: int):
        self.shape = tuple(shape)
        n = int(np.prod(self.shape))
        self.perm = np.random.Generator(np.random.PCG64(seed)).permutation(n)
        self.inv_perm = np.argsort(self.perm)

    def forward(self, t):
        return t.reshape(t.shape[:-3] + (-1,))[..., self.perm].reshape(t.shape)

    def inverse(self, t):
        return t.reshape(t.shape[:-3] + (-1,))[..., self.inv_perm].reshape(t.shape)
