"""Optimal hard shrinkage of singular values (homogeneous white noise)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .filter import demean
from .network import WeightedNetwork


@dataclass(frozen=True)
class ShrinkReport:
    original_singular_values: np.ndarray
    shrunk_singular_values: np.ndarray
    retained_rank: int
    sigma2_used: float

    def to_dict(self) -> dict:
        return {
            "original_singular_values": [float(s) for s in self.original_singular_values],
            "shrunk_singular_values": [float(s) for s in self.shrunk_singular_values],
            "retained_rank": int(self.retained_rank),
            "sigma2_used": float(self.sigma2_used),
        }


def shrink_singular_values(y, v: int, sigma2: float) -> np.ndarray:
    """``y -> sqrt(y^2 - 4 v sigma2)`` above ``2 sqrt(v) sigma``, 0 below."""
    y = np.asarray(y, dtype=float)
    cut = 4.0 * v * sigma2
    y2 = y**2
    return np.where(y2 >= cut, np.sqrt(np.maximum(y2 - cut, 0.0)), 0.0)


def optimal_shrink(net: WeightedNetwork, sigma2: float, center: bool = True):
    """Denoise a fully observed network by shrinking its singular values.

    Heterogeneous noise must be reduced to a scalar first, e.g. with
    :func:`netwf.noise.homogenize_noise`.

    Returns
    -------
    denoised : WeightedNetwork
    report : ShrinkReport
    """
    if not sigma2 >= 0:
        raise ValueError(f"sigma2 must be non-negative, got {sigma2}")
    if not net.fully_observed:
        raise ValueError("network has missing entries; run impute_missing first")
    centered, mean = demean(net) if center else (net, 0.0)
    A = np.asarray(centered.weights)
    U, y, Vt = np.linalg.svd(A)
    if not np.all(np.isfinite(y)):
        raise FloatingPointError("SVD returned non-finite singular values")
    shrunk = shrink_singular_values(y, net.v, sigma2)
    report = ShrinkReport(y, shrunk, int(np.count_nonzero(shrunk)), float(sigma2))
    if sigma2 == 0:
        return net.with_weights(np.asarray(net.weights)), report
    out = (U * shrunk) @ Vt
    if not net.directed:
        out = 0.5 * (out + out.T)
    return net.with_weights(out + mean), report
