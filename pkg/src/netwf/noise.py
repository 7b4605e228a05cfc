"""Edge-level noise covariance models.

Each model acts on ``v x v`` arrays (the matrix form of a vectorised
network) so that the covariance never has to be formed explicitly.
``to_dense`` exists for the direct solver and for tests, and uses
row-major vectorisation throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .network import WeightedNetwork, offdiag_mask, relevant_mask


class NoiseModel:
    def apply(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def variances(self, v: int) -> np.ndarray:
        """Per-edge noise variances (the covariance diagonal) as a v x v array."""
        raise NotImplementedError

    def to_dense(self, v: int) -> np.ndarray:
        raise NotImplementedError

    def mean_variance(self, v: int) -> float:
        """Mean noise variance over off-diagonal edges."""
        return float(self.variances(v)[offdiag_mask(v)].mean()) if v > 1 else 0.0

    def isotropic_part(self, v: int) -> float:
        """Scalar ``c`` such that ``c I`` is a cheap stand-in for this covariance.

        Only used to precondition iterative solves.
        """
        return float(self.variances(v).mean())


@dataclass(frozen=True)
class Homogeneous(NoiseModel):
    sigma2: float

    def __post_init__(self):
        if not self.sigma2 >= 0:
            raise ValueError(f"sigma2 must be non-negative, got {self.sigma2}")

    def apply(self, X):
        return self.sigma2 * X

    def variances(self, v):
        return np.full((v, v), float(self.sigma2))

    def to_dense(self, v):
        return self.sigma2 * np.eye(v * v)

    def mean_variance(self, v):
        return float(self.sigma2)

    def isotropic_part(self, v):
        return float(self.sigma2)


@dataclass(frozen=True)
class Diagonal(NoiseModel):
    """Independent, heterogeneous noise: one variance per edge."""

    var: np.ndarray

    def __post_init__(self):
        var = np.array(self.var, dtype=float)
        if var.ndim != 2 or var.shape[0] != var.shape[1]:
            raise ValueError("variances must be a square matrix")
        if not np.all(np.isfinite(var)):
            raise ValueError("variances contain missing values; impute them first")
        if np.any(var < 0):
            raise ValueError("variances must be non-negative")
        var.setflags(write=False)
        object.__setattr__(self, "var", var)

    def apply(self, X):
        return self.var * X

    def variances(self, v):
        _check_size(self.var.shape[0], v)
        return self.var

    def to_dense(self, v):
        _check_size(self.var.shape[0], v)
        return np.diag(self.var.ravel())


@dataclass(frozen=True)
class Ensemble(NoiseModel):
    """Sample covariance of snapshot deviations, kept in low-rank form.

    The covariance is ``scale * sum_t vec(D_t) vec(D_t)^T``; its action
    costs O(m k) for m deviation matrices.
    """

    deviations: np.ndarray
    scale: float

    def __post_init__(self):
        D = np.array(self.deviations, dtype=float)
        if D.ndim != 3 or D.shape[1] != D.shape[2]:
            raise ValueError("deviations must have shape (m, v, v)")
        if self.scale < 0:
            raise ValueError("scale must be non-negative")
        D.setflags(write=False)
        object.__setattr__(self, "deviations", D)

    def apply(self, X):
        coeff = np.tensordot(self.deviations, X, axes=([1, 2], [0, 1]))
        return self.scale * np.tensordot(coeff, self.deviations, axes=(0, 0))

    def variances(self, v):
        _check_size(self.deviations.shape[1], v)
        return self.scale * np.einsum("tij,tij->ij", self.deviations, self.deviations)

    def to_dense(self, v):
        _check_size(self.deviations.shape[1], v)
        F = self.deviations.reshape(self.deviations.shape[0], -1)
        return self.scale * (F.T @ F)

    def isotropic_part(self, v):
        # low rank: the exact remainder beats any isotropic approximation
        return 0.0


def _check_size(n, v):
    if n != v:
        raise ValueError(f"noise model is for {n} nodes, network has {v}")


def estimate_ensemble_noise(snapshots: Sequence[WeightedNetwork]):
    """Estimate edge noise from fluctuations across snapshots.

    Returns the low-rank :class:`Ensemble` covariance together with its
    :class:`Diagonal` reduction (per-edge sample variances).
    """
    if len(snapshots) < 2:
        raise ValueError("need at least two snapshots")
    ids = snapshots[0].node_ids
    for s in snapshots[1:]:
        if s.node_ids != ids:
            raise ValueError("snapshots are over different node sets")
    if not all(s.fully_observed for s in snapshots):
        raise ValueError("snapshots must be fully observed")
    W = np.stack([np.asarray(s.weights) for s in snapshots])
    D = W - W.mean(axis=0)
    ens = Ensemble(D, 1.0 / (len(snapshots) - 1))
    return ens, Diagonal(ens.variances(W.shape[1]))


def homogenize_noise(noise: NoiseModel, v: int | None = None) -> Homogeneous:
    """Replace heterogeneous noise by its mean off-diagonal variance."""
    if isinstance(noise, Homogeneous):
        return noise
    if v is None:
        v = noise.var.shape[0] if isinstance(noise, Diagonal) else noise.deviations.shape[1]
    return Homogeneous(noise.mean_variance(v))


def naive_noise_guess(net: WeightedNetwork) -> Homogeneous:
    """Homogeneous noise with variance equal to the spread of the observed weights."""
    vals = np.asarray(net.weights)[relevant_mask(net)]
    return Homogeneous(float(vals.var()) if vals.size else 0.0)
