"""Synthetic networks with known ground truth."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .network import WeightedNetwork, offdiag_mask
from .noise import Homogeneous, NoiseModel


@dataclass(frozen=True)
class SyntheticInstance:
    truth: WeightedNetwork
    noisy: WeightedNetwork
    noise_model: NoiseModel
    seed: int


def two_community_network(v: int, w_in: float, w_out: float) -> WeightedNetwork:
    """Undirected network of two equal blocks, zero diagonal."""
    if v < 4 or v % 2:
        raise ValueError(f"v must be an even integer >= 4, got {v}")
    half = v // 2
    block = np.repeat(np.arange(2), half)
    W = np.where(block[:, None] == block[None, :], float(w_in), float(w_out))
    np.fill_diagonal(W, 0.0)
    return WeightedNetwork(tuple(range(v)), W, directed=False)


def add_gaussian_noise(net: WeightedNetwork, sigma: float, seed: int) -> SyntheticInstance:
    """Add i.i.d. N(0, sigma^2) to every off-diagonal entry.

    Undirected networks get one draw per unordered pair, mirrored.
    """
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    rng = np.random.default_rng(seed)
    v = net.v
    E = sigma * rng.standard_normal((v, v))
    if not net.directed:
        E = np.triu(E, k=1)
        E = E + E.T
    E[~offdiag_mask(v)] = 0.0
    noisy = net.with_weights(np.asarray(net.weights) + E, observed=net.observed)
    return SyntheticInstance(net, noisy, Homogeneous(float(sigma) ** 2), seed)


def random_orthonormal(v: int, r: int, rng) -> np.ndarray:
    Q, R = np.linalg.qr(rng.standard_normal((v, r)))
    # fix column signs so the factor is a deterministic function of the draw
    return Q * np.sign(np.diag(R))


def planted_lowrank(v: int, singular_values, seed: int, symmetric: bool = False) -> WeightedNetwork:
    """``U diag(s) V^T`` with seeded random orthonormal factors.

    With ``symmetric=True`` the factors coincide and the result is an
    undirected network.
    """
    s = np.asarray(singular_values, dtype=float).ravel()
    if s.size > v:
        raise ValueError(f"rank {s.size} exceeds v={v}")
    if np.any(s <= 0) or np.any(np.diff(s) > 0):
        raise ValueError("singular values must be positive and descending")
    if s.size == 0:
        return WeightedNetwork(tuple(range(v)), np.zeros((v, v)), directed=not symmetric)
    rng = np.random.default_rng(seed)
    U = random_orthonormal(v, s.size, rng)
    V = U if symmetric else random_orthonormal(v, s.size, rng)
    W = (U * s) @ V.T
    if symmetric:
        W = 0.5 * (W + W.T)
    return WeightedNetwork(tuple(range(v)), W, directed=not symmetric)
