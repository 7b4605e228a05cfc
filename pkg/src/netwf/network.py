"""Weighted network container shared by every stage of the pipeline."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class WeightedNetwork:
    """Node-labelled ``v x v`` weight matrix with an observation mask.

    ``weights[i, j]`` is the weight of the edge ``i -> j`` (or of the
    unordered pair ``{i, j}`` when ``directed`` is False). Unobserved entries
    are stored as NaN and flagged False in ``observed``.
    """

    node_ids: tuple
    weights: np.ndarray
    observed: np.ndarray = None
    directed: bool = False

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError(f"weights must be a square matrix, got shape {w.shape}")
        v = w.shape[0]
        ids = tuple(self.node_ids) if self.node_ids is not None else tuple(range(v))
        if len(ids) != v:
            raise ValueError(f"{len(ids)} node labels for a {v}x{v} matrix")
        if len(set(ids)) != v:
            raise ValueError("node labels must be unique")
        if self.observed is None:
            mask = np.isfinite(w)
        else:
            mask = np.array(self.observed, dtype=bool)
            if mask.shape != w.shape:
                raise ValueError("observed mask shape does not match weights")
        if not np.all(np.isfinite(w[mask])):
            raise ValueError("observed weights must be finite")
        w[~mask] = np.nan
        if not self.directed:
            if not np.array_equal(mask, mask.T):
                raise ValueError("undirected network needs a symmetric observation mask")
            if not np.array_equal(w[mask], w.T[mask]):
                raise ValueError("undirected network needs symmetric weights")
        w.setflags(write=False)
        mask.setflags(write=False)
        object.__setattr__(self, "node_ids", ids)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "observed", mask)

    @classmethod
    def from_array(cls, weights, node_ids: Sequence | None = None, directed: bool | None = None):
        """Wrap a dense array; NaN marks missing entries.

        Directedness is inferred from symmetry when not given.
        """
        w = np.asarray(weights, dtype=float)
        if directed is None:
            directed = not _is_symmetric_with_nan(w)
        return cls(node_ids=node_ids, weights=w, directed=directed)

    @property
    def v(self) -> int:
        return self.weights.shape[0]

    @property
    def fully_observed(self) -> bool:
        return bool(self.observed.all())

    def with_weights(self, weights, observed=None) -> "WeightedNetwork":
        """Copy with new weights (all observed unless a mask is given)."""
        w = np.asarray(weights, dtype=float)
        mask = np.isfinite(w) if observed is None else observed
        return replace(self, weights=w, observed=mask)

    def permuted(self, order) -> "WeightedNetwork":
        order = np.asarray(order)
        return WeightedNetwork(
            node_ids=[self.node_ids[i] for i in order],
            weights=self.weights[np.ix_(order, order)],
            observed=self.observed[np.ix_(order, order)],
            directed=self.directed,
        )

    def filled(self, value: float = 0.0) -> np.ndarray:
        """Writable copy of the weights with unobserved entries set to ``value``."""
        w = self.weights.copy()
        w[~self.observed] = value
        return w

    def index(self, label) -> int:
        try:
            return self._label_index[label]
        except KeyError:
            raise ValueError(f"unknown node label {label!r}") from None

    @property
    def _label_index(self) -> dict:
        cache = self.__dict__.get("_index_cache")
        if cache is None:
            cache = {lab: i for i, lab in enumerate(self.node_ids)}
            object.__setattr__(self, "_index_cache", cache)
        return cache


def _is_symmetric_with_nan(w: np.ndarray) -> bool:
    nan = np.isnan(w)
    if not np.array_equal(nan, nan.T):
        return False
    return bool(np.array_equal(np.where(nan, 0.0, w), np.where(nan, 0.0, w).T))


def offdiag_mask(v: int) -> np.ndarray:
    return ~np.eye(v, dtype=bool)


def relevant_mask(net: WeightedNetwork) -> np.ndarray:
    """Entries entering means and variances: observed and off the diagonal.

    For an undirected network both orientations are kept; they carry equal
    values, so statistics match those over unordered pairs.
    """
    return net.observed & offdiag_mask(net.v)


def pair_mask(net: WeightedNetwork) -> np.ndarray:
    """Entries that stand for distinct evaluation items.

    Upper triangle for undirected networks, every off-diagonal entry for
    directed ones.
    """
    if net.directed:
        return offdiag_mask(net.v)
    return np.triu(np.ones((net.v, net.v), dtype=bool), k=1)
