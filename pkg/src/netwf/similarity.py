"""Profile similarity networks (PSNs) and the edge similarities they induce.

Two nodes are similar when their connection profiles correlate; two edges
are similar when their endpoints are. By default a profile is a node's full
row (or column), so a PSN is a genuine correlation matrix and therefore
positive semidefinite. ``exclude_pair=True`` instead compares nodes ``i``
and ``j`` over every column except ``i`` and ``j``; the resulting matrix is
generally indefinite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .network import WeightedNetwork

KINDS = ("undirected", "source", "target")

# relative variance below which a profile counts as constant
_DEGENERATE_RTOL = 1e-12


@dataclass(frozen=True)
class ProfileSimilarity:
    matrix: np.ndarray
    kind: str
    node_ids: tuple

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("similarity matrix must be square")
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if len(self.node_ids) != m.shape[0]:
            raise ValueError("node label count does not match matrix size")
        if not np.array_equal(m, m.T):
            raise ValueError("similarity matrix must be symmetric")
        if np.any(np.abs(m) > 1.0):
            raise ValueError("similarities must lie in [-1, 1]")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "node_ids", tuple(self.node_ids))

    @property
    def v(self) -> int:
        return self.matrix.shape[0]

    def index(self, label) -> int:
        try:
            return self.node_ids.index(label)
        except ValueError:
            raise ValueError(f"unknown node label {label!r}") from None

    def __getitem__(self, pair):
        a, b = pair
        return self.matrix[self.index(a), self.index(b)]


def pearson(x, y) -> float:
    """Pearson correlation; 0 when either vector is constant."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError(f"length mismatch: {x.shape} vs {y.shape}")
    if x.size < 2:
        raise ValueError("need at least two observations")
    xc = x - x.mean()
    yc = y - y.mean()
    sxx, syy = xc @ xc, yc @ yc
    if _degenerate(sxx, x) or _degenerate(syy, y):
        return 0.0
    return float(np.clip((xc @ yc) / np.sqrt(sxx * syy), -1.0, 1.0))


def _degenerate(ss, x) -> bool:
    scale = max(float(np.max(np.abs(x))) ** 2 * x.size, np.finfo(float).tiny)
    return ss <= _DEGENERATE_RTOL * scale


def profile_correlations(W, exclude_pair: bool = False) -> np.ndarray:
    """Correlate every pair of rows of ``W``.

    With ``exclude_pair`` the rows ``i`` and ``j`` are compared over all
    columns except ``i`` and ``j``; otherwise over all columns. Constant
    profiles correlate to 0 with everything; the diagonal is always 1.
    """
    W = np.asarray(W, dtype=float)
    if not np.all(np.isfinite(W)):
        raise ValueError("profiles contain missing values; impute them first")
    v = W.shape[0]
    # a per-row shift leaves every correlation unchanged and tames cancellation
    Wc = W - W.mean(axis=1, keepdims=True)
    s1 = Wc.sum(axis=1)
    s2 = np.einsum("ij,ij->i", Wc, Wc)
    G = Wc @ Wc.T
    if exclude_pair:
        n = v - 2
        if n < 2:
            raise ValueError("pair-excluded profiles need at least 4 nodes")
        d = np.diag(Wc)
        # sums over columns != i, j, for the profile of row i (axis 0) against row j
        Sx = s1[:, None] - d[:, None] - Wc
        Sy = Sx.T
        Sxx = s2[:, None] - (d**2)[:, None] - Wc**2
        Syy = Sxx.T
        Sxy = G - d[:, None] * Wc.T - Wc * d[None, :]
    else:
        n = v
        Sx = np.broadcast_to(s1[:, None], (v, v))
        Sy = Sx.T
        Sxx = np.broadcast_to(s2[:, None], (v, v))
        Syy = Sxx.T
        Sxy = G
    vx = Sxx - Sx**2 / n
    vy = Syy - Sy**2 / n
    cov = Sxy - Sx * Sy / n
    scale = (np.max(np.abs(Wc), axis=1) ** 2) * n
    scale = np.maximum(scale, np.finfo(float).tiny)
    ok = (vx > _DEGENERATE_RTOL * scale[:, None]) & (vy > _DEGENERATE_RTOL * scale[None, :])
    with np.errstate(invalid="ignore", divide="ignore"):
        S = np.where(ok, cov / np.sqrt(np.where(ok, vx * vy, 1.0)), 0.0)
    S = np.clip(0.5 * (S + S.T), -1.0, 1.0)
    np.fill_diagonal(S, 1.0)
    return S


def _checked_weights(net: WeightedNetwork) -> np.ndarray:
    if not net.fully_observed:
        raise ValueError("network has missing entries; impute them before computing PSNs")
    return np.asarray(net.weights)


def source_profile_similarity(net: WeightedNetwork, exclude_pair: bool = False) -> ProfileSimilarity:
    """Similarity of outgoing connection profiles (rows)."""
    if not net.directed:
        raise ValueError("source similarity needs a directed network")
    S = profile_correlations(_checked_weights(net), exclude_pair)
    return ProfileSimilarity(S, "source", net.node_ids)


def target_profile_similarity(net: WeightedNetwork, exclude_pair: bool = False) -> ProfileSimilarity:
    """Similarity of incoming connection profiles (columns)."""
    if not net.directed:
        raise ValueError("target similarity needs a directed network")
    S = profile_correlations(_checked_weights(net).T, exclude_pair)
    return ProfileSimilarity(S, "target", net.node_ids)


def undirected_profile_similarity(net: WeightedNetwork, exclude_pair: bool = False) -> ProfileSimilarity:
    if net.directed:
        raise ValueError("undirected similarity needs an undirected network")
    S = profile_correlations(_checked_weights(net), exclude_pair)
    return ProfileSimilarity(S, "undirected", net.node_ids)


def directed_edge_similarity(s_src: ProfileSimilarity, s_tgt: ProfileSimilarity, e1, e2) -> float:
    """Similarity of directed edges ``e1 = (A, B)`` and ``e2 = (C, D)``.

    Product of the source similarity of ``A, C`` and the target similarity
    of ``B, D``. Passing a source PSN as ``s_tgt`` gives the source-source
    variant.
    """
    if s_src.node_ids != s_tgt.node_ids:
        raise ValueError("PSNs are over different node sets")
    (a, b), (c, d) = e1, e2
    return float(s_src[a, c] * s_tgt[b, d])


def undirected_edge_similarity(s: ProfileSimilarity, e1, e2) -> float:
    """Similarity of unordered edges, averaged over both endpoint matchings."""
    if s.kind != "undirected":
        raise ValueError(f"need an undirected PSN, got kind {s.kind!r}")
    (a, b), (c, d) = e1, e2
    return float(0.5 * (s[a, c] * s[b, d] + s[a, d] * s[b, c]))


def psn_threshold(s: ProfileSimilarity, cutoff: float) -> list:
    """Unordered node pairs (as labels) with similarity strictly above ``cutoff``."""
    iu, ju = np.triu_indices(s.v, k=1)
    keep = s.matrix[iu, ju] > cutoff
    ids = s.node_ids
    return [(ids[i], ids[j]) for i, j in zip(iu[keep], ju[keep])]
