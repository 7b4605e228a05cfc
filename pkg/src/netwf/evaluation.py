"""Scoring denoised networks: errors, benchmark recovery, cross validation."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import special

from .filter import FilterConfig, impute_missing, netwf
from .network import WeightedNetwork, offdiag_mask, pair_mask
from .noise import Diagonal, homogenize_noise, naive_noise_guess
from .shrinker import optimal_shrink


class UndefinedMetricWarning(RuntimeWarning):
    pass


def _masked_pairs(X, Y, mask, undirected):
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if X.shape != Y.shape:
        raise ValueError(f"shape mismatch: {X.shape} vs {Y.shape}")
    mask = np.ones(X.shape, dtype=bool) if mask is None else np.asarray(mask, dtype=bool)
    if undirected:
        mask = np.triu(mask)
    if not mask.any():
        raise ValueError("empty mask")
    return X[mask], Y[mask]


def mse(X, Y, mask=None, undirected=False) -> float:
    """Mean squared difference over masked entries.

    With ``undirected=True`` only the upper triangle of the mask is used, so
    each unordered pair counts once.
    """
    x, y = _masked_pairs(X, Y, mask, undirected)
    return float(np.mean((x - y) ** 2))


def r_squared(X, Y, mask=None, undirected=False) -> float:
    """Coefficient of determination of predictions ``X`` for reference ``Y``."""
    x, y = _masked_pairs(X, Y, mask, undirected)
    if x.size < 2:
        raise ValueError("need at least two entries")
    ss_tot = np.sum((y - y.mean()) ** 2)
    if ss_tot == 0:
        warnings.warn("R^2 undefined for a constant reference", UndefinedMetricWarning, stacklevel=2)
        return float("nan")
    return float(1.0 - np.sum((x - y) ** 2) / ss_tot)


@dataclass(frozen=True)
class BenchmarkPairs:
    """Unordered label pairs known to be related (e.g. physical interactions)."""

    pairs: frozenset
    name: str = "benchmark"

    def __post_init__(self):
        clean = frozenset(frozenset(p) for p in self.pairs if len(frozenset(p)) == 2)
        object.__setattr__(self, "pairs", clean)

    def __len__(self):
        return len(self.pairs)

    def resolve(self, node_ids: Sequence):
        """Index pairs ``(i, j)`` with ``i < j``, and how many pairs were dropped."""
        index = {lab: i for i, lab in enumerate(node_ids)}
        out, dropped = set(), 0
        for p in self.pairs:
            a, b = tuple(p)
            if a in index and b in index:
                i, j = sorted((index[a], index[b]))
                out.add((i, j))
            else:
                dropped += 1
        return out, dropped


def _label_ranks(node_ids):
    try:
        order = sorted(range(len(node_ids)), key=lambda i: node_ids[i])
    except TypeError:
        order = sorted(range(len(node_ids)), key=lambda i: str(node_ids[i]))
    ranks = np.empty(len(node_ids), dtype=np.int64)
    ranks[order] = np.arange(len(node_ids))
    return ranks


def ranked_pairs(scores: WeightedNetwork, direction: str = "ascending"):
    """Evaluated pairs ordered from most to least extreme.

    ``ascending`` ranks the most negative scores first. Ties are broken by
    the pair's node labels in lexicographic order. Only observed, finite,
    off-diagonal entries are ranked; undirected networks contribute each
    unordered pair once.

    Returns
    -------
    i, j : ndarray
        Endpoint indices in rank order.
    """
    if direction not in ("ascending", "descending"):
        raise ValueError("direction must be 'ascending' or 'descending'")
    W = np.asarray(scores.weights)
    keep = pair_mask(scores) & scores.observed & np.isfinite(W)
    i, j = np.nonzero(keep)
    s = W[i, j]
    if direction == "descending":
        s = -s
    r = _label_ranks(scores.node_ids)
    ri, rj = r[i], r[j]
    if not scores.directed:
        ri, rj = np.minimum(ri, rj), np.maximum(ri, rj)
    order = np.lexsort((rj, ri, s))
    return i[order], j[order]


def _hits(scores: WeightedNetwork, benchmark: BenchmarkPairs, direction: str):
    i, j = ranked_pairs(scores, direction)
    bench, _ = benchmark.resolve(scores.node_ids)
    lo, hi = np.minimum(i, j), np.maximum(i, j)
    return np.fromiter(((a, b) in bench for a, b in zip(lo, hi)), dtype=bool, count=lo.size)


def auprc(scores: WeightedNetwork, benchmark: BenchmarkPairs, direction: str = "ascending") -> float:
    """Area under the precision-recall curve as average precision.

    Precision is read off at the rank of each benchmark pair and averaged
    over the benchmark pairs present among the ranked pairs.
    """
    hits = _hits(scores, benchmark, direction)
    n_pos = int(hits.sum())
    if n_pos == 0:
        raise ValueError(f"benchmark {benchmark.name!r} has no pairs among the ranked entries")
    precision = np.cumsum(hits) / np.arange(1, hits.size + 1)
    return float(precision[hits].sum() / n_pos)


def fold_enrichment(
    scores: WeightedNetwork, benchmark: BenchmarkPairs, top_k: int = 1000, direction: str = "ascending"
) -> float:
    """Benchmark share among the ``top_k`` highest-ranked pairs over its share overall."""
    hits = _hits(scores, benchmark, direction)
    if top_k <= 0:
        raise ValueError("top_k must be positive")
    if hits.size < top_k:
        raise ValueError(f"only {hits.size} ranked pairs, fewer than top_k={top_k}")
    background = hits.mean()
    if background == 0:
        warnings.warn("fold enrichment undefined: no benchmark pairs ranked", UndefinedMetricWarning, stacklevel=2)
        return float("nan")
    return float(hits[:top_k].mean() / background)


def benchmark_summary(scores: WeightedNetwork, benchmark: BenchmarkPairs, top_k: int = 1000) -> dict:
    """AUPRC, fold enrichment and the pair counts they were computed on."""
    hits = _hits(scores, benchmark, "ascending")
    _, dropped = benchmark.resolve(scores.node_ids)
    out = {
        "n_ranked": int(hits.size),
        "n_benchmark_ranked": int(hits.sum()),
        "n_benchmark_dropped": int(dropped),
    }
    out["auprc"] = auprc(scores, benchmark) if hits.any() else float("nan")
    k = min(top_k, hits.size)
    out["fold_enrichment"] = fold_enrichment(scores, benchmark, k) if k else float("nan")
    return out


def threshold_counts(net: WeightedNetwork, neg_thresh: float, pos_thresh: float):
    """Numbers of pairs strictly below ``neg_thresh`` and strictly above ``pos_thresh``."""
    keep = pair_mask(net) & net.observed
    vals = np.asarray(net.weights)[keep]
    return int(np.sum(vals < neg_thresh)), int(np.sum(vals > pos_thresh))


def thresholded_pairs(net: WeightedNetwork, neg_thresh: float) -> set:
    """Index pairs with weight strictly below ``neg_thresh``."""
    keep = pair_mask(net) & net.observed & (np.asarray(net.weights) < neg_thresh)
    return set(zip(*map(lambda a: a.tolist(), np.nonzero(keep))))


# --- cross validation -------------------------------------------------------


@dataclass(frozen=True)
class FoldAssignment:
    k: int
    assignment: dict
    seed: int

    def fold(self, f: int) -> list:
        return sorted(p for p, g in self.assignment.items() if g == f)

    def sizes(self) -> list:
        counts = np.bincount(list(self.assignment.values()), minlength=self.k)
        return counts.tolist()


def observed_pairs(net: WeightedNetwork) -> list:
    """Unordered index pairs ``(i, j)``, ``i < j``, with an observed weight."""
    obs = net.observed | net.observed.T
    i, j = np.nonzero(np.triu(obs, k=1))
    return list(zip(i.tolist(), j.tolist()))


def kfold_mask(net: WeightedNetwork, k: int, seed: int) -> FoldAssignment:
    """Seeded partition of the observed pairs into ``k`` near-equal folds."""
    pairs = observed_pairs(net)
    if not pairs:
        raise ValueError("no observed pairs")
    if k <= 0 or k > len(pairs):
        raise ValueError(f"k={k} invalid for {len(pairs)} observed pairs")
    perm = np.random.default_rng(seed).permutation(len(pairs))
    assignment = {}
    for f, chunk in enumerate(np.array_split(perm, k)):
        for idx in chunk:
            assignment[pairs[idx]] = f
    return FoldAssignment(k, assignment, seed)


def mask_pairs(net: WeightedNetwork, pairs: Iterable, variances=None):
    """Copy of ``net`` (and ``variances``) with both orientations of each pair missing."""
    W = net.weights.copy()
    var = None if variances is None else np.array(variances, dtype=float)
    for i, j in pairs:
        W[i, j] = W[j, i] = np.nan
        if var is not None:
            var[i, j] = var[j, i] = np.nan
    mask = net.observed.copy()
    mask[np.isnan(W)] = False
    return net.with_weights(W, observed=mask), var


def mean_impute_baseline(net: WeightedNetwork, masked_pairs: Sequence) -> np.ndarray:
    """Predict each masked pair as the average of its endpoints' mean weights.

    A node's mean runs over its observed off-diagonal weights (row and
    column) after masking; nodes with none fall back to the global mean.
    """
    masked, _ = mask_pairs(net, masked_pairs)
    rel = masked.observed & offdiag_mask(net.v)
    W = masked.filled(0.0)
    total = (W * rel).sum(axis=1) + (W * rel).sum(axis=0)
    count = rel.sum(axis=1) + rel.sum(axis=0)
    global_mean = W[rel].mean() if rel.any() else 0.0
    with np.errstate(invalid="ignore", divide="ignore"):
        node_mean = np.where(count > 0, total / np.maximum(count, 1), global_mean)
    return np.array([0.5 * (node_mean[i] + node_mean[j]) for i, j in masked_pairs], dtype=float)


@dataclass
class EvaluationReport:
    metrics: dict
    breakdown: dict = field(default_factory=dict)
    standard_error: dict = field(default_factory=dict)

    def to_dict(self, config_echo=None) -> dict:
        return {
            "metrics": self.metrics,
            "breakdown": self.breakdown,
            "stderr": self.standard_error,
            "config_echo": config_echo or {},
        }


def standard_error(values) -> float:
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return float("nan")
    return float(values.std(ddof=1) / np.sqrt(values.size))


METHOD_ALIASES = {"mi": "mean_impute"}


def _run_netwf(net, var, pairs, cfg):
    noise = Diagonal(var) if var is not None else naive_noise_guess(net)
    return np.asarray(netwf(net, noise, cfg).denoised)


def _run_os(net, var, pairs, cfg):
    sigma2 = homogenize_noise(Diagonal(var)).sigma2 if var is not None else naive_noise_guess(net).sigma2
    return np.asarray(optimal_shrink(net, sigma2)[0].weights)


def cross_validate(
    net: WeightedNetwork,
    variances=None,
    k: int = 10,
    seed: int = 0,
    methods: Sequence = ("netwf", "os", "mean_impute"),
    cfg: FilterConfig = FilterConfig(),
) -> EvaluationReport:
    """K-fold hold-out test of edge-weight inference.

    Each fold's pairs are masked (weights and variances), the remaining
    data are imputed, and every method predicts the masked entries. The
    score is the MSE against the held-out observed values.

    ``methods`` entries are ``"netwf"``, ``"os"``, ``"mean_impute"`` (alias
    ``"mi"``), or ``(name, fn)`` tuples where
    ``fn(imputed_net, imputed_variances, pairs)`` returns a full ``v x v``
    prediction matrix. Without variances, both built-in filters use the
    naive homogeneous noise guess.
    """
    folds = kfold_mask(net, k, seed)
    resolved = []
    for m in methods:
        if isinstance(m, tuple):
            resolved.append(m)
            continue
        name = METHOD_ALIASES.get(m, m)
        if name == "netwf":
            resolved.append((name, lambda n, v, p: _run_netwf(n, v, p, cfg)))
        elif name == "os":
            resolved.append((name, lambda n, v, p: _run_os(n, v, p, cfg)))
        elif name == "mean_impute":
            resolved.append((name, None))
        else:
            raise ValueError(f"unknown method {m!r}")

    truth = np.asarray(net.weights)
    per_fold = {name: [] for name, _ in resolved}
    for f in range(k):
        pairs = folds.fold(f)
        held = np.zeros(truth.shape, dtype=bool)
        for i, j in pairs:
            held[i, j] = net.observed[i, j]
            held[j, i] = net.observed[j, i]
        masked, masked_var = mask_pairs(net, pairs, variances)
        imputed, imputed_var = impute_missing(masked, masked_var)
        for name, fn in resolved:
            if fn is None:
                pred = np.zeros(truth.shape)
                vals = mean_impute_baseline(masked, pairs)
                for (i, j), val in zip(pairs, vals):
                    pred[i, j] = pred[j, i] = val
            else:
                pred = np.asarray(fn(imputed, imputed_var, pairs))
            per_fold[name].append(mse(pred, truth, held, undirected=not net.directed))

    metrics = {f"mse_{name}": float(np.mean(v)) for name, v in per_fold.items()}
    return EvaluationReport(
        metrics=metrics,
        breakdown={name: [float(x) for x in v] for name, v in per_fold.items()},
        standard_error={name: standard_error(v) for name, v in per_fold.items()},
    )


def paired_t_test(x, y):
    """Two-sided paired t-test.

    Returns ``(t, p)``. Identical samples give ``(0, 1)``; constant non-zero
    differences leave ``t`` undefined and return NaNs with a warning.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be equal-length vectors")
    n = x.size
    if n < 2:
        raise ValueError("need at least two pairs")
    d = x - y
    sd = d.std(ddof=1)
    if sd == 0:
        if np.all(d == 0):
            return 0.0, 1.0
        warnings.warn("t undefined: differences have zero variance", UndefinedMetricWarning, stacklevel=2)
        return float("nan"), float("nan")
    t = d.mean() / (sd / np.sqrt(n))
    df = n - 1
    p = special.betainc(0.5 * df, 0.5, df / (df + t * t))
    return float(t), float(p)
