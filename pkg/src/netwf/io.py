"""Reading and writing networks, noise specifications and benchmark lists.

Matrix CSV: first row ``"",label_1,...,label_v``; each further row a label
followed by ``v`` numbers, ``NaN`` (any case) marking a missing entry.
Edge list: tab-separated ``source, target, weight[, variance]`` rows.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Sequence

import numpy as np

from .evaluation import BenchmarkPairs
from .network import WeightedNetwork
from .noise import Diagonal, Homogeneous, NoiseModel, estimate_ensemble_noise


class DataError(ValueError):
    pass


def _fmt(x: float) -> str:
    return "NaN" if not np.isfinite(x) else format(float(x), ".17g")


def _parse(token: str, where: str) -> float:
    t = token.strip()
    if t.lower() == "nan":
        return float("nan")
    try:
        val = float(t)
    except ValueError:
        raise DataError(f"{where}: cannot parse {token!r} as a number") from None
    if not np.isfinite(val):
        raise DataError(f"{where}: non-finite value {token!r}")
    return val


def read_matrix(path):
    """Parse a matrix CSV into ``(labels, array)`` with NaN for missing cells."""
    path = Path(path)
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows:
        raise DataError(f"{path}: empty file")
    labels = [c.strip() for c in rows[0][1:]]
    if len(set(labels)) != len(labels):
        raise DataError(f"{path}, line 1: duplicate column labels")
    v = len(labels)
    if len(rows) - 1 != v:
        raise DataError(f"{path}: {v} column labels but {len(rows) - 1} data rows")
    M = np.empty((v, v))
    row_labels = []
    for n, r in enumerate(rows[1:], start=2):
        if len(r) != v + 1:
            raise DataError(f"{path}, line {n}: expected {v + 1} cells, found {len(r)}")
        row_labels.append(r[0].strip())
        for c, tok in enumerate(r[1:], start=2):
            M[n - 2, c - 2] = _parse(tok, f"{path}, line {n}, column {c}")
    if row_labels != labels:
        raise DataError(f"{path}: row labels do not match column labels")
    return labels, M


def read_matrix_csv(path, directed: bool | None = None) -> WeightedNetwork:
    """Read a network; directedness is inferred from symmetry unless given.

    Reading a non-symmetric file as undirected averages the two
    orientations where both are present.
    """
    labels, M = read_matrix(path)
    if directed is False:
        M = _symmetrize_nan(M)
    return WeightedNetwork.from_array(M, labels, directed)


def _symmetrize_nan(M):
    known = np.isfinite(M)
    total = np.where(known, M, 0.0) + np.where(known, M, 0.0).T
    count = known.astype(float) + known.T
    return np.divide(total, count, out=np.full(M.shape, np.nan), where=count > 0)


def write_matrix_csv(path, matrix, node_ids: Sequence) -> None:
    if isinstance(matrix, WeightedNetwork):
        matrix = matrix.weights
    M = np.asarray(matrix, dtype=float)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([""] + [str(x) for x in node_ids])
        for lab, row in zip(node_ids, M):
            w.writerow([str(lab)] + [_fmt(x) for x in row])


def read_variance_csv(path, node_ids: Sequence | None = None) -> np.ndarray:
    labels, M = read_matrix(path)
    if node_ids is not None and list(labels) != [str(x) for x in node_ids]:
        raise DataError(f"{path}: labels do not match the network's node order")
    if np.any(M[np.isfinite(M)] < 0):
        raise DataError(f"{path}: negative variance")
    return M


def read_edge_list(path, node_universe: Sequence | None = None, directed: bool = True, return_variances: bool = False):
    """Read tab-separated edges; unlisted pairs are observed zeros.

    Repeated rows for the same pair are averaged (for undirected input,
    both orientations count as the same pair). Without a node universe the
    nodes are the sorted set of labels in the file.
    """
    path = Path(path)
    records = []
    has_var = None
    with open(path) as fh:
        for n, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) not in (3, 4):
                raise DataError(f"{path}, line {n}: expected 3 or 4 tab-separated fields")
            if has_var is None:
                has_var = len(parts) == 4
            elif has_var != (len(parts) == 4):
                raise DataError(f"{path}, line {n}: inconsistent variance column")
            w = _parse(parts[2], f"{path}, line {n}")
            var = _parse(parts[3], f"{path}, line {n}") if has_var else None
            if not np.isfinite(w):
                raise DataError(f"{path}, line {n}: missing weight")
            records.append((parts[0].strip(), parts[1].strip(), w, var, n))

    if node_universe is None:
        labels = sorted({r[0] for r in records} | {r[1] for r in records})
    else:
        labels = [str(x) for x in node_universe]
    index = {lab: i for i, lab in enumerate(labels)}
    v = len(labels)
    wsum = np.zeros((v, v))
    vsum = np.zeros((v, v))
    count = np.zeros((v, v))
    for a, b, w, var, n in records:
        if a not in index or b not in index:
            raise DataError(f"{path}, line {n}: label not in node universe")
        i, j = index[a], index[b]
        pairs = [(i, j)] if directed or i == j else [(i, j), (j, i)]
        for p in pairs:
            wsum[p] += w
            count[p] += 1
            if var is not None:
                vsum[p] += var
    W = np.divide(wsum, count, out=np.zeros_like(wsum), where=count > 0)
    net = WeightedNetwork(tuple(labels), W, directed=directed)
    if not return_variances:
        return net
    V = None
    if has_var:
        V = np.full((v, v), np.nan)
        np.divide(vsum, count, out=V, where=count > 0)
    return net, V


def write_edge_list(path, net: WeightedNetwork) -> None:
    """Write non-zero observed entries; undirected networks once per pair."""
    W = np.asarray(net.weights)
    keep = net.observed & (W != 0)
    if not net.directed:
        keep = np.triu(keep)
    with open(path, "w") as fh:
        for i, j in zip(*np.nonzero(keep)):
            fh.write(f"{net.node_ids[i]}\t{net.node_ids[j]}\t{_fmt(W[i, j])}\n")


def build_monthly_frequency(monthly_counts: Sequence[WeightedNetwork], drop_self: bool = True):
    """Monthly email-frequency snapshots and their full-period average.

    Each snapshot keeps its raw count (one month of exposure); the
    aggregate is the total count divided by the number of months.
    """
    if not monthly_counts:
        raise ValueError("no monthly networks")
    ids = monthly_counts[0].node_ids
    out = []
    for m in monthly_counts:
        if m.node_ids != ids:
            raise ValueError("monthly networks are over different node sets")
        C = m.filled(0.0)
        if np.any(C < 0) or np.any(C != np.round(C)):
            raise ValueError("counts must be non-negative integers")
        if drop_self:
            np.fill_diagonal(C, 0.0)
        out.append(WeightedNetwork(ids, C, directed=True))
    total = np.sum([np.asarray(m.weights) for m in out], axis=0)
    return out, WeightedNetwork(ids, total / len(out), directed=True)


def read_benchmark(path, name: str | None = None) -> BenchmarkPairs:
    """Two-column TSV of node labels."""
    path = Path(path)
    pairs = []
    with open(path) as fh:
        for n, line in enumerate(fh, start=1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) < 2:
                raise DataError(f"{path}, line {n}: expected two tab-separated labels")
            pairs.append((parts[0].strip(), parts[1].strip()))
    return BenchmarkPairs(frozenset(pairs), name or path.stem)


def read_network(path, fmt: str = "auto", directed: bool | None = None, node_universe=None) -> WeightedNetwork:
    path = Path(path)
    if fmt == "auto":
        fmt = "edgelist" if path.suffix.lower() in (".tsv", ".txt", ".edges") else "matrix"
    if fmt == "matrix":
        return read_matrix_csv(path, directed)
    if fmt == "edgelist":
        return read_edge_list(path, node_universe, directed=True if directed is None else directed)
    raise ValueError(f"unknown format {fmt!r}")


def parse_noise_spec(spec, net: WeightedNetwork | None = None, base_dir=None) -> NoiseModel:
    """Build a noise model from its JSON description.

    ``{"type": "homogeneous", "sigma2": s}``, ``{"type": "diagonal", "path": p}``
    or ``{"type": "ensemble", "snapshots": [p, ...]}``. ``spec`` may be a
    dict, a JSON string, or a path to a JSON file. Relative paths resolve
    against ``base_dir``.
    """
    if isinstance(spec, (str, Path)):
        text = str(spec)
        if not text.lstrip().startswith("{"):
            p = Path(text)
            base_dir = base_dir or p.parent
            text = p.read_text()
        try:
            spec = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DataError(f"invalid noise specification: {exc}") from None
    base = Path(base_dir) if base_dir else Path.cwd()
    kind = spec.get("type")
    if kind == "homogeneous":
        return Homogeneous(float(spec["sigma2"]))
    if kind == "diagonal":
        var = read_variance_csv(base / spec["path"], None if net is None else net.node_ids)
        if not np.all(np.isfinite(var)):
            raise DataError("diagonal noise file has missing variances")
        return Diagonal(var)
    if kind == "ensemble":
        snaps = [read_network(base / p, directed=None if net is None else net.directed,
                              node_universe=None if net is None else net.node_ids)
                 for p in spec["snapshots"]]
        return estimate_ensemble_noise(snaps)[0]
    raise DataError(f"unknown noise type {kind!r}")
