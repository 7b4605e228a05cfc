import json

import numpy as np
import pytest

from netwf import WeightedNetwork
from netwf.io import (
    DataError,
    build_monthly_frequency,
    parse_noise_spec,
    read_benchmark,
    read_edge_list,
    read_matrix_csv,
    read_network,
    read_variance_csv,
    write_edge_list,
    write_matrix_csv,
)
from netwf.noise import Diagonal, Ensemble, Homogeneous

from conftest import random_directed, random_undirected


def test_matrix_round_trip_exact(tmp_path):
    net = random_directed(6, 0)
    p = tmp_path / "m.csv"
    write_matrix_csv(p, net.weights, net.node_ids)
    back = read_matrix_csv(p)
    assert back.directed and back.node_ids == tuple(str(x) for x in net.node_ids)
    assert np.array_equal(back.weights, net.weights)


def test_undirected_detected(tmp_path):
    net = random_undirected(5, 1)
    p = tmp_path / "u.csv"
    write_matrix_csv(p, net.weights, net.node_ids)
    assert not read_matrix_csv(p).directed


def test_missing_cells(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text(",a,b,c\na,0,NaN,1\nb,NaN,0,2\nc,1,2,0\n")
    net = read_matrix_csv(p)
    assert not net.directed
    assert int((~net.observed).sum()) == 2
    p.write_text(",a,b,c\na,0,,1\nb,,0,2\nc,1,2,0\n")
    with pytest.raises(DataError):
        read_matrix_csv(p)


def test_forced_undirected_averages(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text(",a,b\na,0,1\nb,3,0\n")
    net = read_matrix_csv(p, directed=False)
    assert net.weights[0, 1] == net.weights[1, 0] == 2.0


@pytest.mark.parametrize(
    "text, fragment",
    [
        (",a,b\na,0,1\nb,1\n", "line 3"),
        (",a,a\na,0,1\na,1,0\n", "duplicate"),
        (",a,b\na,0,x\nb,1,0\n", "column 3"),
        (",a,b\nb,0,1\na,1,0\n", "row labels"),
        (",a,b\na,0,1\n", "data rows"),
    ],
)
def test_malformed_matrix(tmp_path, text, fragment):
    p = tmp_path / "bad.csv"
    p.write_text(text)
    with pytest.raises(DataError, match=fragment):
        read_matrix_csv(p)


def test_variance_labels_must_match(tmp_path):
    p = tmp_path / "v.csv"
    p.write_text(",a,b\na,0,1\nb,1,0\n")
    assert read_variance_csv(p, ["a", "b"]).shape == (2, 2)
    with pytest.raises(DataError):
        read_variance_csv(p, ["b", "a"])
    p.write_text(",a,b\na,0,-1\nb,-1,0\n")
    with pytest.raises(DataError):
        read_variance_csv(p)


def test_edge_list_empty_with_universe(tmp_path):
    p = tmp_path / "e.tsv"
    p.write_text("# nothing\n")
    net = read_edge_list(p, node_universe=["x", "y", "z"])
    assert net.v == 3 and net.fully_observed and not np.any(net.weights)


def test_edge_list_duplicates_averaged(tmp_path):
    p = tmp_path / "e.tsv"
    p.write_text("a\tb\t1\na\tb\t3\nb\tc\t5\n")
    net = read_edge_list(p)
    assert net.node_ids == ("a", "b", "c")
    assert net.weights[0, 1] == 2.0 and net.weights[1, 0] == 0.0
    und = read_edge_list(p, directed=False)
    assert und.weights[1, 0] == 2.0 and und.weights[2, 1] == 5.0


def test_edge_list_variances(tmp_path):
    p = tmp_path / "e.tsv"
    p.write_text("a\tb\t1\t0.5\n")
    net, var = read_edge_list(p, return_variances=True)
    assert var[0, 1] == 0.5 and np.isnan(var[1, 0])
    p.write_text("a\tb\t1\t0.5\nb\ta\t1\n")
    with pytest.raises(DataError, match="line 2"):
        read_edge_list(p)


def test_edge_list_bad_label(tmp_path):
    p = tmp_path / "e.tsv"
    p.write_text("a\tq\t1\n")
    with pytest.raises(DataError):
        read_edge_list(p, node_universe=["a", "b"])


def test_edge_list_round_trip(tmp_path):
    net = random_undirected(5, 2)
    p = tmp_path / "e.tsv"
    write_edge_list(p, net)
    back = read_edge_list(p, node_universe=[str(x) for x in net.node_ids], directed=False)
    off = ~np.eye(5, dtype=bool)
    assert np.array_equal(back.weights[off], np.asarray(net.weights)[off])


def test_read_network_dispatch(tmp_path):
    p = tmp_path / "e.tsv"
    p.write_text("a\tb\t1\n")
    assert read_network(p).directed
    assert not read_network(p, directed=False).directed


def monthly(counts):
    return WeightedNetwork(("a", "b"), np.asarray(counts, dtype=float), directed=True)


def test_monthly_even():
    months = [monthly([[0, 2], [0, 0]]) for _ in range(12)]
    snaps, full = build_monthly_frequency(months)
    assert all(s.weights[0, 1] == 2 for s in snaps)
    assert full.weights[0, 1] == 2.0


def test_monthly_burst():
    months = [monthly([[0, 12], [0, 0]])] + [monthly([[0, 0], [0, 0]])] * 11
    snaps, full = build_monthly_frequency(months)
    assert snaps[0].weights[0, 1] == 12 and full.weights[0, 1] == 1.0


def test_monthly_self_links_dropped():
    snaps, full = build_monthly_frequency([monthly([[4, 0], [0, 0]])])
    assert full.weights[0, 0] == 0.0
    _, kept = build_monthly_frequency([monthly([[4, 0], [0, 0]])], drop_self=False)
    assert kept.weights[0, 0] == 4.0


def test_monthly_rejects_fractional():
    with pytest.raises(ValueError):
        build_monthly_frequency([monthly([[0, 0.5], [0, 0]])])


def test_benchmark(tmp_path):
    p = tmp_path / "complexes.tsv"
    p.write_text("# header\na\tb\nb\ta\nc\tc\n")
    bench = read_benchmark(p)
    assert bench.name == "complexes" and len(bench) == 1


class TestNoiseSpec:
    def test_homogeneous(self):
        model = parse_noise_spec('{"type": "homogeneous", "sigma2": 0.25}')
        assert isinstance(model, Homogeneous) and model.sigma2 == 0.25

    def test_diagonal_relative_path(self, tmp_path):
        (tmp_path / "var.csv").write_text(",a,b\na,0,1\nb,1,0\n")
        spec = tmp_path / "noise.json"
        spec.write_text(json.dumps({"type": "diagonal", "path": "var.csv"}))
        model = parse_noise_spec(str(spec))
        assert isinstance(model, Diagonal) and model.var[0, 1] == 1.0

    def test_ensemble(self, tmp_path):
        for n, w in enumerate([1.0, 3.0]):
            (tmp_path / f"s{n}.csv").write_text(f",a,b\na,0,{w}\nb,0,0\n")
        model = parse_noise_spec({"type": "ensemble", "snapshots": ["s0.csv", "s1.csv"]}, base_dir=tmp_path)
        assert isinstance(model, Ensemble)
        # sample variance of {1, 3} is 2
        assert model.variances(2)[0, 1] == pytest.approx(2.0)

    def test_invalid(self):
        with pytest.raises(DataError):
            parse_noise_spec('{"type": "pink"}')
        with pytest.raises(DataError):
            parse_noise_spec("{not json")
