import numpy as np
import pytest

import blocklearn as bl
from blocklearn.dataio import resolve_data_path


def test_load_karate(karate):
    g = karate.graph
    assert g.n == 34
    assert g.num_edges == 78
    assert not g.directed
    assert sorted(karate.class_names) == ["instructor", "president"]
    # instructor (node "1") and president (node "34") lead their own classes
    by_name = {g.name_of(v): v for v in range(g.n)}
    t = karate.truth.labels
    assert t[by_name["1"]] != t[by_name["34"]]


def test_load_edge_list(tmp_path):
    p = tmp_path / "g.edges"
    p.write_text("# comment\na b\nb c\n\nc a # inline\n")
    g = bl.load_edge_list(p, directed=False)
    assert g.n == 3
    assert g.num_edges == 3
    assert g.node_names == ["a", "b", "c"]


def test_load_edge_list_errors(tmp_path):
    dup = tmp_path / "dup.edges"
    dup.write_text("a b\nb a\n")
    with pytest.raises(bl.DataError) as e:
        bl.load_edge_list(dup, directed=False)
    assert "2" in str(e.value)

    loop = tmp_path / "loop.edges"
    loop.write_text("a a\n")
    with pytest.raises(bl.DataError):
        bl.load_edge_list(loop, directed=False)
    g = bl.load_edge_list(loop, directed=True)
    assert g.num_edges == 1

    bad = tmp_path / "bad.edges"
    bad.write_text("a b c\n")
    with pytest.raises(bl.DataError):
        bl.load_edge_list(bad, directed=False)


def test_load_labels(tmp_path):
    edges = tmp_path / "g.edges"
    edges.write_text("a b\nb c\n")
    labels = tmp_path / "g.labels"
    labels.write_text("a red\nb blue\nc red\n")
    g = bl.load_edge_list(edges, directed=False)
    truth, names = bl.load_labels(labels, g)
    assert names == ["red", "blue"]
    assert list(truth.labels) == [0, 1, 0]


def test_load_labels_missing_node(tmp_path):
    edges = tmp_path / "g.edges"
    edges.write_text("a b\n")
    labels = tmp_path / "g.labels"
    labels.write_text("a red\n")
    g = bl.load_edge_list(edges, directed=False)
    with pytest.raises(bl.DataError):
        bl.load_labels(labels, g)


def test_data_dir_env(tmp_path, monkeypatch):
    f = tmp_path / "x.edges"
    f.write_text("0 1\n")
    monkeypatch.setenv("BLOCKLEARN_DATA_DIR", str(tmp_path))
    assert resolve_data_path("x.edges") == f
    with pytest.raises(bl.DataError):
        resolve_data_path("nothere.edges")


def test_learning_curve_csv(tmp_path, tiny_graph):
    truth = bl.Labeling(np.array([0, 0, 0, 1, 1, 1]), 2)
    cfg = bl.ChainConfig(num_chains=4, steps_per_chain=1000, burn_in=200)
    traj = bl.run_campaign(tiny_graph, bl.CuratedOracle(truth), "degree",
                           bl.PriorConfig(), cfg, stop=2, k=2, truth=truth)
    out = tmp_path / "curve.csv"
    bl.export_learning_curve_csv([traj], out)
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "stage,strategy,q,accuracy"
    # 2 stages x 5 thresholds data rows
    assert len(lines) == 1 + 2 * 5


def test_exploration_stats_csv(tmp_path):
    stats = [(0, 1.0, 0.0, 2.0), (1, 0.0, 0.0, 1.0)]
    out = tmp_path / "order.csv"
    bl.export_exploration_stats_csv(stats, out)
    lines = out.read_text().strip().splitlines()
    assert len(lines) == 3
