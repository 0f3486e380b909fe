import numpy as np
import pytest

from gendyn.datasets import DATASETS, DatasetUnavailable, karate_factions, load_football, load_karate


def test_karate_counts_and_order():
    g, lab = load_karate()
    assert (g.n, g.edge_count) == (34, 78)
    assert g.labels == tuple(str(i) for i in range(34))
    assert g.total_weight == 78.0
    assert set(lab.values()) == {"Mr. Hi", "Officer"}


def test_karate_matches_networkx():
    nx = pytest.importorskip("networkx")
    G = nx.karate_club_graph()
    g, lab = load_karate()
    A = nx.to_numpy_array(G, nodelist=range(34), weight=None)
    np.testing.assert_array_equal(g.adjacency.toarray(), A)
    for v in G:
        assert lab[str(v)] == G.nodes[v]["club"]


def test_factions_partition_vertices():
    hi, off = karate_factions()
    assert len(hi) == 17 and len(off) == 17
    assert sorted(np.r_[hi, off].tolist()) == list(range(34))


def test_table_counts():
    counts = {d.name: (d.vertices, d.edges) for d in DATASETS}
    assert counts == {"karate": (34, 78), "football": (115, 613), "house": (434, 51033),
                      "blogs": (1490, 16714), "facebook": (4039, 88234), "power": (4941, 6594)}


def test_football_missing_is_explicit(monkeypatch, tmp_path):
    monkeypatch.setenv("GENDYN_DATA", str(tmp_path))
    try:
        load_football()
    except DatasetUnavailable as e:
        assert "football" in str(e)
    else:
        pytest.skip("football files are installed")


def test_football_loader_reads_user_files(monkeypatch, tmp_path):
    (tmp_path / "football.edges").write_text("1 0\n1 2\n")
    (tmp_path / "football.labels").write_text("0 8\n1 8\n2 3\n")
    monkeypatch.setenv("GENDYN_DATA", str(tmp_path))
    g, lab = load_football()
    assert g.labels == ("0", "1", "2") and lab["2"] == "3"
