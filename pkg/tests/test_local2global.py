import numpy as np
import pytest
from scipy.spatial.distance import pdist, squareform

from lasekit.errors import ConfigError, LasekitError
from lasekit.graph import Graph, m_hop_neighborhood
from lasekit.local2global import (PatchEmbedding, SubgraphCover, assemble_distances,
                                  build_cover, embed_cover, export_precomputed,
                                  read_precomputed)
from lasekit.spectral import subgraph_ase

from conftest import complete_graph, erdos_renyi, path_graph


def test_cover_complete_graph():
    assert len(build_cover(complete_graph(6), 1, 0)) == 1


def test_cover_path5():
    counts = {len(build_cover(path_graph(5), 1, s)) for s in range(50)}
    assert counts <= {2, 3} and counts


@pytest.mark.parametrize("seed", range(10))
def test_cover_invariants(seed):
    g = erdos_renyi(80, 0.03, seed)
    c = build_cover(g, 2, seed)
    assert c.covered(g.n).all()
    for s, nodes in c.patches:
        assert np.array_equal(nodes, m_hop_neighborhood(g, s, 2))
    c2 = build_cover(g, 2, seed)
    assert [s for s, _ in c.patches] == [s for s, _ in c2.patches]


def test_cover_bad_m():
    with pytest.raises(ConfigError):
        build_cover(path_graph(3), 0, 0)


def test_single_patch_equals_subgraph_ase():
    g = erdos_renyi(30, 0.3, 1)
    cover = build_cover(g, 5, 0)
    assert len(cover) == 1
    pe = embed_cover(g, cover, r=2)[0]
    emb, _ = subgraph_ase(g, pe.nodes, 2)
    assert np.array_equal(pe.X, emb.X[pe.nodes])


def test_parallel_identical():
    g = erdos_renyi(150, 0.03, 2)
    cover = build_cover(g, 2, 3)
    a = assemble_distances(embed_cover(g, cover, r=3, jobs=1), g.n)
    b = assemble_distances(embed_cover(g, cover, r=3, jobs=4), g.n)
    assert np.array_equal(a.D, b.D)


def test_patch_gram_optimal():
    g = erdos_renyi(120, 0.05, 4)
    for pe in embed_cover(g, build_cover(g, 1, 4), r=2):
        if pe.degenerate or pe.nodes.size > 40:
            continue
        A = g.to_dense()[np.ix_(pe.nodes, pe.nodes)]
        vals = np.linalg.eigvalsh(A)[::-1]
        best = np.sqrt(np.sum(vals[pe.r:] ** 2))
        assert np.linalg.norm(A - pe.X @ pe.X.T) == pytest.approx(best, abs=1e-8)


def test_reduced_and_degenerate_patches():
    # a star's adjacency has one positive eigenvalue; an isolated node has none
    g = Graph.from_edges(6, [(0, 1), (0, 2), (0, 3)])
    pes = embed_cover(g, SubgraphCover([(0, np.array([0, 1, 2, 3])), (4, np.array([4]))], 1, 0), r=3)
    assert pes[0].reduced and pes[0].r == 1 and not pes[0].degenerate
    assert pes[1].degenerate


def test_assembly_averaging_and_fill():
    p1 = PatchEmbedding(0, np.array([0, 1]), np.array([[0.0], [1.0]]), 1)
    p2 = PatchEmbedding(1, np.array([0, 1, 2]), np.array([[0.0], [3.0], [4.0]]), 1)
    a = assemble_distances([p1, p2], 4)
    assert a.D[0, 1] == 2.0 and a.D[1, 0] == 2.0
    assert a.fill_value == 40.0
    assert a.D[3, 0] == 40.0 and a.D[3, 3] == 0.0
    with pytest.raises(LasekitError):
        assemble_distances([PatchEmbedding(0, np.array([0]), None, 0, True)], 2)


def test_assembly_one_patch():
    X = np.random.default_rng(0).normal(size=(4, 2))
    a = assemble_distances([PatchEmbedding(0, np.arange(4), X, 2)], 6)
    assert np.allclose(a.D[:4, :4], squareform(pdist(X)))
    assert np.all(a.D[:4, 4:] == a.fill_value)


@pytest.mark.parametrize("fmt", ["csv", "raw64"])
def test_export_roundtrip(tmp_path, fmt):
    g = erdos_renyi(60, 0.05, 5)
    a = assemble_distances(embed_cover(g, build_cover(g, 2, 5), r=2), g.n)
    p = tmp_path / ("d." + ("csv" if fmt == "csv" else "raw64"))
    export_precomputed(a, p, fmt, meta={"m": 2, "r": 2, "seed": 5})
    back = read_precomputed(p)
    assert np.array_equal(back, a.D)
    if fmt == "raw64":
        assert p.stat().st_size == 8 + 8 * 60 * 60
    import json
    side = json.loads((tmp_path / (p.name + ".json")).read_text())
    assert side["fill_value"] == a.fill_value and side["m"] == 2
    off = ~np.eye(60, dtype=bool)
    if (a.counts[off] == 0).any():
        assert back[off][a.counts[off] == 0].max() == side["fill_value"]


def test_export_bad_format(tmp_path):
    a = assemble_distances([PatchEmbedding(0, np.arange(2), np.eye(2), 2)], 2)
    with pytest.raises(ConfigError):
        export_precomputed(a, tmp_path / "x", "npy")
