import numpy as np
import pytest
from scipy.stats import ortho_group

from lasekit.errors import ConfigError, LasekitError, SpectralError
from lasekit.evaluation import (neighbour_mean_baseline, pca_project, procrustes_align,
                                reconstruct_probabilities, regress_coordinates, rmse_region,
                                write_long_csv, write_report_json)
from lasekit.graph import Graph
from lasekit.spectral import lase
from lasekit.weights import subgraph_weights

from conftest import erdos_renyi


def test_reconstruct_trivial():
    X = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.3, 0.0]])
    P, lo, hi = reconstruct_probabilities(X, return_counts=True)
    assert P[0, 1] == 1.0 and P[0, 2] == 0.0
    assert P[0, 3] == 1.0 and hi > 0
    assert P.min() >= 0 and P.max() <= 1


@pytest.mark.filterwarnings("ignore::lasekit.spectral.NegativeEigenvalueWarning")
def test_reconstruct_excluded_node_named():
    g = erdos_renyi(20, 0.4, 0)
    emb, _ = lase(g, subgraph_weights(20, range(15)), 2)
    with pytest.raises(SpectralError, match="17"):
        reconstruct_probabilities(emb, nodes=[0, 17])


def test_rmse_trivial():
    X = np.array([[1.0], [1.0], [1.0]])
    assert rmse_region(X, np.ones((3, 3)), [0, 1, 2]).rmse == 0.0
    r = rmse_region(np.zeros((3, 1)), np.ones((3, 3)), [0, 1, 2])
    assert r.rmse == 1.0 and r.n_pairs == 3
    with pytest.raises(ConfigError):
        rmse_region(X, np.ones((3, 3)), [1])


def test_rmse_orthogonal_invariance():
    rng = np.random.default_rng(0)
    X = rng.uniform(0, 0.6, size=(30, 3))
    P = rng.uniform(size=(30, 30))
    P = (P + P.T) / 2
    Q = ortho_group.rvs(3, random_state=1)
    region = np.arange(5, 25)
    assert rmse_region(X @ Q, P, region).rmse == pytest.approx(rmse_region(X, P, region).rmse, abs=1e-14)


def test_procrustes_identity_and_rotation():
    rng = np.random.default_rng(2)
    X = rng.normal(size=(50, 3))
    res = procrustes_align(X, X)
    assert np.allclose(res.Q, np.eye(3), atol=1e-12) and res.residual < 1e-12
    R = ortho_group.rvs(3, random_state=3)
    res = procrustes_align(X, X @ R)
    assert np.allclose(res.Q, R, atol=1e-10) and res.residual <= 1e-10


def test_procrustes_reflection():
    X = np.random.default_rng(4).normal(size=(20, 2))
    res = procrustes_align(X, X * [1, -1])
    assert np.allclose(res.Q, np.diag([1, -1]), atol=1e-12)
    assert np.linalg.det(res.Q) == pytest.approx(-1)


def test_procrustes_minimal_and_rank_flag():
    rng = np.random.default_rng(5)
    X = rng.normal(size=(40, 3))
    Y = X @ ortho_group.rvs(3, random_state=6) + 0.1 * rng.normal(size=(40, 3))
    res = procrustes_align(X, Y)
    for k in range(50):
        Qp = res.Q @ ortho_group.rvs(3, random_state=100 + k)
        assert np.linalg.norm(X @ Qp - Y) >= res.residual - 1e-12
    Xd = np.column_stack([X[:, 0], np.zeros(40), np.zeros(40)])
    assert procrustes_align(Xd, Y).rank_deficient
    with pytest.raises(ConfigError):
        procrustes_align(X, Y[:, :2])


def test_procrustes_centered_scaled():
    rng = np.random.default_rng(7)
    X = rng.normal(size=(30, 2))
    R = ortho_group.rvs(2, random_state=8)
    Y = 2.5 * X @ R + [3.0, -1.0]
    res = procrustes_align(X, Y, center=True, scale=True)
    assert res.scale == pytest.approx(2.5) and res.residual < 1e-10


def test_pca_plane_and_full():
    rng = np.random.default_rng(0)
    B = np.linalg.qr(rng.normal(size=(3, 2)))[0]
    X = rng.normal(size=(100, 2)) @ B.T + 5.0
    Z, V = pca_project(X, 2, return_components=True)
    Xc = X - X.mean(axis=0)
    assert np.abs(Z @ V.T - Xc).max() < 1e-10
    W = rng.normal(size=(40, 4))
    Zf = pca_project(W, 4)
    from scipy.spatial.distance import pdist
    assert np.allclose(pdist(Zf), pdist(W), atol=1e-10)
    with pytest.raises(ConfigError):
        pca_project(W, 5)
    with pytest.raises(ConfigError):
        pca_project(W[:1], 2)


def test_pca_variance_properties():
    rng = np.random.default_rng(1)
    X = rng.normal(size=(20000, 6))
    Z = pca_project(X, 3)
    ratio = Z.var(axis=0).sum() / (X - X.mean(0)).var(axis=0).sum()
    assert ratio == pytest.approx(0.5, abs=0.03)
    Y = rng.normal(size=(200, 5)) * [3, 2, 1, 0.5, 0.2]
    kept = pca_project(Y, 2).var(axis=0).sum()
    Yc = Y - Y.mean(0)
    for k in range(100):
        Qr = np.linalg.qr(rng.normal(size=(5, 2)))[0]
        assert kept >= (Yc @ Qr).var(axis=0).sum() - 1e-12


def test_regression_exact_and_null():
    rng = np.random.default_rng(3)
    X = rng.normal(size=(60, 3))
    B = rng.normal(size=(3, 2))
    rep = regress_coordinates(X[:50], X[:50] @ B + 1.0, X[50:], X[50:] @ B + 1.0)
    assert np.allclose(rep.r2, 1.0) and rep.mse < 1e-20
    assert np.allclose(rep.coefficients, B) and np.allclose(rep.intercept, 1.0)
    null = regress_coordinates(rng.normal(size=(2000, 3)), rng.normal(size=(2000, 1)))
    assert abs(null.r2_pooled) < 0.01
    with pytest.raises(ConfigError):
        regress_coordinates(X[:3], X[:3, :1])


def test_regression_normal_equations_oracle():
    for seed in range(5):
        rng = np.random.default_rng(seed)
        X = rng.normal(size=(40, 4))
        Y = rng.normal(size=(40, 2))
        D = np.column_stack([np.ones(40), X])
        beta = np.linalg.solve(D.T @ D, D.T @ Y)
        rep = regress_coordinates(X, Y)
        assert np.allclose(rep.coefficients, beta[1:], atol=1e-10)
        assert max(rep.r2) <= 1


def test_regression_rank_deficient():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(30, 1))
    rep = regress_coordinates(np.hstack([x, x]), 2 * x)
    assert rep.rank_deficient and rep.condition_number > 1e10
    assert rep.r2[0] == pytest.approx(1.0)


def test_neighbour_mean():
    g = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])
    coords = np.array([[9.0, 9.0], [0.0, 0.0], [2.0, 2.0], [5.0, 5.0]])
    known = np.array([False, True, True, False])
    assert neighbour_mean_baseline(g, coords, known, 0).tolist() == [1.0, 1.0]
    assert neighbour_mean_baseline(g, coords, [0, 1, 0, 0], 0).tolist() == [0.0, 0.0]
    with pytest.raises(LasekitError):
        neighbour_mean_baseline(g, coords, known, 3)
    g2 = erdos_renyi(30, 0.3, 1)
    C = np.random.default_rng(1).normal(size=(30, 2))
    k = np.arange(30) % 2 == 0
    nb = [j for j in g2.neighbors(5) if k[j]]
    assert np.allclose(neighbour_mean_baseline(g2, C, k, 5), C[nb].mean(axis=0))


def test_report_and_long_csv(tmp_path):
    rep = regress_coordinates(np.arange(10.0)[:, None], np.arange(10.0))
    write_report_json(rep, tmp_path / "r.json")
    assert '"r2_pooled"' in (tmp_path / "r.json").read_text()
    write_long_csv([(1.0, 0, "rmse", 0.1)], tmp_path / "l.csv")
    lines = (tmp_path / "l.csv").read_text().splitlines()
    assert "param,seed,metric,value" in lines
