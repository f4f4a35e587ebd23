import numpy as np
import pytest

from lasekit.errors import ConfigError, LasekitError
from lasekit.experiments import (SHAPES, eigendecay_gap_check, load_spatial_fixture,
                                 regression_summary, resolve_config, run_coordinate_regression,
                                 run_eigendecay, run_experiment, run_reconstruction_sweep,
                                 run_shapes, shape_points, summarise_long,
                                 synthetic_spatial_graph, validate_rows)
from lasekit.latent_model import IsotropicGaussian, sample_latent


def test_eigendecay_dense_oracle_and_psd():
    rows = run_eigendecay(dims=[2], n=60, tau_grid=[0.5, 8.0], seed=3)
    assert len(rows) == 12
    vals = np.array([r[4] for r in rows]).reshape(2, 6)
    assert np.all(vals > -1e-10)
    assert np.all(np.diff(vals, axis=1) <= 0)
    # oracle: rebuild the same latent draw and take a full spectrum
    sub = int(np.random.SeedSequence([3, 2]).generate_state(1)[0])
    Z = sample_latent(IsotropicGaussian(dim=2), 60, sub).Z / np.sqrt(8.0)
    D2 = ((Z[:, None] - Z[None]) ** 2).sum(-1)
    full = np.linalg.eigvalsh(np.exp(-D2))[::-1][:6]
    assert np.allclose(vals[1], full, atol=1e-10)


def test_eigendecay_gap_grows():
    rows = run_eigendecay(dims=[2], seed=0)
    ok, lo, hi, prev = eigendecay_gap_check(rows, 2)
    assert hi < lo


def test_eigendecay_grid_validation():
    with pytest.raises(ConfigError):
        run_eigendecay(tau_grid=[1.0, 0.5])
    with pytest.raises(ConfigError):
        run_eigendecay(tau_grid=[-1.0])


def test_reconstruction_small():
    cfg = dict(n=250, trials=2, tau_grid=[1, 3], widths=[1.0, 3.0], seed=5)
    rows = run_reconstruction_sweep(**cfg)
    validate_rows(rows, "reconstruction")
    metrics = {m for _, _, m, _ in rows}
    assert metrics == {"rmse_ase", "rmse_soft_shifted", "rmse_soft_literal", "rmse_tophat"}
    assert all(0 <= v <= 1 for *_, v in rows)
    assert rows == run_reconstruction_sweep(jobs=2, **cfg)
    summ = summarise_long(rows)
    assert all(s[4] == 2 for s in summ)


def test_reconstruction_tau_zero_is_ase():
    cfg = dict(n=200, trials=1, tau_grid=[0.0], widths=[100.0], seed=1, profiles=["shifted"])
    rows = run_reconstruction_sweep(**cfg)
    v = {m: val for _, _, m, val in rows}
    assert v["rmse_soft_shifted"] == v["rmse_ase"] == v["rmse_tophat"]


def test_shape_points():
    for k in SHAPES:
        P = shape_points(k, [5, 5], 0.8, 200)
        assert P.shape == (200, 2)
        assert np.all(np.linalg.norm(P - 5, axis=1) <= 0.8 * np.sqrt(2) + 1e-12)
    with pytest.raises(ConfigError):
        shape_points("star", [0, 0])


def test_shapes_small():
    metrics, embs = run_shapes(n_background=1200, radius_grid=[1.5, 2.5], tau_grid=[0.3, 0.6],
                               seed=2)
    validate_rows(metrics, "shapes")
    validate_rows(embs, "shapes_embeddings")
    assert {m[1] for m in metrics} == {"full_ase", "subgraph_ase", "lase", "lase_direct2d"}
    assert len(metrics) == 16


def test_spatial_graph_and_fixture():
    g, C = synthetic_spatial_graph(400, 1)
    assert C.shape == (400, 2) and g.n == 400
    assert 2 < g.degrees().mean() < 5
    fg, fc = load_spatial_fixture()
    assert fc.shape == (fg.n, 2)


def test_regression_small():
    g, C = synthetic_spatial_graph(800, 2)
    rows = run_coordinate_regression(g, C, centers=2, m_grid=[60, 120], dims=[3],
                                     k_grid=[0, 20], tau_grid=[0.0, 0.1], n_test=5, seed=1)
    validate_rows(rows, "regression")
    summ = regression_summary(rows)
    assert set(summ) == {(3, m, meth) for m in (60, 120)
                         for meth in ("baseline", "full_ase", "subgraph_ase", "lase")}
    # tau = 0 is in the grid, so tuned LASE never has lower training R^2 than full ASE
    for m in (60, 120):
        assert summ[3, m, "lase"]["r2"] >= summ[3, m, "full_ase"]["r2"] - 1e-12


def test_config_validation(tmp_path):
    with pytest.raises(ConfigError):
        resolve_config("nope")
    with pytest.raises(ConfigError):
        resolve_config("shapes", {"colour": 1})
    with pytest.raises(ConfigError):
        resolve_config("shapes", {"seed": "1"})


def test_schema_validation():
    with pytest.raises(LasekitError):
        validate_rows([(1, 0.5, 0, 1)], "eigendecay")
    with pytest.raises(LasekitError, match="column 'd'"):
        validate_rows([("1", 0.5, 0, 1, 1.0)], "eigendecay")


def test_run_experiment_deterministic(tmp_path):
    a = run_experiment("eigendecay", {"seed": 2, "n": 30}, tmp_path / "a")
    b = run_experiment("eigendecay", {"seed": 2, "n": 30}, tmp_path / "b", jobs=3)
    assert a[0].read_bytes() == b[0].read_bytes()
    head = a[0].read_text().splitlines()
    assert head[0].startswith("# {") and head[1] == "d,tau,seed,k,eigenvalue"


def test_run_experiment_regression_files(tmp_path):
    g, C = synthetic_spatial_graph(500, 3)
    from lasekit.experiments import write_coords
    from lasekit.graph import write_edge_list
    write_edge_list(g, tmp_path / "g.edges")
    write_coords(C, tmp_path / "c.csv")
    cfg = {"graph": str(tmp_path / "g.edges"), "coords": str(tmp_path / "c.csv"), "centers": 1,
           "m_grid": [50], "dims": [3], "k_grid": [0], "tau_grid": [0.0], "n_test": 5, "seed": 0}
    (p,) = run_experiment("regression", cfg, tmp_path / "out")
    assert p.read_text().splitlines()[1] == "d,m,center,method,param,r2,mse"
