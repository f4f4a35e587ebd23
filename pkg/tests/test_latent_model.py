import numpy as np
import pytest

from lasekit.errors import ConfigError, LasekitError
from lasekit.evaluation import procrustes_align
from lasekit.latent_model import (IsotropicGaussian, KernelSpec, UniformBox,
                                  build_probability_matrix, grid_measure,
                                  mercer_features_grid, read_latent_csv, sample_graph,
                                  sample_latent, write_latent_csv, write_mercer_csv)


def test_uniform_sample_support_and_determinism():
    a = sample_latent(UniformBox(0, 10, 1), 1000, seed=7)
    b = sample_latent(UniformBox(0, 10, 1), 1000, seed=7)
    assert a.Z.shape == (1000, 1) and a.d == 1
    assert UniformBox(0, 10, 1).contains(a.Z)
    assert np.array_equal(a.Z, b.Z)


def test_gaussian_sample():
    s = sample_latent(IsotropicGaussian(dim=3, precision=4.0), 100, seed=1)
    assert s.Z.shape == (100, 3)
    # sd = 0.5
    assert 0.3 < s.Z.std() < 0.7
    t = sample_latent(IsotropicGaussian(dim=2, precision=1.0, radius=0.5), 50, seed=1)
    assert np.all(np.linalg.norm(t.Z, axis=1) <= 0.5)


@pytest.mark.parametrize("dist", [UniformBox(1, 1, 1), UniformBox(0, 1, 0),
                                  IsotropicGaussian(1, -1.0)])
def test_bad_support(dist):
    with pytest.raises(ConfigError):
        sample_latent(dist, 10, 0)


def test_latent_csv_roundtrip(tmp_path):
    s = sample_latent(UniformBox(0, 10, 2), 20, 3)
    write_latent_csv(s, tmp_path / "z.csv")
    assert np.array_equal(read_latent_csv(tmp_path / "z.csv"), s.Z)
    assert (tmp_path / "z.csv").read_text().splitlines()[1] == "index,z1,z2"


def test_probability_matrix_values():
    P = build_probability_matrix(np.array([[0.0], [1.0], [2.0]]), KernelSpec("gaussian_full"))
    assert P[0, 1] == pytest.approx(np.exp(-1.0), abs=1e-15)
    assert P[0, 2] == pytest.approx(np.exp(-4.0), abs=1e-15)
    assert np.all(np.diag(P) == 0)
    Ph = build_probability_matrix(np.array([[0.0], [1.0]]), KernelSpec("gaussian_half"))
    assert Ph[0, 1] == pytest.approx(np.exp(-0.5), abs=1e-15)


def test_probability_matrix_limits_and_symmetry():
    Z = np.array([[0.0, 0.0], [0.0, 0.0], [1e3, 0.0]])
    P = build_probability_matrix(Z)
    assert P[0, 1] == 1.0 and P[0, 2] == 0.0
    Z = sample_latent(UniformBox(0, 10, 2), 200, 0).Z
    P = build_probability_matrix(Z)
    assert np.array_equal(P, P.T)
    assert P.min() >= 0 and P.max() <= 1
    K = build_probability_matrix(Z, zero_diagonal=False)
    assert np.all(np.diag(K) == 1.0)


def test_custom_kernel_symmetrised():
    k = KernelSpec.custom(lambda X, Y: np.exp(-np.abs(X - Y.T)))
    P = build_probability_matrix(np.linspace(0, 1, 5), k)
    assert np.array_equal(P, P.T)
    assert P[0, 1] == pytest.approx(np.exp(-0.25))


def test_sample_graph_extremes():
    assert sample_graph(np.zeros((5, 5)), 0).n_edges == 0
    P = np.ones((5, 5))
    np.fill_diagonal(P, 0)
    assert sample_graph(P, 0).n_edges == 10


def test_sample_graph_deterministic():
    P = build_probability_matrix(sample_latent(UniformBox(0, 3, 1), 50, 0))
    a, b = sample_graph(P, 4), sample_graph(P, 4)
    assert (a.adjacency != b.adjacency).nnz == 0


def test_edge_frequency_monte_carlo():
    # the (0,1) and (0,2) entries over 10^4 seeds stay within 3 standard errors
    P = np.array([[0, 0.3, 0.8], [0.3, 0, 0.05], [0.8, 0.05, 0]])
    trials = 10_000
    hits = np.zeros((3, 3))
    for s in range(trials):
        hits += sample_graph(P, s).to_dense()
    freq = hits / trials
    se = np.sqrt(P * (1 - P) / trials)
    iu = np.triu_indices(3, 1)
    assert np.all(np.abs(freq - P)[iu] <= 3 * se[iu] + 1e-12)


# Mercer features ----------------------------------------------------------------

def laplace_kernel():
    return KernelSpec.custom(lambda X, Y: np.exp(-np.abs(X[:, :1] - Y[:, :1].T)))


def test_gram_reconstruction_full_rank():
    # exp(-|x-y|) is strictly positive definite with slow spectral decay,
    # so every grid eigenvalue is clearly positive and K = G is allowed
    mu = grid_measure(0, 2, G=60)
    mf = mercer_features_grid(laplace_kernel(), mu, K=60)
    F = laplace_kernel()(mu.points)
    assert np.abs(mf.gram() - F).max() < 1e-10


def test_gram_error_decreases_with_K():
    mu = grid_measure(0, 10, G=200)
    k = KernelSpec("gaussian_half")
    mf = mercer_features_grid(k, mu, K=20)
    F = k(mu.points)
    errs = [np.abs(mf.gram(r) - F).max() for r in (2, 5, 10, 20)]
    assert all(a > b for a, b in zip(errs, errs[1:]))


def test_uniform_masses_reduce_to_unweighted():
    k = KernelSpec("gaussian_half")
    a = mercer_features_grid(k, grid_measure(0, 10, G=300), K=8)
    b = mercer_features_grid(k, grid_measure(0, 10, G=300, weight=lambda x: np.full(len(x), 3.0)), K=8)
    assert np.allclose(a.features, b.features, atol=1e-9)
    assert np.allclose(a.eigenvalues, b.eigenvalues, atol=1e-13)


def test_orthonormality_and_sorted():
    mu = grid_measure(0, 10, G=300, weight=lambda x: np.exp(-0.5 * np.abs(x[:, 0] - 4)))
    mf = mercer_features_grid(KernelSpec("gaussian_half"), mu, K=10)
    U = mf.eigenfunctions()
    Gm = U.T @ (mf.masses[:, None] * U)
    assert np.abs(Gm - np.eye(10)).max() < 1e-8
    assert np.all(np.diff(mf.eigenvalues) <= 0) and np.all(mf.eigenvalues >= 0)


def test_K_deficiency_error():
    mu = grid_measure(0, 10, G=200)
    with pytest.raises(LasekitError, match="positive"):
        mercer_features_grid(KernelSpec("gaussian_full"), mu, K=200)


def test_non_psd_kernel_rejected():
    bad = KernelSpec.custom(lambda X, Y: np.where(np.abs(X - Y.T) < 1.5, 1.0, 0.0))
    with pytest.raises(LasekitError, match="PSD"):
        mercer_features_grid(bad, grid_measure(0, 10, G=100), K=2)


def test_localised_features_zoom_in():
    """Larger concentration gives better rank-2 inner products near the centre."""
    k = KernelSpec("gaussian_half")
    zs = 1.5
    errs = []
    for tau in (0.0, 0.5, 2.0, 8.0):
        mu = grid_measure(0, 10, G=500, weight=lambda x: np.exp(-tau * np.abs(x[:, 0] - zs)))
        mf = mercer_features_grid(k, mu, K=2)
        near = np.flatnonzero(np.abs(mf.grid[:, 0] - zs) <= 0.5)
        F = k(mf.grid[near])
        errs.append(np.abs(mf.gram()[np.ix_(near, near)] - F).max())
    assert all(a > b for a, b in zip(errs, errs[1:]))


def test_procrustes_alignment_to_unweighted():
    k = KernelSpec("gaussian_half")
    base = mercer_features_grid(k, grid_measure(0, 10, G=500), K=2)
    loc = mercer_features_grid(
        k, grid_measure(0, 10, G=500, weight=lambda x: np.exp(-2 * np.abs(x[:, 0] - 7.5))), K=2)
    res = procrustes_align(loc.features, base.features)
    assert np.allclose(res.Q @ res.Q.T, np.eye(2), atol=1e-12)
    assert res.residual <= np.linalg.norm(loc.features - base.features) + 1e-12


def test_mercer_csv(tmp_path):
    mf = mercer_features_grid(KernelSpec("gaussian_half"), grid_measure(0, 10, G=50), K=3)
    write_mercer_csv(mf, tmp_path / "m.csv")
    lines = (tmp_path / "m.csv").read_text().splitlines()
    assert lines[0] == "x,lambda_1,lambda_2,lambda_3,phi_1,phi_2,phi_3"
    assert len(lines) == 51
