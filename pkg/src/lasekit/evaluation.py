"""Reconstruction error, Procrustes alignment, PCA and coordinate regression."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from . import _io
from .errors import ConfigError, LasekitError
from .spectral import Embedding


@dataclass(frozen=True)
class ReconstructionReport:
    rmse: float
    n_nodes: int
    n_pairs: int
    clipped_low: int
    clipped_high: int

    def to_dict(self):
        return asdict(self)


def reconstruct_probabilities(X, nodes=None, return_counts=False):
    """Clipped inner products ``clip(<X_i, X_j>, 0, 1)`` over ``nodes`` x ``nodes``.

    ``X`` may be an :class:`Embedding` (excluded nodes raise) or a plain array.
    """
    if isinstance(X, Embedding):
        nodes = X.included if nodes is None else nodes
        Y = X.rows(nodes)
    else:
        Y = np.asarray(X, dtype=float)
        if nodes is not None:
            Y = Y[np.asarray(nodes)]
    G = Y @ Y.T
    lo = int(np.count_nonzero(G < 0))
    hi = int(np.count_nonzero(G > 1))
    P = np.clip(G, 0.0, 1.0)
    if return_counts:
        return P, lo, hi
    return P


def rmse_region(X, P_true, region):
    """RMSE of clipped inner products against ``P_true`` over unordered pairs in ``region``."""
    region = np.asarray(region, dtype=np.int64)
    if region.size < 2:
        raise ConfigError("region needs at least two nodes to form a pair")
    Y = X.rows(region) if isinstance(X, Embedding) else np.asarray(X, dtype=float)[region]
    iu = np.triu_indices(region.size, 1)
    raw = (Y @ Y.T)[iu]
    diff = np.clip(raw, 0.0, 1.0) - P_true[np.ix_(region, region)][iu]
    return ReconstructionReport(float(np.sqrt(np.mean(diff**2))), int(region.size),
                                int(diff.size), int(np.count_nonzero(raw < 0)),
                                int(np.count_nonzero(raw > 1)))


@dataclass(frozen=True)
class ProcrustesResult:
    Q: np.ndarray
    aligned: np.ndarray
    residual: float
    scale: float = 1.0
    rank_deficient: bool = False


def procrustes_align(X, Y, center=False, scale=False):
    """Orthogonal ``Q`` minimising ``|X Q - Y|_F`` (reflections allowed).

    With ``center=True`` both sets are mean-centred first (the alignment is
    then reported relative to ``Y``'s mean); ``scale=True`` adds an optimal
    isotropic scale factor.
    """
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if X.shape != Y.shape:
        raise ConfigError(f"shape mismatch {X.shape} vs {Y.shape}")
    mx = X.mean(axis=0) if center else 0.0
    my = Y.mean(axis=0) if center else 0.0
    Xc, Yc = X - mx, Y - my
    U, S, Vt = np.linalg.svd(Xc.T @ Yc)
    Q = U @ Vt
    tol = S.max() * max(X.shape) * np.finfo(float).eps if S.size else 0.0
    deficient = bool(np.count_nonzero(S > tol) < X.shape[1])
    c = 1.0
    if scale:
        nx = np.sum(Xc**2)
        c = float(S.sum() / nx) if nx > 0 else 1.0
    aligned = c * Xc @ Q + my
    return ProcrustesResult(Q, aligned, float(np.linalg.norm(aligned - Y)), c, deficient)


def pca_project(X, target_dim, return_components=False):
    """Project mean-centred points onto their top principal directions."""
    X = np.asarray(X, dtype=float)
    n, p = X.shape
    if target_dim > p:
        raise ConfigError(f"target_dim={target_dim} exceeds ambient dimension {p}")
    if n < target_dim:
        raise ConfigError(f"need at least {target_dim} points, got {n}")
    Xc = X - X.mean(axis=0)
    _, _, Vt = np.linalg.svd(Xc, full_matrices=False)
    V = Vt[:target_dim].T
    # fix orientation so repeated runs agree
    piv = np.argmax(np.abs(V), axis=0)
    V = V * np.sign(V[piv, np.arange(target_dim)])
    Z = Xc @ V
    return (Z, V) if return_components else Z


@dataclass(frozen=True)
class RegressionReport:
    r2: list
    r2_pooled: float
    mse: float
    coefficients: list
    intercept: list
    condition_number: float
    rank_deficient: bool

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def regress_coordinates(X_train, Y_train, X_test=None, Y_test=None):
    """Affine least-squares fit of coordinates on embeddings.

    R^2 is computed on the training set (per target column and pooled); MSE
    on the test set, averaged over test points and target columns.
    """
    Xtr = np.asarray(X_train, dtype=float)
    Ytr = np.asarray(Y_train, dtype=float)
    if Ytr.ndim == 1:
        Ytr = Ytr[:, None]
    if Xtr.shape[0] != Ytr.shape[0]:
        raise ConfigError("X_train and Y_train have different numbers of rows")
    if Xtr.shape[0] < Xtr.shape[1] + 1:
        raise ConfigError("need at least r + 1 training rows")
    D = np.column_stack([np.ones(len(Xtr)), Xtr])
    beta, _, rank, sv = np.linalg.lstsq(D, Ytr, rcond=None)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else float("inf")
    fit = D @ beta
    ss_res = np.sum((Ytr - fit) ** 2, axis=0)
    ss_tot = np.sum((Ytr - Ytr.mean(axis=0)) ** 2, axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        r2 = np.where(ss_tot > 0, 1.0 - ss_res / ss_tot, 0.0)
    pooled = float(1.0 - ss_res.sum() / ss_tot.sum()) if ss_tot.sum() > 0 else 0.0
    mse = float("nan")
    if X_test is not None:
        Yte = np.asarray(Y_test, dtype=float)
        if Yte.ndim == 1:
            Yte = Yte[:, None]
        pred = np.column_stack([np.ones(len(X_test)), np.asarray(X_test, dtype=float)]) @ beta
        mse = float(np.mean((pred - Yte) ** 2))
    return RegressionReport(r2.tolist(), pooled, mse, beta[1:].tolist(), beta[0].tolist(),
                            cond, bool(rank < D.shape[1]))


def neighbour_mean_baseline(g, coords, known, node):
    """Mean coordinates of the neighbours of ``node`` whose coordinates are known."""
    nb = g.neighbors(node)
    nb = nb[np.asarray(known, dtype=bool)[nb]]
    if nb.size == 0:
        raise LasekitError(f"node {node} has no neighbour with known coordinates")
    return np.asarray(coords, dtype=float)[nb].mean(axis=0)


def write_report_json(report, path):
    with open(path, "w") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_long_csv(rows, path):
    """Long-format sweep results: rows of (param, seed, metric, value)."""
    _io.write_table(path, ["param", "seed", "metric", "value"],
                    [[p, s, m, float(v)] for p, s, m, v in rows])
