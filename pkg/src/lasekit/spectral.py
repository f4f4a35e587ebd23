"""Top-k symmetric eigensolver and the ASE / LASE / inductive LASE embeddings."""

from __future__ import annotations

import json
import logging
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from . import _io
from .errors import ConvergenceError, SpectralError
from .graph import Graph
from .weights import WeightVector, canonical, read_weights_csv, write_weights_csv

logger = logging.getLogger(__name__)

DENSE_CUTOFF = 1024
# canonical weights below this use the eigen-equation form for their embedding rows
TINY_WEIGHT = 2.0**-20


class NegativeEigenvalueWarning(UserWarning):
    """The weighted adjacency has large negative eigenvalues."""


@dataclass(frozen=True)
class EigenPairs:
    values: np.ndarray
    vectors: np.ndarray
    residuals: np.ndarray
    lambda_min: float | None = None

    @property
    def r(self):
        return self.values.size


def fix_signs(V):
    """Flip columns so the largest-magnitude entry of each is positive.

    Ties go to the lowest row index.
    """
    if V.size == 0:
        return V
    piv = np.argmax(np.abs(V), axis=0)
    s = np.sign(V[piv, np.arange(V.shape[1])])
    s[s == 0] = 1.0
    return V * s


def _dense(M):
    if isinstance(M, np.ndarray):
        return M
    if sp.issparse(M):
        return M.toarray()
    n = M.shape[0]
    return M.matmat(np.eye(n))


def eigensolve_topk(M, r, tol=1e-9, max_iter=None, dense_cutoff=DENSE_CUTOFF,
                    want_min=False):
    """The ``r`` algebraically largest eigenpairs of a symmetric matrix.

    Parameters
    ----------
    M : ndarray, sparse matrix or LinearOperator
        Symmetric ``n x n`` matrix, or a matrix-free product.
    r : int
        Number of eigenpairs.
    tol : float
        Relative residual tolerance for the iterative path.
    max_iter : int, optional
        Iteration cap for the iterative path (default ``10 * n``).
    dense_cutoff : int
        Matrices with ``n <= dense_cutoff`` use a full dense eigendecomposition;
        larger ones use implicitly restarted Lanczos.
    want_min : bool
        Also estimate the smallest eigenvalue (free on the dense path).

    Returns
    -------
    EigenPairs
        Values in non-increasing order, sign-normalised orthonormal vectors.
    """
    n = M.shape[0]
    if M.shape != (n, n):
        raise ValueError("matrix must be square")
    if not 1 <= r <= n:
        raise SpectralError(f"need 1 <= r <= n, got r={r}, n={n}")

    lam_min = None
    if n <= dense_cutoff or r >= n - 1:
        vals, vecs = np.linalg.eigh(_dense(M))
        lam_min = float(vals[0])
        vals = vals[::-1][:r].copy()
        vecs = vecs[:, ::-1][:, :r].copy()
    else:
        op = M if isinstance(M, LinearOperator) else LinearOperator(
            (n, n), matvec=lambda v: M @ v, dtype=np.float64)
        v0 = np.random.default_rng(0).standard_normal(n)
        maxiter = 10 * n if max_iter is None else max_iter
        try:
            vals, vecs = eigsh(op, k=r, which="LA", tol=tol, maxiter=maxiter, v0=v0)
        except ArpackNoConvergence as exc:
            res = None
            if exc.eigenvectors is not None and exc.eigenvectors.size:
                V = exc.eigenvectors
                res = np.linalg.norm(op.matmat(V) - V * exc.eigenvalues, axis=0)
            raise ConvergenceError(
                f"Lanczos did not converge to tol={tol:g} within {maxiter} iterations",
                residuals=res) from exc
        order = np.argsort(vals)[::-1]
        vals, vecs = vals[order], vecs[:, order]
        if want_min:
            lo = eigsh(op, k=1, which="SA", tol=1e-4, maxiter=maxiter, v0=v0,
                       return_eigenvectors=False)
            lam_min = float(lo[0])
    vecs = fix_signs(vecs)
    MV = M @ vecs if not isinstance(M, LinearOperator) else M.matmat(vecs)
    res = np.linalg.norm(MV - vecs * vals, axis=0)
    scale = max(1.0, abs(vals[0]))
    if np.any(res > max(tol, 1e-12) * 1e3 * scale):
        raise ConvergenceError(f"eigenpair residuals too large: max {res.max():.3e}", res)
    return EigenPairs(vals, vecs, res, lam_min)


# Embeddings -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Embedding:
    """Node embedding; rows of excluded nodes are NaN and flagged in ``excluded``."""

    X: np.ndarray
    excluded: np.ndarray
    provenance: dict = field(default_factory=dict)

    @property
    def r(self):
        return self.X.shape[1]

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def included(self):
        return np.flatnonzero(~self.excluded)

    def rows(self, idx):
        idx = np.asarray(idx, dtype=np.int64)
        bad = idx[self.excluded[idx]]
        if bad.size:
            raise SpectralError(f"node {int(bad[0])} is excluded from this embedding")
        return self.X[idx]

    def gram(self, idx=None):
        Y = self.X[self.included] if idx is None else self.rows(idx)
        return Y @ Y.T


@dataclass(frozen=True, eq=False)
class SpectralModel:
    """Fitted eigenpairs of ``W^1/2 A W^1/2`` on the active node set.

    ``weights`` holds the (canonically scaled) weights of all ``n`` nodes;
    ``active`` the original indices of the positive-weight nodes, in the row
    order of ``U_w``.
    """

    U_w: np.ndarray
    Lambda_w: np.ndarray
    weights: np.ndarray
    active: np.ndarray
    method: str = "lase"
    strategy: dict = field(default_factory=dict)

    @property
    def r(self):
        return self.Lambda_w.size

    @property
    def n(self):
        return self.weights.size

    def embedding_rows(self):
        s = np.sqrt(self.weights[self.active])
        return self.U_w * np.sqrt(self.Lambda_w) / s[:, None]

    def save(self, directory):
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        meta = {"method": self.method, "r": self.r, "n": self.n,
                "n_active": int(self.active.size), "strategy": self.strategy}
        (d / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
        _io.write_matrix(d / "U_w.csv", self.active, self.U_w,
                         [f"u{k + 1}" for k in range(self.r)])
        _io.write_table(d / "lambda.csv", ["k", "lambda"],
                        [[k + 1, float(v)] for k, v in enumerate(self.Lambda_w)])
        write_weights_csv(WeightVector(self.weights, False, self.strategy), d / "weights.csv")

    @classmethod
    def load(cls, directory):
        d = Path(directory)
        meta = json.loads((d / "meta.json").read_text())
        _, active, U = _io.read_matrix(d / "U_w.csv")
        _, _, rows = _io.read_table(d / "lambda.csv")
        lam = np.array([float(r[1]) for r in rows])
        w = read_weights_csv(d / "weights.csv").w
        return cls(U, lam, w, active, meta["method"], meta.get("strategy", {}))


def _fit(A, sqrt_w, r, method, tol, dense_cutoff, check_negative):
    """Top-r eigenpairs of S A S (S = diag(sqrt_w)); sqrt_w=None means S = I."""
    n = A.shape[0]
    if sqrt_w is None:
        M = A.toarray() if n <= dense_cutoff else A
    elif n <= dense_cutoff:
        M = sqrt_w[:, None] * A.toarray() * sqrt_w[None, :]
    else:
        M = LinearOperator((n, n), matvec=lambda v: sqrt_w * (A @ (sqrt_w * np.ravel(v))),
                           matmat=lambda V: sqrt_w[:, None] * (A @ (sqrt_w[:, None] * V)),
                           dtype=np.float64)
    ep = eigensolve_topk(M, r, tol=tol, dense_cutoff=dense_cutoff, want_min=check_negative)
    return ep


def ase(g: Graph, r, tol=1e-9, dense_cutoff=DENSE_CUTOFF):
    """Adjacency spectral embedding ``X = U Lambda^1/2`` into ``r`` dimensions.

    Raises :class:`SpectralError` if the r-th largest eigenvalue is negative.
    """
    ep = _fit(g.adjacency, None, r, "ase", tol, dense_cutoff, False)
    if ep.values[-1] < 0:
        raise SpectralError(
            f"lambda_{r} = {ep.values[-1]:.3e} < 0; choose a smaller embedding dimension")
    X = ep.vectors * np.sqrt(ep.values)
    model = SpectralModel(ep.vectors, ep.values, np.ones(g.n), np.arange(g.n), "ase",
                          {"name": "uniform"})
    emb = Embedding(X, np.zeros(g.n, dtype=bool), {"method": "ase", "r": r})
    return emb, model


def lase(g: Graph, w, r, tol=1e-9, dense_cutoff=DENSE_CUTOFF, check_negative=True,
         neg_ratio=0.1):
    """Local adjacency spectral embedding ``X = W^-1/2 U_w Lambda_w^1/2``.

    Nodes with zero weight are dropped before the eigensolve and reported as
    excluded. The embedding does not depend on the global scale of ``w``.

    Parameters
    ----------
    g : Graph
    w : WeightVector or array_like
        Non-negative node weights.
    r : int
        Embedding dimension.
    check_negative : bool
        Warn (:class:`NegativeEigenvalueWarning`) when the smallest eigenvalue
        of the weighted matrix is below ``-neg_ratio * lambda_1``.

    Returns
    -------
    (Embedding, SpectralModel)
    """
    wv = w if isinstance(w, WeightVector) else WeightVector(np.asarray(w, dtype=float))
    if wv.n != g.n:
        raise SpectralError(f"weight vector has {wv.n} entries, graph has {g.n} nodes")
    cw = canonical(wv.w)
    active = np.flatnonzero(cw > 0)
    if active.size < r:
        raise SpectralError(f"only {active.size} positive-weight nodes for r={r}")
    A = g.adjacency
    if active.size < g.n:
        A = A[active][:, active]
    s = np.sqrt(cw[active])
    ep = _fit(A, s, r, "lase", tol, dense_cutoff, check_negative)
    if ep.values[-1] <= 0:
        raise SpectralError(
            f"lambda_{r} = {ep.values[-1]:.3e} is not positive; choose a smaller embedding dimension")
    if check_negative and ep.lambda_min is not None and ep.lambda_min < -neg_ratio * ep.values[0]:
        warnings.warn(
            f"weighted adjacency has significant negative eigenvalues "
            f"(min {ep.lambda_min:.3g} vs top {ep.values[0]:.3g}); LASE keeps only the positive part",
            NegativeEigenvalueWarning, stacklevel=2)
    X = np.full((g.n, r), np.nan)
    Xa = ep.vectors * np.sqrt(ep.values) / s[:, None]
    # dividing by sqrt(w_i) amplifies eigensolver rounding on tiny-weight rows;
    # the eigen-equation form A_i W^1/2 U Lambda^-1/2 is the same quantity without it
    tiny = np.flatnonzero(cw[active] < TINY_WEIGHT)
    if tiny.size:
        Xa[tiny] = (A[tiny] @ (s[:, None] * ep.vectors)) / np.sqrt(ep.values)
    X[active] = Xa
    excluded = np.ones(g.n, dtype=bool)
    excluded[active] = False
    model = SpectralModel(ep.vectors, ep.values, cw, active, "lase", wv.strategy)
    emb = Embedding(X, excluded, {"method": "lase", "r": r, "weights": wv.strategy})
    return emb, model


def subgraph_ase(g: Graph, nodes, r, **kw):
    """ASE of the induced subgraph on ``nodes``, returned in the full index space."""
    from .graph import induced_subgraph

    sub, idx = induced_subgraph(g, nodes)
    emb, model = ase(sub, r, **kw)
    X = np.full((g.n, r), np.nan)
    X[idx] = emb.X
    excluded = np.ones(g.n, dtype=bool)
    excluded[idx] = False
    w = np.zeros(g.n)
    w[idx] = 1.0
    model = SpectralModel(model.U_w, model.Lambda_w, w, idx, "subgraph_ase",
                          {"name": "subgraph", "size": int(idx.size)})
    return Embedding(X, excluded, {"method": "subgraph_ase", "r": r}), model


def inductive_lase(a, model: SpectralModel):
    """Embed a new node from its 0/1 connections to the existing nodes.

    ``a`` is indexed either over the model's active nodes or over all ``n``
    original nodes (entries at inactive nodes are then ignored).
    """
    a = np.asarray(a, dtype=np.float64).ravel()
    if a.size == model.n and a.size != model.active.size:
        a = a[model.active]
    elif a.size != model.active.size:
        raise SpectralError(
            f"connection vector has length {a.size}; expected {model.active.size} "
            f"(active nodes) or {model.n}")
    if np.any(model.Lambda_w <= 0):
        raise SpectralError("model has non-positive eigenvalues; cannot invert Lambda_w")
    at = a * np.sqrt(model.weights[model.active])
    return (at @ model.U_w) / np.sqrt(model.Lambda_w)


@dataclass(frozen=True)
class Scree:
    values: np.ndarray

    @property
    def gaps(self):
        return self.values[:-1] - self.values[1:]


def scree(g: Graph, w=None, k=20, tol=1e-9, dense_cutoff=DENSE_CUTOFF):
    """Top-``k`` eigenvalues of ``A`` or ``W^1/2 A W^1/2``.

    Weights should be normalised to sum to ``n`` so spectra are comparable
    across weightings; unnormalised weights trigger a warning.
    """
    n = g.n
    if k > n:
        warnings.warn(f"k={k} exceeds n={n}; clipped", stacklevel=2)
        k = n
    if w is None:
        s = None
    else:
        wv = w if isinstance(w, WeightVector) else WeightVector(np.asarray(w, dtype=float))
        if not wv.normalised and abs(wv.w.sum() - n) > 1e-9 * n:
            warnings.warn("scree on unnormalised weights; eigenvalues scale with the weights",
                          stacklevel=2)
        s = np.sqrt(wv.w)
    ep = _fit(g.adjacency, s, k, "scree", tol, dense_cutoff, False)
    return Scree(ep.values)


# Embedding files --------------------------------------------------------------

def write_embedding_csv(emb: Embedding, path):
    meta = dict(emb.provenance)
    meta["n"] = emb.n
    meta["n_excluded"] = int(emb.excluded.sum())
    _io.write_matrix(path, range(emb.n), emb.X, [f"x{k + 1}" for k in range(emb.r)], meta)


def read_embedding_csv(path):
    meta, idx, X = _io.read_matrix(path)
    full = np.full((idx.max() + 1, X.shape[1]), np.nan)
    full[idx] = X
    excluded = np.isnan(full).any(axis=1)
    meta = meta or {}
    meta.pop("n", None)
    meta.pop("n_excluded", None)
    return Embedding(full, excluded, meta)
