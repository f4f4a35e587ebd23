"""Latent position graphs and grid approximations of Mercer feature maps."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.spatial.distance import cdist, pdist, squareform

from . import _io
from .errors import ConfigError, LasekitError
from .graph import Graph


@dataclass(frozen=True)
class KernelSpec:
    """A symmetric kernel with values in [0, 1].

    ``family`` is ``"gaussian_full"`` (``exp(-|x-y|^2)``),
    ``"gaussian_half"`` (``exp(-|x-y|^2 / 2)``) or ``"custom"``, in which case
    ``evaluator(X, Y)`` must return the ``len(X) x len(Y)`` kernel matrix.
    """

    family: str = "gaussian_full"
    evaluator: Callable | None = field(default=None, compare=False)

    _SCALES = {"gaussian_full": 1.0, "gaussian_half": 0.5}

    def __post_init__(self):
        if self.family == "custom":
            if self.evaluator is None:
                raise ConfigError("custom kernel needs an evaluator")
        elif self.family not in self._SCALES:
            raise ConfigError(f"unknown kernel family {self.family!r}")

    @classmethod
    def custom(cls, evaluator):
        return cls("custom", evaluator)

    def from_sqdist(self, D2):
        return np.exp(-self._SCALES[self.family] * D2)

    def __call__(self, X, Y=None):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if self.family == "custom":
            return np.asarray(self.evaluator(X, X if Y is None else np.atleast_2d(Y)), dtype=float)
        if Y is None:
            return self.from_sqdist(squareform(pdist(X, "sqeuclidean")))
        return self.from_sqdist(cdist(X, np.atleast_2d(np.asarray(Y, dtype=float)), "sqeuclidean"))


# Latent distributions -----------------------------------------------------

@dataclass(frozen=True)
class UniformBox:
    """Uniform distribution on ``[low, high]^dim``."""

    low: float = 0.0
    high: float = 10.0
    dim: int = 1

    def validate(self):
        if not self.high > self.low:
            raise ConfigError("uniform box needs high > low")
        if self.dim < 1:
            raise ConfigError("dimension must be >= 1")

    def draw(self, rng, n):
        return rng.uniform(self.low, self.high, size=(n, self.dim))

    def contains(self, Z):
        return bool(np.all((Z >= self.low) & (Z <= self.high)))


@dataclass(frozen=True)
class IsotropicGaussian:
    """``N(mean, I / precision)``, optionally truncated to a ball of ``radius``."""

    dim: int = 1
    precision: float = 1.0
    mean: float = 0.0
    radius: float | None = None

    def validate(self):
        if self.dim < 1:
            raise ConfigError("dimension must be >= 1")
        if not self.precision > 0:
            raise ConfigError("precision must be positive")
        if self.radius is not None and not self.radius > 0:
            raise ConfigError("truncation radius must be positive")

    def draw(self, rng, n):
        sd = 1.0 / np.sqrt(self.precision)
        Z = rng.normal(self.mean, sd, size=(n, self.dim))
        if self.radius is not None:
            # rejection: redraw the rows that fall outside the ball
            bad = np.linalg.norm(Z - self.mean, axis=1) > self.radius
            while bad.any():
                Z[bad] = rng.normal(self.mean, sd, size=(int(bad.sum()), self.dim))
                bad = np.linalg.norm(Z - self.mean, axis=1) > self.radius
        return Z

    def contains(self, Z):
        if self.radius is None:
            return bool(np.all(np.isfinite(Z)))
        return bool(np.all(np.linalg.norm(Z - self.mean, axis=1) <= self.radius))


@dataclass(frozen=True)
class LatentSample:
    Z: np.ndarray
    rng_seed: int
    support: object = None

    @property
    def d(self):
        return self.Z.shape[1]

    @property
    def n(self):
        return self.Z.shape[0]


def sample_latent(dist, n, seed):
    """Draw ``n`` i.i.d. latent positions from ``dist`` under ``seed``."""
    if n < 1:
        raise ConfigError("n must be >= 1")
    dist.validate()
    rng = np.random.default_rng(seed)
    return LatentSample(dist.draw(rng, n), int(seed), dist)


def build_probability_matrix(Z, kernel=KernelSpec(), zero_diagonal=True):
    """Connection probabilities ``P_ij = f(Z_i, Z_j)``.

    Pairwise distances are computed once per unordered pair, so the result is
    exactly symmetric. The diagonal is zeroed unless ``zero_diagonal`` is
    False, in which case it holds ``f(Z_i, Z_i)`` and ``P`` is the full
    kernel matrix.
    """
    if isinstance(Z, LatentSample):
        Z = Z.Z
    Z = np.asarray(Z, dtype=float)
    if Z.ndim == 1:
        Z = Z[:, None]
    if kernel.family == "custom":
        P = kernel(Z)
        P = np.triu(P) + np.triu(P, 1).T
    else:
        P = kernel.from_sqdist(squareform(pdist(Z, "sqeuclidean")))
    if zero_diagonal:
        np.fill_diagonal(P, 0.0)
    return P


def sample_graph(P, seed):
    """Draw a simple graph with independent edges ``A_ij ~ Bernoulli(P_ij)``, i < j."""
    n = P.shape[0]
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, 1)
    hit = rng.random(iu.size) < P[iu, ju]
    return Graph.from_edges(n, np.column_stack([iu[hit], ju[hit]]))


def latent_position_graph(dist, n, kernel, seed):
    """Convenience: sample positions, probabilities and a graph from one seed.

    Returns ``(sample, P, graph)``; positions use ``seed`` and the graph draw
    uses ``seed + 1``.
    """
    sample = sample_latent(dist, n, seed)
    P = build_probability_matrix(sample, kernel)
    return sample, P, sample_graph(P, seed + 1)


def write_latent_csv(sample, path):
    Z = sample.Z if isinstance(sample, LatentSample) else np.asarray(sample)
    meta = None
    if isinstance(sample, LatentSample):
        meta = {"rng_seed": sample.rng_seed, "support": repr(sample.support)}
    _io.write_matrix(path, range(len(Z)), Z, [f"z{k + 1}" for k in range(Z.shape[1])], meta)


def read_latent_csv(path):
    _, _, Z = _io.read_matrix(path)
    return Z


# Mercer feature maps on a quadrature grid ---------------------------------

@dataclass(frozen=True)
class GridMeasure:
    """A discrete probability measure: ``points`` (G x d) with ``masses``."""

    points: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        if self.points.shape[0] != self.masses.shape[0]:
            raise ConfigError("points and masses must have the same length")
        if np.any(self.masses <= 0):
            raise ConfigError("quadrature masses must be positive")
        if abs(self.masses.sum() - 1.0) > 1e-12:
            raise ConfigError("quadrature masses must sum to 1")

    @property
    def G(self):
        return self.points.shape[0]


def grid_measure(low, high, G=500, weight=None, dim=1):
    """Midpoint grid on ``[low, high]^dim`` for the uniform measure, reweighted.

    ``weight(points)`` (optional) multiplies the uniform masses, after which
    masses are renormalised to sum to one. In 2-D the grid has ``G**2`` points.
    """
    if dim not in (1, 2):
        raise ConfigError("grid measures are supported in 1 or 2 dimensions")
    h = (high - low) / G
    x = low + h * (np.arange(G) + 0.5)
    if dim == 1:
        pts = x[:, None]
    else:
        xx, yy = np.meshgrid(x, x, indexing="ij")
        pts = np.column_stack([xx.ravel(), yy.ravel()])
    m = np.full(len(pts), 1.0 / len(pts))
    if weight is not None:
        m = m * np.asarray(weight(pts), dtype=float)
    return GridMeasure(pts, m / m.sum())


@dataclass(frozen=True)
class MercerFeatures:
    """Truncated feature map evaluated at grid points.

    ``features[g, k]`` approximates ``sqrt(lambda_k) u_k(grid[g])`` where
    ``u_k`` are orthonormal in L2 of the grid measure.
    """

    grid: np.ndarray
    masses: np.ndarray
    features: np.ndarray
    eigenvalues: np.ndarray

    @property
    def K(self):
        return self.features.shape[1]

    def eigenfunctions(self):
        lam = self.eigenvalues
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(lam > 0, self.features / np.sqrt(lam), 0.0)

    def gram(self, r=None):
        F = self.features if r is None else self.features[:, :r]
        return F @ F.T

    def truncation_error(self, r):
        """Mass-weighted mean of ``|phi - phi^(r)|^2`` over the grid."""
        tail = self.features[:, r:]
        return float(self.masses @ np.sum(tail**2, axis=1))

    def tail_sum(self, r):
        return float(self.eigenvalues[r:].sum())


def mercer_features_grid(kernel, measure, K, neg_tol=1e-10):
    """Quadrature approximation of the Mercer feature map of ``kernel`` under ``measure``.

    Diagonalises ``S = M^{1/2} F M^{1/2}`` with ``F`` the kernel Gram matrix
    on the grid and ``M`` the diagonal of masses; feature ``k`` at grid point
    ``g`` is ``sqrt(lambda_k) v_k[g] / sqrt(m_g)``.

    Raises
    ------
    LasekitError
        If an eigenvalue is below ``-neg_tol * lambda_1`` (kernel not PSD at
        grid scale) or if fewer than ``K`` eigenvalues are positive.
    """
    G = measure.G
    if K > G:
        raise ConfigError(f"truncation K={K} exceeds grid size G={G}")
    Fg = kernel(measure.points)
    sm = np.sqrt(measure.masses)
    S = sm[:, None] * Fg * sm[None, :]
    S = 0.5 * (S + S.T)
    vals, vecs = np.linalg.eigh(S)
    vals, vecs = vals[::-1], vecs[:, ::-1]
    top = vals[0]
    if vals[-1] < -neg_tol * top:
        raise LasekitError(
            f"kernel is not PSD on this grid: eigenvalue {vals[-1]:.3e} "
            f"below -{neg_tol:g} * {top:.3e}")
    vals = np.where(vals < 0, 0.0, vals)
    n_pos = int(np.count_nonzero(vals > 0))
    if K > n_pos:
        raise LasekitError(
            f"requested K={K} features but only {n_pos} eigenvalues are positive")
    vals, vecs = vals[:K], vecs[:, :K]
    # deterministic orientation: largest-magnitude entry of each eigenvector positive
    piv = np.argmax(np.abs(vecs), axis=0)
    vecs = vecs * np.sign(vecs[piv, np.arange(K)])
    feats = vecs / sm[:, None] * np.sqrt(vals)[None, :]
    return MercerFeatures(measure.points, measure.masses, feats, vals)


def write_mercer_csv(mf, path, r=None):
    """Write ``x, lambda_k..., phi_k...`` rows for plotting (1-D grids)."""
    r = mf.K if r is None else r
    header = ["x"] + [f"lambda_{k + 1}" for k in range(r)] + [f"phi_{k + 1}" for k in range(r)]
    rows = []
    for g in range(len(mf.grid)):
        rows.append([float(mf.grid[g, 0])] + [float(v) for v in mf.eigenvalues[:r]]
                    + [float(v) for v in mf.features[g, :r]])
    _io.write_table(path, header, rows)
