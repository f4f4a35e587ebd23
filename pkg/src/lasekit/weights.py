"""Node weight vectors for localising LASE."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _io
from .errors import ConfigError
from .graph import UNREACHABLE, GraphDistances


@dataclass(frozen=True)
class WeightVector:
    """Non-negative node weights with a record of how they were made.

    Weights are kept unnormalised unless :func:`normalise` has been applied;
    embeddings do not depend on the global scale, eigenvalues do.
    """

    w: np.ndarray
    normalised: bool = False
    strategy: dict = field(default_factory=dict)

    def __post_init__(self):
        w = np.asarray(self.w, dtype=np.float64)
        if w.ndim != 1:
            raise ConfigError("weights must be a 1-D array")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ConfigError("weights must be finite and non-negative")
        if not np.any(w > 0):
            raise ConfigError("at least one weight must be positive")
        w.setflags(write=False)
        object.__setattr__(self, "w", w)

    @property
    def n(self):
        return self.w.size

    @property
    def active(self):
        """Boolean mask of nodes with strictly positive weight."""
        return self.w > 0

    def __len__(self):
        return self.w.size


def uniform_weights(n, value=1.0):
    return WeightVector(np.full(n, float(value)), value == 1.0, {"name": "uniform", "value": value})


def attribute_weights(coords, center, tau):
    """``w_i = exp(-tau |x_i - center|^2)``."""
    if tau < 0:
        raise ConfigError("tau must be >= 0")
    X = _as_2d(coords)
    c = np.asarray(center, dtype=float).reshape(1, -1)
    if not np.all(np.isfinite(X)):
        raise ConfigError("coordinates must be finite")
    d2 = np.sum((X - c) ** 2, axis=1)
    return WeightVector(np.exp(-tau * d2), False,
                        {"name": "attribute", "tau": tau, "center": c.ravel().tolist()})


def graph_distance_weights(dists: GraphDistances, p, unreachable="zero", epsilon=1e-12):
    """``w_i = (1 + hops(i, source))^-p``.

    Unreachable nodes get 0 (``unreachable="zero"``) or ``epsilon``
    (``unreachable="epsilon"``).
    """
    if not p > 0:
        raise ConfigError("power p must be positive")
    if unreachable not in ("zero", "epsilon"):
        raise ConfigError(f"unknown unreachable policy {unreachable!r}")
    d = dists.dist
    reach = d != UNREACHABLE
    w = np.zeros(d.size)
    w[reach] = (1.0 + d[reach]) ** (-float(p))
    if unreachable == "epsilon":
        w[~reach] = epsilon
    return WeightVector(w, False, {"name": "graph_distance", "p": p, "source": dists.source,
                                   "unreachable": unreachable})


def subgraph_weights(n, selected):
    """Indicator weights: 1 on ``selected``, 0 elsewhere."""
    sel = np.asarray(list(selected) if not isinstance(selected, np.ndarray) else selected,
                     dtype=np.int64)
    if sel.size == 0:
        raise ConfigError("subgraph selection is empty")
    w = np.zeros(n)
    w[sel] = 1.0
    return WeightVector(w, False, {"name": "subgraph", "size": int(np.count_nonzero(w))})


def hybrid_weights(dists: GraphDistances, coords, ref, alpha, beta):
    """``w_i = exp(-alpha * hops(i, ref) - beta * |x_i - x_ref|^2)``; unreachable -> 0."""
    if alpha < 0 or beta < 0:
        raise ConfigError("alpha and beta must be non-negative")
    if alpha == 0 and beta == 0:
        raise ConfigError("alpha = beta = 0 gives uniform weights; use uniform_weights")
    X = _as_2d(coords)
    d = dists.dist
    reach = d != UNREACHABLE
    d2 = np.sum((X - X[ref]) ** 2, axis=1)
    w = np.zeros(d.size)
    w[reach] = np.exp(-alpha * d[reach] - beta * d2[reach])
    return WeightVector(w, False, {"name": "hybrid", "alpha": alpha, "beta": beta, "ref": int(ref)})


def soft_threshold_weights(coords, center, tau, radius, profile="literal"):
    """Gaussian weights with a flat plateau of the given ``radius`` around ``center``.

    ``profile="literal"``: ``exp(-tau)`` inside the plateau and
    ``exp(-tau |x - center|^2)`` outside. This is discontinuous at the plateau
    edge unless ``radius == 1``.

    ``profile="shifted"``: 1 inside the plateau and
    ``exp(-tau (|x - center| - radius)^2)`` outside, which is continuous and
    tends to the plateau indicator as ``tau`` grows.

    ``radius=0`` gives the pure Gaussian ``exp(-tau |x - center|^2)`` under
    either profile.
    """
    if tau < 0 or radius < 0:
        raise ConfigError("tau and radius must be >= 0")
    X = _as_2d(coords)
    c = np.asarray(center, dtype=float).reshape(1, -1)
    dist = np.sqrt(np.sum((X - c) ** 2, axis=1))
    inside = dist <= radius if radius > 0 else np.zeros(dist.size, dtype=bool)
    if profile == "literal":
        w = np.where(inside, np.exp(-tau), np.exp(-tau * dist**2))
    elif profile == "shifted":
        w = np.where(inside, 1.0, np.exp(-tau * (dist - radius) ** 2))
    else:
        raise ConfigError(f"unknown plateau profile {profile!r}")
    return WeightVector(w, False, {"name": "soft_threshold", "tau": tau, "radius": radius,
                                   "center": c.ravel().tolist(), "profile": profile})


def normalise(wv: WeightVector):
    """Rescale so the weights sum to ``n``."""
    s = wv.w.sum()
    if not s > 0:
        raise ConfigError("cannot normalise an all-zero weight vector")
    if wv.normalised:
        return wv
    return WeightVector(wv.w * (wv.n / s), True, wv.strategy)


def canonical(w, bits=30):
    """Scale-free representative of a weight vector.

    Divides by the maximum weight and rounds each mantissa to ``bits`` bits,
    so that ``canonical(a * w) == canonical(w)`` bit-for-bit for any positive
    ``a`` (barring values within a few ulp of a rounding boundary).
    """
    w = np.asarray(w, dtype=np.float64)
    c = w / w.max()
    m, e = np.frexp(c)
    return np.ldexp(np.round(np.ldexp(m, bits)), e - bits)


def write_weights_csv(wv, path):
    meta = {"normalised": wv.normalised, "strategy": wv.strategy}
    _io.write_table(path, ["index", "weight"], [[i, float(x)] for i, x in enumerate(wv.w)], meta)


def read_weights_csv(path):
    meta, header, rows = _io.read_table(path)
    if header != ["index", "weight"]:
        raise ConfigError(f"{path}: expected header 'index,weight'")
    idx = np.array([int(r[0]) for r in rows])
    w = np.zeros(len(rows))
    w[idx] = [float(r[1]) for r in rows]
    meta = meta or {}
    return WeightVector(w, bool(meta.get("normalised", False)), meta.get("strategy", {}))


def _as_2d(coords):
    X = np.asarray(coords, dtype=float)
    return X[:, None] if X.ndim == 1 else X
