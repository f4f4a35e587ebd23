"""Overlapping m-hop patch embeddings assembled into a global distance matrix.

The exported matrix is meant for manifold learners that accept a precomputed
square distance matrix (e.g. UMAP with ``metric="precomputed"``).
"""

from __future__ import annotations

import json
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.spatial.distance import pdist, squareform

from . import _io
from .errors import ConfigError, LasekitError, SpectralError
from .graph import Graph, bfs_distances, induced_subgraph, m_hop_neighborhood
from .spectral import ase, lase
from .weights import graph_distance_weights


@dataclass(frozen=True)
class SubgraphCover:
    patches: list  # of (seed node, sorted node array)
    m: int
    seed: int

    def __len__(self):
        return len(self.patches)

    def covered(self, n):
        mask = np.zeros(n, dtype=bool)
        for _, nodes in self.patches:
            mask[nodes] = True
        return mask


def build_cover(g: Graph, m, seed):
    """Cover the graph with m-hop neighbourhoods of randomly chosen uncovered nodes."""
    if m < 1:
        raise ConfigError("hop radius m must be >= 1")
    rng = np.random.default_rng(seed)
    covered = np.zeros(g.n, dtype=bool)
    patches = []
    while not covered.all():
        pool = np.flatnonzero(~covered)
        s = int(pool[rng.integers(pool.size)])
        nodes = m_hop_neighborhood(g, s, m)
        covered[nodes] = True
        patches.append((s, nodes))
    return SubgraphCover(patches, int(m), int(seed))


@dataclass(frozen=True)
class PatchEmbedding:
    seed: int
    nodes: np.ndarray
    X: np.ndarray | None  # rows follow ``nodes``; None when degenerate
    r: int  # dimension actually used (0 when degenerate)
    reduced: bool = False

    @property
    def degenerate(self):
        return self.X is None


def _embed_patch(g, seed, nodes, r, weighted, p):
    sub, idx = induced_subgraph(g, nodes)
    for rr in range(r, 0, -1):
        try:
            if weighted:
                local = int(np.searchsorted(idx, seed))
                w = graph_distance_weights(bfs_distances(sub, local), p)
                emb, _ = lase(sub, w, rr, check_negative=False)
                X = emb.X[~emb.excluded]
                keep = idx[~emb.excluded]
            else:
                emb, model = ase(sub, rr)
                if model.Lambda_w[-1] <= 0:
                    raise SpectralError("zero eigenvalue")
                X, keep = emb.X, idx
            return PatchEmbedding(seed, keep, X, rr, rr < r)
        except SpectralError:
            continue
    return PatchEmbedding(seed, idx, None, 0, True)


def embed_cover(g: Graph, cover: SubgraphCover, r=3, jobs=1, weighted=False, p=1.0):
    """Embed every patch of ``cover`` into ``r`` dimensions.

    A patch whose r-th eigenvalue is not positive is re-embedded at the largest
    dimension that works and flagged ``reduced``; a patch where even ``r=1``
    fails (no edges) is flagged degenerate. With ``weighted=True`` each patch
    uses LASE with graph-distance weights ``(1 + hops)^-p`` from its seed.
    """
    args = [(s, nodes) for s, nodes in cover.patches]
    if jobs <= 1:
        return [_embed_patch(g, s, nodes, r, weighted, p) for s, nodes in args]
    with ThreadPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(lambda a: _embed_patch(g, a[0], a[1], r, weighted, p), args))


@dataclass(frozen=True, eq=False)
class DistanceAssembly:
    D: np.ndarray
    counts: np.ndarray
    fill_value: float

    @property
    def n(self):
        return self.D.shape[0]


def assemble_distances(patch_embeddings, n):
    """Average per-patch Euclidean distances into a global ``n x n`` matrix.

    Pairs never embedded together get ``10 x`` the largest averaged distance.
    """
    live = [pe for pe in patch_embeddings if not pe.degenerate]
    if not live:
        raise LasekitError("all patches are degenerate; nothing to assemble")
    total = np.zeros((n, n))
    counts = np.zeros((n, n), dtype=np.int64)
    for pe in live:
        if pe.nodes.size < 2:
            continue
        ix = np.ix_(pe.nodes, pe.nodes)
        total[ix] += squareform(pdist(pe.X))
        counts[ix] += 1
    np.fill_diagonal(counts, 0)
    seen = counts > 0
    D = np.zeros((n, n))
    D[seen] = total[seen] / counts[seen]
    max_obs = float(D[seen].max()) if seen.any() else 0.0
    fill = 10.0 * max_obs
    D[~seen] = fill
    np.fill_diagonal(D, 0.0)
    return DistanceAssembly(D, counts, fill)


def export_precomputed(assembly: DistanceAssembly, path, fmt="csv", meta=None):
    """Write the distance matrix plus a ``<path>.json`` sidecar.

    ``csv``: a header row of node indices followed by one row per node.
    ``raw64``: little-endian uint64 ``n`` then ``n*n`` float64 values, row-major.
    """
    path = Path(path)
    D = assembly.D
    n = D.shape[0]
    if fmt == "csv":
        lines = [",".join(str(i) for i in range(n))]
        lines += [",".join(_io.fmt(v) for v in row) for row in D]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    elif fmt == "raw64":
        with open(path, "wb") as fh:
            fh.write(struct.pack("<Q", n))
            fh.write(np.ascontiguousarray(D, dtype="<f8").tobytes())
    else:
        raise ConfigError(f"unknown export format {fmt!r}")
    side = {"n": n, "format": fmt, "fill_value": assembly.fill_value,
            "fill_pairs": int(np.count_nonzero(assembly.counts == 0) - n)}
    side.update(meta or {})
    Path(str(path) + ".json").write_text(json.dumps(side, indent=2, sort_keys=True) + "\n")
    return path


def read_precomputed(path, fmt=None):
    """Read a matrix written by :func:`export_precomputed`."""
    path = Path(path)
    if fmt is None:
        fmt = "raw64" if path.suffix in (".bin", ".raw", ".raw64") else "csv"
    if fmt == "raw64":
        buf = path.read_bytes()
        (n,) = struct.unpack("<Q", buf[:8])
        if len(buf) != 8 + 8 * n * n:
            raise LasekitError(f"{path}: size {len(buf)} does not match n={n}")
        return np.frombuffer(buf[8:], dtype="<f8").reshape(n, n).astype(np.float64)
    rows = path.read_text(encoding="utf-8").splitlines()[1:]
    return np.array([[float(v) for v in r.split(",")] for r in rows if r])
