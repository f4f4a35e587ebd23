"""Sparse undirected graphs: storage, edge-list I/O and hop distances."""

from __future__ import annotations

import csv
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .errors import ParseError

logger = logging.getLogger(__name__)

#: Marker stored in :attr:`GraphDistances.dist` for nodes not reachable from the source.
UNREACHABLE = -1

_SPLIT = re.compile(r"[,\s]+")


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple undirected graph backed by a symmetric 0/1 CSR matrix.

    Use :meth:`from_edges` rather than the constructor unless the matrix is
    already known to be symmetric, binary and loop-free.
    """

    adjacency: sp.csr_matrix
    node_ids: tuple | None = None
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        A = self.adjacency
        if A.shape[0] != A.shape[1]:
            raise ValueError("adjacency must be square")
        if self.node_ids is not None and len(self.node_ids) != A.shape[0]:
            raise ValueError("node_ids length does not match adjacency")

    @classmethod
    def from_edges(cls, n, edges, node_ids=None):
        """Build a graph from an iterable of (i, j) index pairs.

        Edges are symmetrised and deduplicated; self-loops are dropped. The
        number of dropped loops and duplicate edges is recorded in
        ``diagnostics``.
        """
        e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                       dtype=np.int64).reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= n):
            raise IndexError("edge endpoint out of range")
        loops = int(np.count_nonzero(e[:, 0] == e[:, 1]))
        e = e[e[:, 0] != e[:, 1]]
        lo = np.minimum(e[:, 0], e[:, 1])
        hi = np.maximum(e[:, 0], e[:, 1])
        key = np.unique(lo * n + hi)
        dupes = len(e) - len(key)
        lo, hi = key // n, key % n
        rows = np.concatenate([lo, hi])
        cols = np.concatenate([hi, lo])
        A = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
        A.sort_indices()
        diag = {"self_loops_dropped": loops, "duplicate_edges": dupes}
        return cls(A, None if node_ids is None else tuple(node_ids), diag)

    @classmethod
    def from_dense(cls, M):
        """Build from a dense 0/1 matrix (upper triangle is used)."""
        M = np.asarray(M)
        i, j = np.nonzero(np.triu(M, 1))
        return cls.from_edges(M.shape[0], np.column_stack([i, j]))

    @property
    def n(self):
        return self.adjacency.shape[0]

    @property
    def n_edges(self):
        return self.adjacency.nnz // 2

    def degrees(self):
        return np.diff(self.adjacency.indptr)

    def neighbors(self, i):
        A = self.adjacency
        return A.indices[A.indptr[i]:A.indptr[i + 1]]

    def edges(self):
        """Edges as an (m, 2) array with i < j, sorted lexicographically."""
        U = sp.triu(self.adjacency, 1).tocoo()
        order = np.lexsort((U.col, U.row))
        return np.column_stack([U.row[order], U.col[order]]).astype(np.int64)

    def to_dense(self):
        return self.adjacency.toarray()

    def labels(self):
        if self.node_ids is None:
            return [str(i) for i in range(self.n)]
        return [str(x) for x in self.node_ids]


@dataclass(frozen=True)
class GraphDistances:
    """Hop counts from ``source``; unreachable nodes hold :data:`UNREACHABLE`."""

    source: int
    dist: np.ndarray

    @property
    def reachable(self):
        return self.dist != UNREACHABLE


def ingest_edge_list(path, node_map=None):
    """Read a whitespace- or comma-separated edge list.

    Labels are arbitrary strings, mapped to dense indices in order of first
    appearance. Lines starting with ``#`` and blank lines are skipped.

    Parameters
    ----------
    path : str or Path
        Edge-list file.
    node_map : str or Path, optional
        If given, an ``index,label`` CSV fixing the label order; labels not in
        the map are appended in first-appearance order.

    Raises
    ------
    ParseError
        On a line that does not contain exactly two labels, or when the file
        holds no edges.
    """
    index = {}
    if node_map is not None:
        for i, label in read_node_map(node_map):
            index[label] = i
    edges = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            parts = [p for p in _SPLIT.split(s) if p]
            if len(parts) != 2:
                raise ParseError(f"expected two node labels, got {len(parts)}: {s!r}", lineno)
            ij = []
            for label in parts:
                if label not in index:
                    index[label] = len(index)
                ij.append(index[label])
            edges.append(ij)
    if not edges:
        raise ParseError(f"{path}: no edges found")
    labels = [None] * len(index)
    for label, i in index.items():
        labels[i] = label
    g = Graph.from_edges(len(labels), edges, node_ids=labels)
    d = g.diagnostics
    if d["self_loops_dropped"] or d["duplicate_edges"]:
        logger.info("%s: dropped %d self-loops and %d duplicate edges",
                    path, d["self_loops_dropped"], d["duplicate_edges"])
    return g


def write_edge_list(g, path):
    """Write ``g`` as a whitespace-separated edge list using its labels."""
    labels = g.labels()
    lines = [f"{labels[i]} {labels[j]}" for i, j in g.edges()]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_node_map(g, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "label"])
        for i, label in enumerate(g.labels()):
            w.writerow([i, label])


def read_node_map(path):
    with open(path, newline="", encoding="utf-8") as fh:
        r = csv.reader(fh)
        header = next(r)
        if header != ["index", "label"]:
            raise ParseError(f"{path}: expected header 'index,label'")
        return [(int(i), label) for i, label in r]


def _check_node(g, source):
    if not 0 <= source < g.n:
        raise IndexError(f"node {source} out of range for graph with n={g.n}")


def bfs_distances(g, source):
    """Unweighted shortest-path hop counts from ``source``."""
    _check_node(g, source)
    A = g.adjacency
    dist = np.full(g.n, UNREACHABLE, dtype=np.int64)
    dist[source] = 0
    frontier = np.array([source])
    level = 0
    while frontier.size:
        level += 1
        nbrs = np.unique(A[frontier].indices)
        frontier = nbrs[dist[nbrs] == UNREACHABLE]
        dist[frontier] = level
    return GraphDistances(int(source), dist)


def m_hop_neighborhood(g, source, m):
    """Sorted array of nodes within ``m`` hops of ``source`` (inclusive)."""
    if m < 0:
        raise ValueError("hop radius must be non-negative")
    dist = bfs_distances(g, source).dist
    return np.flatnonzero((dist != UNREACHABLE) & (dist <= m))


def induced_subgraph(g, nodes):
    """Subgraph on ``nodes``.

    Returns
    -------
    sub : Graph
        Node ``k`` of ``sub`` is node ``index_map[k]`` of ``g``.
    index_map : ndarray
        Sorted original indices.
    """
    idx = np.unique(np.asarray(list(nodes) if not isinstance(nodes, np.ndarray) else nodes,
                               dtype=np.int64))
    if idx.size == 0:
        raise ValueError("cannot induce a subgraph on an empty node set")
    if idx[0] < 0 or idx[-1] >= g.n:
        raise IndexError("node index out of range")
    A = g.adjacency[idx][:, idx].tocsr()
    A.sort_indices()
    ids = None if g.node_ids is None else tuple(g.node_ids[i] for i in idx)
    return Graph(A, ids, {}), idx
