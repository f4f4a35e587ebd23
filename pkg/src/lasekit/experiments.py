"""Seeded desk-scale experiments emitting plot-ready long-format CSV.

Every runner is a pure function of its config (including the seed) and
returns a list of row tuples; :func:`run_experiment` validates them against a
fixed schema and writes them.  Re-running with the same config gives
byte-identical files.
"""

from __future__ import annotations

import json
import logging
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.spatial import Delaunay, cKDTree

from . import _io
from .errors import ConfigError, LasekitError
from .evaluation import (neighbour_mean_baseline, pca_project, procrustes_align,
                         regress_coordinates, rmse_region)
from .graph import Graph, ingest_edge_list
from .latent_model import (IsotropicGaussian, KernelSpec, UniformBox, build_probability_matrix,
                           latent_position_graph, sample_graph, sample_latent)
from .spectral import NegativeEigenvalueWarning, ase, eigensolve_topk, lase, subgraph_ase
from .weights import WeightVector, attribute_weights, soft_threshold_weights

log = logging.getLogger(__name__)

DEFAULTS = {
    "eigendecay": {
        "dims": [1, 2, 3, 4],
        "n": 100,
        "tau_grid": [0.25, 1.0, 4.0, 16.0, 64.0],
        "top": 6,
        "seed": 0,
    },
    "reconstruction": {
        "n": 1000,
        "tau_grid": [1, 2, 3, 4, 5, 6, 7, 8, 9, 10],
        "widths": [1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0],
        "trials": 10,
        "r": 3,
        "center": 4.0,
        "plateau": 0.5,
        "profiles": ["shifted", "literal"],
        "dense_cutoff": 1024,
        "seed": 0,
    },
    "shapes": {
        "n_background": 4000,
        "shape_points": 200,
        "shape_size": 0.8,
        "region_radius": 1.0,
        "r": 3,
        "radius_grid": [1.0, 1.25, 1.5, 1.75, 2.0, 2.5, 3.0, 3.5, 4.0, 5.0],
        "tau_grid": [0.05, 0.1, 0.2, 0.3, 0.4, 0.6, 0.8, 1.2, 1.6, 2.4, 3.2],
        "seed": 0,
    },
    "regression": {
        "graph": None,
        "coords": None,
        "synthetic_n": 3000,
        "centers": 10,
        "m_grid": [100, 150, 200, 250, 300],
        "dims": [3, 20],
        "k_grid": [0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100],
        "tau_grid": [0.0, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0],
        "n_test": 10,
        "seed": 0,
    },
}

# column name -> type, checked before every write
SCHEMAS = {
    "eigendecay": [("d", int), ("tau", float), ("seed", int), ("k", int), ("eigenvalue", float)],
    "reconstruction": [("param", float), ("seed", int), ("metric", str), ("value", float)],
    "reconstruction_summary": [("metric", str), ("param", float), ("mean", float),
                               ("se", float), ("trials", int)],
    "shapes": [("shape", str), ("method", str), ("param", float), ("rmse", float),
               ("fidelity", float)],
    "shapes_embeddings": [("shape", str), ("method", str), ("node", int), ("pc1", float),
                          ("pc2", float), ("z1", float), ("z2", float)],
    "regression": [("d", int), ("m", int), ("center", int), ("method", str), ("param", float),
                   ("r2", float), ("mse", float)],
}

SHAPES = ("circle", "cross", "triangle", "letter_l")


def default_jobs():
    """``LASEKIT_JOBS`` if set, else 1."""
    raw = os.environ.get("LASEKIT_JOBS")
    if raw is None:
        return 1
    try:
        jobs = int(raw)
    except ValueError:
        raise ConfigError(f"LASEKIT_JOBS must be an integer, got {raw!r}") from None
    if jobs < 1:
        raise ConfigError("LASEKIT_JOBS must be >= 1")
    return jobs


def _map(fn, items, jobs):
    if jobs <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


def _child_seeds(seed, k):
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(k)]


def resolve_config(name, config=None):
    """Merge ``config`` over the defaults for ``name``; unknown keys are an error."""
    if name not in DEFAULTS:
        raise ConfigError(f"unknown experiment {name!r}; choose from {sorted(DEFAULTS)}")
    cfg = dict(DEFAULTS[name])
    extra = set(config or {}) - set(cfg)
    if extra:
        raise ConfigError(f"unknown config keys for {name}: {sorted(extra)}")
    cfg.update(config or {})
    if not isinstance(cfg["seed"], int) or isinstance(cfg["seed"], bool):
        raise ConfigError("config 'seed' must be an integer")
    return cfg


def load_config(path):
    """Read a JSON config file.  ``name`` may be given inside the file."""
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    return data


def validate_rows(rows, schema_name):
    schema = SCHEMAS[schema_name]
    for i, row in enumerate(rows):
        if len(row) != len(schema):
            raise LasekitError(f"{schema_name} row {i}: expected {len(schema)} fields, got {len(row)}")
        for (col, typ), v in zip(schema, row):
            ok = isinstance(v, (int, np.integer)) and not isinstance(v, bool) if typ is int else \
                isinstance(v, (float, int, np.floating, np.integer)) if typ is float else \
                isinstance(v, str)
            if not ok:
                raise LasekitError(f"{schema_name} row {i}: column {col!r} expects {typ.__name__}, "
                                   f"got {type(v).__name__}")


def write_rows(rows, schema_name, path, meta=None):
    validate_rows(rows, schema_name)
    header = [c for c, _ in SCHEMAS[schema_name]]
    types = [t for _, t in SCHEMAS[schema_name]]
    out = [[float(v) if t is float else v for v, t in zip(row, types)] for row in rows]
    _io.write_table(path, header, out, meta=meta)
    return Path(path)


# eigendecay ---------------------------------------------------------------------------

def run_eigendecay(dims=(1, 2, 3, 4), n=100, tau_grid=(0.25, 1.0, 4.0, 16.0, 64.0), top=6,
                   seed=0):
    """Top eigenvalues of the kernel matrix as the latent measure concentrates.

    For each ``d`` one standard-normal sample is drawn and rescaled by
    ``tau**-0.5`` across the grid, so the curves differ only through ``tau``.
    The matrix keeps its unit diagonal: it is the PSD kernel matrix
    ``exp(-|z_i - z_j|^2)``, not an edge-probability matrix with the diagonal
    removed (which would be indefinite).
    """
    tau_grid = [float(t) for t in tau_grid]
    if not tau_grid or any(t <= 0 for t in tau_grid) or np.any(np.diff(tau_grid) <= 0):
        raise ConfigError("tau_grid must be positive and strictly increasing")
    rows = []
    for d in dims:
        sub_seed = int(np.random.SeedSequence([seed, int(d)]).generate_state(1)[0])
        base = sample_latent(IsotropicGaussian(dim=int(d)), n, seed=sub_seed).Z
        for tau in tau_grid:
            P = build_probability_matrix(base / np.sqrt(tau), KernelSpec("gaussian_full"),
                                         zero_diagonal=False)
            vals = eigensolve_topk(P, min(top, n)).values
            rows += [(int(d), tau, int(seed), k + 1, float(v)) for k, v in enumerate(vals)]
    return rows


def eigendecay_gap_check(rows, d):
    """Evaluate the sharpening-gap property for one ``d``.

    Returns ``(ok, ratio_lo, ratio_hi, prev_hi)`` with ``ratio = l_{d+2}/l_{d+1}`` at
    the smallest and largest tau and ``prev_hi = l_{d+1}/l_d`` at the largest.
    """
    sel = [r for r in rows if r[0] == d]
    taus = sorted({r[1] for r in sel})
    lam = {(r[1], r[3]): r[4] for r in sel}
    lo, hi = taus[0], taus[-1]
    ratio_lo = lam[lo, d + 2] / lam[lo, d + 1]
    ratio_hi = lam[hi, d + 2] / lam[hi, d + 1]
    prev_hi = lam[hi, d + 1] / lam[hi, d]
    return bool(ratio_hi < ratio_lo and ratio_hi < 0.5 * prev_hi), ratio_lo, ratio_hi, prev_hi


# reconstruction sweep ------------------------------------------------------------------

def _reconstruction_trial(trial_seed, cfg):
    n, r, c, rho = cfg["n"], cfg["r"], cfg["center"], cfg["plateau"]
    kw = {"dense_cutoff": cfg["dense_cutoff"], "check_negative": False}
    sample, P, g = latent_position_graph(UniformBox(0, 10, 1), n, KernelSpec("gaussian_full"),
                                         trial_seed)
    z = sample.Z[:, 0]
    region = np.flatnonzero(np.abs(z - c) <= rho)
    out = []
    emb, _ = lase(g, np.ones(n), r, **kw)
    out.append((0.0, "rmse_ase", rmse_region(emb, P, region).rmse))
    for profile in cfg["profiles"]:
        for tau in cfg["tau_grid"]:
            w = soft_threshold_weights(sample.Z, [c], float(tau), rho, profile=profile)
            emb, _ = lase(g, w, r, **kw)
            out.append((float(tau), f"rmse_soft_{profile}", rmse_region(emb, P, region).rmse))
    for width in cfg["widths"]:
        nodes = np.flatnonzero(np.abs(z - c) <= width / 2)
        emb, _ = subgraph_ase(g, nodes, r, dense_cutoff=cfg["dense_cutoff"])
        out.append((float(width), "rmse_tophat", rmse_region(emb, P, region).rmse))
    return out


def run_reconstruction_sweep(jobs=1, **config):
    """Region RMSE of soft-threshold LASE against top-hat subgraph ASE.

    Latent positions are uniform on [0, 10], the kernel is ``exp(-|x - y|^2)``
    and the region is ``|z - center| <= plateau``.  Metrics (``param`` in
    brackets): ``rmse_ase`` [0], ``rmse_soft_<profile>`` [tau] and
    ``rmse_tophat`` [full window width].
    """
    cfg = resolve_config("reconstruction", config)
    if not cfg["tau_grid"] or not cfg["widths"]:
        raise ConfigError("tau_grid and widths must be non-empty")
    seeds = _child_seeds(cfg["seed"], cfg["trials"])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NegativeEigenvalueWarning)
        per_trial = _map(lambda s: _reconstruction_trial(s, cfg), seeds, jobs)
    return [(p, t, m, v) for t, res in enumerate(per_trial) for p, m, v in res]


def summarise_long(rows):
    """Mean and standard error per (metric, param) over seeds."""
    groups = {}
    for p, _, m, v in rows:
        groups.setdefault((m, p), []).append(v)
    out = []
    for (m, p), vals in sorted(groups.items()):
        a = np.asarray(vals, dtype=float)
        se = float(a.std(ddof=1) / np.sqrt(a.size)) if a.size > 1 else 0.0
        out.append((m, float(p), float(a.mean()), se, int(a.size)))
    return out


# shapes ----------------------------------------------------------------------------------

def shape_points(kind, center, size=0.8, count=200):
    """``count`` points tracing a recognisable outline of half-extent ``size``."""
    c = np.asarray(center, dtype=float)
    if kind == "circle":
        a = np.linspace(0, 2 * np.pi, count, endpoint=False)
        pts = np.column_stack([np.cos(a), np.sin(a)])
    elif kind == "cross":
        h = count // 2
        s1 = np.linspace(-1, 1, h)
        s2 = np.linspace(-1, 1, count - h)
        pts = np.vstack([np.column_stack([s1, 0 * s1]), np.column_stack([0 * s2, s2])])
    elif kind == "triangle":
        ang = np.pi / 2 + np.arange(3) * 2 * np.pi / 3
        V = np.column_stack([np.cos(ang), np.sin(ang)])
        sizes = [count // 3 + (i < count % 3) for i in range(3)]
        pts = np.vstack([V[i] + np.linspace(0, 1, k, endpoint=False)[:, None] * (V[(i + 1) % 3] - V[i])
                         for i, k in enumerate(sizes)])
    elif kind == "letter_l":
        h = count // 2
        s1 = np.linspace(0, 1, h, endpoint=False)
        s2 = np.linspace(0, 1, count - h)
        pts = np.vstack([np.column_stack([-0.6 + 0 * s1, 1 - 2 * s1]),
                         np.column_stack([-0.6 + 1.5 * s2, -1 + 0 * s2])])
    else:
        raise ConfigError(f"unknown shape {kind!r}")
    return c + size * pts


def _shape_fidelity(Y, Z):
    """Relative residual of a centred, scaled Procrustes fit of ``Y`` onto ``Z``."""
    res = procrustes_align(Y, Z, center=True, scale=True)
    return res.residual / float(np.linalg.norm(Z - Z.mean(axis=0)))


def run_shapes(jobs=1, **config):
    """Full ASE vs subgraph ASE vs LASE around four planted shapes.

    Returns ``(metric_rows, embedding_rows)``.  Methods: ``full_ase``,
    ``subgraph_ase`` (radius tuned), ``lase`` (tau tuned), each at ``r`` then
    PCA to 2-D; and ``lase_direct2d`` at the tuned tau embedded straight into
    2-D.  ``fidelity`` is the relative Procrustes residual of the 2-D points
    against the true positions (lower is better).
    """
    cfg = resolve_config("shapes", config)
    rng = np.random.default_rng(cfg["seed"])
    centers = np.array([[2.5, 2.5], [7.5, 2.5], [2.5, 7.5], [7.5, 7.5]])
    Z = np.vstack([rng.uniform(0, 10, (cfg["n_background"], 2))] +
                  [shape_points(k, c, cfg["shape_size"], cfg["shape_points"])
                   for k, c in zip(SHAPES, centers)])
    P = build_probability_matrix(Z, KernelSpec("gaussian_half"))
    g = sample_graph(P, int(rng.integers(2**63)))
    r = cfg["r"]

    def one(args):
        kind, c = args
        dist = np.linalg.norm(Z - c, axis=1)
        region = np.flatnonzero(dist <= cfg["region_radius"])
        Ztrue = Z[region]
        metrics, embs = [], []

        def record(method, param, emb):
            X = emb.rows(region)
            Y = pca_project(X, 2) if X.shape[1] > 2 else X
            metrics.append((kind, method, float(param), rmse_region(emb, P, region).rmse,
                            _shape_fidelity(Y, Ztrue)))
            embs.extend((kind, method, int(i), float(a), float(b), float(z[0]), float(z[1]))
                        for i, (a, b), z in zip(region, Y, Ztrue))

        record("full_ase", 0.0, full)
        best = None
        for rad in cfg["radius_grid"]:
            e, _ = subgraph_ase(g, np.flatnonzero(dist <= rad), r)
            err = rmse_region(e, P, region).rmse
            if best is None or err < best[0]:
                best = (err, rad, e)
        record("subgraph_ase", best[1], best[2])
        best = None
        for tau in cfg["tau_grid"]:
            e, _ = lase(g, attribute_weights(Z, c, tau), r, check_negative=False)
            err = rmse_region(e, P, region).rmse
            if best is None or err < best[0]:
                best = (err, tau, e)
        record("lase", best[1], best[2])
        e2, _ = lase(g, attribute_weights(Z, c, best[1]), 2, check_negative=False)
        record("lase_direct2d", best[1], e2)
        return metrics, embs

    full, _ = ase(g, r)
    results = _map(one, list(zip(SHAPES, centers)), jobs)
    metrics = [m for res in results for m in res[0]]
    embs = [e for res in results for e in res[1]]
    return metrics, embs


# coordinate regression -----------------------------------------------------------------

def synthetic_spatial_graph(n=3000, seed=0, keep=0.75, max_quantile=0.9):
    """Road-like planar graph: a pruned Delaunay triangulation of uniform points.

    Edges longer than the ``max_quantile`` edge length are dropped, then each
    remaining edge is kept with probability ``keep``.  Returns ``(graph, coords)``.
    """
    rng = np.random.default_rng(seed)
    C = rng.uniform(0, 1, (n, 2))
    simp = Delaunay(C).simplices
    E = np.vstack([simp[:, [0, 1]], simp[:, [1, 2]], simp[:, [0, 2]]])
    E = np.unique(np.sort(E, axis=1), axis=0)
    L = np.linalg.norm(C[E[:, 0]] - C[E[:, 1]], axis=1)
    mask = (L < np.quantile(L, max_quantile)) & (rng.random(len(E)) < keep)
    return Graph.from_edges(n, E[mask]), C


def load_spatial_fixture():
    """The bundled synthetic spatial graph and its planted coordinates."""
    root = resources.files("lasekit") / "data"
    with resources.as_file(root / "spatial_fixture.edges") as ep, \
            resources.as_file(root / "spatial_fixture_coords.csv") as cp:
        g = ingest_edge_list(ep)
        return g, read_coords(cp, g)


def read_coords(path, g=None):
    """Read ``index,c1,...`` coordinates; with ``g``, rows are matched to node labels."""
    _, index, M = _io.read_matrix(path)
    if g is None:
        if not np.array_equal(index, np.arange(len(index))):
            raise ConfigError(f"{path}: coordinate rows must be indexed 0..n-1 in order")
        return M
    row = {str(i): k for k, i in enumerate(index)}
    missing = [lab for lab in g.labels() if lab not in row]
    if missing:
        raise ConfigError(f"{path}: no coordinates for node {missing[0]!r}")
    return M[[row[lab] for lab in g.labels()]]


def write_coords(coords, path):
    coords = np.asarray(coords, dtype=float)
    _io.write_matrix(path, range(len(coords)), coords,
                     [f"c{j + 1}" for j in range(coords.shape[1])])


def _draw_test_nodes(g, rng, pool, n_test):
    """Draw test nodes from ``pool`` until each has a neighbour with known coordinates.

    A rejected candidate goes back to the known set and a new one is drawn.
    """
    known = np.ones(g.n, dtype=bool)
    order = list(rng.permutation(pool))
    test = []
    while True:
        while len(test) < n_test:
            if not order:
                raise LasekitError("ran out of candidate test nodes with known neighbours")
            x = int(order.pop())
            known[x] = False
            test.append(x)
        bad = [x for x in test if not known[g.neighbors(x)].any()]
        if not bad:
            return np.array(test), known
        for x in bad:
            test.remove(x)
            known[x] = True


def run_coordinate_regression(g, coords, jobs=1, **config):
    """Affine regression of coordinates on local and global embeddings.

    For each of ``centers`` random centre nodes: the ``m`` nearest nodes (true
    coordinates) form the neighbourhood; ``n_test`` nodes from the smallest
    neighbourhood are held out.  Methods: ``baseline`` (neighbour mean),
    ``full_ase``, ``subgraph_ase`` on the ``m + k`` nearest nodes (k tuned by
    training R^2) and ``lase`` with ``w = exp(-tau * dist / l)``, where ``l``
    is the median edge length and ``dist`` uses true coordinates for known
    nodes and baseline predictions for test nodes (tau tuned by training R^2;
    ``tau = 0`` is the uniform-weight reduction to full ASE).
    """
    cfg = resolve_config("regression", config)
    coords = np.asarray(coords, dtype=float)
    if coords.shape[0] != g.n:
        raise ConfigError(f"coords have {coords.shape[0]} rows for {g.n} nodes")
    m_grid = sorted(int(m) for m in cfg["m_grid"])
    kmax = max(cfg["k_grid"])
    if m_grid[0] < cfg["n_test"] or m_grid[-1] + kmax > g.n:
        raise ConfigError("m_grid incompatible with graph size / n_test")
    rng = np.random.default_rng(cfg["seed"])
    E = g.edges()
    ell = float(np.median(np.linalg.norm(coords[E[:, 0]] - coords[E[:, 1]], axis=1)))
    tree = cKDTree(coords)
    centers = rng.choice(g.n, cfg["centers"], replace=False)
    plans = []
    for ci in centers:
        order = tree.query(coords[ci], k=m_grid[-1] + kmax)[1]
        test, known = _draw_test_nodes(g, rng, order[:m_grid[0]], cfg["n_test"])
        plans.append((int(ci), order, test, known))

    def one(args):
        d, (ci, order, test, known) = args
        base = np.array([neighbour_mean_baseline(g, coords, known, x) for x in test])
        est = coords.copy()
        est[test] = base
        dist = np.linalg.norm(est - coords[ci], axis=1) / ell
        base_mse = float(np.mean((base - coords[test]) ** 2))
        out = []
        for m in m_grid:
            nodes = order[:m]
            tr = nodes[known[nodes]]

            def fit(emb):
                return regress_coordinates(emb.X[tr], coords[tr], emb.X[test], coords[test])

            out.append((d, m, ci, "baseline", 0.0, float("nan"), base_mse))
            rep = fit(fulls[d])
            out.append((d, m, ci, "full_ase", 0.0, rep.r2_pooled, rep.mse))
            best = None
            for k in cfg["k_grid"]:
                e, _ = subgraph_ase(g, order[:m + int(k)], d)
                rep = fit(e)
                if best is None or rep.r2_pooled > best[1].r2_pooled:
                    best = (float(k), rep)
            out.append((d, m, ci, "subgraph_ase", best[0], best[1].r2_pooled, best[1].mse))
            best = None
            for tau in cfg["tau_grid"]:
                e, _ = lase(g, WeightVector(np.exp(-float(tau) * dist)), d, check_negative=False)
                rep = fit(e)
                if best is None or rep.r2_pooled > best[1].r2_pooled:
                    best = (float(tau), rep)
            out.append((d, m, ci, "lase", best[0], best[1].r2_pooled, best[1].mse))
        return out

    fulls = {int(d): ase_positive_part(g, int(d)) for d in cfg["dims"]}
    tasks = [(int(d), p) for d in cfg["dims"] for p in plans]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NegativeEigenvalueWarning)
        return [row for res in _map(one, tasks, jobs) for row in res]


def ase_positive_part(g, r):
    """ASE via the uniform-weight LASE path (no negative-spectrum warning)."""
    emb, _ = lase(g, np.ones(g.n), r, check_negative=False)
    return emb


def regression_summary(rows):
    """Mean and standard error of R^2 and MSE over centres, per (d, m, method)."""
    groups = {}
    for d, m, _, method, _, r2, mse in rows:
        groups.setdefault((d, m, method), []).append((r2, mse))
    out = {}
    for key, vals in sorted(groups.items()):
        a = np.asarray(vals, dtype=float)
        se = a.std(axis=0, ddof=1) / np.sqrt(len(a)) if len(a) > 1 else np.zeros(2)
        out[key] = {"r2": float(a[:, 0].mean()), "r2_se": float(se[0]),
                    "mse": float(a[:, 1].mean()), "mse_se": float(se[1])}
    return out


# runner -----------------------------------------------------------------------------------

def run_experiment(name, config=None, out_dir=".", jobs=None):
    """Run experiment ``name`` and write its CSVs into ``out_dir``.

    Returns the list of written paths.  Output files carry the resolved
    config as a '#' JSON header line and are byte-identical across reruns.
    """
    config = dict(config or {})
    config.pop("name", None)
    cfg = resolve_config(name, config)
    jobs = default_jobs() if jobs is None else int(jobs)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    meta = {"experiment": name, "config": cfg}
    log.info("running %s with seed %d", name, cfg["seed"])
    if name == "eigendecay":
        rows = run_eigendecay(cfg["dims"], cfg["n"], cfg["tau_grid"], cfg["top"], cfg["seed"])
        return [write_rows(rows, "eigendecay", out / "eigendecay.csv", meta)]
    if name == "reconstruction":
        rows = run_reconstruction_sweep(jobs=jobs, **cfg)
        return [write_rows(rows, "reconstruction", out / "reconstruction.csv", meta),
                write_rows(summarise_long(rows), "reconstruction_summary",
                           out / "reconstruction_summary.csv", meta)]
    if name == "shapes":
        metrics, embs = run_shapes(jobs=jobs, **cfg)
        return [write_rows(metrics, "shapes", out / "shapes.csv", meta),
                write_rows(embs, "shapes_embeddings", out / "shapes_embeddings.csv", meta)]
    # regression
    if cfg["graph"] is not None:
        if cfg["coords"] is None:
            raise ConfigError("regression config gives 'graph' but no 'coords'")
        g = ingest_edge_list(cfg["graph"])
        coords = read_coords(cfg["coords"], g)
    else:
        g, coords = synthetic_spatial_graph(cfg["synthetic_n"], cfg["seed"])
    params = {k: v for k, v in cfg.items() if k not in ("graph", "coords")}
    rows = run_coordinate_regression(g, coords, jobs=jobs, **params)
    return [write_rows(rows, "regression", out / "regression.csv", meta)]
