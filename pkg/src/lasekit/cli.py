"""Command-line entry point: ``lasekit <subcommand> ...``.

Exit codes: 0 success, 1 domain error (message as one JSON line on stderr),
2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import _io
from .errors import LasekitError
from .evaluation import procrustes_align, regress_coordinates, rmse_region, write_report_json
from .experiments import DEFAULTS, default_jobs, load_config, read_coords, run_experiment
from .graph import bfs_distances, ingest_edge_list, m_hop_neighborhood, write_edge_list, write_node_map
from .latent_model import (IsotropicGaussian, KernelSpec, UniformBox, build_probability_matrix,
                           latent_position_graph, read_latent_csv, write_latent_csv)
from .local2global import (SubgraphCover, assemble_distances, build_cover, embed_cover,
                           export_precomputed)
from .spectral import (SpectralModel, ase, inductive_lase, lase, read_embedding_csv, scree,
                       subgraph_ase, write_embedding_csv)
from .weights import (attribute_weights, graph_distance_weights, hybrid_weights,
                      normalise, read_weights_csv, soft_threshold_weights, subgraph_weights,
                      uniform_weights, write_weights_csv)

log = logging.getLogger("lasekit")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _node_list(text):
    """Comma-separated indices, or ``@file`` with one index per line."""
    if text.startswith("@"):
        body = Path(text[1:]).read_text(encoding="utf-8")
        items = [s for s in body.replace(",", "\n").split() if not s.startswith("#")]
    else:
        items = [s for s in text.split(",") if s.strip()]
    return np.array([int(s) for s in items], dtype=np.int64)


def _require_seed(args):
    if args.seed is None:
        raise _UsageError(f"{args.command} is stochastic: --seed is required")


class _UsageError(Exception):
    pass


def _add_seed(p):
    p.add_argument("--seed", type=int, default=None, help="RNG seed (required where stochastic)")


def _kernel(name):
    return KernelSpec(name)


# subcommands ---------------------------------------------------------------------------

def cmd_generate(args):
    _require_seed(args)
    if args.dist == "uniform":
        dist = UniformBox(args.low, args.high, args.dim)
    else:
        dist = IsotropicGaussian(args.dim, args.precision)
    sample, P, g = latent_position_graph(dist, args.n, _kernel(args.kernel), args.seed)
    write_edge_list(g, args.out_graph)
    if args.out_node_map:
        write_node_map(g, args.out_node_map)
    if args.out_latent:
        write_latent_csv(sample, args.out_latent)
    log.info("generated %d nodes, %d edges", g.n, g.n_edges)


def _load_graph(args):
    return ingest_edge_list(args.graph, node_map=getattr(args, "node_map", None))


def _read_latent(path, g=None):
    """Latent rows, rejoined to the graph's node labels when a graph is given."""
    return read_latent_csv(path) if g is None else read_coords(path, g)


def _build_weights(args, g=None):
    s = args.strategy
    if s == "uniform":
        n = g.n if g is not None else args.n
        if n is None:
            raise LasekitError("uniform weights need --graph or --n")
        return uniform_weights(n)
    if s in ("attribute", "soft-threshold"):
        if args.latent is None or args.center is None:
            raise LasekitError(f"{s} weights need --latent and --center")
        Z = _read_latent(args.latent, g)
        if s == "attribute":
            return attribute_weights(Z, args.center, args.tau)
        return soft_threshold_weights(Z, args.center, args.tau, args.radius, profile=args.profile)
    if g is None:
        raise LasekitError(f"{s} weights need --graph")
    if s == "graph-distance":
        return graph_distance_weights(bfs_distances(g, args.source), 1.0 if args.p is None else args.p,
                                      unreachable=args.unreachable)
    if s == "subgraph":
        if args.nodes is not None:
            return subgraph_weights(g.n, args.nodes)
        if args.m is None:
            raise LasekitError("subgraph weights need --nodes or --m with --source")
        return subgraph_weights(g.n, m_hop_neighborhood(g, args.source, args.m))
    if s == "hybrid":
        if args.latent is None:
            raise LasekitError("hybrid weights need --latent")
        return hybrid_weights(bfs_distances(g, args.source), _read_latent(args.latent, g),
                              args.source, args.alpha, args.beta)
    raise LasekitError(f"unknown strategy {s!r}")


def cmd_weights(args):
    g = _load_graph(args) if args.graph else None
    wv = _build_weights(args, g)
    if args.normalise:
        wv = normalise(wv)
    write_weights_csv(wv, args.out)


def cmd_embed(args):
    g = _load_graph(args)
    kw = {"dense_cutoff": args.dense_cutoff}
    if args.method == "ase":
        emb, model = ase(g, args.r, **kw)
    elif args.method == "subgraph":
        if args.nodes is not None:
            nodes = args.nodes
        elif args.m is not None:
            nodes = m_hop_neighborhood(g, args.source, args.m)
        else:
            raise LasekitError("subgraph embedding needs --nodes or --m with --source")
        emb, model = subgraph_ase(g, nodes, args.r, **kw)
    else:
        if args.weights:
            wv = read_weights_csv(args.weights)
        elif args.center is not None:
            args.strategy = "attribute"
            wv = _build_weights(args, g)
        elif args.p is not None:
            args.strategy = "graph-distance"
            wv = _build_weights(args, g)
        else:
            raise LasekitError("lase needs --weights, --center (with --latent) or --p (with --source)")
        emb, model = lase(g, wv, args.r, **kw)
    if args.no_provenance:
        _io.write_matrix(args.out, range(emb.n), emb.X, [f"x{k + 1}" for k in range(emb.r)])
    else:
        write_embedding_csv(emb, args.out)
    if args.model_dir:
        model.save(args.model_dir)


def _read_connections(path, n):
    """One new node per line: the indices of the existing nodes it connects to."""
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if s.startswith("#"):
                continue
            a = np.zeros(n)
            if s:
                try:
                    idx = [int(t) for t in s.replace(",", " ").split()]
                except ValueError:
                    raise LasekitError(f"{path}: line {lineno}: expected node indices") from None
                if min(idx) < 0 or max(idx) >= n:
                    raise LasekitError(f"{path}: line {lineno}: node index out of range 0..{n - 1}")
                a[idx] = 1.0
            rows.append(a)
    return np.array(rows).reshape(len(rows), n)


def cmd_inductive(args):
    model = SpectralModel.load(args.model_dir)
    A = _read_connections(args.connections_file, model.n)
    X = np.array([inductive_lase(a, model) for a in A]).reshape(len(A), model.r)
    _io.write_matrix(args.out, range(len(X)), X, [f"x{k + 1}" for k in range(model.r)],
                     {"method": "inductive_" + model.method, "r": model.r})


def cmd_scree(args):
    g = _load_graph(args)
    wv = read_weights_csv(args.weights) if args.weights else None
    vals = scree(g, wv, args.k, dense_cutoff=args.dense_cutoff).values
    rows = [[k + 1, float(v), float(v - vals[k + 1]) if k + 1 < vals.size else float("nan")]
            for k, v in enumerate(vals)]
    if args.out:
        _io.write_table(args.out, ["k", "eigenvalue", "gap"], rows)
    else:
        print("k,eigenvalue,gap")
        for row in rows:
            print(",".join(_io._cell(v) for v in row))


def cmd_eval(args):
    emb = read_embedding_csv(args.embedding)
    g = _load_graph(args) if args.graph else None
    if args.kind == "rmse":
        if args.latent is None:
            raise LasekitError("eval rmse needs --latent")
        Z = _read_latent(args.latent, g)
        P = build_probability_matrix(Z, _kernel(args.kernel))
        if args.region is not None:
            region = args.region
        elif args.center is not None:
            region = np.flatnonzero(np.linalg.norm(Z - np.asarray(args.center), axis=1) <= args.radius)
        else:
            region = np.flatnonzero(emb.included)
        report = rmse_region(emb, P, region)
    elif args.kind == "regress":
        if args.coords is None:
            raise LasekitError("eval regress needs --coords")
        Y = read_coords(args.coords, g)
        train = args.train if args.train is not None else np.flatnonzero(emb.included)
        test = args.test
        report = regress_coordinates(emb.rows(train), Y[train],
                                     None if test is None else emb.rows(test),
                                     None if test is None else Y[test])
    else:
        if args.reference is None:
            raise LasekitError("eval procrustes needs --reference")
        ref = read_embedding_csv(args.reference)
        idx = np.flatnonzero(emb.included & ref.included)
        res = procrustes_align(emb.rows(idx), ref.rows(idx), center=args.center_points,
                               scale=args.scale)
        report = _ProcrustesReport(res.Q.tolist(), res.residual, res.scale, res.rank_deficient)
        if args.aligned_out:
            _io.write_matrix(args.aligned_out, idx, res.aligned,
                             [f"x{k + 1}" for k in range(res.aligned.shape[1])])
    if args.out:
        write_report_json(report, args.out)
    else:
        print(json.dumps(report.to_dict(), sort_keys=True))


class _ProcrustesReport:
    def __init__(self, Q, residual, scale, rank_deficient):
        self._d = {"Q": Q, "residual": residual, "scale": scale, "rank_deficient": rank_deficient}

    def to_dict(self):
        return self._d


def _write_cover(cover, path):
    rows = [[k, s, int(v)] for k, (s, nodes) in enumerate(cover.patches) for v in nodes]
    _io.write_table(path, ["patch", "seed_node", "node"], rows,
                    meta={"m": cover.m, "seed": cover.seed, "patches": len(cover)})


def _read_cover(path):
    meta, _, rows = _io.read_table(path)
    patches = {}
    for k, s, v in rows:
        patches.setdefault(int(k), (int(s), []))[1].append(int(v))
    plist = [(s, np.array(sorted(nodes), dtype=np.int64)) for _, (s, nodes) in sorted(patches.items())]
    meta = meta or {}
    return SubgraphCover(plist, int(meta.get("m", 0)), int(meta.get("seed", 0)))


def cmd_cover(args):
    _require_seed(args)
    g = _load_graph(args)
    cover = build_cover(g, args.m_hop, args.seed)
    _write_cover(cover, args.out)
    log.info("%d patches", len(cover))


def cmd_assemble(args):
    g = _load_graph(args)
    if args.cover:
        cover = _read_cover(args.cover)
    else:
        _require_seed(args)
        if args.m_hop is None:
            raise _UsageError("assemble needs --cover or --m-hop with --seed")
        cover = build_cover(g, args.m_hop, args.seed)
    jobs = args.jobs if args.jobs is not None else default_jobs()
    pes = embed_cover(g, cover, r=args.r, jobs=jobs, weighted=args.weighted, p=args.p)
    asm = assemble_distances(pes, g.n)
    meta = {"m": cover.m, "r": args.r, "seed": cover.seed, "patches": len(cover),
            "reduced_patches": sum(pe.reduced and not pe.degenerate for pe in pes),
            "degenerate_patches": sum(pe.degenerate for pe in pes), "weighted": args.weighted}
    export_precomputed(asm, args.out, args.format, meta)


def cmd_experiment(args):
    config = load_config(args.config) if args.config else {}
    name = args.name or config.get("name")
    if name is None:
        raise _UsageError("experiment needs --name (or a 'name' key in the config)")
    config.pop("name", None)
    if args.seed is not None:
        config["seed"] = args.seed
    elif "seed" not in config:
        raise _UsageError("experiment is stochastic: give --seed or a 'seed' key in the config")
    jobs = args.jobs if args.jobs is not None else default_jobs()
    for path in run_experiment(name, config, args.out_dir, jobs):
        print(path)


# parser -------------------------------------------------------------------------------

def build_parser():
    p = _Parser(prog="lasekit", description="Local adjacency spectral embedding toolkit.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("generate", help="sample latent positions and a graph")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--dist", choices=["uniform", "gaussian"], default="uniform")
    s.add_argument("--dim", type=int, default=1)
    s.add_argument("--low", type=float, default=0.0)
    s.add_argument("--high", type=float, default=10.0)
    s.add_argument("--precision", type=float, default=1.0)
    s.add_argument("--kernel", choices=["gaussian_full", "gaussian_half"], default="gaussian_full")
    s.add_argument("--out-graph", required=True)
    s.add_argument("--out-latent")
    s.add_argument("--out-node-map", help="index,label CSV tying graph indices to latent rows")
    _add_seed(s)
    s.set_defaults(func=cmd_generate)

    def weight_flags(s):
        s.add_argument("--latent", help="latent/attribute CSV (index,z1,...)")
        s.add_argument("--center", type=_floats, help="comma-separated centre point")
        s.add_argument("--tau", type=float, default=1.0)
        s.add_argument("--radius", type=float, default=0.5)
        s.add_argument("--profile", choices=["literal", "shifted"], default="literal")
        s.add_argument("--source", type=int, default=0, help="reference node")
        s.add_argument("--p", type=float, default=None, help="graph-distance decay exponent")
        s.add_argument("--unreachable", choices=["zero", "epsilon"], default="zero")
        s.add_argument("--nodes", type=_node_list, help="indices 'i,j,...' or '@file'")
        s.add_argument("--m", type=int, default=None, help="hop radius around --source")
        s.add_argument("--alpha", type=float, default=1.0)
        s.add_argument("--beta", type=float, default=1.0)

    s = sub.add_parser("weights", help="compute a node weight vector")
    s.add_argument("--strategy", required=True,
                   choices=["uniform", "attribute", "graph-distance", "subgraph", "hybrid",
                            "soft-threshold"])
    s.add_argument("--graph")
    s.add_argument("--node-map")
    s.add_argument("--n", type=int)
    s.add_argument("--normalise", action="store_true", help="rescale to sum to n")
    s.add_argument("--out", required=True)
    weight_flags(s)
    _add_seed(s)
    s.set_defaults(func=cmd_weights)

    s = sub.add_parser("embed", help="ASE, LASE or subgraph ASE")
    s.add_argument("--graph", required=True)
    s.add_argument("--node-map")
    s.add_argument("--method", choices=["ase", "lase", "subgraph"], default="lase")
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--weights", help="weights CSV (lase)")
    s.add_argument("--out", required=True)
    s.add_argument("--model-dir", help="also save the fitted model here")
    s.add_argument("--dense-cutoff", type=int, default=1024)
    s.add_argument("--no-provenance", action="store_true", help="omit the '#' JSON header line")
    weight_flags(s)
    _add_seed(s)
    s.set_defaults(func=cmd_embed)

    s = sub.add_parser("inductive", help="embed new nodes with a saved model")
    s.add_argument("--model-dir", required=True)
    s.add_argument("--connections-file", required=True,
                   help="one line per new node listing the indices it connects to")
    s.add_argument("--out", required=True)
    _add_seed(s)
    s.set_defaults(func=cmd_inductive)

    s = sub.add_parser("scree", help="top-k eigenvalues")
    s.add_argument("--graph", required=True)
    s.add_argument("--node-map")
    s.add_argument("--k", type=int, default=20)
    s.add_argument("--weights")
    s.add_argument("--dense-cutoff", type=int, default=1024)
    s.add_argument("--out")
    _add_seed(s)
    s.set_defaults(func=cmd_scree)

    s = sub.add_parser("eval", help="rmse | regress | procrustes")
    s.add_argument("kind", choices=["rmse", "regress", "procrustes"])
    s.add_argument("--embedding", required=True)
    s.add_argument("--graph", help="graph the embedding came from; aligns latent/coords rows by label")
    s.add_argument("--node-map")
    s.add_argument("--latent")
    s.add_argument("--kernel", choices=["gaussian_full", "gaussian_half"], default="gaussian_full")
    s.add_argument("--region", type=_node_list)
    s.add_argument("--center", type=_floats)
    s.add_argument("--radius", type=float, default=1.0)
    s.add_argument("--coords")
    s.add_argument("--train", type=_node_list)
    s.add_argument("--test", type=_node_list)
    s.add_argument("--reference")
    s.add_argument("--center-points", action="store_true", help="procrustes: centre both sets")
    s.add_argument("--scale", action="store_true", help="procrustes: fit a scale factor")
    s.add_argument("--aligned-out")
    s.add_argument("--out")
    _add_seed(s)
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("cover", help="m-hop subgraph cover")
    s.add_argument("--graph", required=True)
    s.add_argument("--node-map")
    s.add_argument("--m-hop", type=int, required=True)
    s.add_argument("--out", required=True)
    _add_seed(s)
    s.set_defaults(func=cmd_cover)

    s = sub.add_parser("assemble", help="embed a cover and export a precomputed distance matrix")
    s.add_argument("--graph", required=True)
    s.add_argument("--node-map")
    s.add_argument("--cover")
    s.add_argument("--m-hop", type=int)
    s.add_argument("--r", type=int, default=3)
    s.add_argument("--format", choices=["csv", "raw64"], default="csv")
    s.add_argument("--weighted", action="store_true", help="graph-distance LASE per patch")
    s.add_argument("--p", type=float, default=1.0)
    s.add_argument("--jobs", type=int)
    s.add_argument("--out", required=True)
    _add_seed(s)
    s.set_defaults(func=cmd_assemble)

    s = sub.add_parser("experiment", help="run a scripted experiment")
    s.add_argument("--name", choices=sorted(DEFAULTS))
    s.add_argument("--config")
    s.add_argument("--out-dir", required=True)
    s.add_argument("--jobs", type=int)
    _add_seed(s)
    s.set_defaults(func=cmd_experiment)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        args.func(args)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"lasekit: error: {exc}", file=sys.stderr)
        return 2
    except (LasekitError, ValueError, OSError, IndexError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
