"""Local adjacency spectral embedding (LASE) for latent position graphs."""

from .errors import ConfigError, ConvergenceError, LasekitError, ParseError, SpectralError
from .evaluation import (
    neighbour_mean_baseline,
    pca_project,
    procrustes_align,
    reconstruct_probabilities,
    regress_coordinates,
    rmse_region,
)
from .graph import (
    Graph,
    bfs_distances,
    induced_subgraph,
    ingest_edge_list,
    m_hop_neighborhood,
    write_edge_list,
)
from .latent_model import (
    IsotropicGaussian,
    KernelSpec,
    UniformBox,
    build_probability_matrix,
    grid_measure,
    latent_position_graph,
    mercer_features_grid,
    sample_graph,
    sample_latent,
)
from .local2global import (
    assemble_distances,
    build_cover,
    embed_cover,
    export_precomputed,
    read_precomputed,
)
from .spectral import (
    NegativeEigenvalueWarning,
    ase,
    eigensolve_topk,
    inductive_lase,
    lase,
    scree,
    subgraph_ase,
)
from .weights import (
    WeightVector,
    attribute_weights,
    graph_distance_weights,
    hybrid_weights,
    normalise,
    soft_threshold_weights,
    subgraph_weights,
    uniform_weights,
)

__version__ = "0.1.0"
