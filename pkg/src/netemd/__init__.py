"""NetEmd: comparing networks by the shapes of their feature distributions.

Per-node features (graphlet orbit degrees, ego-network graphlet counts,
degrees) and Laplacian spectra are turned into empirical distributions and
compared with EMD*, the earth mover's distance after rescaling to unit
variance and optimal translation.
"""

__version__ = "0.1.0"

from .distance import (DistanceMatrix, KernelMatrix, distance_matrix, gaussian_kernel, netemd_set,
                       netemd_single, read_matrix, write_matrix)
from .emd import AtomKind, EmpiricalDistribution, emd, emd_star, rescale_to_unit_variance, variance
from .evaluation import RankingResult, auprc, kendall_tau, knn_accuracy, pbar, time_rankings
from .features import FeatureCache, FeatureSetId, spectra
from .generators import Model, ModelSpec, gen_suite, generate, grid, rewiring_chain
from .graph import Graph, GraphDataset, load_edge_list, load_manifest, parse_edge_list, write_edge_list
from .orbits import OrbitCountTable, ego_graphlet_counts, graphlet_census, orbit_counts

__all__ = [
    "AtomKind", "DistanceMatrix", "EmpiricalDistribution", "FeatureCache", "FeatureSetId", "Graph",
    "GraphDataset", "KernelMatrix", "Model", "ModelSpec", "OrbitCountTable", "RankingResult", "auprc",
    "distance_matrix", "ego_graphlet_counts", "emd", "emd_star", "gaussian_kernel", "gen_suite",
    "generate", "graphlet_census", "grid", "kendall_tau", "knn_accuracy", "load_edge_list",
    "load_manifest", "netemd_set", "netemd_single", "orbit_counts", "parse_edge_list", "pbar",
    "read_matrix", "rescale_to_unit_variance", "rewiring_chain", "spectra", "time_rankings",
    "variance", "write_edge_list", "write_matrix",
]
