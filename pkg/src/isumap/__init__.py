"""Manifold learning by local metric distortion, t-conorm merging of star
graphs, shortest-path metric completion, and multidimensional scaling."""

from .core_types import (
    DenseMetric,
    Embedding,
    NeighborGraph,
    PointCloud,
    SparseMetric,
    validate_point_cloud,
)
from .embedding import MdsConfig, classical_mds, metric_mds, procrustes_distance
from .errors import ConfigError, DataError, NumericalError
from .evaluation import geodesic_correlation, kmeans, nn_distance_uniformity, pair_sets_index
from .geodesics import connectivity_report, dijkstra_all_pairs, quotient_metric_oracle
from .local_metric import LocalMetricConfig, build_star_graphs
from .merge import TConorm, fuzzy_tconorm, metric_tconorm, symmetrize
from .neighbors import knn
from .pipeline import PipelineConfig, benchmark_scaling, config_from_mapping, run_pipeline

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DataError",
    "DenseMetric",
    "Embedding",
    "LocalMetricConfig",
    "MdsConfig",
    "NeighborGraph",
    "NumericalError",
    "PipelineConfig",
    "PointCloud",
    "SparseMetric",
    "TConorm",
    "benchmark_scaling",
    "build_star_graphs",
    "classical_mds",
    "config_from_mapping",
    "connectivity_report",
    "dijkstra_all_pairs",
    "fuzzy_tconorm",
    "geodesic_correlation",
    "kmeans",
    "knn",
    "metric_mds",
    "metric_tconorm",
    "nn_distance_uniformity",
    "pair_sets_index",
    "procrustes_distance",
    "quotient_metric_oracle",
    "run_pipeline",
    "symmetrize",
    "validate_point_cloud",
]
