"""orbitrans: temporal-network comparison via graphlet-orbit transitions.

Pipeline in one breath: parse a timestamped edge list, slice it into
snapshots, enumerate connected 3-/4-node subgraphs and the orbits their
nodes occupy, follow each group across consecutive snapshots to build an
orbit-transition matrix, and compare networks by transition agreement
(OTA), graphlet-degree agreement (GDA) or motif fingerprints against a
degree-preserving null model.
"""

from .census import (
    ClassificationTable,
    GraphletClass,
    GraphletDegreeDistribution,
    OrbitFrequencyMatrix,
    build_classification_table,
    compute_gdd,
    compute_orbit_frequencies,
    connected_subgraphs,
    enumerate_connected_subgraphs,
    graphlet_class_frequencies,
)
from .graph_core import (
    EdgeListParseError,
    SnapshotPolicy,
    SnapshotSeries,
    StaticGraph,
    TemporalEdgeList,
    average_degree,
    build_snapshots,
    characteristic_path_length,
    clustering_coefficient,
    final_aggregate_graph,
    parse_edge_list,
    relative_size_series,
)
from .metrics import (
    AgreementConfig,
    MergeStep,
    MotifFingerprint,
    SimilarityMatrix,
    cut_clusters,
    fingerprint_distance,
    gda_matrix,
    gda_pair,
    hierarchical_cluster,
    motif_scores,
    ota_matrix,
    ota_pair,
    relative_rescale,
)
from .nullmodel import (
    RandomizationConfig,
    degree_preserving_randomize,
    ensemble_frequencies,
)
from .transitions import (
    NormalizedTransitionMatrix,
    OrbitTransitionMatrix,
    TransitionFingerprint,
    accumulate_series,
    discretize,
    enumerate_transitions,
    row_normalize,
)

__version__ = "0.1.0"

__all__ = [
    "AgreementConfig",
    "ClassificationTable",
    "EdgeListParseError",
    "GraphletClass",
    "GraphletDegreeDistribution",
    "MergeStep",
    "MotifFingerprint",
    "NormalizedTransitionMatrix",
    "OrbitFrequencyMatrix",
    "OrbitTransitionMatrix",
    "RandomizationConfig",
    "SimilarityMatrix",
    "SnapshotPolicy",
    "SnapshotSeries",
    "StaticGraph",
    "TemporalEdgeList",
    "TransitionFingerprint",
    "accumulate_series",
    "average_degree",
    "build_classification_table",
    "build_snapshots",
    "characteristic_path_length",
    "clustering_coefficient",
    "compute_gdd",
    "compute_orbit_frequencies",
    "connected_subgraphs",
    "cut_clusters",
    "degree_preserving_randomize",
    "discretize",
    "ensemble_frequencies",
    "enumerate_connected_subgraphs",
    "enumerate_transitions",
    "final_aggregate_graph",
    "fingerprint_distance",
    "gda_matrix",
    "gda_pair",
    "graphlet_class_frequencies",
    "hierarchical_cluster",
    "motif_scores",
    "ota_matrix",
    "ota_pair",
    "parse_edge_list",
    "relative_rescale",
    "relative_size_series",
    "row_normalize",
]
