"""Gravity-based vulnerability evaluation of network communities."""
from .community import DetectionTrace, Partition, detect_communities, merge_delta_q, modularity
from .graph import Graph, parse_edge_list, read_edge_list, serialize_edge_list
from .metrics import (
    CommunityNetwork,
    ProbabilitySet,
    abstract_distance,
    community_network,
    eic,
    eoc,
    gravity_index,
    gravity_vector,
    jsd,
    probability_set,
)
from .sensitivity import SobolResult, ZetaModel, sobol_indices
from .vulnerability import (
    FuzzyRanking,
    VulnerabilityReport,
    evaluate,
    fuzzy_ranking,
    normalize_factors,
    relative_vulnerability,
    vulnerability,
)

__version__ = "0.1.0"
