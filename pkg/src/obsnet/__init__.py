"""Minimum-cost sensor network structures that stay observable under sensor failures."""

from .arborescence import ArborescenceResult, min_spanning_arborescence
from .connectivity import min_rooted_connected_subgraph
from .errors import (
    EnumerationBoundError,
    GraphFormatError,
    InconsistentTraceError,
    InfeasibleError,
    ObsNetError,
    RetriesExhaustedError,
    UnobservableError,
)
from .estimators import FieldRealizer, RobustObservabilityDesigner
from .field import (
    FieldSystem,
    ObservabilityMatrix,
    PrimeField,
    instantiate_deterministic,
    instantiate_random,
    observability_rank,
    recover_initial_state,
    simulate,
)
from .flows import FlowNetwork, local_node_connectivity, max_flow, max_robustness, sensor_disjoint_paths
from .generators import CostModel, random_geometric
from .graph import DynamicGraph, Edge, NodeId, PhysicalGraph, Role, Variant, parse_physical_graph
from .matroid import Matroid, PartitionMatroid, RootedConnectivityMatroid, weighted_matroid_intersection
from .oracles import brute_force_min_structure
from .pipeline import (
    BackboneRoutes,
    DesignSolution,
    backbone_shortest_paths,
    build_dynamic_graph,
    design,
    evaluate_cost,
    shift_weights,
)
from .robustness import RobustnessCurve, failure_curve, failure_curves, network_fails
from .serialize import Format, serialize
from .structural import (
    CactusCertificate,
    StructuralPair,
    StructuralSystemGraph,
    extract_cactus_certificate,
    is_structurally_observable,
    robust_structural_observability,
)

__version__ = "0.1.0"
