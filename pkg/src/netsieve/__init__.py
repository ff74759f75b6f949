"""netsieve: reconstruct consensus-network topologies from boundary data.

Stimulate a networked averaging protocol at input ports, observe it at output
ports, realize the sampled dynamics, and sieve the integer structure of the
recovered spectrum and boundary block down to every consistent topology.
"""

from .dynamics import (
    DiscreteSystem,
    IoRecord,
    SteeredSystem,
    build_steered_system,
    controllability_census,
    default_delta,
    discretize,
    impulse_experiments,
    minimal_order,
    pbh_check,
    simulate,
)
from .errors import (
    BranchAmbiguityError,
    CapacityError,
    IdentificationError,
    IdentificationQualityError,
    InternalConsistencyError,
    NotFullOrderError,
)
from .graphs import (
    Graph,
    SpectralReport,
    char_poly,
    complement,
    count_k_matchings,
    is_connected,
    laplacian,
    load_graph,
    report_for_graph,
    spanning_tree_count_oracle,
    spectral_report,
    spectrum,
    subdivision,
)
from .pipeline import identify_graph, simulate_impulses, tomography
from .sieve import (
    Candidate,
    ConstructionProblem,
    DegreeSequence,
    PartitionProblem,
    SieveReport,
    assemble_sequences,
    construct_graphs,
    dedup_candidates,
    is_graphical,
    partition_count_oracle,
    restricted_partitions,
    run_sieve,
    spectral_filter,
)
from .sysid import (
    IdentifiedModel,
    MarkovSequence,
    SieveInput,
    extract_boundary_block,
    hankel_realize,
    markov_from_impulses,
    to_continuous,
)

__version__ = "0.1.0"

__all__ = [
    "BranchAmbiguityError",
    "Candidate",
    "CapacityError",
    "ConstructionProblem",
    "DegreeSequence",
    "DiscreteSystem",
    "Graph",
    "IdentificationError",
    "IdentificationQualityError",
    "IdentifiedModel",
    "InternalConsistencyError",
    "IoRecord",
    "MarkovSequence",
    "NotFullOrderError",
    "PartitionProblem",
    "SieveInput",
    "SieveReport",
    "SpectralReport",
    "SteeredSystem",
    "assemble_sequences",
    "build_steered_system",
    "char_poly",
    "complement",
    "construct_graphs",
    "controllability_census",
    "count_k_matchings",
    "dedup_candidates",
    "default_delta",
    "discretize",
    "extract_boundary_block",
    "hankel_realize",
    "identify_graph",
    "impulse_experiments",
    "is_connected",
    "is_graphical",
    "laplacian",
    "load_graph",
    "markov_from_impulses",
    "minimal_order",
    "partition_count_oracle",
    "pbh_check",
    "report_for_graph",
    "restricted_partitions",
    "run_sieve",
    "simulate",
    "simulate_impulses",
    "spanning_tree_count_oracle",
    "spectral_filter",
    "spectral_report",
    "spectrum",
    "subdivision",
    "to_continuous",
    "tomography",
]
