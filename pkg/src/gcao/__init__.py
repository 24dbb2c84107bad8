"""Group-driven gravitational contraction preprocessing for clustering.

The package contracts low-density boundary regions toward their cluster
cores before a downstream clusterer runs: density estimation picks the
boundary points, connected k-NN components group them into rigid moving
units, and iterated attraction from each unit's external neighborhood
pulls the units inward.
"""

from .contraction import (
    ContractionConfig,
    ContractionTrace,
    GcaoResult,
    contraction_step,
    group_force,
    member_force,
    response_vector,
    run_gcao,
)
from .dataset import PointSet, load_csv, make_blobs, standardize, write_csv
from .density import (
    DensityProfile,
    compute_density_profile,
    density_lower_bound,
    local_density,
    low_density_set,
    neighbor_rank,
    truncation_radius,
)
from .evaluation import (
    ContingencyTable,
    EvaluationReport,
    acc,
    ari,
    contingency,
    evaluate,
    homogeneity,
    nmi,
)
from .grouping import (
    Group,
    GroupPartition,
    attach_members,
    build_groups,
    build_low_density_adjacency,
    connected_groups,
    seed_groups,
    singleton_partition,
)
from .kmeans import kmeans, wcss_of
from .neighbors import NeighborIndex
from .pipeline import (
    PipelineConfig,
    PipelineError,
    RunRecord,
    grid_search,
    run_pipeline,
    runtime_report,
)

__version__ = "0.1.0"

__all__ = [
    "ContingencyTable",
    "ContractionConfig",
    "ContractionTrace",
    "DensityProfile",
    "EvaluationReport",
    "GcaoResult",
    "Group",
    "GroupPartition",
    "NeighborIndex",
    "PipelineConfig",
    "PipelineError",
    "PointSet",
    "RunRecord",
    "acc",
    "ari",
    "attach_members",
    "build_groups",
    "build_low_density_adjacency",
    "compute_density_profile",
    "connected_groups",
    "contingency",
    "contraction_step",
    "density_lower_bound",
    "evaluate",
    "grid_search",
    "group_force",
    "homogeneity",
    "kmeans",
    "load_csv",
    "local_density",
    "low_density_set",
    "make_blobs",
    "member_force",
    "neighbor_rank",
    "nmi",
    "response_vector",
    "run_gcao",
    "run_pipeline",
    "runtime_report",
    "seed_groups",
    "singleton_partition",
    "standardize",
    "truncation_radius",
    "wcss_of",
    "write_csv",
]
