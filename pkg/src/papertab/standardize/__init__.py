"""Value standardization: binning, 2D projection, clustering, group plans."""
from .binning import LEVELS, bin_numeric, try_float
from .clustering import KMEANS_SEED, MAX_AUTO_K, ClusterResult, cluster, kmeans
from .grouping import (
    ChangeEntry,
    ChangeReport,
    ClusterInfo,
    EncodedRow,
    GroupingResult,
    GroupPoint,
    StandardizationPlan,
    apply_plan,
    encode_rows,
    label_cluster,
    normalize_value,
    propose_groups,
)
from .projection import project_2d

__all__ = [
    "LEVELS",
    "bin_numeric",
    "try_float",
    "KMEANS_SEED",
    "MAX_AUTO_K",
    "ClusterResult",
    "cluster",
    "kmeans",
    "ChangeEntry",
    "ChangeReport",
    "ClusterInfo",
    "EncodedRow",
    "GroupingResult",
    "GroupPoint",
    "StandardizationPlan",
    "apply_plan",
    "encode_rows",
    "label_cluster",
    "normalize_value",
    "propose_groups",
    "project_2d",
]
