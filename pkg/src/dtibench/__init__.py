"""Fair benchmarking for drug-target interaction prediction.

Constrained splits, structure-aware negative sampling, shallow baselines,
and the evaluation harness around them.
"""

__version__ = "0.1.0"

from .errors import (
    ChecksumError,
    DTIBenchError,
    InsufficientOverlapError,
    MissingNodeError,
    NotEnoughEdgesError,
    OverlapViolationError,
    ParseError,
    ReleasedHandleError,
    SamplingError,
    SingleClassError,
    ValidationError,
)
from .graph import DTIGraph, GraphStats, NodeKind, compute_stats, load_edge_list
from .metrics import LeakageMatrix, aggregate, auprc, auroc, format_aggregate
from .rng import derive_seed, generator
from .sampling import SampledDataset, WindowConfig, sample_random, sample_rmsd_window
from .split import Fold, FoldPlan, SplitMode, kfold, sc_pair, split, verify_plan

__all__ = [
    "__version__",
    "ChecksumError",
    "DTIBenchError",
    "DTIGraph",
    "Fold",
    "FoldPlan",
    "GraphStats",
    "InsufficientOverlapError",
    "LeakageMatrix",
    "MissingNodeError",
    "NodeKind",
    "NotEnoughEdgesError",
    "OverlapViolationError",
    "ParseError",
    "ReleasedHandleError",
    "SampledDataset",
    "SamplingError",
    "SingleClassError",
    "SplitMode",
    "ValidationError",
    "WindowConfig",
    "aggregate",
    "auprc",
    "auroc",
    "compute_stats",
    "derive_seed",
    "format_aggregate",
    "generator",
    "kfold",
    "load_edge_list",
    "sample_random",
    "sample_rmsd_window",
    "sc_pair",
    "split",
    "verify_plan",
]
