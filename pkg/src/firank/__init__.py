"""Feature importance ranking with radiomic extraction and exhaustive subset evaluation."""

from .data import Dataset, EffResult, Ranking, read_dataset, validate_dataset, write_dataset
from .evaluation import (
    build_report,
    cv_auc,
    effectiveness,
    enumerate_subsets,
    exhaustive_search,
    stratified_folds,
)
from .imaging import FEATURE_NAMES, extract_all
from .rankers import METHOD_NAMES, MethodParams, rank

__version__ = "0.1.0"

__all__ = [
    "Dataset", "EffResult", "FEATURE_NAMES", "METHOD_NAMES", "MethodParams", "Ranking",
    "build_report", "cv_auc", "effectiveness", "enumerate_subsets", "exhaustive_search",
    "extract_all", "rank", "read_dataset", "stratified_folds", "validate_dataset", "write_dataset",
]
