"""Data-driven label space partitioning for multi-label classification."""
from .dataset_io import Dataset, DatasetPair, load_pair, parse_arff, parse_label_header
from .label_graph import LabelGraph, build_cooccurrence_graph
from .partition import Partition

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "DatasetPair",
    "LabelGraph",
    "Partition",
    "build_cooccurrence_graph",
    "load_pair",
    "parse_arff",
    "parse_label_header",
]
