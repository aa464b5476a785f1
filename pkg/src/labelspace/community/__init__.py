"""Community detection on label co-occurrence graphs."""
from ..label_graph import LabelGraph
from ..partition import Partition
from ._common import ALGORITHMS, ConvergenceError, DetectorConfig
from .eigenvector import leading_eigenpair, leading_eigenvector
from .fastgreedy import fast_greedy
from .infomap import infomap
from .propagation import label_propagation
from .quality import map_equation, modularity
from .walktrap import walktrap

DETECTORS = {
    "fastgreedy": fast_greedy,
    "leading_eigenvector": leading_eigenvector,
    "label_propagation": label_propagation,
    "walktrap": walktrap,
    "infomap": infomap,
}


def detect(graph: LabelGraph, config: DetectorConfig) -> Partition:
    return DETECTORS[config.algorithm](graph, config)


__all__ = [
    "ALGORITHMS",
    "ConvergenceError",
    "DETECTORS",
    "DetectorConfig",
    "detect",
    "fast_greedy",
    "infomap",
    "label_propagation",
    "leading_eigenpair",
    "leading_eigenvector",
    "map_equation",
    "modularity",
    "walktrap",
]
