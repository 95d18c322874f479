from .features import MIN_OCCUPIED_FRACTION, NodeTable, superpixel_features
from .normalize import GraphNormalizer
from .segmentation import SegmentationMap, slic_segment
from .spatial import (METHOD_BALL, METHOD_EXACT, METHOD_RAG, SpatialGraph,
                      build_ball_query, build_exact, build_rag, read_binary,
                      read_jsonl, write_binary, write_jsonl)

# requested superpixel counts per density level
DENSITY_TARGETS = {"sparse": 150, "medium": 300, "dense": 600}

__all__ = [
    "MIN_OCCUPIED_FRACTION", "NodeTable", "superpixel_features",
    "GraphNormalizer", "SegmentationMap", "slic_segment",
    "METHOD_BALL", "METHOD_EXACT", "METHOD_RAG", "SpatialGraph",
    "build_ball_query", "build_exact", "build_rag",
    "read_binary", "read_jsonl", "write_binary", "write_jsonl",
    "DENSITY_TARGETS",
]
