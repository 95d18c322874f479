"""Graph batching: block-diagonal concatenation for message passing.

Directed edge lists (both directions of every undirected pair, plus one
self-loop per node) are precomputed per graph and concatenated with node
offsets.  Edges arrive sorted by destination, so per-node aggregation can
use contiguous-segment reductions.
"""

from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_array

from ..graphs.spatial import SpatialGraph


@dataclass(frozen=True)
class PreparedGraph:
    x: np.ndarray       # (n, 4) float64 node features
    xy: np.ndarray      # (n, 2) positions (same scale as x[:, :2])
    dst: np.ndarray     # (e,) int32, sorted
    src: np.ndarray     # (e,) int32
    label: int


def prepare_graph(g: SpatialGraph) -> PreparedGraph:
    dst, src = g.directed_edges()
    return PreparedGraph(x=g.node_features(), xy=g.xy.astype(np.float64),
                         dst=dst.astype(np.int32), src=src.astype(np.int32),
                         label=-1 if g.label is None else int(g.label))


@dataclass(frozen=True)
class GraphBatch:
    x: np.ndarray            # (N, 4)
    dpos: np.ndarray         # (E, 2) x_src - x_dst
    dst: np.ndarray          # (E,) int64, sorted
    src: np.ndarray          # (E,) int64
    seg_starts: np.ndarray   # (N,) first edge index per destination node
    node_starts: np.ndarray  # (G,) first node index per graph
    labels: np.ndarray       # (G,) int64, -1 when unknown
    src_scatter: object      # (N, E) csr matrix summing edge rows into sources

    @property
    def num_nodes(self):
        return self.x.shape[0]

    @property
    def num_graphs(self):
        return len(self.node_starts)


def make_batch(prepared) -> GraphBatch:
    if not prepared:
        raise ValueError("cannot batch zero graphs")
    sizes = np.array([p.x.shape[0] for p in prepared], dtype=np.int64)
    if (sizes == 0).any():
        raise ValueError("cannot batch an empty graph")
    node_starts = np.concatenate([[0], np.cumsum(sizes)[:-1]])
    x = np.concatenate([p.x for p in prepared], axis=0)
    xy = np.concatenate([p.xy for p in prepared], axis=0)
    dst = np.concatenate([p.dst.astype(np.int64) + off
                          for p, off in zip(prepared, node_starts)])
    src = np.concatenate([p.src.astype(np.int64) + off
                          for p, off in zip(prepared, node_starts)])
    dpos = xy[src] - xy[dst]
    # every node owns a self-loop, so every segment is non-empty
    seg_starts = np.searchsorted(dst, np.arange(x.shape[0]))
    labels = np.array([p.label for p in prepared], dtype=np.int64)
    scatter = coo_array((np.ones(len(src)), (src, np.arange(len(src)))),
                        shape=(x.shape[0], len(src))).tocsr()
    return GraphBatch(x=x, dpos=dpos, dst=dst, src=src, seg_starts=seg_starts,
                      node_starts=node_starts, labels=labels,
                      src_scatter=scatter)
