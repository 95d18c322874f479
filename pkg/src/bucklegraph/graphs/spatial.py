"""Spatial graphs and the three edge-construction methods.

Graphs are undirected with a self-loop on every node.  The stored edge list
keeps canonical pairs (i < j) and omits self-loops, which are implicit; the
directed expansion used by message passing enumerates both directions plus
the loops.  Edge features are relative positions x_j - x_i, derived from the
node positions on demand so antisymmetry is exact by construction.
"""

import json
import struct
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.spatial import cKDTree

from ..errors import UnsupportedRepresentationError
from ..geometry.primitives import SUB1, SUB2, SUB3, ColumnSpec, Ring
from ..geometry.raster import Bitmap
from .features import NodeTable
from .segmentation import SegmentationMap

METHOD_BALL = "ball"
METHOD_RAG = "rag"
METHOD_EXACT = "exact"


@dataclass(frozen=True)
class SpatialGraph:
    xy: np.ndarray        # (n, 2) float64 positions
    area: np.ndarray      # (n,)
    ecc: np.ndarray       # (n,)
    edges: np.ndarray     # (E, 2) int32, i < j, self-loops implicit
    label: int = None
    meta: dict = field(default_factory=dict)

    @property
    def num_nodes(self):
        return self.xy.shape[0]

    def node_features(self):
        """(n, 4) array of (x, y, area, eccentricity)."""
        return np.column_stack([self.xy, self.area, self.ecc])

    def directed_edges(self):
        """(dst, src) including both directions and all self-loops,
        sorted by dst then src."""
        n = self.num_nodes
        loops = np.arange(n, dtype=np.int64)
        if len(self.edges):
            i, j = self.edges[:, 0].astype(np.int64), self.edges[:, 1].astype(np.int64)
            dst = np.concatenate([i, j, loops])
            src = np.concatenate([j, i, loops])
        else:
            dst = src = loops
        order = np.lexsort((src, dst))
        return dst[order], src[order]

    def edge_delta(self, dst, src):
        """Relative positions x_src - x_dst for a directed edge list."""
        return self.xy[src] - self.xy[dst]

    def to_json_obj(self):
        m = self.meta
        return {
            "id": m.get("id", ""),
            "label": self.label,
            "method": m.get("method", ""),
            "r": m.get("radius"),
            "density": m.get("density"),
            "nodes": [[float(x), float(y), float(a), float(e)]
                      for (x, y), a, e in zip(self.xy, self.area, self.ecc)],
            "edges": [[int(i), int(j)] for i, j in self.edges],
        }

    @classmethod
    def from_json_obj(cls, obj):
        nodes = np.asarray(obj["nodes"], dtype=float).reshape(-1, 4)
        edges = np.asarray(obj["edges"], dtype=np.int32).reshape(-1, 2)
        meta = {"id": obj.get("id", ""), "method": obj.get("method", ""),
                "radius": obj.get("r"), "density": obj.get("density")}
        return cls(xy=nodes[:, :2], area=nodes[:, 2], ecc=nodes[:, 3],
                   edges=edges, label=obj.get("label"), meta=meta)


def _canonical_edges(pairs):
    """Sorted unique (i, j) with i < j; drops loops and duplicates."""
    if len(pairs) == 0:
        return np.zeros((0, 2), dtype=np.int32)
    pairs = np.asarray(pairs, dtype=np.int64)
    lo = pairs.min(axis=1)
    hi = pairs.max(axis=1)
    keep = lo != hi
    pairs = np.unique(np.column_stack([lo[keep], hi[keep]]), axis=0)
    return pairs.astype(np.int32)


def build_ball_query(nodes: NodeTable, radius: float, meta=None) -> SpatialGraph:
    """Edges between nodes at Euclidean distance <= radius (inclusive)."""
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")
    pairs = cKDTree(nodes.xy).query_pairs(radius, output_type="ndarray")
    meta = dict(meta or {}, method=METHOD_BALL, radius=radius)
    return SpatialGraph(xy=nodes.xy.copy(), area=nodes.area.copy(),
                        ecc=nodes.ecc.copy(), edges=_canonical_edges(pairs),
                        meta=meta)


def build_rag(seg: SegmentationMap, nodes: NodeTable, meta=None) -> SpatialGraph:
    """Edges between surviving superpixels that contain 4-adjacent cells."""
    lab = seg.labels
    h_pairs = np.column_stack([lab[:, :-1].ravel(), lab[:, 1:].ravel()])
    v_pairs = np.column_stack([lab[:-1, :].ravel(), lab[1:, :].ravel()])
    pairs = np.concatenate([h_pairs, v_pairs])
    pairs = pairs[(pairs[:, 0] >= 0) & (pairs[:, 1] >= 0)
                  & (pairs[:, 0] != pairs[:, 1])]
    # keep only pairs between surviving superpixels, renumbered to node ids
    node_of = np.full(int(lab.max()) + 1, -1, dtype=np.int64)
    node_of[nodes.labels] = np.arange(len(nodes))
    pairs = node_of[pairs]
    pairs = pairs[(pairs[:, 0] >= 0) & (pairs[:, 1] >= 0)]
    meta = dict(meta or {}, method=METHOD_RAG)
    return SpatialGraph(xy=nodes.xy.copy(), area=nodes.area.copy(),
                        ecc=nodes.ecc.copy(), edges=_canonical_edges(pairs),
                        meta=meta)


def build_exact(spec: ColumnSpec, bitmap: Bitmap, meta=None) -> SpatialGraph:
    """Loss-free graphs: per-pixel for sub1, per-ring-center for sub2."""
    meta = dict(meta or {}, method=METHOD_EXACT)
    if spec.kind == SUB1:
        occ = bitmap.cells
        rr, cc = np.nonzero(occ)
        idx = np.full(occ.shape, -1, dtype=np.int64)
        idx[rr, cc] = np.arange(len(rr))
        h = bitmap.cell_size
        xy = np.column_stack([(cc + 0.5) * h, (rr + 0.5) * h]).astype(float)
        right = occ[:, :-1] & occ[:, 1:]
        up = occ[:-1, :] & occ[1:, :]
        pr, pc = np.nonzero(right)
        qr, qc = np.nonzero(up)
        pairs = np.concatenate([
            np.column_stack([idx[pr, pc], idx[pr, pc + 1]]),
            np.column_stack([idx[qr, qc], idx[qr + 1, qc]]),
        ])
        return SpatialGraph(xy=xy, area=np.ones(len(rr)), ecc=np.zeros(len(rr)),
                            edges=_canonical_edges(pairs), meta=meta)
    if spec.kind == SUB2:
        rings = [p for p in spec.primitives if isinstance(p, Ring)]
        xy = np.array([[p.cx, p.cy] for p in rings], dtype=float)
        outer = rings[0].outer
        inner = rings[0].inner
        pairs = cKDTree(xy).query_pairs(2 * outer, output_type="ndarray")
        if len(pairs):
            d = np.linalg.norm(xy[pairs[:, 0]] - xy[pairs[:, 1]], axis=1)
            pairs = pairs[d < 2 * outer]  # annuli must genuinely overlap
        ring_area = np.pi * (outer**2 - inner**2)
        n = len(rings)
        return SpatialGraph(xy=xy, area=np.full(n, ring_area), ecc=np.zeros(n),
                            edges=_canonical_edges(pairs), meta=meta)
    raise UnsupportedRepresentationError(
        "sub3 rings are trimmed by later rings; no exact graph exists")


# ---------------------------------------------------------------------------
# dataset io: JSON-lines and a binary twin with the same schema

_MAGIC = b"BGRF"
_VERSION = 1


def write_jsonl(graphs, path):
    with open(path, "w") as f:
        for g in graphs:
            f.write(json.dumps(g.to_json_obj(), sort_keys=True))
            f.write("\n")


def read_jsonl(path):
    out = []
    with open(path) as f:
        for line in f:
            line = line.strip()
            if line:
                out.append(SpatialGraph.from_json_obj(json.loads(line)))
    return out


def write_binary(graphs, path):
    with open(path, "wb") as f:
        f.write(_MAGIC)
        f.write(struct.pack("<II", _VERSION, len(graphs)))
        for g in graphs:
            obj = g.to_json_obj()
            header = json.dumps({k: obj[k] for k in
                                 ("id", "label", "method", "r", "density")},
                                sort_keys=True).encode()
            nodes = np.ascontiguousarray(g.node_features(), dtype="<f8")
            edges = np.ascontiguousarray(g.edges, dtype="<i4")
            f.write(struct.pack("<III", len(header), nodes.shape[0],
                                edges.shape[0]))
            f.write(header)
            f.write(nodes.tobytes())
            f.write(edges.tobytes())


def read_binary(path):
    with open(path, "rb") as f:
        if f.read(4) != _MAGIC:
            raise ValueError(f"{path}: not a bucklegraph graph file")
        version, count = struct.unpack("<II", f.read(8))
        if version != _VERSION:
            raise ValueError(f"{path}: unsupported version {version}")
        out = []
        for _ in range(count):
            hlen, n, e = struct.unpack("<III", f.read(12))
            meta = json.loads(f.read(hlen).decode())
            nodes = np.frombuffer(f.read(n * 4 * 8), dtype="<f8").reshape(n, 4)
            edges = np.frombuffer(f.read(e * 2 * 4), dtype="<i4").reshape(e, 2)
            out.append(SpatialGraph.from_json_obj(
                {**meta, "nodes": nodes.tolist(), "edges": edges.tolist()}))
    return out
