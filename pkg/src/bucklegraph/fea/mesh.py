"""Pixel meshes: one bilinear quad element per occupied raster cell."""

from dataclasses import dataclass

import numpy as np

from ..geometry.raster import Bitmap, connectivity_check


@dataclass(frozen=True)
class PixelMesh:
    """Nodes at cell corners (physical units), CCW quads, cap node sets."""

    nodes: np.ndarray      # (N, 2) float64
    elements: np.ndarray   # (M, 4) int32, [bl, br, tr, tl]
    bottom_nodes: np.ndarray
    top_nodes: np.ndarray
    cell_size: float
    width: float

    @property
    def num_nodes(self):
        return self.nodes.shape[0]

    @property
    def num_elements(self):
        return self.elements.shape[0]

    @property
    def length(self):
        return float(self.nodes[:, 1].max())


def build_pixel_mesh(bitmap: Bitmap) -> PixelMesh:
    """Mesh the occupied cells of a connected bitmap."""
    if not connectivity_check(bitmap):
        raise ValueError("bitmap fails the connectivity check; cannot mesh")
    rows, cols = bitmap.rows, bitmap.cols
    h = bitmap.cell_size
    occ = bitmap.cells

    corner_used = np.zeros((rows + 1, cols + 1), dtype=bool)
    rr, cc = np.nonzero(occ)
    corner_used[rr, cc] = True
    corner_used[rr, cc + 1] = True
    corner_used[rr + 1, cc] = True
    corner_used[rr + 1, cc + 1] = True

    node_id = np.full((rows + 1, cols + 1), -1, dtype=np.int64)
    node_id[corner_used] = np.arange(corner_used.sum())
    gr, gc = np.nonzero(corner_used)
    nodes = np.column_stack([gc * h, gr * h]).astype(np.float64)

    elements = np.column_stack([
        node_id[rr, cc],
        node_id[rr, cc + 1],
        node_id[rr + 1, cc + 1],
        node_id[rr + 1, cc],
    ]).astype(np.int32)

    bottom = node_id[0, node_id[0] >= 0]
    top = node_id[rows, node_id[rows] >= 0]
    return PixelMesh(nodes=nodes, elements=elements,
                     bottom_nodes=bottom.astype(np.int64),
                     top_nodes=top.astype(np.int64),
                     cell_size=h, width=bitmap.width)
