"""Occupancy rasters: rasterization, reflection, connectivity, PGM io.

Bitmaps store row 0 at the *bottom* of the column; PGM emission flips to the
conventional top-first image order.
"""

import json
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .primitives import SUB3, ASPECT, Block, ColumnSpec, Ring

AXIS_X = "x"
AXIS_Y = "y"
AXIS_BOTH = "both"
REFLECTION_AXES = (AXIS_X, AXIS_Y, AXIS_BOTH)

# label transform per reflection axis: x keeps it, y and both flip it
_FLIPS_LABEL = {AXIS_X: False, AXIS_Y: True, AXIS_BOTH: True}

_FOUR_CONNECTED = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)


@dataclass(frozen=True)
class Bitmap:
    """Binary occupancy raster of a column (rows along length, cols along width)."""

    cells: np.ndarray  # bool, shape (rows, cols), row 0 = bottom
    width: float = 1.0
    spec_id: str = ""

    def __post_init__(self):
        cells = np.asarray(self.cells, dtype=bool)
        object.__setattr__(self, "cells", cells)
        rows, cols = cells.shape
        if rows != ASPECT * cols:
            raise ValueError(f"raster must keep rows = {ASPECT} * cols, got {rows}x{cols}")

    @property
    def rows(self):
        return self.cells.shape[0]

    @property
    def cols(self):
        return self.cells.shape[1]

    @property
    def length(self):
        return ASPECT * self.width

    @property
    def cell_size(self):
        """Physical edge length of one (square) cell."""
        return self.width / self.cols

    def cell_centers(self):
        """(xs, ys): physical center coordinates per column / per row."""
        s = self.cell_size
        xs = (np.arange(self.cols) + 0.5) * s
        ys = (np.arange(self.rows) + 0.5) * s
        return xs, ys

    def occupied_count(self):
        return int(self.cells.sum())


def rasterize(spec: ColumnSpec, rows: int, cols: int) -> Bitmap:
    """Rasterize a column: a cell is occupied iff its center lies in material.

    Primitives apply in order.  Blocks and (sub1/sub2) rings add material;
    sub3 rings add their annulus and then carve out previously added material
    under their inner disk, so later rings trim earlier ones.
    """
    if cols < 16:
        raise ValueError(f"cols must be >= 16, got {cols}")
    if rows != ASPECT * cols:
        raise ValueError(f"rows must equal {ASPECT} * cols, got {rows}x{cols}")
    w = spec.width
    s = w / cols
    xs = (np.arange(cols) + 0.5) * s
    ys = (np.arange(rows) + 0.5) * s
    cells = np.zeros((rows, cols), dtype=bool)
    trim = spec.kind == SUB3
    for p in spec.primitives:
        if isinstance(p, Block):
            rmask = (ys >= p.y0) & (ys <= p.y0 + p.height)
            cmask = (xs >= p.x0) & (xs <= p.x0 + p.width)
            cells[np.ix_(rmask, cmask)] = True
        elif isinstance(p, Ring):
            _apply_ring(cells, xs, ys, p, trim=trim)
        else:
            raise ValueError(f"unknown primitive {type(p).__name__}")
    return Bitmap(cells=cells, width=w, spec_id=spec.id)


def _apply_ring(cells, xs, ys, ring: Ring, trim: bool):
    # restrict to the ring's bounding window; everything outside is untouched
    c0 = np.searchsorted(xs, ring.cx - ring.outer)
    c1 = np.searchsorted(xs, ring.cx + ring.outer, side="right")
    r0 = np.searchsorted(ys, ring.cy - ring.outer)
    r1 = np.searchsorted(ys, ring.cy + ring.outer, side="right")
    if c0 >= c1 or r0 >= r1:
        return
    dx = xs[c0:c1] - ring.cx
    dy = ys[r0:r1] - ring.cy
    d2 = dy[:, None] ** 2 + dx[None, :] ** 2
    window = cells[r0:r1, c0:c1]
    annulus = (d2 >= ring.inner**2) & (d2 <= ring.outer**2)
    window |= annulus
    if trim:
        window &= ~(d2 < ring.inner**2)


def reflect(bitmap: Bitmap, axis: str, label):
    """Reflect the raster about an axis; flip the label for y / both."""
    if axis not in REFLECTION_AXES:
        raise ValueError(f"axis must be one of {REFLECTION_AXES}, got {axis!r}")
    cells = bitmap.cells
    if axis in (AXIS_X, AXIS_BOTH):
        cells = cells[::-1, :]
    if axis in (AXIS_Y, AXIS_BOTH):
        cells = cells[:, ::-1]
    new_label = label if label is None or not _FLIPS_LABEL[axis] else 1 - label
    return Bitmap(cells=cells.copy(), width=bitmap.width, spec_id=bitmap.spec_id), new_label


def connectivity_check(bitmap: Bitmap, cap_rows: int = 1) -> bool:
    """True iff the occupied cells form one 4-connected component whose
    bottom and top ``cap_rows`` rows are fully occupied."""
    cells = bitmap.cells
    if not cells.any():
        return False
    if not cells[:cap_rows, :].all() or not cells[-cap_rows:, :].all():
        return False
    _, count = ndimage.label(cells, structure=_FOUR_CONNECTED)
    return count == 1


def write_pgm(bitmap: Bitmap, path):
    """P5 with a JSON sidecar (same path + '.json')."""
    img = np.where(bitmap.cells[::-1, :], 255, 0).astype(np.uint8)
    header = f"P5\n{bitmap.cols} {bitmap.rows}\n255\n".encode("ascii")
    path = str(path)
    with open(path, "wb") as f:
        f.write(header)
        f.write(img.tobytes())
    sidecar = {"schema": "bucklegraph/bitmap/v1", "rows": bitmap.rows,
               "cols": bitmap.cols, "width": bitmap.width,
               "spec_id": bitmap.spec_id}
    with open(path + ".json", "w") as f:
        json.dump(sidecar, f, sort_keys=True)
        f.write("\n")


def read_pgm(path) -> Bitmap:
    path = str(path)
    with open(path, "rb") as f:
        raw = f.read()
    if not raw.startswith(b"P5"):
        raise ValueError(f"{path}: not a binary PGM file")
    fields, idx = [], 2
    while len(fields) < 3:
        while idx < len(raw) and raw[idx : idx + 1].isspace():
            idx += 1
        if raw[idx : idx + 1] == b"#":
            while raw[idx : idx + 1] not in (b"\n", b""):
                idx += 1
            continue
        start = idx
        while idx < len(raw) and not raw[idx : idx + 1].isspace():
            idx += 1
        fields.append(int(raw[start:idx]))
    idx += 1  # single whitespace after maxval
    cols, rows, maxval = fields
    if maxval != 255:
        raise ValueError(f"{path}: expected maxval 255, got {maxval}")
    img = np.frombuffer(raw[idx : idx + rows * cols], dtype=np.uint8)
    if img.size != rows * cols:
        raise ValueError(f"{path}: truncated pixel data")
    cells = (img.reshape(rows, cols) > 0)[::-1, :]
    try:
        with open(path + ".json") as f:
            meta = json.load(f)
        width, spec_id = meta.get("width", 1.0), meta.get("spec_id", "")
    except FileNotFoundError:
        width, spec_id = 1.0, ""
    return Bitmap(cells=cells, width=width, spec_id=spec_id)
