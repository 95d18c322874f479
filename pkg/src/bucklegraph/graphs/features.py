"""Node features from segmented superpixels.

Each surviving superpixel contributes centroid position (physical units),
area (occupied-cell count) and eccentricity of the ellipse sharing its second
central moments.  Cells count as filled unit squares, so a lone cell has the
moments of a square (eccentricity 0) and a 1 x n strip approaches, but never
reaches, eccentricity 1.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import EmptyStructureError
from ..geometry.raster import Bitmap
from .segmentation import SegmentationMap

MIN_OCCUPIED_FRACTION = 0.5  # below this a superpixel is background


@dataclass(frozen=True)
class NodeTable:
    """Column-wise node features plus the originating superpixel labels."""

    xy: np.ndarray      # (K, 2) centroids, physical units
    area: np.ndarray    # (K,) occupied-cell counts
    ecc: np.ndarray     # (K,) in [0, 1)
    labels: np.ndarray  # (K,) superpixel label of each node

    def __len__(self):
        return len(self.area)


def superpixel_features(seg: SegmentationMap, bitmap: Bitmap) -> NodeTable:
    occ = bitmap.cells
    labels = seg.labels
    k = seg.count
    if k == 0:
        raise EmptyStructureError("segmentation contains no superpixels")

    total = np.bincount(labels[labels >= 0], minlength=k)
    occ_labels = labels[occ]
    occ_labels = occ_labels[occ_labels >= 0]
    occupied = np.bincount(occ_labels, minlength=k)
    keep = (occupied > 0) & (occupied / np.maximum(total, 1) >= MIN_OCCUPIED_FRACTION)
    if not keep.any():
        raise EmptyStructureError("no structure-associated superpixels survived")

    rr, cc = np.nonzero(occ)
    labs = labels[rr, cc]
    valid = labs >= 0
    labs, rr, cc = labs[valid], rr[valid], cc[valid]
    n = occupied.astype(float)
    sum_r = np.bincount(labs, weights=rr, minlength=k)
    sum_c = np.bincount(labs, weights=cc, minlength=k)
    sum_rr = np.bincount(labs, weights=rr * rr, minlength=k)
    sum_cc = np.bincount(labs, weights=cc * cc, minlength=k)
    sum_rc = np.bincount(labs, weights=rr * cc, minlength=k)

    with np.errstate(invalid="ignore", divide="ignore"):
        mean_r, mean_c = sum_r / n, sum_c / n
        # central 2nd moments in cell units, plus each cell's own 1/12 spread
        var_r = sum_rr / n - mean_r**2 + 1.0 / 12.0
        var_c = sum_cc / n - mean_c**2 + 1.0 / 12.0
        cov_rc = sum_rc / n - mean_r * mean_c

    ecc = _ellipse_eccentricity(var_c, var_r, cov_rc)

    h = bitmap.cell_size
    keep_idx = np.nonzero(keep)[0]
    xy = np.column_stack([(mean_c[keep_idx] + 0.5) * h,
                          (mean_r[keep_idx] + 0.5) * h])
    return NodeTable(xy=xy, area=occupied[keep_idx].astype(float),
                     ecc=ecc[keep_idx], labels=keep_idx.astype(np.int32))


def _ellipse_eccentricity(var_x, var_y, cov_xy):
    """e = c/a of the equal-second-moment ellipse, from the moment matrix."""
    tr = var_x + var_y
    det = var_x * var_y - cov_xy**2
    disc = np.sqrt(np.maximum((tr / 2) ** 2 - det, 0.0))
    lam1 = tr / 2 + disc
    lam2 = tr / 2 - disc
    with np.errstate(invalid="ignore", divide="ignore"):
        e = np.sqrt(np.maximum(1.0 - lam2 / lam1, 0.0))
    return np.where(lam1 > 0, e, 0.0)
