"""SLIC superpixels over the occupied cells of a bitmap.

Classic SLIC, restricted to the structure: cluster centers are seeded on a
regular grid (spacing S = sqrt(occupied / target)), each iteration assigns
occupied cells within a 2S x 2S window around every center using the SLIC
distance (intensity term plus spatial term scaled by compactness / S), then
recenters.  A final pass reassigns any cell no window reached and merges
orphan fragments into the adjacent superpixel with the nearest center.
Everything is deterministic: ties resolve to the lowest cluster index.

Empty cells keep the sentinel label -1, so the requested superpixel count
applies to the structure itself.
"""

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from ..geometry.raster import Bitmap

_FOUR_CONNECTED = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)


@dataclass(frozen=True)
class SegmentationMap:
    """Per-cell superpixel labels; -1 marks cells outside the structure."""

    labels: np.ndarray  # int32, shape (rows, cols)
    count: int
    target_count: int
    compactness: float
    iters: int

    def partitions(self, bitmap: Bitmap) -> bool:
        """Every occupied cell carries exactly one superpixel label."""
        occ = bitmap.cells
        return bool(np.all(self.labels[occ] >= 0) and np.all(self.labels[~occ] == -1))


def slic_segment(bitmap: Bitmap, target_count: int, compactness: float = 10.0,
                 iters: int = 10) -> SegmentationMap:
    if target_count < 2:
        raise ValueError(f"target_count must be >= 2, got {target_count}")
    if iters < 1:
        raise ValueError(f"iters must be >= 1, got {iters}")
    occ = bitmap.cells
    n_occ = int(occ.sum())
    if target_count > n_occ:
        raise ValueError(
            f"target_count {target_count} exceeds the {n_occ} structure cells")
    rows, cols = occ.shape
    S = float(np.sqrt(n_occ / target_count))

    centers = _seed_centers(occ, S, target_count)
    intensity = occ.astype(float)
    ratio = (compactness / S) ** 2

    labels = None
    for _ in range(iters):
        labels, dist = _assign(occ, intensity, centers, S, ratio)
        centers = _recenter(occ, labels, centers)
    labels = _assign_unreached(occ, labels, centers, ratio)
    labels = _enforce_connectivity(occ, labels, centers)
    labels, count = _canonicalize(labels)
    return SegmentationMap(labels=labels, count=count, target_count=target_count,
                           compactness=compactness, iters=iters)


def _seed_centers(occ, S, target_count):
    rows, cols = occ.shape
    rr = np.arange(S / 2, rows, S)
    cc = np.arange(S / 2, cols, S)
    centers, seen = [], set()
    for r in rr:
        for c in cc:
            ri, ci = min(int(r), rows - 1), min(int(c), cols - 1)
            if occ[ri, ci] and (ri, ci) not in seen:
                seen.add((ri, ci))
                centers.append((float(ri), float(ci), 1.0))
    if len(centers) < 2:
        # structure too sparse for the grid; stride the occupied cells instead
        orr, occ_c = np.nonzero(occ)
        idx = np.linspace(0, len(orr) - 1, min(target_count, len(orr))).astype(int)
        centers = [(float(orr[i]), float(occ_c[i]), 1.0) for i in np.unique(idx)]
    return np.array(centers)


def _assign(occ, intensity, centers, S, ratio):
    rows, cols = occ.shape
    dist = np.full((rows, cols), np.inf)
    labels = np.full((rows, cols), -1, dtype=np.int32)
    win = int(np.ceil(S))
    for k, (cr, cc, ci) in enumerate(centers):
        r0, r1 = max(0, int(cr) - win), min(rows, int(cr) + win + 1)
        c0, c1 = max(0, int(cc) - win), min(cols, int(cc) + win + 1)
        if r0 >= r1 or c0 >= c1:
            continue
        dr = np.arange(r0, r1) - cr
        dc = np.arange(c0, c1) - cc
        d2 = (intensity[r0:r1, c0:c1] - ci) ** 2 + \
            ratio * (dr[:, None] ** 2 + dc[None, :] ** 2)
        better = occ[r0:r1, c0:c1] & (d2 < dist[r0:r1, c0:c1])
        dist[r0:r1, c0:c1][better] = d2[better]
        labels[r0:r1, c0:c1][better] = k
    return labels, dist


def _recenter(occ, labels, centers):
    labs = labels[occ]
    rr, cc = np.nonzero(occ)
    assigned = labs >= 0
    k = len(centers)
    counts = np.bincount(labs[assigned], minlength=k)
    sum_r = np.bincount(labs[assigned], weights=rr[assigned], minlength=k)
    sum_c = np.bincount(labs[assigned], weights=cc[assigned], minlength=k)
    new = centers.copy()
    nz = counts > 0
    new[nz, 0] = sum_r[nz] / counts[nz]
    new[nz, 1] = sum_c[nz] / counts[nz]
    return new


def _assign_unreached(occ, labels, centers, ratio):
    missing = occ & (labels < 0)
    if not missing.any():
        return labels
    mr, mc = np.nonzero(missing)
    d2 = (ratio * ((mr[:, None] - centers[None, :, 0]) ** 2
                   + (mc[:, None] - centers[None, :, 1]) ** 2))
    labels = labels.copy()
    labels[mr, mc] = np.argmin(d2, axis=1)
    return labels


def _enforce_connectivity(occ, labels, centers):
    labels = labels.copy()
    for k in np.unique(labels[occ]):
        mask = labels == k
        comps, ncomp = ndimage.label(mask, structure=_FOUR_CONNECTED)
        if ncomp <= 1:
            continue
        sizes = ndimage.sum_labels(mask, comps, index=np.arange(1, ncomp + 1))
        main = int(np.argmax(sizes)) + 1  # argmax keeps the first on ties
        for frag in range(1, ncomp + 1):
            if frag == main:
                continue
            frag_mask = comps == frag
            ring = ndimage.binary_dilation(frag_mask, structure=_FOUR_CONNECTED)
            neighbor_labels = np.unique(labels[ring & occ & ~frag_mask])
            neighbor_labels = neighbor_labels[(neighbor_labels >= 0)
                                              & (neighbor_labels != k)]
            if len(neighbor_labels) == 0:
                continue  # isolated island of a disconnected bitmap
            fr, fc = np.nonzero(frag_mask)
            fcen = np.array([fr.mean(), fc.mean()])
            cand = centers[neighbor_labels, :2]
            d2 = ((cand - fcen) ** 2).sum(axis=1)
            labels[frag_mask] = int(neighbor_labels[np.argmin(d2)])
    return labels


def _canonicalize(labels):
    """Relabel to 0..K-1 in row-major first-occurrence order."""
    flat = labels.ravel()
    present = flat[flat >= 0]
    first_seen, order = {}, []
    for v in present:
        if v not in first_seen:
            first_seen[v] = len(order)
            order.append(v)
    remap = np.full(int(flat.max()) + 1 if len(present) else 1, -1, dtype=np.int32)
    for new, old in enumerate(order):
        remap[old] = new
    out = labels.copy()
    out[labels >= 0] = remap[labels[labels >= 0]]
    return out, len(order)
