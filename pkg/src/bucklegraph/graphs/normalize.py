"""Feature normalization with training-split statistics.

Positions (and hence relative-position edge features) are divided by the
column width; area and eccentricity are min-max scaled with ranges gathered
by ``fit`` so validation/test graphs reuse the training ranges.  Values
outside the fitted range map outside [0, 1] on purpose (no clamping).
"""

import json
import warnings
from dataclasses import replace

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .spatial import SpatialGraph


class GraphNormalizer(BaseEstimator, TransformerMixin):
    """Scale spatial-graph node features from fitted dataset ranges.

    Parameters
    ----------
    width : float
        Physical column width; positions are divided by it.
    """

    def __init__(self, width=1.0):
        self.width = width

    def fit(self, graphs, y=None):
        if not graphs:
            raise ValueError("cannot fit a normalizer on an empty dataset")
        area = np.concatenate([g.area for g in graphs])
        ecc = np.concatenate([g.ecc for g in graphs])
        self.area_range_ = (float(area.min()), float(area.max()))
        self.ecc_range_ = (float(ecc.min()), float(ecc.max()))
        self.degenerate_ = [name for name, (lo, hi) in
                            (("area", self.area_range_), ("eccentricity", self.ecc_range_))
                            if hi == lo]
        for name in self.degenerate_:
            warnings.warn(f"degenerate {name} range; feature collapses to 0",
                          stacklevel=2)
        return self

    def transform(self, graphs):
        self._check_fitted()
        return [self._transform_one(g) for g in graphs]

    def _transform_one(self, g: SpatialGraph) -> SpatialGraph:
        return replace(
            g,
            xy=g.xy / self.width,
            area=_minmax(g.area, self.area_range_),
            ecc=_minmax(g.ecc, self.ecc_range_),
            meta=dict(g.meta, normalized=True),
        )

    def _check_fitted(self):
        if not hasattr(self, "area_range_"):
            raise ValueError("GraphNormalizer is not fitted; call fit() first")

    def stats_dict(self):
        self._check_fitted()
        return {"schema": "bucklegraph/feature-stats/v1", "width": self.width,
                "area": list(self.area_range_), "eccentricity": list(self.ecc_range_),
                "degenerate": self.degenerate_}

    def save_stats(self, path):
        with open(path, "w") as f:
            json.dump(self.stats_dict(), f, sort_keys=True)
            f.write("\n")

    @classmethod
    def from_stats(cls, stats):
        norm = cls(width=stats.get("width", 1.0))
        norm.area_range_ = tuple(stats["area"])
        norm.ecc_range_ = tuple(stats["eccentricity"])
        norm.degenerate_ = list(stats.get("degenerate", []))
        return norm

    @classmethod
    def load_stats(cls, path):
        with open(path) as f:
            return cls.from_stats(json.load(f))


def _minmax(values, rng):
    lo, hi = rng
    if hi == lo:
        return np.zeros_like(values)
    return (values - lo) / (hi - lo)
