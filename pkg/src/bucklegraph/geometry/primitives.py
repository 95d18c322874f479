"""Parametric column descriptions.

A column lives in a ``width x length`` rectangle with ``length = 8 * width``;
``width`` is the reference unit for every sampled dimension.  Row/feature
coordinates use y measured from the bottom of the column.
"""

import json
from dataclasses import dataclass, field

SUB1 = "sub1"
SUB2 = "sub2"
SUB3 = "sub3"
KINDS = (SUB1, SUB2, SUB3)

ASPECT = 8  # length : width


@dataclass(frozen=True)
class Block:
    """Axis-aligned solid rectangle: [x0, x0+width] x [y0, y0+height]."""

    y0: float
    height: float
    width: float
    x0: float = 0.0


@dataclass(frozen=True)
class Ring:
    """Closed annulus centered at (cx, cy): inner <= distance <= outer."""

    cx: float
    cy: float
    outer: float
    inner: float


@dataclass(frozen=True)
class ColumnSpec:
    """One column geometry: an ordered primitive list plus provenance."""

    kind: str
    seed: int
    primitives: tuple
    width: float = 1.0
    resamples: int = 0
    id: str = ""

    @property
    def length(self):
        return ASPECT * self.width

    def validate(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown sub-dataset kind {self.kind!r}")
        w, length = self.width, self.length
        for p in self.primitives:
            if isinstance(p, Block):
                if not 0.0 < p.width <= w:
                    raise ValueError(f"block width {p.width} outside (0, {w}]")
                if p.x0 < 0 or p.x0 + p.width > w * (1 + 1e-12):
                    raise ValueError("block extends outside the domain")
                if p.y0 < 0 or p.y0 + p.height > length * (1 + 1e-12):
                    raise ValueError("block extends outside the domain")
            elif isinstance(p, Ring):
                if not p.outer > p.inner > 0.0:
                    raise ValueError("ring requires outer > inner > 0")
                if not (0.0 <= p.cx <= w and 0.0 <= p.cy <= length):
                    raise ValueError("ring center outside the domain")
            else:
                raise ValueError(f"unknown primitive {type(p).__name__}")
        return self

    def to_dict(self):
        prims = []
        for p in self.primitives:
            if isinstance(p, Block):
                prims.append({"type": "block", "y0": p.y0, "height": p.height,
                              "width": p.width, "x0": p.x0})
            else:
                prims.append({"type": "ring", "cx": p.cx, "cy": p.cy,
                              "outer": p.outer, "inner": p.inner})
        return {
            "schema": "bucklegraph/column-spec/v1",
            "id": self.id,
            "kind": self.kind,
            "seed": self.seed,
            "width": self.width,
            "length": self.length,
            "resamples": self.resamples,
            "primitives": prims,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d):
        prims = []
        for p in d["primitives"]:
            if p["type"] == "block":
                prims.append(Block(y0=p["y0"], height=p["height"],
                                   width=p["width"], x0=p["x0"]))
            elif p["type"] == "ring":
                prims.append(Ring(cx=p["cx"], cy=p["cy"],
                                  outer=p["outer"], inner=p["inner"]))
            else:
                raise ValueError(f"unknown primitive type {p['type']!r}")
        return cls(kind=d["kind"], seed=d["seed"], primitives=tuple(prims),
                   width=d["width"], resamples=d.get("resamples", 0),
                   id=d.get("id", ""))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))
