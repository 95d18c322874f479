"""Seeded generation of the three column families.

Draw order per attempt stream (one Philox stream per (kind, seed, attempt)):

- sub1: for each interior block, bottom to top: width, then left edge x0.
- sub2: ring count, then per ring: center x, center y.
- sub3: per ring: outer radius, inner radius, center x, center y.

A candidate that fails the connectivity check is resampled with the attempt
counter incremented; the accepted attempt index is recorded as ``resamples``.
"""

from dataclasses import dataclass, replace

from ..errors import GenerationError
from ..rng import substream
from .primitives import SUB1, SUB2, SUB3, KINDS, Block, ColumnSpec, Ring
from .raster import connectivity_check, rasterize

_KIND_TAG = {SUB1: 11, SUB2: 12, SUB3: 13}

# desk-scale raster used for the connectivity check (and default FEA raster)
DEFAULT_RASTER = {SUB1: (160, 20), SUB2: (240, 30), SUB3: (240, 30)}


@dataclass(frozen=True)
class GenerationConfig:
    """Family parameters; defaults reproduce the published generation rules."""

    width: float = 1.0
    sub1_interior_blocks: int = 38
    sub1_width_range: tuple = (0.4, 0.9)  # of w
    sub2_ring_count: tuple = (200, 300)  # inclusive
    sub2_outer: float = 0.25  # of w
    sub2_inner: float = 0.15  # of w
    sub2_center_x_range: tuple = (0.25, 0.75)  # of w
    sub3_ring_count: int = 1000
    sub3_outer_range: tuple = (0.1, 0.25)  # of w
    sub3_inner_rel_range: tuple = (0.35, 0.75)  # of outer radius
    cap_height: float = 0.05  # of L, sub2/sub3 end blocks
    center_y_margin: float = 0.05  # of L, ring centers stay between the caps
    resample_budget: int = 100
    check_raster: tuple = None  # (rows, cols); None = family default


def gen_geometry(kind: str, seed: int, params: GenerationConfig = None) -> ColumnSpec:
    """Generate one connected column geometry for the given family."""
    if kind not in KINDS:
        raise ValueError(f"unknown sub-dataset kind {kind!r}")
    params = params or GenerationConfig()
    rows, cols = params.check_raster or DEFAULT_RASTER[kind]
    for attempt in range(params.resample_budget):
        rng = substream(seed, _KIND_TAG[kind], attempt)
        if kind == SUB1:
            spec = _sample_sub1(rng, seed, params)
        elif kind == SUB2:
            spec = _sample_sub2(rng, seed, params)
        else:
            spec = _sample_sub3(rng, seed, params)
        spec = replace(spec, resamples=attempt, id=f"{kind}-{seed:016x}")
        if connectivity_check(rasterize(spec, rows, cols)):
            return spec
    raise GenerationError(
        f"no connected {kind} geometry for seed {seed} "
        f"within {params.resample_budget} attempts"
    )


def _sample_sub1(rng, seed, p: GenerationConfig) -> ColumnSpec:
    w = p.width
    length = 8 * w
    n = p.sub1_interior_blocks
    h = length / (n + 2)  # interior blocks plus two full-width end blocks
    blocks = [Block(y0=0.0, height=h, width=w, x0=0.0)]
    lo, hi = (r * w for r in p.sub1_width_range)
    for i in range(1, n + 1):
        bw = rng.uniform(lo, hi)
        x0 = rng.uniform(0.0, w - bw)
        blocks.append(Block(y0=i * h, height=h, width=bw, x0=x0))
    blocks.append(Block(y0=(n + 1) * h, height=h, width=w, x0=0.0))
    return ColumnSpec(kind=SUB1, seed=seed, primitives=tuple(blocks), width=w)


def _sample_sub2(rng, seed, p: GenerationConfig) -> ColumnSpec:
    w = p.width
    length = 8 * w
    count = int(rng.integers(p.sub2_ring_count[0], p.sub2_ring_count[1] + 1))
    outer, inner = p.sub2_outer * w, p.sub2_inner * w
    xlo, xhi = (r * w for r in p.sub2_center_x_range)
    ylo, yhi = p.center_y_margin * length, (1 - p.center_y_margin) * length
    rings = []
    for _ in range(count):
        cx = rng.uniform(xlo, xhi)
        cy = rng.uniform(ylo, yhi)
        rings.append(Ring(cx=cx, cy=cy, outer=outer, inner=inner))
    return ColumnSpec(kind=SUB2, seed=seed,
                      primitives=tuple(rings) + _caps(w, length, p.cap_height),
                      width=w)


def _sample_sub3(rng, seed, p: GenerationConfig) -> ColumnSpec:
    w = p.width
    length = 8 * w
    rlo, rhi = (r * w for r in p.sub3_outer_range)
    ylo, yhi = p.center_y_margin * length, (1 - p.center_y_margin) * length
    rings = []
    for _ in range(p.sub3_ring_count):
        outer = rng.uniform(rlo, rhi)
        inner = rng.uniform(p.sub3_inner_rel_range[0] * outer,
                            p.sub3_inner_rel_range[1] * outer)
        cx = rng.uniform(outer, w - outer)
        cy = rng.uniform(ylo, yhi)
        rings.append(Ring(cx=cx, cy=cy, outer=outer, inner=inner))
    return ColumnSpec(kind=SUB3, seed=seed,
                      primitives=tuple(rings) + _caps(w, length, p.cap_height),
                      width=w)


def _caps(w, length, cap_frac):
    h = cap_frac * length
    return (Block(y0=0.0, height=h, width=w, x0=0.0),
            Block(y0=length - h, height=h, width=w, x0=0.0))
