from .primitives import SUB1, SUB2, SUB3, KINDS, ASPECT, Block, ColumnSpec, Ring
from .generate import DEFAULT_RASTER, GenerationConfig, gen_geometry
from .raster import (AXIS_BOTH, AXIS_X, AXIS_Y, REFLECTION_AXES, Bitmap,
                     connectivity_check, rasterize, read_pgm, reflect,
                     write_pgm)

__all__ = [
    "SUB1", "SUB2", "SUB3", "KINDS", "ASPECT", "Block", "ColumnSpec", "Ring",
    "DEFAULT_RASTER", "GenerationConfig", "gen_geometry",
    "AXIS_X", "AXIS_Y", "AXIS_BOTH", "REFLECTION_AXES", "Bitmap",
    "connectivity_check", "rasterize", "read_pgm", "reflect", "write_pgm",
]
