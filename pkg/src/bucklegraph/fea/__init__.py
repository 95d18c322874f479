from .material import (MaterialModel, first_piola_stress, lame_parameters,
                       piola_2d, psi_2d, strain_energy_density, tangent_2d)
from .mesh import PixelMesh, build_pixel_mesh
from .solver import (SimResult, SolverConfig, classify_direction,
                     deflection_diagnostics, first_instability_strain,
                     solve_compression)

__all__ = [
    "MaterialModel", "first_piola_stress", "lame_parameters", "piola_2d",
    "psi_2d", "strain_energy_density", "tangent_2d",
    "PixelMesh", "build_pixel_mesh",
    "SimResult", "SolverConfig", "classify_direction",
    "deflection_diagnostics", "first_instability_strain", "solve_compression",
]
