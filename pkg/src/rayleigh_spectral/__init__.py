"""Forward and inverse spectral computations for Rayleigh surface waves in a layered elastic half-space."""

from .model import LameModel, boundary_theta, validate
from .markushevich import solve_G, potential_Q, potential_Q0
from .jost import make_medium, jost_solution, jost_function
from .spectral import SpectralData, spectral_data, weyl_matrix, find_poles, residues
from .glinverse import build_j, kernels_g, solve_GL, recover_GH, recover_lame_from_Q, recover_projected_V

__all__ = [
    "LameModel", "boundary_theta", "validate", "solve_G", "potential_Q", "potential_Q0", "make_medium",
    "jost_solution", "jost_function", "SpectralData", "spectral_data", "weyl_matrix", "find_poles", "residues",
    "build_j", "kernels_g", "solve_GL", "recover_GH", "recover_lame_from_Q", "recover_projected_V",
]
