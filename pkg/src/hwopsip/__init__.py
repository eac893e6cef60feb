"""Hybrid weakly over-penalised symmetric interior penalty (HWOPSIP) method.

Crouzeix-Raviart elements with single-valued face multipliers for the
Poisson problem on anisotropic triangulations of the unit square.
"""
from ._kernels import BACKEND
from .assembly import CsrMatrix, DofMap, PenaltyParams, assemble_system
from .errors import DiscreteSolution, convergence_indicator, energy_error, l2_error
from .exact import ExactSolution, boundary_layer
from .mesh import Family, Mesh, MeshFamily, generate, mesh_size
from .solver import SolveReport, cg_solve

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CsrMatrix",
    "DofMap",
    "PenaltyParams",
    "assemble_system",
    "DiscreteSolution",
    "convergence_indicator",
    "energy_error",
    "l2_error",
    "ExactSolution",
    "boundary_layer",
    "Family",
    "Mesh",
    "MeshFamily",
    "generate",
    "mesh_size",
    "SolveReport",
    "cg_solve",
]
