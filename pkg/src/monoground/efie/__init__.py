"""RWG method-of-moments EFIE solver for PEC surfaces."""

from .assembly import Assembler, AssemblyError, AssemblyOptions, SystemMatrix, assemble
from .basis import RwgBasisSet, build_basis
from .kernels import BACKEND
from .solver import (CurrentSolution, Excitation, SolverError, current_at, solve, solve_image_ground,
                     solve_mesh, surface_current_map)

__all__ = [
    "Assembler", "AssemblyError", "AssemblyOptions", "BACKEND", "CurrentSolution", "Excitation",
    "RwgBasisSet", "SolverError", "SystemMatrix", "assemble", "build_basis", "current_at",
    "solve", "solve_image_ground", "solve_mesh", "surface_current_map",
]
