"""Three-qubit Dicke model toolkit: RWA, adiabatic (zeroth-order) and GRWA
approximations next to truncated-Fock exact diagonalization, with pairwise
concurrence, bipartition negativity and genuine-multipartite-entanglement
dynamics."""

from .hilbert import FockSpace, ModelParams
from .spectrum import EigenSystem, METHODS, level_sweep, solve
from .dynamics import Trajectory, initial_state, trajectory
from .entanglement import (GmeOptions, WitnessResult, concurrence_collective,
                           gme, negativity, partial_transpose)

__version__ = "0.1.0"

__all__ = [
    "FockSpace", "ModelParams", "EigenSystem", "METHODS", "level_sweep",
    "solve", "Trajectory", "initial_state", "trajectory", "GmeOptions",
    "WitnessResult", "concurrence_collective", "gme", "negativity",
    "partial_transpose", "__version__",
]
