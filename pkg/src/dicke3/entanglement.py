"""Entanglement measures on three-qubit states: collective-spin concurrence,
bipartition negativity, and genuine multipartite entanglement (GME) from the
fully-decomposable-witness semidefinite program.
"""

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import collective_spin_moments
from .hilbert import check_density_matrix
from . import sdpcore

_QUBITS = {"A": 0, "B": 1, "C": 2}


def concurrence_collective(rho4):
    """Pairwise concurrence of a symmetric three-qubit state from collective
    spin moments: C = max{0, C_y, C_z} with

        C_n = (1/12) { 9 - 4<S_n^2>
                       - sqrt([3 + 4<S_n^2>]^2 - [8<S_n>]^2) }.

    Valid for symmetric-sector states with a spin-flip parity along y or z
    (every state this package evolves has it); raises if the square-root
    argument is more negative than -1e-10, which signals an invalid input.
    """
    vals = []
    for axis in ("y", "z"):
        s1, s2 = collective_spin_moments(rho4, axis)
        arg = (3.0 + 4.0 * s2) ** 2 - (8.0 * s1) ** 2
        if arg < -1e-10:
            raise ValueError(
                f"concurrence square root argument {arg:.3e} < -1e-10; "
                "input is not a valid symmetric-sector state")
        # the difference of squares cancels exactly on the W state, where the
        # sqrt branch point would blow 1e-13-scale state noise up to 1e-7;
        # below the same 1e-10 scale that bounds acceptable negative values,
        # the root is numerically zero
        vals.append((9.0 - 4.0 * s2 - math.sqrt(arg if arg > 1e-10 else 0.0))
                    / 12.0)
    return max(0.0, *vals)


def _axes_of(part):
    if isinstance(part, str):
        names = list(part)
    else:
        names = list(part)
    axes = sorted({_QUBITS[p] for p in names}) if all(
        p in _QUBITS for p in names) else None
    if not names or axes is None:
        raise ValueError(f"bipartition must name qubits from A, B, C; got {part!r}")
    if len(axes) != len(names):
        raise ValueError(f"repeated qubit in bipartition {part!r}")
    if len(axes) == 3:
        raise ValueError("bipartition must be a proper subset of the qubits")
    return axes


def partial_transpose(rho8, part):
    """Transpose the designated qubit factor(s) of an 8x8 matrix.

    `part` names a nonempty proper subset of {A, B, C}, e.g. "C" or "AB".
    Applying the same transpose twice returns the input exactly.
    """
    out = np.asarray(rho8, dtype=complex)
    if out.shape != (8, 8):
        raise ValueError(f"expected an 8x8 matrix, got {out.shape}")
    for ax in _axes_of(part):
        out = sdpcore.partial_transpose_qubit(out, ax)
    return out


def negativity(rho8, part="C"):
    """Negativity of the bipartition part|rest: (||rho^{T_part}||_1 - 1)/2."""
    check_density_matrix(rho8, what="negativity input state")
    ev = np.linalg.eigvalsh(partial_transpose(rho8, part))
    return max(0.0, 0.5 * (np.sum(np.abs(ev)) - 1.0))


@dataclass(frozen=True)
class GmeOptions:
    tol: float = 1e-8
    max_iter: int = 100


@dataclass(frozen=True)
class WitnessResult:
    """GME value E(rho) >= 0 with the optimal witness and its per-bipartition
    decomposition certificates (P_M, Q_M), plus solver diagnostics."""

    value: float
    witness: np.ndarray
    certificates: dict
    objective: float
    rel_gap: float
    status: str
    iterations: int


def gme(rho8, options=GmeOptions()):
    """Genuine-multipartite-entanglement measure of a three-qubit state.

    Solves the fully-decomposable-witness program; E(rho) is the absolute
    value of the (nonpositive) optimum, clamped at zero. Raises on solver
    failure rather than returning a value.
    """
    prog = sdpcore.build_gme_program(rho8)
    sol = sdpcore.solve_sdp(prog, tol=options.tol, max_iter=options.max_iter)
    if sol.status == "numerical_failure":
        raise RuntimeError(
            f"GME witness SDP failed: status={sol.status}, "
            f"iterations={sol.iterations}, rel_gap={sol.rel_gap:.3e}, "
            f"primal_infeas={sol.primal_infeas:.3e}, "
            f"dual_infeas={sol.dual_infeas:.3e}")
    witness, certs = sdpcore.extract_gme_witness(sol)
    value = max(0.0, -sol.primal_objective)
    return WitnessResult(value=value, witness=witness, certificates=certs,
                         objective=sol.primal_objective, rel_gap=sol.rel_gap,
                         status=sol.status, iterations=sol.iterations)
