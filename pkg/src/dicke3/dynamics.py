"""Eigenbasis time evolution from the one-excitation Dicke (W) initial state,
cavity trace-out and Dicke-population trajectories.

The evolution runs in the rotated frame, where the initial state is
(1/sqrt8)(-sqrt3 |-3/2> - |-1/2> + |1/2> + sqrt3 |3/2>) (x) |0>.
Entanglement measures, however, are evaluated on the lab-frame reduced state
(the rotated frame and the lab frame differ by the collective y-rotation, a
local unitary on the three qubits): the trajectory therefore stores lab-frame
8x8 reduced states next to the rotated-frame Dicke populations that the
population columns report.
"""

import math
from dataclasses import dataclass

import numpy as np

from .hilbert import (SPIN_MS, spin_matrices, spin_rotation_y,
                      symmetric_embed, tensor_lift)

_SPIN = spin_matrices()


@dataclass(frozen=True)
class Trajectory:
    """Time samples of one method's reduced-state dynamics.

    times_scaled is delta*t/(2*pi); reduced_states are lab-frame 8x8 density
    matrices; populations are rotated-frame Dicke weights in descending-m
    order (+3/2, +1/2, -1/2, -3/2).
    """

    method: str
    times_scaled: np.ndarray
    states: np.ndarray          # rotated-frame composite states, (T, dim)
    reduced_states: np.ndarray  # (T, 8, 8)
    populations: np.ndarray     # (T, 4)


def initial_state(fock):
    """W/Dicke initial state in the rotated frame, cavity in vacuum."""
    psi = np.zeros(fock.composite_dim, dtype=complex)
    amps = np.array([math.sqrt(3), 1.0, -1.0, -math.sqrt(3)]) / math.sqrt(8)
    for slot in range(4):
        psi[slot * fock.dim] = amps[slot]
    return psi


def evolve(eig, psi0, times):
    """Evolve psi0 in the eigenbasis of `eig`: sum_k e^{-i E_k t} |v_k><v_k|psi0>.

    Returns an array (len(times), dim). Norm is conserved up to the
    completeness residual of the (possibly truncation-mapped) eigenbasis.
    """
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (eig.dim,):
        raise ValueError(
            f"state dimension {psi0.shape} does not match basis dim {eig.dim}")
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if not np.all(np.isfinite(times)):
        raise ValueError("times must be finite")
    amps = eig.vectors.conj().T @ psi0
    phases = np.exp(-1j * np.outer(times, eig.energies))
    return (phases * amps) @ eig.vectors.T


def spin_reduced(psi, fock):
    """4x4 spin density matrix: partial trace of |psi><psi| over the cavity."""
    mat = np.asarray(psi).reshape(4, fock.dim)
    return mat @ mat.conj().T


def reduce_to_qubits(psi, fock):
    """Trace out the cavity and embed the spin sector into three-qubit space."""
    return symmetric_embed(spin_reduced(psi, fock))


def dicke_populations(state, fock=None):
    """Dicke weights P_m (descending m) of a composite state vector or of a
    4x4 spin density matrix; they sum to the state's norm."""
    state = np.asarray(state)
    if state.ndim == 2:
        if state.shape != (4, 4):
            raise ValueError(f"expected a 4x4 spin density, got {state.shape}")
        return np.diag(state).real.copy()
    if fock is None:
        raise ValueError("fock space required to reduce a composite state")
    return np.diag(spin_reduced(state, fock)).real.copy()


def collective_spin_moments(rho4, axis):
    """First and second moment of the collective spin component S_axis
    (axis 'y' or 'z') on a 4x4 symmetric-sector density matrix."""
    if axis not in ("y", "z"):
        raise ValueError(f"axis must be 'y' or 'z', got {axis!r}")
    s = _SPIN["j" + axis]
    rho4 = np.asarray(rho4, dtype=complex)
    first = np.trace(rho4 @ s).real
    second = np.trace(rho4 @ s @ s).real
    return first, second


def rotate_to_lab(rho4_rotated):
    """Undo the collective y-rotation on a rotated-frame spin density matrix."""
    r = spin_rotation_y(np.pi / 2)
    return r.conj().T @ rho4_rotated @ r


def trajectory(eig, times_scaled):
    """Evolve the W/Dicke initial state and reduce every sample.

    times_scaled is the dimensionless grid delta*t/(2*pi); requires delta > 0.
    """
    params = eig.params
    if params.delta <= 0:
        raise ValueError("dynamics time unit delta*t/(2*pi) requires delta > 0")
    times_scaled = np.asarray(times_scaled, dtype=float)
    if times_scaled.size > 1 and np.any(np.diff(times_scaled) <= 0):
        raise ValueError("times must be strictly increasing")
    times = times_scaled * 2 * np.pi / params.delta
    psi0 = initial_state(eig.fock)
    states = evolve(eig, psi0, times)
    nt = times_scaled.size
    reduced = np.empty((nt, 8, 8), dtype=complex)
    pops = np.empty((nt, 4))
    for k in range(nt):
        rho4 = spin_reduced(states[k], eig.fock)
        pops[k] = np.diag(rho4).real
        reduced[k] = symmetric_embed(rotate_to_lab(rho4))
    return Trajectory(method=eig.method, times_scaled=times_scaled,
                      states=states, reduced_states=reduced, populations=pops)
