"""Eigen-systems of the four solution methods, expressed in one common frame.

All methods report every level of the truncated space. Eigenvectors are
mapped to the rotated-frame composite basis:

* exact      -- dense diagonalization of the rotated full Hamiltonian;
* rwa        -- lab-frame block solves, rotated by the collective y-rotation;
* zeroth     -- closed-form block eigenpairs in the displaced-oscillator
               frame, mapped back by the spin-conditional displacement;
* grwa       -- dressed-basis block solves, expanded through the dressing
               transformation and then displaced back.

The displacement back-map is exact (closed-form overlaps) but truncated at
n_max; the per-level norm deficit it causes is recorded as `tail_mass`.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .hilbert import (FockSpace, ModelParams, SPIN_MS, check_hermitian,
                      displacement_matrix, spin_rotation_y, tensor_lift)
from . import hamiltonians as ham

METHODS = ("exact", "rwa", "zeroth", "grwa")


@dataclass(frozen=True)
class EigenSystem:
    """Energies (ascending) and rotated-frame eigenvectors of one method.

    vectors[:, k] pairs with energies[k]; tail_mass[k] is the norm deficit of
    vector k caused by the truncated displacement back-map (identically zero
    for the exact and RWA methods).
    """

    method: str
    params: ModelParams
    fock: FockSpace
    energies: np.ndarray
    vectors: np.ndarray
    tail_mass: np.ndarray = field(repr=False, default=None)

    @property
    def dim(self):
        return self.fock.composite_dim


def dense_hermitian_eig(matrix, herm_tol=1e-10):
    """Eigendecomposition of a Hermitian matrix: ascending eigenvalues and
    orthonormal eigenvector columns. Rejects non-Hermitian input."""
    matrix = np.asarray(matrix)
    check_hermitian(matrix, herm_tol, "eigensolver input")
    try:
        w, v = scipy.linalg.eigh(matrix)
    except scipy.linalg.LinAlgError as err:
        norm = np.linalg.norm(matrix)
        raise RuntimeError(
            f"dense eigensolver failed to converge (dim {matrix.shape[0]}, "
            f"Frobenius norm {norm:.3e}): {err}") from err
    return w, v


def _sorted_system(method, params, fock, energies, vectors, tail_mass=None):
    energies = np.asarray(energies, dtype=float)
    order = np.argsort(energies, kind="stable")
    if tail_mass is None:
        tail_mass = np.zeros(energies.size)
    return EigenSystem(method=method, params=params, fock=fock,
                       energies=energies[order], vectors=vectors[:, order],
                       tail_mass=np.asarray(tail_mass)[order])


def _scatter_block_vectors(blocks, fock, solver):
    """Solve each block with `solver(matrix) -> (w, v)` and scatter the
    eigenvectors into composite vectors of the block family's own frame."""
    dim = fock.composite_dim
    energies = np.empty(dim)
    vectors = np.zeros((dim, dim))
    col = 0
    for blk in blocks:
        idx = [ham.composite_index(lbl, fock) for lbl in blk.labels]
        w, v = solver(blk.matrix)
        k = len(idx)
        energies[col:col + k] = w
        vectors[np.ix_(idx, range(col, col + k))] = v
        col += k
    return energies, vectors


def _displacement_map(params, fock):
    """Block-diagonal matrix of exp[-m (g/w) (a^dag - a)] per spin slot: the
    inverse polaron transform, mapping displaced-frame vectors to the rotated
    frame."""
    dim = fock.composite_dim
    out = np.zeros((dim, dim))
    for slot, m in enumerate(SPIN_MS):
        dmat = displacement_matrix(-m * params.lam, fock.n_max)
        lo = slot * fock.dim
        out[lo:lo + fock.dim, lo:lo + fock.dim] = dmat
    return out


def solve(method, params, fock):
    """Eigen-system of one method on the truncated space, common frame."""
    if method == "exact":
        h = ham.build_full(params, fock, frame="rotated")
        w, v = dense_hermitian_eig(h)
        return _sorted_system(method, params, fock, w, v)

    if method == "rwa":
        blocks = ham.rwa_blocks(params, fock)
        ham.verify_partition(blocks, fock)
        w, v = _scatter_block_vectors(blocks, fock, dense_hermitian_eig)
        rot = tensor_lift(spin_rotation_y(np.pi / 2), np.eye(fock.dim))
        return _sorted_system(method, params, fock, w, rot @ v)

    if method == "zeroth":
        blocks, coeff_list = ham.zeroth_blocks(params, fock)
        ham.verify_partition(blocks, fock)
        dim = fock.composite_dim
        energies = np.empty(dim)
        vectors = np.zeros((dim, dim))
        for blk, c in zip(blocks, coeff_list):
            idx = [ham.composite_index(lbl, fock) for lbl in blk.labels]
            cols = range(4 * c.n, 4 * c.n + 4)
            energies[cols] = c.epsilon
            vectors[np.ix_(idx, cols)] = c.eigenvectors()
        mapped = _displacement_map(params, fock) @ vectors
        tail = 1.0 - np.sum(mapped * mapped, axis=0)
        return _sorted_system(method, params, fock, energies, mapped, tail)

    if method == "grwa":
        blocks, co = ham.grwa_blocks(params, fock)
        ham.verify_partition(blocks, fock)
        w, v_dressed = _scatter_block_vectors(blocks, fock, dense_hermitian_eig)
        # dressed -> bare spin components: S columns are over ascending m,
        # composite slots are descending m
        s_desc = co.s_matrix[::-1, :]
        dim, nf = fock.composite_dim, fock.dim
        v_bare = np.zeros((dim, dim))
        for slot in range(4):
            rows = slice(slot * nf, (slot + 1) * nf)
            for i in range(4):
                v_bare[rows] += s_desc[slot, i] * v_dressed[i * nf:(i + 1) * nf]
        mapped = _displacement_map(params, fock) @ v_bare
        tail = 1.0 - np.sum(mapped * mapped, axis=0)
        return _sorted_system(method, params, fock, w, mapped, tail)

    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def method_hamiltonian(method, params, fock):
    """The assembled Hamiltonian of a method in its own frame/basis (full
    rotated-frame matrix for 'exact', scattered blocks otherwise)."""
    if method == "exact":
        return ham.build_full(params, fock, frame="rotated")
    if method == "rwa":
        return ham.assemble_blocks(ham.rwa_blocks(params, fock), fock)
    if method == "zeroth":
        blocks, _ = ham.zeroth_blocks(params, fock)
        return ham.assemble_blocks(blocks, fock)
    if method == "grwa":
        blocks, _ = ham.grwa_blocks(params, fock)
        return ham.assemble_blocks(blocks, fock)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


@dataclass(frozen=True)
class SweepTable:
    """Lowest-k energies per method over a coupling grid."""

    g_over_omega: np.ndarray
    k_levels: int
    levels: dict  # method -> array (len(grid), k_levels)


def level_sweep(methods, delta, omega, g_grid, k_levels, n_max):
    """Sweep g over a grid and collect the lowest k_levels sorted energies for
    each requested method (the exact baseline is always included)."""
    g_grid = np.asarray(g_grid, dtype=float)
    if g_grid.size == 0:
        raise ValueError("empty coupling grid")
    fock = FockSpace(n_max)
    if k_levels > fock.composite_dim:
        raise ValueError(
            f"k_levels={k_levels} exceeds the space dimension {fock.composite_dim}")
    methods = list(dict.fromkeys(["exact", *methods]))
    levels = {m: np.empty((g_grid.size, k_levels)) for m in methods}
    for j, g in enumerate(g_grid):
        params = ModelParams(delta=delta, omega=omega, g=float(g))
        for m in methods:
            try:
                eig = solve(m, params, fock)
            except Exception as err:
                raise RuntimeError(
                    f"solver failed for method {m!r} at g/omega="
                    f"{g / omega:.6g}: {err}") from err
            levels[m][j] = eig.energies[:k_levels]
    return SweepTable(g_over_omega=g_grid / omega, k_levels=k_levels,
                      levels=levels)
