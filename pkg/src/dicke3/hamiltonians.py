"""Hamiltonian builders for the three-qubit Dicke model.

Four representations are produced:

* the full Hamiltonian on the composite basis, in the lab frame
  (-delta*Jz + omega*n + (g/2)(a+a^dag)(J+ + J-)) or the rotated frame
  (+delta*Jx + omega*n + g(a+a^dag)Jz);
* RWA blocks: tri-diagonal 4x4 blocks (plus edge blocks) in the lab frame;
* zeroth-order (adiabatic) blocks: one 4x4 block per Fock manifold in the
  displaced-oscillator frame, with closed-form eigenvalues and eigenvectors;
* GRWA blocks: RWA-shaped blocks in the dressed displaced-oscillator basis,
  with photon-number-dependent diagonal shifts and renormalized hoppings.

Block rows carry explicit (level, n) labels; for the RWA and zeroth-order
methods `level` is the magnetic number m, for the GRWA it is the dressed-state
index 1..4. Within a block, rows are ordered the way the 4x4 matrices are
conventionally written, i.e. ascending m (or ascending dressed index).
"""

import math
from dataclasses import dataclass

import numpy as np

from .hilbert import (FockSpace, ModelParams, boson_matrices, laguerre_assoc,
                      spin_matrices, spin_slot, tensor_lift)

SQRT3 = math.sqrt(3.0)

# spin-3/2 Jx and iJy in ascending-m row order, used for the 4x4 block algebra
_JX_ASC = 0.5 * np.array([
    [0, SQRT3, 0, 0],
    [SQRT3, 0, 2, 0],
    [0, 2, 0, SQRT3],
    [0, 0, SQRT3, 0],
])
_IJY_ASC = 0.5 * np.array([
    [0, -SQRT3, 0, 0],
    [SQRT3, 0, -2, 0],
    [0, 2, 0, -SQRT3],
    [0, 0, SQRT3, 0],
])


@dataclass(frozen=True)
class BlockHamiltonian:
    """A real symmetric block with explicit basis labels, one (level, n) per row."""

    matrix: np.ndarray
    labels: tuple
    method: str

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (len(self.labels), len(self.labels)):
            raise ValueError("block size does not match its labels")
        if np.max(np.abs(m - m.T), initial=0.0) > 1e-12:
            raise ValueError("block matrix must be symmetric")


def label_slot(label):
    """Composite spin slot (0..3) of a block row label.

    Magnetic labels (floats +-1/2, +-3/2) use the descending-m spin basis;
    dressed labels (ints 1..4) map to slot i-1.
    """
    level, _ = label
    if isinstance(level, int):
        if level not in (1, 2, 3, 4):
            raise ValueError(f"dressed index out of range: {level}")
        return level - 1
    return spin_slot(level)


def composite_index(label, fock):
    level, n = label
    if not 0 <= n <= fock.n_max:
        raise ValueError(f"Fock label out of range: {label}")
    return label_slot(label) * fock.dim + n


def assemble_blocks(blocks, fock):
    """Scatter a block family into a full matrix on the composite basis of its
    own frame. Raises unless the block labels exactly partition the basis."""
    verify_partition(blocks, fock)
    dim = fock.composite_dim
    full = np.zeros((dim, dim))
    for blk in blocks:
        idx = [composite_index(lbl, fock) for lbl in blk.labels]
        full[np.ix_(idx, idx)] = blk.matrix
    return full


def verify_partition(blocks, fock):
    """Check that every composite basis label appears in exactly one block."""
    seen = []
    for blk in blocks:
        seen.extend(composite_index(lbl, fock) for lbl in blk.labels)
    if sorted(seen) != list(range(fock.composite_dim)):
        raise ValueError(
            f"{blocks[0].method if blocks else '?'} blocks do not partition the "
            f"composite basis ({len(seen)} labels, dim {fock.composite_dim})")


def build_full(params, fock, frame="rotated"):
    """Full Hamiltonian matrix on the composite basis.

    frame='rotated' gives delta*Jx + omega*a^dag a + g(a^dag+a)Jz;
    frame='original' gives -delta*Jz + omega*a^dag a + (g/2)(a^dag+a)(J+ + J-).
    The two are related by the collective y-rotation exp(i pi/2 Jy) and have
    identical spectra at any truncation.
    """
    sp = spin_matrices()
    bo = boson_matrices(fock)
    eye_s = np.eye(4)
    eye_f = np.eye(fock.dim)
    x = bo["a"] + bo["a_dagger"]
    h = params.omega * tensor_lift(eye_s, bo["number"])
    if frame == "rotated":
        h = h + params.delta * tensor_lift(sp["jx"], eye_f)
        h = h + params.g * tensor_lift(sp["jz"], x)
    elif frame == "original":
        h = h - params.delta * tensor_lift(sp["jz"], eye_f)
        h = h + 0.5 * params.g * tensor_lift(sp["jp"] + sp["jm"], x)
    else:
        raise ValueError(f"unknown frame {frame!r}")
    return h


def coeff_G0(n, params):
    """Diagonal dressing factor G0(n) = <n|cosh[(g/w)(a^dag-a)]|n>
    = exp(-g^2/2w^2) L_n(g^2/w^2)."""
    lam = params.lam
    return math.exp(-0.5 * lam * lam) * laguerre_assoc(n, 0, lam * lam)


def coeff_R(n, params):
    """Photon-hopping factor R_{n+1,n} = <n+1|sinh[(g/w)(a^dag-a)]|n>/sqrt(n+1)
    = (g/w) exp(-g^2/2w^2) L_n^1(g^2/w^2) / (n+1)."""
    lam = params.lam
    return lam * math.exp(-0.5 * lam * lam) * laguerre_assoc(n, 1, lam * lam) / (n + 1)


@dataclass(frozen=True)
class ZerothCoefficients:
    """Closed-form eigen-data of one zeroth-order 4x4 block.

    epsilon follows the block's label order (not magnitude order); the
    eigenvector for label i has the alternating-sign pattern
    (-1, K_i, -K_i, 1) for odd i and (1, -K_i, -K_i, 1) for even i over
    ascending m, normalized by C_i = sqrt(2 + 2 K_i^2).
    """

    n: int
    b_n: float
    chi: tuple
    kk: tuple
    epsilon: tuple

    def eigenvectors(self):
        """Normalized eigenvector columns (ascending-m rows, label order),
        signed like the unnormalized patterns written above."""
        cols = []
        for i, k in enumerate(self.kk, start=1):
            if math.isinf(k):
                # b_n = 0 limit: the K_3, K_4 eigenvectors lose their +-3/2
                # components entirely
                v = np.array([0.0, 1.0, -1.0, 0.0]) if i == 3 else \
                    np.array([0.0, 1.0, 1.0, 0.0])
            elif abs(k) <= 1.0:
                v = np.array([-1.0, k, -k, 1.0]) if i % 2 == 1 else \
                    np.array([1.0, -k, -k, 1.0])
            else:
                # rescale by 1/k so the entries stay bounded for huge K
                r = 1.0 / k
                v = np.array([-r, 1.0, -1.0, r]) if i % 2 == 1 else \
                    np.array([r, -1.0, -1.0, r])
                v *= math.copysign(1.0, k)
            cols.append(v / np.linalg.norm(v))
        return np.column_stack(cols)


def _zeroth_coefficients(n, params):
    gamma = params.g ** 2 / params.omega
    b = params.delta * coeff_G0(n, params)
    chi1 = 0.5 * math.sqrt(gamma * gamma - gamma * b + b * b)
    chi2 = 0.5 * math.sqrt(gamma * gamma + gamma * b + b * b)
    base = params.omega * n - 1.25 * gamma
    eps = (base - 0.5 * b - 2 * chi1,
           base + 0.5 * b - 2 * chi2,
           base - 0.5 * b + 2 * chi1,
           base + 0.5 * b + 2 * chi2)
    if b == 0.0:
        kk = (0.0, 0.0, -math.inf, -math.inf)
    else:
        # K_1, K_2 in rationalized form (the textbook numerator
        # -2*gamma -+ b + 4*chi cancels catastrophically for |b| << gamma)
        k1 = SQRT3 * b / (4 * chi1 + 2 * gamma - b)
        k2 = SQRT3 * b / (4 * chi2 + 2 * gamma + b)
        k3 = (b - 2 * gamma - 4 * chi1) / (SQRT3 * b)
        k4 = -(b + 2 * gamma + 4 * chi2) / (SQRT3 * b)
        kk = (k1, k2, k3, k4)
    return ZerothCoefficients(n=n, b_n=b, chi=(chi1, chi2), kk=kk, epsilon=eps)


def zeroth_block(n, params):
    """Zeroth-order 4x4 block of the n-th Fock manifold, with its analytic
    eigen-data. Basis: ascending m at fixed photon number n."""
    if n < 0:
        raise ValueError("Fock index must be nonnegative")
    gamma = params.g ** 2 / params.omega
    coeffs = _zeroth_coefficients(n, params)
    mat = params.omega * n * np.eye(4) \
        - gamma * np.diag([2.25, 0.25, 0.25, 2.25]) \
        + coeffs.b_n * _JX_ASC
    labels = tuple((m, n) for m in (-1.5, -0.5, 0.5, 1.5))
    return BlockHamiltonian(matrix=mat, labels=labels, method="zeroth"), coeffs


def zeroth_blocks(params, fock):
    """All zeroth-order blocks (n = 0..n_max) with their coefficient records."""
    out = [zeroth_block(n, params) for n in range(fock.dim)]
    return [b for b, _ in out], [c for _, c in out]


@dataclass(frozen=True)
class GrwaCoefficients:
    """Dressed-basis data of the GRWA construction.

    S columns are the n=0 zeroth-order eigenvectors over ascending m; the
    diagonal dressing weights jx_diag and the hopping weights couple (i, i+1)
    exactly like the renormalized couplings written next to the GRWA matrix.
    """

    params: ModelParams
    beta: float
    kk: tuple
    normalizers: tuple
    eps0: tuple
    s_matrix: np.ndarray
    jx_diag: np.ndarray
    hop: tuple  # coupling weights (c12, c23, c34) = <phi_i| iJy |phi_{i+1}>

    def mu(self, i, n):
        """Diagonal entry mu_i(n) = eps_{i,0} + delta*(G0(n) - beta)*<Jx>_i."""
        g0 = coeff_G0(n, self.params)
        return self.eps0[i - 1] + self.params.delta * (g0 - self.beta) * self.jx_diag[i - 1]

    def r_prime(self, i, n_low):
        """Renormalized hopping between (i, n_low+1) and (i+1, n_low); the
        matching matrix entry is delta * r_prime."""
        return self.hop[i - 1] * coeff_R(n_low, self.params) * math.sqrt(n_low + 1)


def grwa_coefficients(params):
    c0 = _zeroth_coefficients(0, params)
    s = c0.eigenvectors()
    jx_diag = np.einsum("ri,rs,si->i", s, _JX_ASC, s)
    hop = tuple(s[:, i] @ _IJY_ASC @ s[:, i + 1] for i in range(3))
    normalizers = tuple(
        math.sqrt(2 + 2 * k * k) if not math.isinf(k) else math.inf
        for k in c0.kk)
    return GrwaCoefficients(
        params=params, beta=coeff_G0(0, params), kk=c0.kk,
        normalizers=normalizers, eps0=c0.epsilon, s_matrix=s,
        jx_diag=jx_diag, hop=hop)


def grwa_blocks(params, fock):
    """GRWA blocks over the dressed basis, labels (dressed index, photon).

    Emits the 1x1 ground block, the 2x2 and 3x3 edge blocks, 4x4 blocks for
    n = 1..n_max-2, and the mirrored truncated blocks at the top of the Fock
    ladder so the labels partition the composite basis.
    """
    if fock.n_max < 3:
        raise ValueError("n_max must be >= 3 for the GRWA edge blocks")
    co = grwa_coefficients(params)
    d = params.delta
    w = params.omega

    def block(rows):
        # rows: list of (dressed index, photon)
        k = len(rows)
        mat = np.zeros((k, k))
        for r, (i, n) in enumerate(rows):
            mat[r, r] = w * n + co.mu(i, n)
        for r in range(k - 1):
            i, _ = rows[r]
            _, n_low = rows[r + 1]
            mat[r, r + 1] = mat[r + 1, r] = d * co.r_prime(i, n_low)
        return BlockHamiltonian(matrix=mat, labels=tuple(rows), method="grwa")

    nm = fock.n_max
    blocks = [
        block([(1, 0)]),
        block([(1, 1), (2, 0)]),
        block([(1, 2), (2, 1), (3, 0)]),
    ]
    for n in range(1, nm - 1):
        blocks.append(block([(1, n + 2), (2, n + 1), (3, n), (4, n - 1)]))
    blocks.append(block([(2, nm), (3, nm - 1), (4, nm - 2)]))
    blocks.append(block([(3, nm), (4, nm - 1)]))
    blocks.append(block([(4, nm)]))
    return blocks, co


def grwa_ground_energy(params):
    """Closed-form GRWA ground energy
    -5g^2/4w - (delta/2) exp(-g^2/2w^2) - 2 chi_{1,0}."""
    c0 = _zeroth_coefficients(0, params)
    return (-1.25 * params.g ** 2 / params.omega
            - 0.5 * params.delta * math.exp(-0.5 * params.lam ** 2)
            - 2.0 * c0.chi[0])


def rwa_blocks(params, fock):
    """RWA blocks in the lab frame, built from the tri-diagonal form with
    hoppings T(n_low -> n_low+1) on the three inter-level bonds."""
    if fock.n_max < 3:
        raise ValueError("n_max must be >= 3 for the RWA edge blocks")
    d, w, g = params.delta, params.omega, params.g

    def hopping(bond, n_high):
        # bond 0: -3/2 <-> -1/2, bond 1: -1/2 <-> 1/2, bond 2: 1/2 <-> 3/2
        fac = (SQRT3, 1.0, SQRT3)[bond]
        return g * fac * math.sqrt(n_high) / 4.0

    def block(rows):
        k = len(rows)
        mat = np.zeros((k, k))
        for r, (m, n) in enumerate(rows):
            mat[r, r] = w * n - d * m
        for r in range(k - 1):
            m, n_high = rows[r]
            bond = int(round(m + 1.5))
            mat[r, r + 1] = mat[r + 1, r] = hopping(bond, n_high)
        return BlockHamiltonian(matrix=mat, labels=tuple(rows), method="rwa")

    nm = fock.n_max
    blocks = [
        block([(-1.5, 0)]),
        block([(-1.5, 1), (-0.5, 0)]),
        block([(-1.5, 2), (-0.5, 1), (0.5, 0)]),
    ]
    for n in range(1, nm - 1):
        blocks.append(block([(-1.5, n + 2), (-0.5, n + 1), (0.5, n), (1.5, n - 1)]))
    blocks.append(block([(-0.5, nm), (0.5, nm - 1), (1.5, nm - 2)]))
    blocks.append(block([(0.5, nm), (1.5, nm - 1)]))
    blocks.append(block([(1.5, nm)]))
    return blocks
