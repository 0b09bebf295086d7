"""Operator and state algebra for three qubits (pseudospin J = 3/2) coupled to
a truncated bosonic mode.

Basis conventions used throughout the package:

* spin basis is ordered by descending magnetic number, m = +3/2, +1/2, -1/2, -3/2;
* Fock basis is |0>, ..., |n_max> with a hard cutoff (a^dag |n_max> -> 0);
* composite indices are m-major: index = spin_slot * (n_max + 1) + n.

The Dicke map embeds the spin-3/2 sector into three-qubit space: |m> goes to
the symmetric state with k = m + 3/2 qubits excited, so |m=-1/2> is the W state.
"""

import math
from dataclasses import dataclass

import numpy as np

J = 1.5
SPIN_MS = (1.5, 0.5, -0.5, -1.5)  # descending, slot 0 .. 3
HERMITICITY_TOL = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters: qubit splitting delta, cavity frequency omega,
    collective coupling g (all in the same energy units)."""

    delta: float
    omega: float
    g: float

    def __post_init__(self):
        if not (self.omega > 0 and np.isfinite(self.omega)):
            raise ValueError(f"omega must be positive and finite, got {self.omega}")
        if not (self.delta >= 0 and np.isfinite(self.delta)):
            raise ValueError(f"delta must be nonnegative and finite, got {self.delta}")
        if not (self.g >= 0 and np.isfinite(self.g)):
            raise ValueError(f"g must be nonnegative and finite, got {self.g}")

    @property
    def lam(self):
        """Dimensionless displacement g/omega."""
        return self.g / self.omega


@dataclass(frozen=True)
class FockSpace:
    """Truncated Fock space keeping occupations 0..n_max (n_max >= 3 so that
    every GRWA edge block exists)."""

    n_max: int

    def __post_init__(self):
        if self.n_max < 3:
            raise ValueError(f"n_max must be >= 3, got {self.n_max}")

    @property
    def dim(self):
        return self.n_max + 1

    @property
    def composite_dim(self):
        return 4 * (self.n_max + 1)


def spin_slot(m):
    """Basis slot (0..3) of magnetic number m in the descending-m spin basis."""
    slot = int(round(1.5 - m))
    if slot not in (0, 1, 2, 3) or abs((1.5 - slot) - m) > 1e-12:
        raise ValueError(f"not a spin-3/2 magnetic number: {m}")
    return slot


def spin_matrices():
    """Angular momentum matrices for J = 3/2 in the descending-m basis.

    Returns a dict with keys 'jz', 'jp', 'jm', 'jx', 'jy' (4x4 complex arrays),
    satisfying J± = Jx ± iJy and [Jx, Jy] = iJz.
    """
    ms = np.array(SPIN_MS)
    jz = np.diag(ms).astype(complex)
    jp = np.zeros((4, 4), dtype=complex)
    for col, m in enumerate(SPIN_MS):
        if m < J:
            jp[col - 1, col] = math.sqrt(J * (J + 1) - m * (m + 1))
    jm = jp.conj().T
    jx = (jp + jm) / 2
    jy = (jp - jm) / (2j)
    return {"jz": jz, "jp": jp, "jm": jm, "jx": jx, "jy": jy}


def boson_matrices(fock):
    """Truncated annihilation/creation/number matrices on 0..n_max."""
    d = fock.dim
    a = np.zeros((d, d), dtype=complex)
    for n in range(1, d):
        a[n - 1, n] = math.sqrt(n)
    adag = a.conj().T
    number = np.diag(np.arange(d, dtype=float)).astype(complex)
    return {"a": a, "a_dagger": adag, "number": number}


def tensor_lift(spin_op, fock_op):
    """Kronecker product on the composite basis, spin factor major."""
    spin_op = np.asarray(spin_op)
    fock_op = np.asarray(fock_op)
    if spin_op.ndim != 2 or spin_op.shape[0] != spin_op.shape[1]:
        raise ValueError(f"spin operator must be square, got {spin_op.shape}")
    if fock_op.ndim != 2 or fock_op.shape[0] != fock_op.shape[1]:
        raise ValueError(f"Fock operator must be square, got {fock_op.shape}")
    return np.kron(spin_op, fock_op)


def spin_rotation_y(angle):
    """exp(i * angle * Jy) on the spin-3/2 factor.

    With angle = pi/2 this maps the lab frame (-delta Jz coupling) onto the
    rotated frame (+delta Jx coupling): R Jz R^dag = -Jx, R Jx R^dag = Jz.
    """
    jy = spin_matrices()["jy"]
    w, v = np.linalg.eigh(jy)
    return (v * np.exp(1j * angle * w)) @ v.conj().T


def laguerre_assoc(n, k, x):
    """Associated Laguerre polynomial L_n^k(x) by the three-term recurrence.

    The recurrence is numerically stable for the x >= 0, k >= 0 range used
    here; the explicit factorial sum overflows beyond n ~ 15 and is kept only
    as a test oracle.
    """
    if n < 0:
        raise ValueError(f"degree must be nonnegative, got n={n}")
    if n == 0:
        return 1.0
    prev = 1.0
    cur = 1.0 + k - x
    for i in range(1, n):
        prev, cur = cur, ((2 * i + 1 + k - x) * cur - (i + k) * prev) / (i + 1)
    return cur


def _laguerre_column(n_top, k, x):
    """L_0^k(x) .. L_n_top^k(x) as an array (vectorized recurrence)."""
    out = np.empty(n_top + 1)
    out[0] = 1.0
    if n_top == 0:
        return out
    out[1] = 1.0 + k - x
    for i in range(1, n_top):
        out[i + 1] = ((2 * i + 1 + k - x) * out[i] - (i + k) * out[i - 1]) / (i + 1)
    return out


def displaced_fock_overlap(m, n, alpha):
    """Matrix element <m| exp[alpha (a^dag - a)] |n> for real alpha.

    Closed form: for m >= n,
        sqrt(n!/m!) alpha^(m-n) e^(-alpha^2/2) L_n^(m-n)(alpha^2),
    and the m < n case follows from D(alpha)^dag = D(-alpha).
    """
    if m < 0 or n < 0:
        raise ValueError("Fock indices must be nonnegative")
    if m < n:
        return displaced_fock_overlap(n, m, -alpha)
    if alpha == 0.0:
        return 1.0 if m == n else 0.0
    k = m - n
    # prefactor in log space; factorial ratios overflow well before n ~ 100
    log_pref = 0.5 * (math.lgamma(n + 1) - math.lgamma(m + 1)) \
        + k * math.log(abs(alpha)) - 0.5 * alpha * alpha
    sign = -1.0 if (alpha < 0 and k % 2 == 1) else 1.0
    return sign * math.exp(log_pref) * laguerre_assoc(n, k, alpha * alpha)


def displacement_matrix(alpha, n_max):
    """Truncated matrix of exp[alpha (a^dag - a)] from the closed-form overlaps.

    Columns are the displaced Fock states; this is the top-left corner of the
    infinite unitary, so columns near n_max lose the tail mass pushed past the
    cutoff.
    """
    d = n_max + 1
    out = np.zeros((d, d))
    if alpha == 0.0:
        return np.eye(d)
    x = alpha * alpha
    lg = [math.lgamma(i + 1) for i in range(d)]
    for k in range(d):
        lag = _laguerre_column(d - 1 - k, k, x)
        ns = np.arange(d - k)
        log_pref = 0.5 * (np.array(lg[: d - k]) - np.array(lg[k:])) \
            + k * math.log(abs(alpha)) - 0.5 * x
        vals = np.exp(log_pref) * lag
        sign = -1.0 if (alpha < 0 and k % 2 == 1) else 1.0
        out[ns + k, ns] = sign * vals
        if k > 0:
            out[ns, ns + k] = (-1.0) ** k * sign * vals
    return out


def check_hermitian(matrix, tol=HERMITICITY_TOL, what="matrix"):
    """Raise if the max entrywise deviation from Hermiticity exceeds tol."""
    dev = np.max(np.abs(matrix - matrix.conj().T))
    if dev > tol:
        raise ValueError(f"{what} is not Hermitian (max deviation {dev:.3e})")
    return matrix


def check_density_matrix(rho, herm_tol=1e-10, trace_tol=1e-10, psd_tol=1e-9,
                         what="density matrix"):
    """Validate Hermiticity, unit trace and positivity; returns rho unchanged."""
    rho = np.asarray(rho, dtype=complex)
    check_hermitian(rho, herm_tol, what)
    tr = np.trace(rho).real
    if abs(tr - 1.0) > trace_tol:
        raise ValueError(f"{what} has trace {tr!r}, expected 1")
    w = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    if w[0] < -psd_tol:
        raise ValueError(f"{what} has negative eigenvalue {w[0]:.3e}")
    return rho


def dicke_isometry():
    """8x4 isometry V mapping |m> to the symmetric three-qubit Dicke state
    with k = m + 3/2 excitations (column order follows the spin basis)."""
    v = np.zeros((8, 4))
    for slot, m in enumerate(SPIN_MS):
        k = int(round(m + 1.5))
        idx = [i for i in range(8) if bin(i).count("1") == k]
        v[idx, slot] = 1.0 / math.sqrt(len(idx))
    return v


_DICKE_V = dicke_isometry()


def symmetric_embed(rho4):
    """Embed a 4x4 spin-sector density matrix into the symmetric subspace of
    three qubits: rho8 = V rho4 V^dag. Trace and spectrum are preserved."""
    rho4 = np.asarray(rho4, dtype=complex)
    if rho4.shape != (4, 4):
        raise ValueError(f"expected a 4x4 spin density matrix, got {rho4.shape}")
    check_density_matrix(rho4, what="spin density matrix")
    return _DICKE_V @ rho4 @ _DICKE_V.T


def symmetric_extract(rho8, leak_tol=1e-8):
    """Inverse of symmetric_embed for states supported on the symmetric
    subspace; raises if more than leak_tol of the weight lies outside it."""
    rho8 = np.asarray(rho8, dtype=complex)
    if rho8.shape != (8, 8):
        raise ValueError(f"expected an 8x8 density matrix, got {rho8.shape}")
    rho4 = _DICKE_V.T @ rho8 @ _DICKE_V
    leak = abs(np.trace(rho8).real - np.trace(rho4).real)
    if leak > leak_tol:
        raise ValueError(
            f"state has weight {leak:.3e} outside the symmetric subspace")
    return rho4
