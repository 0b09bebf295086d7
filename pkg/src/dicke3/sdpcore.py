"""Small dense semidefinite-program solver.

Standard conic form over block-diagonal PSD cones:

    minimize    sum_b <C_b, X_b>
    subject to  sum_b <A_ib, X_b> = b_i,   X_b >= 0,

solved by an infeasible-start primal-dual path-following method with the
HKM scaling direction and a Mehrotra predictor-corrector step (fraction to
the boundary 0.98). All linear algebra is dense; the Schur complement of the
programs built here is a few hundred rows at most.

Complex Hermitian data enters through the real embedding
H -> [[Re H, -Im H], [Im H, Re H]], which doubles every eigenvalue and every
trace; build_gme_program halves the embedded objective so reported optima
equal the complex-program optima.
"""

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .hilbert import check_density_matrix, check_hermitian


def hermitian_embed(h, tol=1e-12):
    """Real symmetric embedding [[Re H, -Im H], [Im H, Re H]] of a complex
    Hermitian matrix. PSD iff H is PSD; every eigenvalue of H appears twice."""
    h = np.asarray(h, dtype=complex)
    check_hermitian(h, tol, "embedding input")
    re, im = h.real, h.imag
    return np.block([[re, -im], [im, re]])


def hermitian_unembed(m):
    """Recover the complex Hermitian matrix from (the symmetric part of) a
    real embedding; inverse of hermitian_embed on structured input."""
    m = np.asarray(m, dtype=float)
    d = m.shape[0] // 2
    re = 0.5 * (m[:d, :d] + m[d:, d:])
    im = 0.5 * (m[d:, :d] - m[:d, d:])
    h = re + 1j * im
    return 0.5 * (h + h.conj().T)


@dataclass(frozen=True)
class ConicProgram:
    """Block-diagonal SDP data.

    Each constraint is a (coeffs, b) pair where coeffs maps block index to a
    dense symmetric matrix; blocks absent from the map have zero coefficient.
    """

    block_sizes: tuple
    c_blocks: list
    constraints: list

    @property
    def n_constraints(self):
        return len(self.constraints)

    def validate(self, sym_tol=1e-12, rank_tol=1e-8):
        """Check symmetry of all data and linear independence of the
        constraints (Gram-matrix rank); raises on violation."""
        for b, c in enumerate(self.c_blocks):
            if c.shape != (self.block_sizes[b], self.block_sizes[b]):
                raise ValueError(f"objective block {b} has wrong shape")
            if np.max(np.abs(c - c.T), initial=0.0) > sym_tol:
                raise ValueError(f"objective block {b} is not symmetric")
        for i, (coeffs, _) in enumerate(self.constraints):
            for b, a in coeffs.items():
                if a.shape != (self.block_sizes[b], self.block_sizes[b]):
                    raise ValueError(f"constraint {i} block {b} has wrong shape")
                if np.max(np.abs(a - a.T), initial=0.0) > sym_tol:
                    raise ValueError(f"constraint {i} block {b} is not symmetric")
        gram = np.zeros((self.n_constraints, self.n_constraints))
        for b in range(len(self.block_sizes)):
            rows = [i for i, (coeffs, _) in enumerate(self.constraints)
                    if b in coeffs]
            if not rows:
                continue
            v = np.stack([self.constraints[i][0][b].ravel() for i in rows])
            gram[np.ix_(rows, rows)] += v @ v.T
        rank = np.linalg.matrix_rank(gram, tol=rank_tol * max(1.0, gram.max()))
        if rank < self.n_constraints:
            raise ValueError(
                f"constraints are linearly dependent (rank {rank} of "
                f"{self.n_constraints})")
        return self


@dataclass
class SdpSolution:
    """Primal-dual solution with feasibility and gap diagnostics."""

    x_blocks: list
    y: np.ndarray
    z_blocks: list
    primal_objective: float
    dual_objective: float
    rel_gap: float
    primal_infeas: float
    dual_infeas: float
    iterations: int
    status: str  # optimal | max_iter | numerical_failure
    history: list = field(default_factory=list, repr=False)


class _Compiled:
    """Per-block constraint layout: for every block, the indices of the
    constraints touching it and their stacked coefficient matrices."""

    def __init__(self, prog):
        self.prog = prog
        self.m = prog.n_constraints
        self.b_vec = np.array([b for _, b in prog.constraints])
        self.rows = []
        self.stacks = []
        self.flat = []
        for b, d in enumerate(prog.block_sizes):
            rows = [i for i, (coeffs, _) in enumerate(prog.constraints)
                    if b in coeffs]
            self.rows.append(np.array(rows, dtype=int))
            if rows:
                stack = np.stack([prog.constraints[i][0][b] for i in rows])
            else:
                stack = np.zeros((0, d, d))
            self.stacks.append(stack)
            self.flat.append(stack.reshape(len(rows), d * d))

    def apply(self, blocks):
        """A(X): inner products of every constraint with a block iterate."""
        out = np.zeros(self.m)
        for b, x in enumerate(blocks):
            if self.rows[b].size:
                out[self.rows[b]] += self.flat[b] @ x.ravel()
        return out

    def adjoint(self, y):
        """A^T(y) as a list of blocks."""
        out = []
        for b, d in enumerate(self.prog.block_sizes):
            if self.rows[b].size:
                blk = (y[self.rows[b]] @ self.flat[b]).reshape(d, d)
            else:
                blk = np.zeros((d, d))
            out.append(blk)
        return out

    def schur(self, x_blocks, zinv_blocks):
        """HKM Schur complement M_ij = sum_b Tr(A_i X A_j Z^-1)."""
        m = np.zeros((self.m, self.m))
        for b, stack in enumerate(self.stacks):
            rows = self.rows[b]
            if not rows.size:
                continue
            g = np.matmul(np.matmul(x_blocks[b][None], stack),
                          zinv_blocks[b][None])
            m[np.ix_(rows, rows)] += self.flat[b] @ g.reshape(rows.size, -1).T
        return 0.5 * (m + m.T)


def _max_step(block, dblock, tau):
    """Largest step alpha <= 1 with block + alpha*dblock staying PSD, scaled
    by the fraction-to-boundary factor tau."""
    try:
        ell = np.linalg.cholesky(block)
    except np.linalg.LinAlgError:
        return 0.0
    s = scipy.linalg.solve_triangular(ell, dblock, lower=True)
    s = scipy.linalg.solve_triangular(ell, s.T, lower=True)
    lam_min = np.linalg.eigvalsh(0.5 * (s + s.T))[0]
    if lam_min >= 0:
        return 1.0
    return min(1.0, -tau / lam_min)


def solve_sdp(prog, tol=1e-8, max_iter=100, tau=0.98):
    """Solve a ConicProgram; see the module docstring for the method.

    Terminates with status 'optimal' when the relative duality gap and the
    primal/dual residuals all drop below tol, 'max_iter' when the iteration
    budget runs out, and 'numerical_failure' when the Newton systems cannot
    be solved (never silently returns a value in that case).
    """
    comp = _Compiled(prog)
    sizes = prog.block_sizes
    nb = len(sizes)
    n_tot = sum(sizes)
    b_vec = comp.b_vec
    c_blocks = [np.asarray(c, dtype=float) for c in prog.c_blocks]

    scale = max(1.0, max(np.max(np.abs(c)) for c in c_blocks),
                np.max(np.abs(b_vec)) if b_vec.size else 1.0)
    x = [scale * np.eye(d) for d in sizes]
    z = [scale * np.eye(d) for d in sizes]
    y = np.zeros(comp.m)

    norm_b = 1.0 + np.linalg.norm(b_vec)
    norm_c = 1.0 + math.sqrt(sum(np.sum(c * c) for c in c_blocks))
    history = []
    status = "max_iter"
    it = 0

    def diagnostics():
        pobj = sum(np.vdot(c_blocks[b], x[b]).real for b in range(nb))
        dobj = float(b_vec @ y)
        gap = sum(np.vdot(x[b], z[b]).real for b in range(nb))
        rel_gap = gap / (1.0 + abs(pobj) + abs(dobj))
        rp = b_vec - comp.apply(x)
        aty = comp.adjoint(y)
        rd = [c_blocks[b] - aty[b] - z[b] for b in range(nb)]
        pinf = np.linalg.norm(rp) / norm_b
        dinf = math.sqrt(sum(np.sum(r * r) for r in rd)) / norm_c
        return pobj, dobj, gap, rel_gap, rp, rd, pinf, dinf

    for it in range(1, max_iter + 1):
        pobj, dobj, gap, rel_gap, rp, rd, pinf, dinf = diagnostics()
        history.append((pobj, dobj, rel_gap, pinf, dinf))
        if rel_gap < tol and pinf < tol and dinf < tol:
            status = "optimal"
            break

        mu = gap / n_tot
        try:
            zinv = [np.linalg.inv(zb) for zb in z]
            zinv = [0.5 * (zi + zi.T) for zi in zinv]
            schur = comp.schur(x, zinv)
            cho = scipy.linalg.cho_factor(
                schur + 1e-14 * scale * np.eye(comp.m), lower=True)
        except (np.linalg.LinAlgError, scipy.linalg.LinAlgError):
            status = "numerical_failure"
            break

        def direction(rc_blocks):
            rhs = rp.copy()
            for b in range(nb):
                nb_mat = (rc_blocks[b] - x[b] @ rd[b]) @ zinv[b]
                if comp.rows[b].size:
                    rhs[comp.rows[b]] -= comp.flat[b] @ nb_mat.ravel()
            dy = scipy.linalg.cho_solve(cho, rhs)
            aty_d = comp.adjoint(dy)
            dz = [rd[b] - aty_d[b] for b in range(nb)]
            dx = []
            for b in range(nb):
                m_ = (rc_blocks[b] - x[b] @ dz[b]) @ zinv[b]
                dx.append(0.5 * (m_ + m_.T))
            return dx, dy, dz

        # predictor
        rc_aff = [-(x[b] @ z[b]) for b in range(nb)]
        try:
            dx_a, dy_a, dz_a = direction(rc_aff)
        except scipy.linalg.LinAlgError:
            status = "numerical_failure"
            break
        ap = min(_max_step(x[b], dx_a[b], tau) for b in range(nb))
        ad = min(_max_step(z[b], dz_a[b], tau) for b in range(nb))
        gap_aff = sum(np.vdot(x[b] + ap * dx_a[b], z[b] + ad * dz_a[b]).real
                      for b in range(nb))
        sigma = min(1.0, max((gap_aff / gap) ** 3 if gap > 0 else 0.0, 1e-10))

        # corrector
        rc = [sigma * mu * np.eye(sizes[b]) - x[b] @ z[b]
              - dx_a[b] @ dz_a[b] for b in range(nb)]
        try:
            dx, dy, dz = direction(rc)
        except scipy.linalg.LinAlgError:
            status = "numerical_failure"
            break
        ap = min(_max_step(x[b], dx[b], tau) for b in range(nb))
        ad = min(_max_step(z[b], dz[b], tau) for b in range(nb))
        if ap < 1e-12 and ad < 1e-12:
            status = "numerical_failure"
            break
        for b in range(nb):
            x[b] = x[b] + ap * dx[b]
            z[b] = z[b] + ad * dz[b]
        y = y + ad * dy
        if not all(np.all(np.isfinite(xb)) for xb in x) or not np.all(np.isfinite(y)):
            status = "numerical_failure"
            break

    pobj, dobj, gap, rel_gap, rp, rd, pinf, dinf = diagnostics()
    return SdpSolution(
        x_blocks=x, y=y, z_blocks=z, primal_objective=pobj,
        dual_objective=dobj, rel_gap=rel_gap, primal_infeas=pinf,
        dual_infeas=dinf, iterations=it, status=status, history=history)


# ---------------------------------------------------------------------------
# GME witness program
# ---------------------------------------------------------------------------

BIPARTITIONS = ("A", "B", "C")  # each M against the remaining pair

# block layout: P_A, Q_A, P_B, Q_B, P_C, Q_C, then the slack blocks
# I - P_A, I - Q_A, ..., all 8x8 complex -> 16x16 embedded
_VAR_BLOCKS = 6
_GME_BLOCK_SIZES = (16,) * 12


def partial_transpose_qubit(mat, axis):
    """Partial transpose of an 8x8 three-qubit matrix on qubit axis 0, 1 or 2."""
    t = np.asarray(mat).reshape(2, 2, 2, 2, 2, 2)
    perm = list(range(6))
    perm[axis], perm[axis + 3] = perm[axis + 3], perm[axis]
    return t.transpose(perm).reshape(8, 8)


def _hermitian_basis(d=8):
    """Unnormalized Hermitian basis: E_jj, E_jk + E_kj, i(E_jk - E_kj)."""
    basis = []
    for j in range(d):
        e = np.zeros((d, d), dtype=complex)
        e[j, j] = 1.0
        basis.append(e)
    for j in range(d):
        for k in range(j + 1, d):
            e = np.zeros((d, d), dtype=complex)
            e[j, k] = e[k, j] = 1.0
            basis.append(e)
            e = np.zeros((d, d), dtype=complex)
            e[j, k] = 1j
            e[k, j] = -1j
            basis.append(e)
    return basis


def build_gme_program(rho8):
    """Encode the fully-decomposable-witness minimization for a three-qubit
    state: minimize Tr(W rho) over W = P_M + Q_M^{T_M} for all bipartitions,
    with 0 <= P_M <= I and 0 <= Q_M <= I.

    The optimum is <= 0; its absolute value is the GME measure E(rho).
    """
    rho8 = check_density_matrix(np.asarray(rho8, dtype=complex),
                                what="GME input state")
    basis = _hermitian_basis(8)
    emb = [hermitian_embed(h) for h in basis]
    emb_pt = [[hermitian_embed(partial_transpose_qubit(h, ax)) for h in basis]
              for ax in range(3)]
    eye_emb = np.eye(16)

    constraints = []
    # a single witness: P_A + Q_A^{T_A} = P_M + Q_M^{T_M} for M = B, C
    for other in (1, 2):
        for a in range(64):
            coeffs = {0: emb[a], 1: emb_pt[0][a],
                      2 * other: -emb[a], 2 * other + 1: -emb_pt[other][a]}
            constraints.append((coeffs, 0.0))
    # bound slacks: P_M + (I - P_M) = I and likewise for Q_M
    for v in range(_VAR_BLOCKS):
        for a in range(64):
            bval = float(np.vdot(emb[a], eye_emb).real)
            constraints.append(({v: emb[a], _VAR_BLOCKS + v: emb[a]}, bval))

    # objective Tr(W rho) through the first bipartition's decomposition;
    # the factor 1/2 undoes the trace doubling of the embedding
    c_blocks = [np.zeros((16, 16)) for _ in range(12)]
    c_blocks[0] = 0.5 * hermitian_embed(rho8)
    c_blocks[1] = 0.5 * hermitian_embed(partial_transpose_qubit(rho8, 0))
    return ConicProgram(block_sizes=_GME_BLOCK_SIZES, c_blocks=c_blocks,
                        constraints=constraints)


def extract_gme_witness(solution):
    """Pull the complex certificates out of a GME program solution.

    Returns (witness W, {M: (P_M, Q_M)}).
    """
    certs = {}
    for i, m in enumerate(BIPARTITIONS):
        p = hermitian_unembed(solution.x_blocks[2 * i])
        q = hermitian_unembed(solution.x_blocks[2 * i + 1])
        certs[m] = (p, q)
    p_a, q_a = certs["A"]
    witness = p_a + partial_transpose_qubit(q_a, 0)
    return witness, certs
