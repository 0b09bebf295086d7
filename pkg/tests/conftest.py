"""Shared test oracles: deliberately independent implementations (explicit
sums, generator exponentials, index shuffles) of the quantities the package
computes in closed form."""

import math

import numpy as np
import pytest
import scipy.linalg


def laguerre_sum(n, k, x):
    """Associated Laguerre polynomial by the explicit factorial sum; overflows
    past n ~ 15, which is why it is only a test oracle."""
    total = 0.0
    for j in range(n + 1):
        binom = math.factorial(n + k) / (math.factorial(n - j) * math.factorial(k + j))
        total += (-1) ** j * binom * x ** j / math.factorial(j)
    return total


def displacement_expm(alpha, n_big):
    """exp[alpha (a^dag - a)] by generator exponential in an n_big-dim space."""
    a = np.diag(np.sqrt(np.arange(1, n_big, dtype=float)), 1)
    return scipy.linalg.expm(alpha * (a.T - a))


def pt_oracle(rho8, axes):
    """Partial transpose by explicit index bookkeeping (independent of the
    package's reshape-based version)."""
    out = np.empty_like(np.asarray(rho8, dtype=complex))
    for i in range(8):
        for j in range(8):
            bi = [(i >> s) & 1 for s in (2, 1, 0)]
            bj = [(j >> s) & 1 for s in (2, 1, 0)]
            for ax in axes:
                bi[ax], bj[ax] = bj[ax], bi[ax]
            ii = 4 * bi[0] + 2 * bi[1] + bi[2]
            jj = 4 * bj[0] + 2 * bj[1] + bj[2]
            out[ii, jj] = rho8[i, j]
    return out


def reduced_ab(rho8):
    """Two-qubit reduced state of qubits A, B (trace out C)."""
    t = np.asarray(rho8).reshape(2, 2, 2, 2, 2, 2)
    return np.trace(t, axis1=2, axis2=5).reshape(4, 4)


def spinflip_concurrence(rho2):
    """Standard two-qubit concurrence from the spin-flip eigenvalue
    construction."""
    sy = np.array([[0, -1j], [1j, 0]])
    yy = np.kron(sy, sy)
    rt = rho2 @ yy @ rho2.conj() @ yy
    ev = np.linalg.eigvals(rt).real
    ev = np.sqrt(np.clip(np.sort(ev)[::-1], 0.0, None))
    return max(0.0, ev[0] - ev[1] - ev[2] - ev[3])


def ghz_state():
    psi = np.zeros(8, dtype=complex)
    psi[0] = psi[7] = 1 / math.sqrt(2)
    return psi


def w_state():
    psi = np.zeros(8, dtype=complex)
    psi[1] = psi[2] = psi[4] = 1 / math.sqrt(3)
    return psi


def projector(psi):
    return np.outer(psi, psi.conj())


def random_density(rng, d, rank=None):
    rank = rank or d
    a = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def random_unitary(rng, d):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(a)
    return q * (np.diag(r) / np.abs(np.diag(r)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240911)
