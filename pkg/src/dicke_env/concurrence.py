"""Wootters concurrence of two-qubit density matrices.

States are 4x4 in the basis |11>, |10>, |01>, |00> (atom a first, excited
state first in each factor). Any local basis permutation leaves sigma_y x
sigma_y unchanged, so the ordering does not affect the result.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch
from .linalg import symmetrize

YY = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))

# basis vectors in the |11>, |10>, |01>, |00> ordering
KET_11 = np.array([1, 0, 0, 0], dtype=complex)
KET_00 = np.array([0, 0, 0, 1], dtype=complex)
PSI_PLUS = np.array([0, 1, 1, 0], dtype=complex) / np.sqrt(2)
PSI_MINUS = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)

PROJ_PSI_PLUS = np.outer(PSI_PLUS, PSI_PLUS.conj())
PROJ_00 = np.outer(KET_00, KET_00)
PROJ_11 = np.outer(KET_11, KET_11)

def _as_two_qubit(rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise DimensionMismatch(f"two-qubit state must be 4x4, got {rho.shape}")
    return rho


def spin_flip(rho) -> np.ndarray:
    """(sigma_y x sigma_y) rho* (sigma_y x sigma_y)."""
    rho = _as_two_qubit(rho)
    return YY @ rho.conj() @ YY


# eigenvalues of rho below this fraction of the largest are treated as roundoff
RANK_RTOL = 16 * np.finfo(float).eps


def _factor(rho: np.ndarray) -> np.ndarray:
    """F with rho = F F^dagger, from the eigendecomposition of rho."""
    w, v = np.linalg.eigh(rho)
    w = np.where(w > RANK_RTOL * max(1.0, w[-1]), w, 0.0)
    return v * np.sqrt(w)


def _spectrum_from_factors(f: np.ndarray) -> np.ndarray:
    # for rho = F F^H the lambda_i are the singular values of F^H (YY) F^*:
    # no square root of a near-zero eigenvalue is ever taken
    tau = np.swapaxes(f.conj(), -1, -2) @ YY @ f.conj()
    return np.linalg.svd(tau, compute_uv=False)


def concurrence_spectrum(rho) -> np.ndarray:
    """The four lambda_i of the concurrence, descending.

    Equal to the square roots of the eigenvalues of sqrt(rho) rho~ sqrt(rho).
    """
    rho = symmetrize(_as_two_qubit(rho))
    return _spectrum_from_factors(_factor(rho))


def _from_spectrum(lam: np.ndarray) -> np.ndarray:
    if lam.shape[-1] < 4:
        pad = [(0, 0)] * (lam.ndim - 1) + [(0, 4 - lam.shape[-1])]
        lam = np.pad(lam, pad)
    c = lam[..., 0] - lam[..., 1] - lam[..., 2] - lam[..., 3]
    return np.clip(c, 0.0, 1.0)


def wootters_concurrence(rho) -> float:
    return float(_from_spectrum(concurrence_spectrum(rho)))


def concurrence_from_amplitudes(m: np.ndarray) -> np.ndarray:
    """Concurrence of rho = M M^dagger for a stack of 4 x k amplitude matrices.

    M is a pure state of (two qubits) x (rest) reshaped to (4, rest); this
    avoids forming rho and keeps exact zeros exact.
    """
    m = np.asarray(m, dtype=complex)
    single = m.ndim == 2
    if single:
        m = m[None]
    if m.shape[1] != 4:
        raise DimensionMismatch("amplitude matrices must have 4 rows")
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    out = _from_spectrum(_spectrum_from_factors(u * s[:, None, :]))
    return float(out[0]) if single else out


def concurrence_many(rhos: np.ndarray) -> np.ndarray:
    return np.array([wootters_concurrence(r) for r in rhos])


def x_state(p_psi_plus: float, p_00: float, p_11: float = 0.0) -> np.ndarray:
    """Mixture of |psi+><psi+|, |00><00| and |11><11|."""
    return p_psi_plus * PROJ_PSI_PLUS + p_00 * PROJ_00 + p_11 * PROJ_11
