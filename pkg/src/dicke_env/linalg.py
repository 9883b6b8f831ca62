"""Dense complex linear algebra used by every Hamiltonian and state in the package.

Evolution uses a full Hermitian eigendecomposition rather than a generic
matrix exponential: one decomposition is reused for every time point of a grid.
"""

from __future__ import annotations

from math import prod
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, InvalidFactorIndex, NonHermitianInput

HERMITIAN_TOL = 1e-10


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; entry (i1*b.rows + i2, j1*b.cols + j2) is a[i1, j1]*b[i2, j2]."""
    return np.kron(np.asarray(a), np.asarray(b))


def kron_all(*mats: np.ndarray) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def hermiticity_error(m: np.ndarray) -> float:
    m = np.asarray(m)
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def symmetrize(m: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    err = hermiticity_error(m)
    if err > tol:
        raise NonHermitianInput(f"max |M - M^H| = {err:.3e} exceeds {tol:.1e}")
    return 0.5 * (m + m.conj().T)


def eig_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and matching eigenvector columns of a Hermitian matrix."""
    w, v = np.linalg.eigh(symmetrize(m, tol))
    return w[::-1].copy(), v[:, ::-1].copy()


class HermitianPropagator:
    """exp(-i H t) built from a spectral decomposition of H.

    When ``labels`` is given, H is assumed block diagonal with respect to the
    integer labels of the basis states (a conserved quantity that is diagonal
    in the computational basis). Each block is decomposed separately.
    """

    def __init__(self, h: np.ndarray, labels: Sequence[int] | None = None, tol: float = HERMITIAN_TOL):
        h = symmetrize(h, tol)
        self.dim = h.shape[0]
        if labels is None:
            labels = np.zeros(self.dim, dtype=int)
        labels = np.asarray(labels)
        if labels.shape != (self.dim,):
            raise DimensionMismatch("one label per basis state is required")
        self.blocks = []
        for lab in np.unique(labels):
            idx = np.flatnonzero(labels == lab)
            sub = h[np.ix_(idx, idx)]
            w, v = np.linalg.eigh(sub)
            self.blocks.append((idx, w, v))
        leak = h.copy()
        for idx, _, _ in self.blocks:
            leak[np.ix_(idx, idx)] = 0.0
        if np.max(np.abs(leak), initial=0.0) > tol:
            raise NonHermitianInput("matrix couples states with different labels")

    def evolve(self, psi0: np.ndarray, times) -> np.ndarray:
        """States at each time; shape (len(times), dim), or (dim,) for scalar time."""
        psi0 = np.asarray(psi0, dtype=complex)
        if psi0.shape != (self.dim,):
            raise DimensionMismatch(f"state of dim {psi0.shape} does not match operator dim {self.dim}")
        scalar = np.ndim(times) == 0
        t = np.atleast_1d(np.asarray(times, dtype=float))
        out = np.zeros((t.size, self.dim), dtype=complex)
        for idx, w, v in self.blocks:
            c = v.conj().T @ psi0[idx]
            if not np.any(c):
                continue
            phases = np.exp(-1j * np.outer(t, w)) * c
            out[:, idx] = phases @ v.T
        return out[0] if scalar else out


def evolve(h: np.ndarray, psi0: np.ndarray, t) -> np.ndarray:
    """exp(-i h t) psi0 for a scalar t or an array of times."""
    h = np.asarray(h)
    psi0 = np.asarray(psi0)
    if h.shape[0] != psi0.shape[0]:
        raise DimensionMismatch(f"operator dim {h.shape[0]} vs state dim {psi0.shape[0]}")
    return HermitianPropagator(h).evolve(psi0, t)


def _check_layout(dims: Sequence[int], keep: Sequence[int], total: int) -> tuple[list[int], list[int]]:
    dims = [int(d) for d in dims]
    if prod(dims) != total:
        raise DimensionMismatch(f"factor dims {dims} do not multiply to {total}")
    keep = sorted(int(k) for k in keep)
    if len(set(keep)) != len(keep) or any(k < 0 or k >= len(dims) for k in keep):
        raise InvalidFactorIndex(f"invalid factor indices {keep} for {len(dims)} factors")
    return dims, keep


def partial_trace(rho: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Reduce an operator on the tensor product ``dims`` to the factors in ``keep``.

    Kept factors stay in their original relative order.
    """
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionMismatch(f"expected a square operator, got shape {rho.shape}")
    dims, keep = _check_layout(dims, keep, rho.shape[0])
    n = len(dims)
    traced = [i for i in range(n) if i not in keep]
    t = rho.reshape(dims + dims)
    # bring kept row/col axes forward, traced ones to the back
    perm = keep + traced + [n + k for k in keep] + [n + i for i in traced]
    t = t.transpose(perm)
    dk = prod(dims[k] for k in keep)
    dt = prod(dims[i] for i in traced)
    t = t.reshape(dk, dt, dk, dt)
    return np.einsum("ajbj->ab", t)


def reduced_amplitudes(psi: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Reshape pure state(s) to (kept, traced) matrices M with rho_kept = M M^dagger."""
    psi = np.asarray(psi)
    stacked = psi.ndim == 2
    states = psi if stacked else psi[None, :]
    dims, keep = _check_layout(dims, keep, states.shape[1])
    traced = [i for i in range(len(dims)) if i not in keep]
    dk = prod(dims[k] for k in keep)
    m = states.reshape([states.shape[0]] + dims)
    m = m.transpose([0] + [1 + k for k in keep] + [1 + i for i in traced]).reshape(states.shape[0], dk, -1)
    return m if stacked else m[0]


def partial_trace_pure(psi: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Reduced density matrix of |psi><psi| (or a stack of states) without forming the full projector."""
    m = reduced_amplitudes(psi, dims, keep)
    return m @ np.swapaxes(m.conj(), -1, -2)
