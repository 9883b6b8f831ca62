"""Hilbert-space layout, atomic and field operators, and standard states.

Factor order is fixed: [atom a, atom b, field, env 1..A]. Each two-level
factor uses the basis (|1>, |0>), i.e. the excited state has index 0, so
s_z = diag(+1/2, -1/2). The field factor is indexed by photon number.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod

import numpy as np
import scipy.sparse as sp

from .errors import CutoffTooSmall, InvalidFactorIndex, UnnormalizedState

ATOM_A = 0
ATOM_B = 1
FIELD = 2

SZ = np.diag([0.5, -0.5]).astype(complex)
SPLUS = np.array([[0, 1], [0, 0]], dtype=complex)   # |1><0|
SMINUS = SPLUS.T.copy()                              # |0><1|
SIGMA_Y = np.array([[0, -1j], [1j, 0]])

EXCITED = 0
GROUND = 1


@dataclass(frozen=True)
class SystemLayout:
    n_max: int
    num_env: int = 0

    def __post_init__(self):
        if self.n_max < 0:
            raise CutoffTooSmall("photon cutoff must be non-negative")
        if self.num_env < 0:
            raise ValueError("number of environment atoms must be non-negative")

    @property
    def dims(self) -> tuple[int, ...]:
        return (2, 2, self.n_max + 1) + (2,) * self.num_env

    @property
    def dim(self) -> int:
        return prod(self.dims)

    @property
    def num_factors(self) -> int:
        return 3 + self.num_env

    def env_site(self, j: int) -> int:
        """Factor index of environment atom j (0-based)."""
        if not 0 <= j < self.num_env:
            raise InvalidFactorIndex(f"environment atom {j} out of range for A={self.num_env}")
        return 3 + j

    @property
    def atom_sites(self) -> list[int]:
        return [ATOM_A, ATOM_B] + [3 + j for j in range(self.num_env)]


def embed(layout: SystemLayout, site: int, op) -> sp.csr_matrix:
    """Sparse operator acting as ``op`` on one factor and identity elsewhere."""
    dims = layout.dims
    left = prod(dims[:site])
    right = prod(dims[site + 1:])
    out = sp.kron(sp.identity(left, dtype=complex, format="csr"), sp.csr_matrix(op), format="csr")
    return sp.kron(out, sp.identity(right, dtype=complex, format="csr"), format="csr")


def _spin(which: str) -> np.ndarray:
    try:
        return {"plus": SPLUS, "minus": SMINUS, "z": SZ}[which]
    except KeyError:
        raise ValueError(f"unknown spin operator {which!r}") from None


def _check_atom(layout: SystemLayout, site: int) -> None:
    if site not in layout.atom_sites:
        raise InvalidFactorIndex(f"factor {site} is not an atom in layout {layout.dims}")


def spin_sparse(layout: SystemLayout, which: str, site: int) -> sp.csr_matrix:
    _check_atom(layout, site)
    return embed(layout, site, _spin(which))


def spin_operator(layout: SystemLayout, which: str, site: int) -> np.ndarray:
    """s_+, s_- or s_z of the atom at factor ``site``, embedded in the full space."""
    return spin_sparse(layout, which, site).toarray()


def ladder(n_max: int, which: str) -> np.ndarray:
    a = np.diag(np.sqrt(np.arange(1, n_max + 1)), k=1).astype(complex)
    if which == "annihilate":
        return a
    if which == "create":
        return a.T.copy()
    if which == "number":
        return np.diag(np.arange(n_max + 1)).astype(complex)
    raise ValueError(f"unknown field operator {which!r}")


def field_sparse(layout: SystemLayout, which: str) -> sp.csr_matrix:
    return embed(layout, FIELD, ladder(layout.n_max, which))


def field_operator(layout: SystemLayout, which: str) -> np.ndarray:
    """Truncated a, a^dagger or a^dagger a on the full space."""
    return field_sparse(layout, which).toarray()


def excitation_labels(layout: SystemLayout) -> np.ndarray:
    """Diagonal of N = a^dagger a + sum_j s_zj, for every computational basis state."""
    grids = np.meshgrid(*[np.arange(d) for d in layout.dims], indexing="ij")
    total = grids[FIELD].astype(float)
    for site in layout.atom_sites:
        total = total + np.where(grids[site] == EXCITED, 0.5, -0.5)
    return total.reshape(-1)


def excitation_number(layout: SystemLayout) -> np.ndarray:
    return np.diag(excitation_labels(layout)).astype(complex)


def basis_state(layout: SystemLayout, a: int, b: int, n: int, env=()) -> np.ndarray:
    """Product basis vector. Atom arguments are 1 (excited) or 0 (ground), as in |1>, |0>."""
    if n > layout.n_max:
        raise CutoffTooSmall(f"photon number {n} above cutoff {layout.n_max}")
    env = tuple(env)
    if len(env) != layout.num_env:
        raise InvalidFactorIndex("one environment occupation per environment atom is required")
    idx = [1 - a, 1 - b, n] + [1 - e for e in env]
    out = np.zeros(layout.dims, dtype=complex)
    out[tuple(idx)] = 1.0
    return out.reshape(-1)


def qubit(excited: bool) -> np.ndarray:
    v = np.zeros(2, dtype=complex)
    v[EXCITED if excited else GROUND] = 1.0
    return v


def pure_density(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > 1e-8:
        raise UnnormalizedState(f"state norm {norm:.12g} differs from 1")
    return np.outer(psi, psi.conj())


def is_density_matrix(rho: np.ndarray, tol: float = 1e-10, psd_tol: float = 1e-9) -> bool:
    """Hermitian, unit trace and positive semidefinite within tolerance."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        return False
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        return False
    if abs(np.trace(rho) - 1.0) > tol:
        return False
    return bool(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0] >= -psd_tol)
