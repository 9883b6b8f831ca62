"""Two resonant atoms and one cavity mode without environment.

Both atoms start in the ground state and the field in the Fock state |n>.
Times are dimensionless (gt).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .concurrence import PROJ_00, PROJ_11, PROJ_PSI_PLUS, concurrence_from_amplitudes
from .errors import CutoffTooSmall, InvalidFactorIndex
from .linalg import HermitianPropagator, partial_trace_pure, reduced_amplitudes
from .quantum_core import (
    ATOM_A,
    ATOM_B,
    SystemLayout,
    basis_state,
    excitation_labels,
    field_sparse,
    spin_sparse,
)


@dataclass(frozen=True)
class DickeParams:
    n: int
    g: float = 1.0

    def __post_init__(self):
        if self.g <= 0:
            raise ValueError("coupling g must be positive")
        if int(self.n) != self.n or self.n < 0:
            raise ValueError("photon number n must be a non-negative integer")


def tc_hamiltonian(params: DickeParams, layout: SystemLayout) -> np.ndarray:
    """g [a (s+_a + s+_b) + a^dagger (s-_a + s-_b)] on the truncated space."""
    if layout.num_env != 0:
        raise InvalidFactorIndex("Tavis-Cummings layout must not contain environment atoms")
    if layout.n_max < params.n:
        raise CutoffTooSmall(f"cutoff {layout.n_max} below initial photon number {params.n}")
    a = field_sparse(layout, "annihilate")
    ad = field_sparse(layout, "create")
    h = 0
    for site in (ATOM_A, ATOM_B):
        h = h + a @ spin_sparse(layout, "plus", site) + ad @ spin_sparse(layout, "minus", site)
    return (params.g * h).toarray()


def _cn_sn(n: int, gt):
    theta = np.sqrt(2.0 * (2 * n - 1)) * np.asarray(gt, dtype=float)
    return np.cos(theta), np.sin(theta)


def rho_ab_weights(n: int, gt):
    """Weights of |00><00|, |psi+><psi+| and |11><11| in the reduced atomic state."""
    gt = np.asarray(gt, dtype=float)
    if n == 0:
        one = np.ones_like(gt)
        return one, 0.0 * one, 0.0 * one
    c, s = _cn_sn(n, gt)
    d = 2.0 * n - 1.0
    w00 = (n * c + n - 1.0) ** 2 / d**2
    wpsi = n * s**2 / d
    w11 = n * (n - 1.0) * (1.0 - c) ** 2 / d**2
    return w00, wpsi, w11


def analytic_rho_ab(params: DickeParams, gt: float) -> np.ndarray:
    w00, wpsi, w11 = rho_ab_weights(params.n, gt)
    return w00 * PROJ_00 + wpsi * PROJ_PSI_PLUS + w11 * PROJ_11


def analytic_concurrence(params: DickeParams, gt):
    """Closed-form concurrence, clamped at zero. Accepts scalar or array gt."""
    n = params.n
    gt = np.asarray(gt, dtype=float)
    if n == 0:
        out = np.zeros_like(gt)
    else:
        c, s = _cn_sn(n, gt)
        d = 2.0 * n - 1.0
        out = n * s**2 / d - 2.0 * np.sqrt(n * (n - 1.0)) / d**2 * np.abs(n * c + n - 1.0) * np.abs(1.0 - c)
        out = np.maximum(out, 0.0)
    return float(out) if out.ndim == 0 else out


def max_concurrence(n: int, samples: int = 4001) -> tuple[float, float]:
    """(max over gt of the concurrence, first gt attaining it)."""
    if n == 0:
        return 0.0, 0.0
    params = DickeParams(n)
    omega = np.sqrt(2.0 * (2 * n - 1))
    period = 2.0 * np.pi / omega
    grid = np.linspace(0.0, period, samples)
    vals = analytic_concurrence(params, grid)
    i = int(np.argmax(vals))
    h = grid[1] - grid[0]
    res = minimize_scalar(
        lambda t: -analytic_concurrence(params, t),
        bounds=(max(grid[i] - h, 0.0), grid[i] + h),
        method="bounded",
        options={"xatol": 1e-13},
    )
    if -res.fun >= vals[i]:
        return float(-res.fun), float(res.x)
    return float(vals[i]), float(grid[i])


def concurrence_heatmap(n_values, gt_grid) -> np.ndarray:
    """Rows (n, gt, C) in n-major order."""
    n_values = [int(n) for n in n_values]
    gt_grid = np.asarray(gt_grid, dtype=float)
    if not n_values:
        raise ValueError("n range must be non-empty")
    if gt_grid.size > 1 and np.any(np.diff(gt_grid) <= 0):
        raise ValueError("gt grid must be strictly increasing")
    rows = []
    for n in n_values:
        c = analytic_concurrence(DickeParams(n), gt_grid)
        rows.append(np.column_stack([np.full(gt_grid.size, n, dtype=float), gt_grid, c]))
    return np.vstack(rows)


def exact_states(params: DickeParams, gt_grid, n_max: int | None = None) -> tuple[SystemLayout, np.ndarray]:
    """Full state at each gt, evolved from |0,0,n> under the Tavis-Cummings Hamiltonian."""
    layout = SystemLayout(n_max=params.n if n_max is None else n_max)
    h = tc_hamiltonian(params, layout)
    psi0 = basis_state(layout, 0, 0, params.n)
    prop = HermitianPropagator(h, labels=np.round(2 * excitation_labels(layout)).astype(int))
    # g sets the time unit: gt / g is the physical time passed to exp(-iHt)
    states = prop.evolve(psi0, np.atleast_1d(np.asarray(gt_grid, dtype=float)) / params.g)
    return layout, states


def exact_reduced_states(params: DickeParams, gt_grid, n_max: int | None = None) -> np.ndarray:
    layout, states = exact_states(params, gt_grid, n_max)
    return partial_trace_pure(states, layout.dims, [ATOM_A, ATOM_B])


def exact_concurrence(params: DickeParams, gt_grid, n_max: int | None = None) -> np.ndarray:
    """Concurrence of the exactly evolved, partial-traced atomic state."""
    layout, states = exact_states(params, gt_grid, n_max)
    return concurrence_from_amplitudes(reduced_amplitudes(states, layout.dims, [ATOM_A, ATOM_B]))
