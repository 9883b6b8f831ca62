"""Concurrence dynamics of the resonant pair in the presence of the environment.

The environment starts in the equal superposition of all 2^A spin
configurations. In the effective model each configuration evolves
independently, so the reduced atomic state is a configuration average.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .concurrence import PROJ_00, PROJ_PSI_PLUS, concurrence_from_amplitudes
from .env_model import (
    EnvConfiguration,
    EnvironmentSpec,
    all_spin_vectors,
    configuration,
    effective_hamiltonian,
    full_hamiltonian,
    lie_rotation,
)
from .errors import DimensionGuardExceeded, TooManyConfigurations
from .linalg import HermitianPropagator, reduced_amplitudes
from .quantum_core import ATOM_A, ATOM_B, EXCITED, SystemLayout, excitation_labels, qubit

MAX_ENUMERATED_A = 24
MAX_FULL_A = 8
MAX_EFFECTIVE_A = 10
# configurations per vectorised chunk in the analytic sums
CONFIG_CHUNK = 1 << 14


class InitKind(str, Enum):
    GROUND_PHOTON = "ground-photon"
    SYMMETRIC_VACUUM = "symmetric-vacuum"

    @classmethod
    def parse(cls, value) -> "InitKind":
        if isinstance(value, cls):
            return value
        aliases = {
            "ground_atoms_one_photon": cls.GROUND_PHOTON,
            "ground_photon": cls.GROUND_PHOTON,
            "symmetric_atoms_vacuum": cls.SYMMETRIC_VACUUM,
            "symmetric_vacuum": cls.SYMMETRIC_VACUUM,
        }
        return aliases.get(value) or cls(value)


class Method(str, Enum):
    EXACT_FULL = "exact_full"
    EFFECTIVE = "effective"
    ANALYTIC_SUM = "analytic_sum"
    GAUSSIAN = "gaussian"


@dataclass
class ConcurrenceTrace:
    gt: np.ndarray
    values: np.ndarray
    method: str
    metadata: dict = field(default_factory=dict)


def worker_count() -> int:
    raw = os.environ.get("DICKE_ENV_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return min(4, os.cpu_count() or 1)


def spec_metadata(spec: EnvironmentSpec, g: float, init: InitKind) -> dict:
    return {
        "A": spec.A,
        "g": g,
        "g_tilde": spec.g_tilde,
        "delta_mean": spec.delta_mean,
        "delta_std": spec.delta_std,
        "seed": spec.seed,
        "gap_factor": spec.gap_factor,
        "init": init.value,
        "deltas": list(spec.deltas),
    }


# ---------------------------------------------------------------- states

def env_initial_state(spec: EnvironmentSpec | int) -> np.ndarray:
    """Equal-weight superposition of all 2^A environment basis states."""
    A = spec if isinstance(spec, int) else spec.A
    return np.full(2**A, 2.0 ** (-A / 2), dtype=complex)


def resonant_initial_state(layout: SystemLayout, init: InitKind) -> np.ndarray:
    """State of (atom a, atom b, field) for either initial condition."""
    init = InitKind.parse(init)
    ground, excited = qubit(False), qubit(True)
    fock = np.zeros(layout.n_max + 1, dtype=complex)
    if init is InitKind.GROUND_PHOTON:
        fock[1] = 1.0
        return np.kron(np.kron(ground, ground), fock)
    fock[0] = 1.0
    pair = (np.kron(ground, excited) + np.kron(excited, ground)) / np.sqrt(2)
    return np.kron(pair, fock)


def initial_state(spec: EnvironmentSpec, layout: SystemLayout, init: InitKind) -> np.ndarray:
    return np.kron(resonant_initial_state(layout, init), env_initial_state(spec))


# ---------------------------------------------------------------- configurations

def enumerate_configs(spec: EnvironmentSpec, g: float = 1.0) -> list[EnvConfiguration]:
    if spec.A > MAX_ENUMERATED_A:
        raise TooManyConfigurations(f"A={spec.A} exceeds the enumeration guard {MAX_ENUMERATED_A}")
    return [configuration(spec, s, g) for s in all_spin_vectors(spec.A)]


def _config_values(spec: EnvironmentSpec, g: float, signs: np.ndarray):
    eps = spec.epsilons
    y_half = signs @ (spec.g_tilde * eps)
    lam = 1.0 + signs @ (eps**2)
    omega = np.sqrt(y_half**2 + 2.0 * g**2 * lam**2)
    return y_half, lam, omega


def config_chunks(spec: EnvironmentSpec, g: float = 1.0, samples: int | None = None, seed: int | None = 0):
    """Yield (y_half, lam, omega1) arrays over all configurations, chunk by chunk.

    Order is binary counting with atom 1 most significant, matching
    ``enumerate_configs``. With ``samples`` the configurations are drawn
    uniformly at random instead.
    """
    A = spec.A
    if samples is not None:
        rng = np.random.default_rng(seed)
        for start in range(0, samples, CONFIG_CHUNK):
            n = min(CONFIG_CHUNK, samples - start)
            signs = rng.integers(0, 2, size=(n, A)) - 0.5
            yield _config_values(spec, g, signs)
        return
    if A > MAX_ENUMERATED_A:
        raise TooManyConfigurations(
            f"A={A} exceeds the enumeration guard {MAX_ENUMERATED_A}; pass samples= for Monte Carlo"
        )
    total = 1 << A
    shifts = np.arange(A - 1, -1, -1)
    for start in range(0, total, CONFIG_CHUNK):
        idx = np.arange(start, min(total, start + CONFIG_CHUNK))
        signs = ((idx[:, None] >> shifts) & 1) - 0.5
        yield _config_values(spec, g, signs)


# ---------------------------------------------------------------- analytic sums

def psi_plus_weight(
    spec: EnvironmentSpec,
    g: float,
    init: InitKind,
    gt,
    exact_amplitudes: bool = False,
    samples: int | None = None,
    seed: int | None = 0,
) -> np.ndarray:
    """Configuration average of the |psi+> population at each gt.

    The default uses sin^2(Omega t) / cos^2(Omega t), i.e. the population
    swap is taken as complete. ``exact_amplitudes`` keeps the factor
    2 g^2 lam^2 / Omega^2 that the effective evolution actually produces.
    """
    init = InitKind.parse(init)
    t = np.atleast_1d(np.asarray(gt, dtype=float)) / g
    total = np.zeros(t.size)
    count = 0
    for y_half, lam, omega in config_chunks(spec, g, samples, seed):
        s2 = np.sin(np.outer(omega, t)) ** 2
        if exact_amplitudes:
            s2 = s2 * (2.0 * g**2 * lam**2 / omega**2)[:, None]
        total += s2.sum(axis=0) if init is InitKind.GROUND_PHOTON else (1.0 - s2).sum(axis=0)
        count += omega.size
    return total / count


def reduced_density_analytic(spec: EnvironmentSpec, g: float, init: InitKind, gt: float) -> np.ndarray:
    """Mixture w |psi+><psi+| + (1 - w) |00><00| of the configuration-averaged state."""
    w = float(psi_plus_weight(spec, g, init, gt)[0])
    return w * PROJ_PSI_PLUS + (1.0 - w) * PROJ_00


def concurrence_sum(spec: EnvironmentSpec, g: float, init: InitKind, gt, **kwargs) -> np.ndarray:
    """Concurrence from the configuration sum.

    For a mixture of |psi+> and |00> the concurrence equals the |psi+>
    weight, so this is the average of sin^2 (ground-photon) or cos^2
    (symmetric-vacuum) over all configurations.
    """
    return psi_plus_weight(spec, g, init, gt, **kwargs)


def concurrence_trace_sum(spec: EnvironmentSpec, g: float, init: InitKind, gt_grid, **kwargs) -> ConcurrenceTrace:
    init = InitKind.parse(init)
    gt = np.asarray(gt_grid, dtype=float)
    meta = spec_metadata(spec, g, init)
    meta.update({k: v for k, v in kwargs.items() if v is not None})
    return ConcurrenceTrace(gt, concurrence_sum(spec, g, init, gt, **kwargs), Method.ANALYTIC_SUM.value, meta)


# ---------------------------------------------------------------- state-vector evolution

def _env_index(layout: SystemLayout) -> np.ndarray:
    grids = np.meshgrid(*[np.arange(d) for d in layout.dims], indexing="ij")
    idx = np.zeros(layout.dims, dtype=np.int64)
    for j in range(layout.num_env):
        idx = 2 * idx + (grids[layout.env_site(j)] == EXCITED)
    return idx.reshape(-1)


def _propagator(spec: EnvironmentSpec, g: float, method: Method, n_max: int | None, keep_dipolar: bool):
    A = spec.A
    if method is Method.EXACT_FULL:
        if A > MAX_FULL_A:
            raise DimensionGuardExceeded(f"exact_full limited to A <= {MAX_FULL_A}, got A={A}")
        layout = SystemLayout(n_max=A + 1 if n_max is None else n_max, num_env=A)
        h = full_hamiltonian(spec, g, layout)
        labels = np.round(2 * excitation_labels(layout)).astype(np.int64)
    elif method is Method.EFFECTIVE:
        if A > MAX_EFFECTIVE_A:
            raise DimensionGuardExceeded(f"effective evolution limited to A <= {MAX_EFFECTIVE_A}, got A={A}")
        layout = SystemLayout(n_max=(A + 1 if keep_dipolar else 1) if n_max is None else n_max, num_env=A)
        h = effective_hamiltonian(spec, g, layout, keep_dipolar=keep_dipolar)
        labels = np.round(2 * excitation_labels(layout)).astype(np.int64) + 4 * A + 4
        if not keep_dipolar:
            # every environment spin is conserved: block by configuration as well
            labels = labels * (1 << A) + _env_index(layout)
    else:
        raise ValueError(f"{method} is not a state-vector method")
    return layout, HermitianPropagator(h, labels=labels)


def evolve_reduced(
    spec: EnvironmentSpec,
    g: float,
    init: InitKind,
    gt_grid,
    method: Method | str = Method.EXACT_FULL,
    n_max: int | None = None,
    keep_dipolar: bool = False,
    lab_frame: bool = False,
    chunk: int = 128,
) -> tuple[np.ndarray, np.ndarray]:
    """(rho_ab stack, concurrence) at each gt from state-vector evolution.

    For the effective method, ``lab_frame`` maps the evolution back through
    the Lie rotation, psi(t) = V^dagger exp(-i H_eff t) V psi(0). Without it
    the effective states differ from the full ones by O(eps) admixtures of
    virtually excited environment atoms.
    """
    method = Method(method)
    init = InitKind.parse(init)
    if lab_frame and method is Method.EFFECTIVE and n_max is None:
        n_max = spec.A + 1
    layout, prop = _propagator(spec, g, method, n_max, keep_dipolar)
    psi0 = initial_state(spec, layout, init)
    rotation = None
    if lab_frame and method is Method.EFFECTIVE:
        rotation = lie_rotation(spec, layout)
        psi0 = rotation @ psi0
    t = np.atleast_1d(np.asarray(gt_grid, dtype=float)) / g
    keep = [ATOM_A, ATOM_B]

    def run(sl):
        states = prop.evolve(psi0, t[sl])
        if rotation is not None:
            states = states @ rotation.conj()
        m = reduced_amplitudes(states, layout.dims, keep)
        return m @ np.swapaxes(m.conj(), -1, -2), concurrence_from_amplitudes(m)

    slices = [slice(i, i + chunk) for i in range(0, t.size, chunk)]
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        parts = list(pool.map(run, slices))
    rhos = np.concatenate([p[0] for p in parts]) if parts else np.zeros((0, 4, 4), complex)
    conc = np.concatenate([p[1] for p in parts]) if parts else np.zeros(0)
    return rhos, conc


def concurrence_trace_exact(
    spec: EnvironmentSpec,
    g: float,
    init: InitKind,
    gt_grid,
    method: Method | str = Method.EXACT_FULL,
    n_max: int | None = None,
) -> ConcurrenceTrace:
    method = Method(method)
    init = InitKind.parse(init)
    _, conc = evolve_reduced(spec, g, init, gt_grid, method, n_max)
    meta = spec_metadata(spec, g, init)
    meta["n_max"] = n_max
    return ConcurrenceTrace(np.asarray(gt_grid, dtype=float), conc, method.value, meta)
