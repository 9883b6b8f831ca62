"""Two resonant atoms plus A dispersively coupled environment atoms.

Frequencies are in the same units as the resonant coupling g (g = 1 by
convention). Detunings are drawn positive and far above the couplings, so
eps_j = g_tilde / Delta_j is small.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from itertools import product

import numpy as np
import scipy.sparse as sp

from .errors import ConstraintUnsatisfiable, CutoffTooSmall, DimensionMismatch, InvalidRegime, InvalidSector
from .linalg import eig_hermitian
from .quantum_core import ATOM_A, ATOM_B, SystemLayout, field_sparse, spin_sparse

log = logging.getLogger(__name__)

EPS_HARD_LIMIT = 0.3
EPS_WARN = 0.1
DEFAULT_GAP_FACTOR = 5.0


@dataclass(frozen=True)
class EnvironmentSpec:
    """Environment atoms: common coupling ``g_tilde`` and one detuning per atom.

    ``gap_factor`` is the minimum pairwise detuning separation in units of g
    (g = 1). The draw provenance fields are informational.
    """

    g_tilde: float
    deltas: tuple[float, ...] = ()
    gap_factor: float = DEFAULT_GAP_FACTOR
    seed: int | None = None
    delta_mean: float | None = None
    delta_std: float | None = None
    epsilons: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        deltas = tuple(float(d) for d in self.deltas)
        object.__setattr__(self, "deltas", deltas)
        d = np.asarray(deltas, dtype=float)
        if np.any(d <= 0):
            raise InvalidRegime("detunings must be positive")
        eps = self.g_tilde / d if d.size else np.zeros(0)
        eps.setflags(write=False)
        object.__setattr__(self, "epsilons", eps)
        problem = constraint_violation(d, self.g_tilde, self.gap_factor)
        if problem:
            raise InvalidRegime(problem)
        if eps.size and eps.max() > EPS_WARN:
            warnings.warn(f"eps_max = {eps.max():.3g} > {EPS_WARN}: dispersive approximation is marginal", stacklevel=2)

    @property
    def A(self) -> int:
        return len(self.deltas)


def constraint_violation(deltas: np.ndarray, g_tilde: float, gap_factor: float) -> str | None:
    """Reason the detunings break the environment invariants, or None."""
    if deltas.size == 0:
        return None
    if np.any(deltas <= 0):
        return "detunings must be positive"
    eps = g_tilde / deltas
    if eps.max() > EPS_HARD_LIMIT:
        return f"eps_max = {eps.max():.3g} exceeds {EPS_HARD_LIMIT}"
    if deltas.size > 1 and gap_factor > 0:
        s = np.sort(deltas)
        gap = np.min(np.diff(s))
        if gap < gap_factor:
            return f"minimum detuning gap {gap:.3g} below {gap_factor:g} g"
    return None


def draw_detunings(
    delta_mean: float,
    delta_std: float,
    A: int,
    seed: int | None = None,
    g_tilde: float = 1.0,
    gap_factor: float = DEFAULT_GAP_FACTOR,
    max_retries: int = 10_000,
) -> np.ndarray:
    """A Gaussian detunings, redrawn until positivity, eps and gap constraints hold."""
    if delta_mean <= 0 or delta_std < 0:
        raise InvalidRegime("need delta_mean > 0 and delta_std >= 0")
    if delta_mean < 5 * delta_std:
        raise InvalidRegime("need delta_mean >= 5 delta_std")
    rng = np.random.default_rng(seed)
    for attempt in range(max_retries):
        d = delta_mean + delta_std * rng.standard_normal(A)
        if constraint_violation(d, g_tilde, gap_factor) is None:
            log.debug("detunings accepted after %d draw(s)", attempt + 1)
            return d
        if delta_std == 0:
            break
    raise ConstraintUnsatisfiable(
        f"no admissible detunings for A={A}, mean={delta_mean}, std={delta_std}, gap={gap_factor} g"
    )


def make_environment(
    A: int,
    g_tilde: float,
    delta_mean: float,
    delta_std: float,
    seed: int | None = None,
    gap_factor: float = DEFAULT_GAP_FACTOR,
) -> EnvironmentSpec:
    deltas = draw_detunings(delta_mean, delta_std, A, seed, g_tilde, gap_factor) if A else np.zeros(0)
    return EnvironmentSpec(
        g_tilde=g_tilde,
        deltas=tuple(deltas),
        gap_factor=gap_factor,
        seed=seed,
        delta_mean=delta_mean,
        delta_std=delta_std,
    )


@dataclass(frozen=True)
class EnvConfiguration:
    """One fixed assignment s_j = +-1/2 of the environment spins."""

    s: tuple[float, ...]
    y_half: float
    lam: float
    omega1: float


def configuration(spec: EnvironmentSpec, s, g: float = 1.0) -> EnvConfiguration:
    s = np.asarray(s, dtype=float)
    if s.shape != (spec.A,) or not np.all(np.isin(s, (-0.5, 0.5))):
        raise DimensionMismatch("configuration needs one +-1/2 entry per environment atom")
    eps = spec.epsilons
    y_half = float(np.sum(spec.g_tilde * eps * s))
    lam = float(1.0 + np.sum(eps**2 * s))
    omega1 = float(np.sqrt(y_half**2 + 2.0 * g**2 * lam**2))
    return EnvConfiguration(tuple(s), y_half, lam, omega1)


def _check_layout(spec: EnvironmentSpec, layout: SystemLayout) -> None:
    if layout.num_env != spec.A:
        raise DimensionMismatch(f"layout has {layout.num_env} environment atoms, spec has {spec.A}")
    if layout.n_max < 1:
        raise CutoffTooSmall("photon cutoff must allow at least one photon")


def _resonant_exchange(layout: SystemLayout) -> sp.csr_matrix:
    a = field_sparse(layout, "annihilate")
    ad = field_sparse(layout, "create")
    out = 0
    for site in (ATOM_A, ATOM_B):
        out = out + a @ spin_sparse(layout, "plus", site) + ad @ spin_sparse(layout, "minus", site)
    return out


def full_hamiltonian(spec: EnvironmentSpec, g: float, layout: SystemLayout) -> np.ndarray:
    """Interaction-picture Hamiltonian of all A+2 atoms and the mode (rotating wave)."""
    _check_layout(spec, layout)
    a = field_sparse(layout, "annihilate")
    ad = field_sparse(layout, "create")
    h = g * _resonant_exchange(layout)
    for j, delta in enumerate(spec.deltas):
        site = layout.env_site(j)
        h = h + delta * spin_sparse(layout, "z", site)
        h = h + spec.g_tilde * (a @ spin_sparse(layout, "plus", site) + ad @ spin_sparse(layout, "minus", site))
    return sp.csr_matrix(h).toarray()


def effective_hamiltonian(
    spec: EnvironmentSpec, g: float, layout: SystemLayout, keep_dipolar: bool = False
) -> np.ndarray:
    """Dispersive effective Hamiltonian, correct to second order in eps.

    With ``keep_dipolar`` the bare detunings and the environment flip-flop
    terms are included. Without it both are dropped: the flip-flops average
    out for well separated detunings, and sum_j Delta_j s_zj then commutes
    with everything and only adds a phase per environment configuration.
    """
    _check_layout(spec, layout)
    n_op = field_sparse(layout, "number")
    one = sp.identity(layout.dim, dtype=complex, format="csr")
    eps = spec.epsilons
    gt = spec.g_tilde
    stark = 0
    lam = one
    for j in range(spec.A):
        sz = spin_sparse(layout, "z", layout.env_site(j))
        stark = stark + gt * eps[j] * sz
        lam = lam + eps[j] ** 2 * sz
    h = (one + 2.0 * n_op) @ stark if spec.A else 0 * one
    h = h + g * (lam @ _resonant_exchange(layout))
    if keep_dipolar:
        for j, delta in enumerate(spec.deltas):
            h = h + delta * spin_sparse(layout, "z", layout.env_site(j))
        for i in range(spec.A):
            si_m = spin_sparse(layout, "minus", layout.env_site(i))
            si_p = spin_sparse(layout, "plus", layout.env_site(i))
            for j in range(spec.A):
                sj_p = spin_sparse(layout, "plus", layout.env_site(j))
                sj_m = spin_sparse(layout, "minus", layout.env_site(j))
                h = h + 0.5 * gt * eps[j] * (si_m @ sj_p + si_p @ sj_m)
    return sp.csr_matrix(h).toarray()


def lie_generator(spec: EnvironmentSpec, layout: SystemLayout) -> np.ndarray:
    """Anti-Hermitian B = sum_j eps_j (a s+_j - a^dagger s-_j)."""
    _check_layout(spec, layout)
    a = field_sparse(layout, "annihilate")
    ad = field_sparse(layout, "create")
    b = sp.csr_matrix((layout.dim, layout.dim), dtype=complex)
    for j, eps in enumerate(spec.epsilons):
        site = layout.env_site(j)
        b = b + eps * (a @ spin_sparse(layout, "plus", site) - ad @ spin_sparse(layout, "minus", site))
    return b.toarray()


def lie_rotation(spec: EnvironmentSpec, layout: SystemLayout) -> np.ndarray:
    """V = exp(B), the unitary taking the full Hamiltonian to the effective one.

    V H V^dagger equals ``effective_hamiltonian(keep_dipolar=True)`` up to
    O(g eps) terms that are off-resonant by Delta, so they move amplitudes only
    at O(eps^2) and exp(-iHt) ~ V^dagger exp(-i H_eff t) V.
    """
    # B is anti-Hermitian: exp(B) = exp(-i K) with Hermitian K = i B
    w, v = eig_hermitian(1j * lie_generator(spec, layout))
    return (v * np.exp(-1j * w)) @ v.conj().T


def sector_hamiltonian(config: EnvConfiguration, g: float = 1.0) -> np.ndarray:
    """Effective Hamiltonian on span{|00,1>, |10,0>, |01,0>} for one configuration."""
    y, lg = config.y_half, g * config.lam
    return np.array(
        [[3 * y, lg, lg],
         [lg, y, 0.0],
         [lg, 0.0, y]],
        dtype=complex,
    )


def closed_form_u(config: EnvConfiguration, gt, g: float = 1.0, n_sector: int = 1) -> np.ndarray:
    """exp(-i H_eff t) on span{|00,1>, |10,0>, |01,0>} in closed form.

    ``gt`` may be an array; the result then has shape (len(gt), 3, 3).
    With L = sin(Omega t)/Omega, A = cos(Omega t) + i (y/2) L and
    Y = (1 + e^{-iyt/2} A)/2, where y/2 = ``config.y_half``:

        U = e^{-iyt/2} [[e^{-iyt/2} A*,        -i g lam L e^{-iyt/2}, -i g lam L e^{-iyt/2}],
                        [-i g lam L e^{-iyt/2}, Y,                     Y - 1],
                        [-i g lam L e^{-iyt/2}, Y - 1,                 Y]]
    """
    if n_sector != 1:
        raise InvalidSector("closed form is available for the one-excitation sector only")
    t = np.asarray(gt, dtype=float) / g
    y2 = config.y_half
    om = config.omega1
    L = np.sin(om * t) / om
    A = np.cos(om * t) + 1j * y2 * L
    ph = np.exp(-1j * y2 * t)
    Y = 0.5 * (1.0 + ph * A)
    off = -1j * g * config.lam * L * ph
    u = np.empty(t.shape + (3, 3), dtype=complex)
    u[..., 0, 0] = ph * A.conj()
    u[..., 0, 1] = u[..., 0, 2] = u[..., 1, 0] = u[..., 2, 0] = off
    u[..., 1, 1] = u[..., 2, 2] = Y
    u[..., 1, 2] = u[..., 2, 1] = Y - 1.0
    return ph[..., None, None] * u


def all_spin_vectors(A: int):
    """Every s in {-1/2, +1/2}^A in binary counting order (first atom most significant)."""
    return [tuple(x) for x in product((-0.5, 0.5), repeat=A)]
