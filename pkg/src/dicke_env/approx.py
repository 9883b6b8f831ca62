"""Statistical approximation of the configuration sums.

Configurations with the same number k of excited environment atoms are
grouped into A+1 narrow peaks of Rabi frequency. The binomial peak sum is
then replaced by a train of Gaussians whose complex width grows in time,
giving closed-form collapse and revival times.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from math import comb

import numpy as np
from scipy.ndimage import maximum_filter1d

from .env_dynamics import ConcurrenceTrace, InitKind, Method
from .errors import InvalidRegime, RegimeWarning

NARROW_PEAK_FRACTION = 0.2
GAUSSIAN_CUTOFF_SIGMAS = 6.0


@dataclass(frozen=True)
class EpsilonStats:
    eps_mean: float
    eps_std: float
    eps2_mean: float
    eps2_std: float


def epsilon_stats(g_tilde: float, delta_mean: float, delta_std: float) -> EpsilonStats:
    """Leading-order moments of eps = g_tilde/Delta and eps^2 for Delta ~ N(mean, std)."""
    if delta_mean <= 0 or delta_std < 0:
        raise InvalidRegime("need delta_mean > 0 and delta_std >= 0")
    if delta_mean < 5 * delta_std:
        raise InvalidRegime("moment expansion needs delta_mean >= 5 delta_std")
    r = delta_std / delta_mean
    q = g_tilde / delta_mean
    return EpsilonStats(
        eps_mean=q * (1 + r**2),
        eps_std=g_tilde * delta_std / delta_mean**2,
        eps2_mean=q**2 * (1 + 3 * r**2),
        eps2_std=2 * g_tilde**2 * delta_std / delta_mean**3,
    )


@dataclass(frozen=True)
class PeakDecomposition:
    """Per-peak quantities for k = 0..A excited environment atoms.

    ``separation[k]`` is the gap between peaks k and k+1 (length A).
    """

    A: int
    k: np.ndarray
    weights: np.ndarray
    omega: np.ndarray
    width: np.ndarray
    separation: np.ndarray
    eps_dot_s_mean: np.ndarray
    eps2_dot_s_std: np.ndarray


def peak_decomposition(
    g_tilde: float, delta_mean: float, delta_std: float, A: int, g: float = 1.0
) -> PeakDecomposition:
    if A < 1:
        raise ValueError("peak decomposition needs at least one environment atom")
    stats = epsilon_stats(g_tilde, delta_mean, delta_std)
    k = np.arange(A + 1)
    u = k - A / 2
    q = g_tilde**2 / delta_mean**2
    c = g_tilde**2 / (4 * g**2)
    weights = np.array([comb(A, int(i)) for i in k], dtype=float) / 2.0**A
    omega = np.sqrt(2) * g * (1 + q * u * (1 + c * u))
    kk = k[:-1]
    separation = np.sqrt(2) * g * (q + g_tilde**4 / (4 * g**2 * delta_mean**2) * (2 * kk - A + 1))
    spread = np.sqrt(k * (A - k) / (A - 1)) if A > 1 else np.zeros(A + 1)
    eps2_std_k = stats.eps2_std * spread
    # bracket kept as printed, including the bare 1 + (k - A/2); only its magnitude is used
    width = np.abs(np.sqrt(2) * g * (1 + u + c * u**2)) * eps2_std_k
    return PeakDecomposition(
        A=A,
        k=k,
        weights=weights,
        omega=omega,
        width=width,
        separation=separation,
        eps_dot_s_mean=u * stats.eps_mean,
        eps2_dot_s_std=eps2_std_k,
    )


def _sign(init: InitKind) -> float:
    # sin^2 x = (1 - cos 2x)/2 for ground-photon, cos^2 x = (1 + cos 2x)/2 otherwise
    return -1.0 if InitKind.parse(init) is InitKind.GROUND_PHOTON else 1.0


def concurrence_binomial(peaks: PeakDecomposition, init: InitKind, gt, g: float = 1.0) -> np.ndarray:
    """1/2 [1 -+ Re sum_k w_k exp(2 i Omega_k t)] over the A+1 peaks."""
    t = np.atleast_1d(np.asarray(gt, dtype=float)) / g
    osc = np.exp(2j * np.outer(t, peaks.omega)) @ peaks.weights
    return 0.5 * (1.0 + _sign(init) * osc.real)


def narrow_peak_ok(delta_mean: float, delta_std: float, A: int) -> bool:
    return delta_std <= NARROW_PEAK_FRACTION * delta_mean / np.sqrt(A)


def gaussian_width_sq(g_tilde: float, delta_mean: float, A: int, gt, g: float = 1.0) -> np.ndarray:
    """Complex squared width, in units of (gt)^2; its imaginary part grows linearly in gt."""
    gt = np.asarray(gt, dtype=float)
    return (delta_mean / g_tilde) ** 4 / (2 * A) - 1j * gt * np.sqrt(2) * (delta_mean / g) ** 2 / 8


def concurrence_gaussian(
    g_tilde: float,
    delta_mean: float,
    A: int,
    init: InitKind,
    gt_grid,
    delta_std: float = 0.0,
    g: float = 1.0,
) -> ConcurrenceTrace:
    """Gaussian-train approximation of the configuration sum.

    Each revival k is a Gaussian centred at pi k (Delta/g_tilde)^2 / sqrt(2)
    with the complex width of ``gaussian_width_sq``; the real part is taken
    after the complex sum. For odd A the peak offsets k - A/2 are half
    integers, which gives revival k the extra sign (-1)^k.
    """
    if A < 1:
        raise ValueError("Gaussian approximation needs at least one environment atom")
    init = InitKind.parse(init)
    if not narrow_peak_ok(delta_mean, delta_std, A):
        warnings.warn("narrow-peak condition std << mean/sqrt(A) is violated", RegimeWarning, stacklevel=2)
    gt = np.asarray(gt_grid, dtype=float)
    sig2 = gaussian_width_sq(g_tilde, delta_mean, A, gt, g)
    sig = np.sqrt(sig2)
    period = np.pi * (delta_mean / g_tilde) ** 2 / np.sqrt(2)
    reach = GAUSSIAN_CUTOFF_SIGMAS * np.max(np.abs(sig)) if gt.size else 0.0
    lo = int(np.floor((gt.min() - reach) / period)) if gt.size else 0
    hi = int(np.ceil((gt.max() + reach) / period)) if gt.size else 0
    train = np.zeros(gt.shape, dtype=complex)
    for k in range(lo, hi + 1):
        train += (-1.0) ** (k * A) * np.exp(-((gt - k * period) ** 2) / (2 * sig2))
    pref = (delta_mean / g_tilde) ** 2 / (2 * np.sqrt(2 * A) * sig)
    values = 0.5 + _sign(init) * np.real(pref * np.exp(2j * np.sqrt(2) * gt) * train)
    meta = {
        "A": A,
        "g": g,
        "g_tilde": g_tilde,
        "delta_mean": delta_mean,
        "delta_std": delta_std,
        "init": init.value,
        "k_range": (lo, hi),
    }
    return ConcurrenceTrace(gt, values, Method.GAUSSIAN.value, meta)


def collapse_revival_times(g_tilde: float, delta_mean: float, A: int, k_max: int = 1) -> tuple[float, np.ndarray]:
    """(gt_c, [gt_R for k = 1..k_max]) from the Gaussian-train widths and centres."""
    if A < 1:
        raise ValueError("collapse needs at least one environment atom")
    ratio2 = (delta_mean / g_tilde) ** 2
    gt_c = ratio2 / np.sqrt(A)
    gt_r = np.pi * np.arange(1, k_max + 1) * ratio2 / np.sqrt(2)
    return float(gt_c), gt_r


def physical_feasibility(
    g_hz: float, delta_mean_hz: float, g_tilde_hz: float | None = None, A: int = 7, k_max: int = 1
) -> dict:
    """Collapse and revival times in seconds for couplings given as g/2pi in Hz."""
    if g_tilde_hz is None:
        g_tilde_hz = g_hz
    if min(g_hz, delta_mean_hz, g_tilde_hz) <= 0:
        raise ValueError("frequencies must be positive")
    gt_c, gt_r = collapse_revival_times(g_tilde_hz, delta_mean_hz, A, k_max)
    to_seconds = 1.0 / (2 * np.pi * g_hz)
    return {
        "gt_c": gt_c,
        "gt_R": gt_r,
        "t_c_s": gt_c * to_seconds,
        "t_R_s": gt_r * to_seconds,
    }


def envelope(values, gt, g: float = 1.0) -> np.ndarray:
    """Upper envelope: running max over one fast period pi/(sqrt(2) g) of gt."""
    gt = np.asarray(gt, dtype=float)
    step = gt[1] - gt[0]
    size = max(1, int(round(np.pi / (np.sqrt(2) * g) / step)))
    return maximum_filter1d(np.asarray(values, dtype=float), size=size, mode="nearest")


def lower_envelope(values, gt, g: float = 1.0) -> np.ndarray:
    return -envelope(-np.asarray(values, dtype=float), gt, g)


def envelope_peak(values, gt, lo: float, hi: float, g: float = 1.0) -> tuple[float, float]:
    """(gt, height) of the upper-envelope maximum inside [lo, hi]."""
    gt = np.asarray(gt, dtype=float)
    env = envelope(values, gt, g)
    mask = (gt >= lo) & (gt <= hi)
    if not mask.any():
        raise ValueError("window contains no grid points")
    i = np.flatnonzero(mask)[np.argmax(env[mask])]
    return float(gt[i]), float(env[i])


def first_entry_time(values, gt, lo: float = 0.45, hi: float = 0.55, g: float = 1.0) -> float:
    """First gt at which both envelopes lie inside [lo, hi]; inf if never."""
    gt = np.asarray(gt, dtype=float)
    up, down = envelope(values, gt, g), lower_envelope(values, gt, g)
    inside = (up <= hi) & (down >= lo)
    return float(gt[np.argmax(inside)]) if inside.any() else float("inf")


def envelope_centroid(values, gt, lo: float, hi: float, baseline: float = 0.5, g: float = 1.0) -> float:
    """Centre of mass of the upper-envelope excess over ``baseline`` inside [lo, hi].

    Robust to a revival that is split into several comparable bumps, where
    the argmax would jump between them.
    """
    gt = np.asarray(gt, dtype=float)
    env = envelope(values, gt, g)
    mask = (gt >= lo) & (gt <= hi)
    w = np.clip(env[mask] - baseline, 0.0, None)
    if not w.any():
        return float("nan")
    return float(np.sum(w * gt[mask]) / np.sum(w))
