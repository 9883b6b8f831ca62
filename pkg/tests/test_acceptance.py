"""Acceptance criteria, one test each, at the stated tolerances.

Every check prints a single ``PASS``/``FAIL`` line; the lines are also
collected into a summary section at the end of the pytest run. Run this
file directly (``python tests/test_acceptance.py``) for the lines alone.
"""

from __future__ import annotations

import time
import warnings

import numpy as np
import pytest
from scipy.linalg import expm

from conftest import ACCEPTANCE_LINES
from dicke_env.approx import (
    collapse_revival_times,
    concurrence_gaussian,
    envelope_centroid,
    envelope_peak,
    first_entry_time,
    physical_feasibility,
)
from dicke_env.dicke import DickeParams, analytic_concurrence, exact_concurrence, max_concurrence
from dicke_env.env_dynamics import InitKind, Method, concurrence_sum, evolve_reduced
from dicke_env.env_model import (
    EnvironmentSpec,
    all_spin_vectors,
    closed_form_u,
    configuration,
    effective_hamiltonian,
    make_environment,
)
from dicke_env.quantum_core import SystemLayout, basis_state

C1, C2 = InitKind.GROUND_PHOTON, InitKind.SYMMETRIC_VACUUM


def reference_environment() -> EnvironmentSpec:
    # sigma = 0.3 g cannot keep seven detunings 5 g apart, so the gap rule is off here
    return make_environment(7, 1.0, 10.0, 0.3, seed=1, gap_factor=0)


def criterion_1():
    start = time.perf_counter()
    gt = np.linspace(0, 4 * np.pi, 400)
    ref = np.sin(np.sqrt(2) * gt) ** 2
    analytic = np.max(np.abs(analytic_concurrence(DickeParams(1), gt) - ref))
    exact = np.max(np.abs(exact_concurrence(DickeParams(1), gt) - ref))
    elapsed = time.perf_counter() - start
    ok = analytic == 0.0 and exact <= 1e-8 and elapsed < 5
    return ok, f"analytic dev {analytic:.1e}, exact dev {exact:.2e} (<= 1e-8), {elapsed:.2f} s"


def criterion_2():
    start = time.perf_counter()
    gt = np.linspace(0, 4 * np.pi, 200)
    worst = max(
        float(np.max(np.abs(analytic_concurrence(DickeParams(n), gt) - exact_concurrence(DickeParams(n), gt))))
        for n in range(1, 11)
    )
    elapsed = time.perf_counter() - start
    return worst <= 1e-8 and elapsed < 60, f"max dev over n=1..10: {worst:.2e} (<= 1e-8), {elapsed:.2f} s"


def criterion_3():
    maxima = np.array([max_concurrence(n)[0] for n in range(0, 51)])
    best = int(np.argmax(maxima))
    ok = best == 1 and abs(maxima[1] - 1.0) <= 1e-10
    return ok, f"argmax n = {best}, max C = {maxima[best]:.12f}, runner-up {np.sort(maxima)[-2]:.4f}"


def criterion_4():
    products = {n: n * max_concurrence(n)[0] for n in (20, 50, 100)}
    ok = all(1.8 <= v <= 2.2 for v in products.values())
    detail = ", ".join(f"n={n}: {v:.5f}" for n, v in products.items())
    return ok, f"n * max C in [1.8, 2.2]? {detail}"


def criterion_5():
    start = time.perf_counter()
    gt = np.linspace(0, 20, 201)
    devs = []
    for delta_mean in (20.0, 40.0):
        # same seed: identical standard-normal offsets, only the mean moves
        spec = make_environment(4, 1.0, delta_mean, 0.5, seed=7, gap_factor=0)
        full, _ = evolve_reduced(spec, 1.0, C1, gt, Method.EXACT_FULL)
        eff, _ = evolve_reduced(spec, 1.0, C1, gt, Method.EFFECTIVE, lab_frame=True)
        devs.append(float(np.max(np.abs(full - eff))))
    ratio = devs[0] / devs[1]
    elapsed = time.perf_counter() - start
    ok = 2.5 <= ratio <= 6 and elapsed < 300
    return ok, f"deviation {devs[0]:.3e} -> {devs[1]:.3e}, ratio {ratio:.3f} (in [2.5, 6]), {elapsed:.2f} s"


def criterion_6():
    start = time.perf_counter()
    spec = reference_environment()
    layout = SystemLayout(1, 7)
    h = effective_hamiltonian(spec, 1.0, layout)
    rng = np.random.default_rng(6)
    configs = all_spin_vectors(7)
    worst = 0.0
    for _ in range(100):
        s = configs[int(rng.integers(len(configs)))]
        gt = float(rng.uniform(0, 500))
        env = tuple(1 if x > 0 else 0 for x in s)
        idx = [int(np.argmax(basis_state(layout, a, b, n, env))) for a, b, n in ((0, 0, 1), (1, 0, 0), (0, 1, 0))]
        rest = np.setdiff1d(np.arange(layout.dim), idx)
        # the sector is invariant, so exponentiating the block equals restricting the full exponential
        assert np.max(np.abs(h[np.ix_(rest, idx)])) == 0
        ref = expm(-1j * h[np.ix_(idx, idx)] * gt)
        worst = max(worst, float(np.max(np.abs(closed_form_u(configuration(spec, s), gt) - ref))))
    elapsed = time.perf_counter() - start
    return worst <= 1e-9 and elapsed < 10, f"max |U_closed - expm| = {worst:.2e} (<= 1e-9), {elapsed:.2f} s"


def criterion_7():
    start = time.perf_counter()
    gt_c, (gt_r,) = collapse_revival_times(1.0, 10.0, 7)
    gt = np.linspace(0, 1.3 * gt_r, 12001)
    c1 = concurrence_sum(reference_environment(), 1.0, C1, gt)
    entry = first_entry_time(c1, gt)
    peak_at, peak = envelope_peak(c1, gt, 0.85 * gt_r, 1.15 * gt_r)
    elapsed = time.perf_counter() - start
    ok = entry < 1.5 * gt_c and peak >= 0.9 and elapsed < 30
    return ok, (
        f"enters band at gt = {entry:.1f} (< {1.5 * gt_c:.1f}); "
        f"revival max {peak:.3f} at gt = {peak_at:.1f} (>= 0.9 within [{0.85 * gt_r:.1f}, {1.15 * gt_r:.1f}]), "
        f"{elapsed:.2f} s"
    )


def criterion_8():
    rng = np.random.default_rng(8)
    specs = [EnvironmentSpec(1.0, ()), reference_environment(), make_environment(12, 1.0, 20.0, 0.5, seed=3, gap_factor=0)]
    specs += [EnvironmentSpec(rng.uniform(0.5, 2), tuple(rng.uniform(10, 60, A)), gap_factor=0) for A in (1, 4, 9)]
    grids = [np.linspace(0, 15, 600), np.linspace(0, 500, 20001), rng.uniform(0, 2000, 500)]
    worst = 0.0
    for spec in specs:
        for gt in grids:
            c = concurrence_sum(spec, 1.0, C1, gt) + concurrence_sum(spec, 1.0, C2, gt)
            worst = max(worst, float(np.max(np.abs(c - 1.0))))
    return worst <= 1e-12, f"max |c1 + c2 - 1| = {worst:.1e} over {len(specs)} specs x {len(grids)} grids"


def criterion_9():
    start = time.perf_counter()
    gt_c, (gt_r,) = collapse_revival_times(1.0, 10.0, 7)
    gt = np.linspace(0, 500, 20001)
    exact = concurrence_sum(reference_environment(), 1.0, C1, gt)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        gauss = concurrence_gaussian(1.0, 10.0, 7, C1, gt, delta_std=0.3).values
    # revival centre: centroid of the upper-envelope excess over 1/2 in [t_R/2, 3 t_R/2]
    ce = envelope_centroid(exact, gt, 0.5 * gt_r, 1.5 * gt_r)
    cg = envelope_centroid(gauss, gt, 0.5 * gt_r, 1.5 * gt_r)
    centre_dev = abs(ce - cg) / gt_r
    plateau = (gt >= 1.5 * gt_c) & (gt <= 0.8 * gt_r)
    means = exact[plateau].mean(), gauss[plateau].mean()
    elapsed = time.perf_counter() - start
    ok = centre_dev <= 0.02 and all(abs(m - 0.5) <= 0.05 for m in means) and elapsed < 10
    return ok, (
        f"revival centre sum {ce:.2f} vs gaussian {cg:.2f} ({100 * centre_dev:.2f}% of t_R, <= 2%); "
        f"plateau means {means[0]:.4f} / {means[1]:.4f}; {elapsed:.2f} s"
    )


def criterion_10():
    rep = physical_feasibility(24e3, 70e3)
    t_r_us = rep["t_R_s"][0] * 1e6
    return 90 <= t_r_us <= 160, f"t_R = {t_r_us:.1f} us (in [90, 160]), gt_R = {rep['gt_R'][0]:.3f}"


CRITERIA = {
    1: ("closed form without environment", criterion_1),
    2: ("analytic vs exact concurrence, n = 1..10", criterion_2),
    3: ("maximum at one photon", criterion_3),
    4: ("large-n law", criterion_4),
    5: ("effective model eps^2 scaling", criterion_5),
    6: ("closed-form evolution operator", criterion_6),
    7: ("collapse and revival at reference parameters", criterion_7),
    8: ("complementarity c1 + c2 = 1", criterion_8),
    9: ("Gaussian approximation vs configuration sum", criterion_9),
    10: ("physical revival time", criterion_10),
}


def evaluate(number: int) -> tuple[bool, str]:
    title, check = CRITERIA[number]
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message="eps_max")
        ok, detail = check()
    line = f"{'PASS' if ok else 'FAIL'} criterion {number:>2} ({title}): {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    return ok, line


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    ok, line = evaluate(number)
    assert ok, line


if __name__ == "__main__":
    results = [evaluate(n)[0] for n in sorted(CRITERIA)]
    raise SystemExit(0 if all(results) else 1)
