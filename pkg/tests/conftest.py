from __future__ import annotations

import warnings

import numpy as np
import pytest

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(autouse=True)
def _quiet_regime_warnings():
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message="eps_max")
        yield


def random_density(rng, dim=4, rank=None):
    rank = dim if rank is None else rank
    f = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = f @ f.conj().T
    return rho / np.trace(rho).real


def random_unitary(rng, dim=2):
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
