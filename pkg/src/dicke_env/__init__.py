"""Entanglement of two resonant atoms in a cavity with a dispersive atomic environment."""

from __future__ import annotations

from .approx import (
    collapse_revival_times,
    concurrence_binomial,
    concurrence_gaussian,
    peak_decomposition,
    physical_feasibility,
)
from .concurrence import concurrence_from_amplitudes, wootters_concurrence
from .dicke import DickeParams, analytic_concurrence, exact_concurrence, max_concurrence
from .env_dynamics import (
    ConcurrenceTrace,
    InitKind,
    Method,
    concurrence_sum,
    concurrence_trace_exact,
    concurrence_trace_sum,
    evolve_reduced,
)
from .env_model import EnvironmentSpec, closed_form_u, configuration, draw_detunings, make_environment
from .errors import DickeEnvError

__version__ = "0.1.0"

__all__ = [
    "ConcurrenceTrace",
    "DickeEnvError",
    "DickeParams",
    "EnvironmentSpec",
    "InitKind",
    "Method",
    "analytic_concurrence",
    "closed_form_u",
    "collapse_revival_times",
    "concurrence_binomial",
    "concurrence_from_amplitudes",
    "concurrence_gaussian",
    "concurrence_sum",
    "concurrence_trace_exact",
    "concurrence_trace_sum",
    "configuration",
    "draw_detunings",
    "evolve_reduced",
    "exact_concurrence",
    "make_environment",
    "max_concurrence",
    "peak_decomposition",
    "physical_feasibility",
    "wootters_concurrence",
]
