"""Parity-oblivious multiplexing: exact classical bounds, optimal quantum
strategies and device-independent self-testing by unitary extraction."""

from .classical import build_lp, classical_optimum, solve_exact, verify_model
from .optimal import canonical_observables, optimal_strategy, scramble, sector_observables
from .protocol import (
    BitString,
    MeasurementSet,
    PreparationEnsemble,
    Strategy,
    check_parity_oblivious,
    classical_bound,
    parity_set,
    quantum_bound,
    success_probability,
)
from .selftest import Tolerances, certify, certify_states, extract_unitary

__version__ = "0.1.0"

__all__ = [
    "BitString",
    "MeasurementSet",
    "PreparationEnsemble",
    "Strategy",
    "Tolerances",
    "build_lp",
    "canonical_observables",
    "certify",
    "certify_states",
    "check_parity_oblivious",
    "classical_bound",
    "classical_optimum",
    "extract_unitary",
    "optimal_strategy",
    "parity_set",
    "quantum_bound",
    "scramble",
    "sector_observables",
    "solve_exact",
    "success_probability",
    "verify_model",
]
