"""Quantum discord and BBPSSW purification simulation for small systems."""

__version__ = "0.1.0"

from .correlations import (
    CorrelationReport,
    MeasurementBasis,
    brute_force_oracle,
    classical_correlation_analytic,
    classical_correlation_numeric,
    conditional_entropy,
    correlation_report,
    discord_bell_diagonal,
    discord_numeric,
    mutual_information,
)
from .linalg import DensityMatrix, hermitian_eig, partial_trace, tensor, von_neumann_entropy
from .purification import bbpssw_round, iterate
from .states import CVector, bell_diagonal_from_c, bell_state, c_from_state, werner

__all__ = [
    "CVector",
    "CorrelationReport",
    "DensityMatrix",
    "MeasurementBasis",
    "bbpssw_round",
    "bell_diagonal_from_c",
    "bell_state",
    "brute_force_oracle",
    "c_from_state",
    "classical_correlation_analytic",
    "classical_correlation_numeric",
    "conditional_entropy",
    "correlation_report",
    "discord_bell_diagonal",
    "discord_numeric",
    "hermitian_eig",
    "iterate",
    "mutual_information",
    "partial_trace",
    "tensor",
    "von_neumann_entropy",
    "werner",
]
