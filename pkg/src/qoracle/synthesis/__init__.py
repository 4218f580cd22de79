"""Phase-polynomial and truth-table synthesis backends."""

from .cse import AncillaBudgetError, CseReport, cse_synthesize
from .network import (
    COLUMN_METHODS,
    FULL_POOL,
    SelectResult,
    SynthesisError,
    gray_synthesize_column,
    gray_synthesize_diagonal,
    phase_tolerant_synthesize_column,
    pprm_synthesize,
    select_best,
    synthesize_phase_network,
)
from .routing import ParityOperator, Route, diagonal_routes, gray_route, htsp_route
from .walsh import PhaseSpec, ThetaSolution, fwht, parity_matrix, solve_theta

__all__ = [
    "AncillaBudgetError",
    "COLUMN_METHODS",
    "CseReport",
    "FULL_POOL",
    "ParityOperator",
    "PhaseSpec",
    "Route",
    "SelectResult",
    "SynthesisError",
    "ThetaSolution",
    "cse_synthesize",
    "diagonal_routes",
    "fwht",
    "gray_route",
    "gray_synthesize_column",
    "gray_synthesize_diagonal",
    "htsp_route",
    "parity_matrix",
    "phase_tolerant_synthesize_column",
    "pprm_synthesize",
    "select_best",
    "solve_theta",
    "synthesize_phase_network",
]
