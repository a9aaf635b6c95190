"""Front-fixing Crank-Nicolson pricing of American puts with a
Caputo-Fabrizio time derivative."""

from ._fronfix import (
    GridSpec,
    ModelParams,
    NumericalError,
    SolverResult,
    amplification_factor,
    binomial_american_put,
    build_grid,
    european_put,
    lemma1_check,
    monotonicity_audit,
    psor_american_put,
    run_solver,
)

__all__ = [
    "GridSpec",
    "ModelParams",
    "NumericalError",
    "SolverResult",
    "amplification_factor",
    "binomial_american_put",
    "build_grid",
    "european_put",
    "lemma1_check",
    "monotonicity_audit",
    "psor_american_put",
    "run_solver",
]
