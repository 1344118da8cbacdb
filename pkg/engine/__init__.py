from .alternating_engine import (
    AlternationTrace,
    EstimatorContract,
    IterationRecord,
    RestorerContract,
    data_residual,
    run_alternation,
)
from .solver_facade import SolveResult, SolverFacade

__all__ = [
    "AlternationTrace",
    "EstimatorContract",
    "IterationRecord",
    "RestorerContract",
    "SolveResult",
    "SolverFacade",
    "data_residual",
    "run_alternation",
]
