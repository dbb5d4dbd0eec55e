from ._core import (
    DegeneracyError,
    DomainError,
    FitResult,
    NumericalError,
    PeriodicOperator,
    SolutionTrace,
    ValidationError,
    WvnPotential,
    boundedness_check,
    classify,
    eigen_residual,
    embed_single,
    find_bands,
    fit_decay_exponent,
    iterate,
    plan_resonance,
    quasi_momentum,
    subordination_search,
    zygmund_tail_bound_check,
)

__all__ = [
    "DegeneracyError",
    "DomainError",
    "FitResult",
    "NumericalError",
    "PeriodicOperator",
    "SolutionTrace",
    "ValidationError",
    "WvnPotential",
    "boundedness_check",
    "classify",
    "eigen_residual",
    "embed_single",
    "find_bands",
    "fit_decay_exponent",
    "iterate",
    "plan_resonance",
    "quasi_momentum",
    "subordination_search",
    "zygmund_tail_bound_check",
]

try:
    from ._core import __version__
except ImportError:  # pragma: no cover
    __version__ = "0.0.0"
