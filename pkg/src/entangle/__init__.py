"""Numerical toolkit for bipartite entanglement: PPT, product-overlap bounds,
binary-mixture and edge decompositions, witnesses and K-copy distillability."""

from .tensor import (
    DEFAULT_TOL,
    BipartiteState,
    DimensionError,
    StateValidationError,
    ToleranceConfig,
    partial_trace,
    partial_transpose,
    realign_to_correlation,
    tensor_power,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_TOL",
    "BipartiteState",
    "DimensionError",
    "StateValidationError",
    "ToleranceConfig",
    "partial_trace",
    "partial_transpose",
    "realign_to_correlation",
    "tensor_power",
]
