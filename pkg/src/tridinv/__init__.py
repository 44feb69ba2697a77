"""Explicit inverse of symmetric near-Toeplitz tridiagonal matrices."""

__version__ = "0.1.0"

from .errors import DimensionMismatch, DomainError, IndexOutOfRange, SingularMatrix, TridinvError
from .chebyshev import eval_U, eval_U_pair
from .core import (
    InverseFactors,
    KappaBasis,
    TridiagSpec,
    beta_sequence,
    full_inverse,
    inverse_element,
    inverse_element_c2,
    inverse_factors,
    is_invertible,
    kappa_basis,
    preset,
)
from .analytics import (
    RowSumVector,
    TraceReport,
    limit_normalized_trace,
    limit_normalized_trace_sq,
    row_sums,
    trace_inverse,
    trace_inverse_squared,
    trace_report,
    zeta,
)
from .ar1 import AR1Config, RowSumBounds
