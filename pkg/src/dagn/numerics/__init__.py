"""Float64 tensors, reverse-mode autodiff, and gradient checking."""

from dagn.numerics.gradcheck import GradCheckReport, OracleError, finite_diff_check
from dagn.numerics.kernels import BACKEND
from dagn.numerics.tensor import Parameter, ShapeError, Tape, TapeError, Tensor, backward

__all__ = [
    "BACKEND",
    "GradCheckReport",
    "OracleError",
    "Parameter",
    "ShapeError",
    "Tape",
    "TapeError",
    "Tensor",
    "backward",
    "finite_diff_check",
]
