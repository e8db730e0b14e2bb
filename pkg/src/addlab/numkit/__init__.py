"""Dense float64 tensor math with reverse-mode differentiation and
deterministic counter-based sampling."""

from .gradcheck import GradientCheckError, grad_check
from .ops import DomainError, ShapeError, registered_kinds
from .rng import RngStream, sample_standard_normal
from .tensor import Tape, Tensor, active_tape, apply, backward

__all__ = [
    "DomainError",
    "GradientCheckError",
    "RngStream",
    "ShapeError",
    "Tape",
    "Tensor",
    "active_tape",
    "apply",
    "backward",
    "grad_check",
    "registered_kinds",
    "sample_standard_normal",
]
