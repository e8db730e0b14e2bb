"""Transport-equation solvers: characteristics, explicit finite
differences, and Feynman-Kac Monte Carlo, plus smoothness probes."""

from .fd import StabilityError, fd_stability_limit, solve_te_fd
from .fields import (
    ConstantDiffusion,
    ConstantField,
    DiffusionCoefficient,
    FunctionDiffusion,
    PiecewiseLayerDiffusion,
    PiecewiseLayerField,
    RotationField,
    TerminalCondition,
    VelocityField,
    as_diffusion,
    gaussian_bump,
    wavy_two_class,
)
from .grid import GridField
from .modulus import ModulusStats, modulus_probe
from .sde import SdePath, estimate_u_fk, integrate_characteristics, replay_path, sample_em_path

__all__ = [
    "ConstantDiffusion",
    "ConstantField",
    "DiffusionCoefficient",
    "FunctionDiffusion",
    "GridField",
    "ModulusStats",
    "PiecewiseLayerDiffusion",
    "PiecewiseLayerField",
    "RotationField",
    "SdePath",
    "StabilityError",
    "TerminalCondition",
    "VelocityField",
    "as_diffusion",
    "estimate_u_fk",
    "fd_stability_limit",
    "gaussian_bump",
    "integrate_characteristics",
    "modulus_probe",
    "replay_path",
    "sample_em_path",
    "solve_te_fd",
    "wavy_two_class",
]
