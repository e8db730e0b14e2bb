"""addlab: transport-equation smoothing experiments and residual networks
with learned per-layer diffusion, on a small deterministic numeric core."""

__version__ = "0.1.0"
