"""Residual network with a learned Gaussian diffusion block after every
residual block.

Layer l first computes the residual update h_l = f(h~_{l-1}) + h~_{l-1},
then the diffusion block turns h_l into a Gaussian sample
h~_l = h_l + sigma_l * z with per-element scale
sigma_l = softplus(W h_l + b) + floor.  A separate clean path runs the
residual blocks only, which is what semantically similar companions of a
training sample go through.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numkit import RngStream, ShapeError, Tensor, apply, sample_standard_normal
from .pdelab.fields import PiecewiseLayerDiffusion, PiecewiseLayerField

ACTIVATIONS = ("tanh", "relu")


@dataclass(frozen=True)
class NetworkSpec:
    input_dim: int
    n_blocks: int
    width: int
    n_classes: int
    activation: str = "tanh"
    sigma_floor: float = 1e-6

    def __post_init__(self):
        if self.n_blocks < 1:
            raise ValueError(f"need at least one block, got {self.n_blocks}")
        if self.n_classes < 2:
            raise ValueError(f"need at least two classes, got {self.n_classes}")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        if self.sigma_floor <= 0.0:
            raise ValueError("sigma floor must be positive")


@dataclass
class ResidualBlockParams:
    """Two affine maps with a fixed nonlinearity between them."""

    W1: Tensor
    b1: Tensor
    W2: Tensor
    b2: Tensor
    width: int


@dataclass
class ADDBlockParams:
    """Affine scale head plus the positivity floor."""

    W: Tensor
    b: Tensor
    floor: float


@dataclass
class OutputHead:
    W: Tensor
    b: Tensor


@dataclass
class NetworkParams:
    spec: NetworkSpec
    lift_W: Tensor
    lift_b: Tensor
    blocks: list
    add_blocks: list
    head: OutputHead


@dataclass
class ForwardTrace:
    """Per-layer record of one diffused forward pass.

    ``h[l]`` is the residual output feeding the diffusion block (the
    Gaussian center), ``sigma[l]`` its scale, ``h_tilde[l]`` the sampled
    output, and ``noise[l]`` the recorded standard-normal draw (None
    when diffusion was off).  ``h_aug`` holds the clean-path layers of
    companion samples when one was run.
    """

    h: list
    sigma: list
    h_tilde: list
    noise: list
    h_aug: list | None = None

    @property
    def h_last(self) -> Tensor:
        return self.h_tilde[-1]


def softplus_inverse(y: float) -> float:
    if y <= 0.0:
        raise ValueError("softplus is positive")
    return math.log(math.expm1(y))


def init_params(spec: NetworkSpec, rng: RngStream) -> NetworkParams:
    """Seeded initialization.

    Affine weights are Gaussian scaled by 1/sqrt(fan_in), biases zero.
    Scale heads start at zero weights with bias softplus^-1(0.1), so
    every layer begins with a small uniform diffusion scale.
    """
    d, w, c = spec.input_dim, spec.width, spec.n_classes
    lift_W = Tensor(rng.standard_normal((d, w)) / math.sqrt(d))
    lift_b = Tensor(np.zeros(w))
    blocks = []
    add_blocks = []
    for _ in range(spec.n_blocks):
        blocks.append(ResidualBlockParams(
            W1=Tensor(rng.standard_normal((w, w)) / math.sqrt(w)),
            b1=Tensor(np.zeros(w)),
            W2=Tensor(rng.standard_normal((w, w)) / math.sqrt(w)),
            b2=Tensor(np.zeros(w)),
            width=w,
        ))
        add_blocks.append(ADDBlockParams(
            W=Tensor(np.zeros((w, w))),
            b=Tensor(np.full(w, softplus_inverse(0.1))),
            floor=spec.sigma_floor,
        ))
    head = OutputHead(W=Tensor(rng.standard_normal((w, c)) / math.sqrt(w)),
                      b=Tensor(np.zeros(c)))
    return NetworkParams(spec=spec, lift_W=lift_W, lift_b=lift_b,
                         blocks=blocks, add_blocks=add_blocks, head=head)


def _affine(x: Tensor, W: Tensor, b: Tensor) -> Tensor:
    return apply("add", apply("matmul", x, W), b)


def lift_input(net: NetworkParams, x: Tensor) -> Tensor:
    if x.ndim != 2 or x.shape[1] != net.spec.input_dim:
        raise ShapeError(
            f"expected input of shape (n, {net.spec.input_dim}), got {x.shape}")
    return _affine(x, net.lift_W, net.lift_b)


def residual_forward(block: ResidualBlockParams, h: Tensor,
                     activation: str = "tanh") -> Tensor:
    if h.ndim != 2 or h.shape[1] != block.width:
        raise ShapeError(f"residual block width {block.width} vs input shape {h.shape}")
    inner = apply(activation, _affine(h, block.W1, block.b1))
    return apply("add", h, _affine(inner, block.W2, block.b2))


def add_sigma(add: ADDBlockParams, h: Tensor) -> Tensor:
    """Per-element diffusion scale softplus(W h + b) + floor (always > 0)."""
    return apply("add", apply("softplus", _affine(h, add.W, add.b)), add.floor)


def add_block_forward(add: ADDBlockParams, h: Tensor, rng: RngStream,
                      sigma_override: float | None = None):
    """Diffuse h into (h_tilde, sigma, noise) via the reparameterized sample.

    ``sigma_override`` replaces the learned scale with a constant; the
    value 0.0 short-circuits to h_tilde = h with no randomness consumed.
    """
    if sigma_override is None:
        sigma = add_sigma(add, h)
    elif sigma_override == 0.0:
        zeros = Tensor(np.zeros(h.shape))
        return h, zeros, None
    else:
        sigma = Tensor(np.full(h.shape, float(sigma_override)))
    z = sample_standard_normal(rng, h.shape)
    h_tilde = apply("add", h, apply("mul", sigma, z))
    return h_tilde, sigma, z


def forward_diffused(net: NetworkParams, x: Tensor, rng: RngStream,
                     sigma_override: float | None = None) -> ForwardTrace:
    """Full pass: lift, then (residual -> diffusion) for every block."""
    act = net.spec.activation
    h_cur = lift_input(net, x)
    trace = ForwardTrace(h=[], sigma=[], h_tilde=[], noise=[])
    for block, add in zip(net.blocks, net.add_blocks):
        h = residual_forward(block, h_cur, act)
        h_tilde, sigma, z = add_block_forward(add, h, rng, sigma_override)
        trace.h.append(h)
        trace.sigma.append(sigma)
        trace.h_tilde.append(h_tilde)
        trace.noise.append(z)
        h_cur = h_tilde
    return trace


def forward_clean(net: NetworkParams, x: Tensor) -> list:
    """Residual-blocks-only pass; returns the per-layer representations."""
    act = net.spec.activation
    h = lift_input(net, x)
    layers = []
    for block in net.blocks:
        h = residual_forward(block, h, act)
        layers.append(h)
    return layers


def logits(head: OutputHead, h: Tensor) -> Tensor:
    if h.ndim != 2 or h.shape[1] != head.W.shape[0]:
        raise ShapeError(f"head expects width {head.W.shape[0]}, got {h.shape}")
    return _affine(h, head.W, head.b)


def named_parameters(net: NetworkParams) -> dict:
    """Flat name -> Tensor view of all parameters, in canonical order."""
    out = {"lift.W": net.lift_W, "lift.b": net.lift_b}
    for i, (block, add) in enumerate(zip(net.blocks, net.add_blocks), start=1):
        out[f"block{i}.W1"] = block.W1
        out[f"block{i}.b1"] = block.b1
        out[f"block{i}.W2"] = block.W2
        out[f"block{i}.b2"] = block.b2
        out[f"add{i}.W"] = add.W
        out[f"add{i}.b"] = add.b
    out["head.W"] = net.head.W
    out["head.b"] = net.head.b
    return out


def set_parameters(net: NetworkParams, updates: dict) -> None:
    """Assign new tensors by flat name (between-step mutation point)."""
    for name, tensor in updates.items():
        part, attr = name.split(".")
        if part == "lift":
            setattr(net, f"lift_{attr}", tensor)
        elif part == "head":
            setattr(net.head, attr, tensor)
        elif part.startswith("block"):
            setattr(net.blocks[int(part[5:]) - 1], attr, tensor)
        elif part.startswith("add"):
            setattr(net.add_blocks[int(part[3:]) - 1], attr, tensor)
        else:
            raise KeyError(f"unknown parameter {name!r}")


def diffuser_parameter_names(net: NetworkParams) -> tuple:
    """Names of the scale-head parameters (the coverage objective's targets)."""
    return tuple(n for n in named_parameters(net) if n.startswith("add"))


def classifier_parameter_names(net: NetworkParams) -> tuple:
    """Names of lift, residual block, and output head parameters."""
    return tuple(n for n in named_parameters(net) if not n.startswith("add"))


# -- bridges into the PDE lab --------------------------------------------------


def _ndarray_residual(block: ResidualBlockParams, activation: str):
    w1, b1 = block.W1.data, block.b1.data
    w2, b2 = block.W2.data, block.b2.data
    act = np.tanh if activation == "tanh" else lambda v: np.maximum(v, 0.0)

    def delta(points):
        return act(points @ w1 + b1) @ w2 + b2

    return delta


def velocity_field(net: NetworkParams) -> PiecewiseLayerField:
    """The residual updates of a width-2 network as a 2D velocity field.

    Layer l's displacement function drives the drift on the time slice
    [l/L, (l+1)/L); the input lift is not part of the field, so
    geometric demos should use width == input_dim == 2 nets.
    """
    if net.spec.width != 2:
        raise ValueError("velocity field requires a width-2 network")
    return PiecewiseLayerField(
        [_ndarray_residual(b, net.spec.activation) for b in net.blocks])


def diffusion_field(net: NetworkParams) -> PiecewiseLayerDiffusion:
    """Per-layer learned scales as a scalar diffusion coefficient.

    The per-element scale vector is averaged into one scalar per point.
    """
    if net.spec.width != 2:
        raise ValueError("diffusion field requires a width-2 network")

    def layer_fn(add: ADDBlockParams):
        w, b, floor = add.W.data, add.b.data, add.floor

        def scale(points):
            return np.mean(np.logaddexp(0.0, points @ w + b) + floor, axis=1)

        return scale

    return PiecewiseLayerDiffusion([layer_fn(a) for a in net.add_blocks])
