"""Versioned binary checkpoints: a one-line JSON header describing the
network, training state, and array layout, followed by the named arrays
as raw little-endian float64 in declared order.  Saving is atomic and
round-trips byte-identically."""
from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass

import numpy as np

from .addnet import NetworkParams, NetworkSpec, init_params, named_parameters, set_parameters
from .numkit import RngStream, Tensor
from .trainer import OptimState, TrainConfig

FORMAT_NAME = "addlab-checkpoint"
FORMAT_VERSION = 1


@dataclass
class Checkpoint:
    net: NetworkParams
    optim: OptimState
    train_config: TrainConfig | None
    seed: int
    step: int


def _named_arrays(net: NetworkParams, optim: OptimState) -> dict:
    arrays = {name: t.data for name, t in named_parameters(net).items()}
    for group, buffers in (("velocity", optim.velocity),
                           ("adam_m", optim.adam_m),
                           ("adam_v", optim.adam_v)):
        for name, buf in buffers.items():
            arrays[f"optim.{group}.{name}"] = np.asarray(buf, dtype=np.float64)
    return arrays


def save_checkpoint(path, net: NetworkParams, optim: OptimState | None = None,
                    train_config: TrainConfig | None = None, seed: int = 0,
                    step: int | None = None) -> None:
    optim = optim or OptimState()
    arrays = _named_arrays(net, optim)
    header = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "spec": dataclasses.asdict(net.spec),
        "seed": int(seed),
        "step": int(optim.step if step is None else step),
        "adam_steps": int(optim.adam_steps),
        "train_config": dataclasses.asdict(train_config) if train_config else None,
        "arrays": [{"name": n, "shape": list(a.shape)} for n, a in arrays.items()],
    }
    blob = (json.dumps(header, separators=(",", ":")) + "\n").encode("utf-8")
    payload = b"".join(a.astype("<f8").tobytes(order="C") for a in arrays.values())
    tmp = f"{path}.tmp"
    with open(tmp, "wb") as fh:
        fh.write(blob + payload)
    os.replace(tmp, path)


def load_checkpoint(path) -> Checkpoint:
    with open(path, "rb") as fh:
        header = json.loads(fh.readline().decode("utf-8"))
        if header.get("format") != FORMAT_NAME:
            raise ValueError(f"{path} is not a {FORMAT_NAME} file")
        if header["version"] != FORMAT_VERSION:
            raise ValueError(f"unsupported checkpoint version {header['version']}")
        payload = fh.read()

    spec = NetworkSpec(**header["spec"])
    arrays = {}
    offset = 0
    for entry in header["arrays"]:
        shape = tuple(entry["shape"])
        size = int(np.prod(shape)) if shape else 1
        chunk = np.frombuffer(payload, dtype="<f8", count=size, offset=offset)
        arrays[entry["name"]] = chunk.reshape(shape).astype(np.float64)
        offset += size * 8
    if offset != len(payload):
        raise ValueError(f"checkpoint payload length mismatch in {path}")

    net = init_params(spec, RngStream(0))
    set_parameters(net, {n: Tensor(a) for n, a in arrays.items() if not n.startswith("optim.")})
    optim = OptimState(step=header["step"], adam_steps=header.get("adam_steps", 0))
    for name, a in arrays.items():
        if name.startswith("optim."):
            _, group, param = name.split(".", 2)
            getattr(optim, group)[param] = a
    cfg = TrainConfig(**header["train_config"]) if header.get("train_config") else None
    return Checkpoint(net=net, optim=optim, train_config=cfg,
                      seed=header["seed"], step=header["step"])
