import json

import numpy as np
import pytest

from addlab.addnet import NetworkSpec, named_parameters
from addlab.checkpoint import load_checkpoint, save_checkpoint
from addlab.datagen import AugmentOp, make_augmentor, make_dataset
from addlab.trainer import TrainConfig, fit


def _trained(tmp_path, seed=3):
    ds = make_dataset("two_moons", 96, 0.1, seed=1)
    spec = NetworkSpec(input_dim=2, n_blocks=2, width=8, n_classes=2)
    cfg = TrainConfig(epochs=2, batch_size=32, seed=seed)
    res = fit(cfg, ds, spec, augmentor=make_augmentor(AugmentOp("rotate", 0.2)))
    path = tmp_path / "model.ckpt"
    save_checkpoint(path, res.net, res.optim, cfg, seed=seed)
    return res, cfg, path


def test_round_trip_restores_everything(tmp_path):
    res, cfg, path = _trained(tmp_path)
    loaded = load_checkpoint(path)
    orig = named_parameters(res.net)
    back = named_parameters(loaded.net)
    assert set(orig) == set(back)
    for name in orig:
        assert np.array_equal(orig[name].data, back[name].data)
    assert loaded.train_config == cfg
    assert loaded.seed == 3
    assert loaded.step == res.optim.step
    assert loaded.optim.adam_steps == res.optim.adam_steps
    for name, buf in res.optim.velocity.items():
        assert np.array_equal(buf, loaded.optim.velocity[name])
    for name, buf in res.optim.adam_m.items():
        assert np.array_equal(buf, loaded.optim.adam_m[name])


def test_save_load_save_is_byte_identical(tmp_path):
    res, cfg, path = _trained(tmp_path)
    loaded = load_checkpoint(path)
    second = tmp_path / "again.ckpt"
    save_checkpoint(second, loaded.net, loaded.optim, loaded.train_config,
                    seed=loaded.seed)
    assert path.read_bytes() == second.read_bytes()


def test_header_is_json_line_with_layout(tmp_path):
    _, _, path = _trained(tmp_path)
    header = json.loads(path.read_bytes().split(b"\n", 1)[0])
    assert header["format"] == "addlab-checkpoint"
    assert header["version"] == 1
    assert header["spec"]["n_blocks"] == 2
    names = [a["name"] for a in header["arrays"]]
    assert "lift.W" in names and "head.b" in names
    assert any(n.startswith("optim.velocity.") for n in names)


def test_rejects_foreign_and_truncated_files(tmp_path):
    bad = tmp_path / "bad.ckpt"
    bad.write_bytes(b'{"format": "other"}\n')
    with pytest.raises(ValueError, match="not a"):
        load_checkpoint(bad)
    _, _, path = _trained(tmp_path)
    blob = path.read_bytes()
    truncated = tmp_path / "trunc.ckpt"
    truncated.write_bytes(blob[:-16])
    with pytest.raises(ValueError):
        load_checkpoint(truncated)
