import numpy as np
import pytest

from addlab.addnet import NetworkSpec, init_params
from addlab.metrics import (
    LayerCoverage,
    MetricsReport,
    average_accuracy,
    coverage_ratio,
    mce,
    report_from_accuracies,
    rmce,
)
from addlab.numkit import RngStream

KINDS = ("noise", "geom")
SEVS = (1, 2)


def _table(values, e_nat=None):
    errors = {}
    it = iter(values)
    for k in KINDS:
        for s in SEVS:
            errors[(k, s)] = next(it)
    return MetricsReport(errors=errors, e_nat=e_nat)


def test_accuracy_identities():
    assert average_accuracy(_table([0.0] * 4)) == 1.0
    assert average_accuracy(_table([0.25] * 4)) == 0.75
    # hand sum: mean of {0.1, 0.2, 0.3, 0.4} is 0.25
    assert average_accuracy(_table([0.1, 0.2, 0.3, 0.4])) == pytest.approx(0.75, abs=1e-15)


def test_accuracy_plus_mean_error_is_one():
    rng = RngStream(0)
    errs = rng.uniform((4,))
    table = _table(list(errs))
    assert average_accuracy(table) + float(np.mean(errs)) == pytest.approx(1.0, abs=1e-12)


def test_mce_identity_and_scaling():
    table = _table([0.1, 0.2, 0.3, 0.4])
    assert mce(table, table) == 100.0
    halved = _table([0.05, 0.1, 0.15, 0.2])
    assert mce(halved, table) == pytest.approx(50.0, abs=1e-12)


def test_mce_hand_average():
    model = _table([0.2, 0.2, 0.4, 0.4])
    base = _table([0.5, 0.5, 0.5, 0.5])
    # per-kind ratios 0.4 and 0.8 average to 0.6
    assert mce(model, base) == pytest.approx(60.0, abs=1e-12)


def test_mce_zero_baseline_kind_excluded_with_warning():
    model = _table([0.2, 0.2, 0.4, 0.4])
    base = _table([0.0, 0.0, 0.5, 0.5])
    with pytest.warns(UserWarning, match="noise"):
        value = mce(model, base)
    assert value == pytest.approx(80.0, abs=1e-12)


def test_rmce_identities():
    table = _table([0.2, 0.3, 0.25, 0.45], e_nat=0.1)
    assert rmce(table, table) == 100.0
    # corrupted errors equal to the model's own natural error: numerator 0
    flat = _table([0.1] * 4, e_nat=0.1)
    base = _table([0.3, 0.4, 0.35, 0.5], e_nat=0.2)
    assert rmce(flat, base) == 0.0


def test_rmce_hand_oracle():
    model = _table([0.2, 0.4, 0.3, 0.5], e_nat=0.1)
    base = _table([0.5, 0.7, 0.6, 0.8], e_nat=0.2)
    # kind sums: model 0.6, 0.8 minus 2*0.1 -> 0.4, 0.6
    # baseline 1.2, 1.4 minus 2*0.2 -> 0.8, 1.0
    expected = 100.0 * 0.5 * (0.4 / 0.8 + 0.6 / 1.0)
    assert rmce(model, base) == pytest.approx(expected, abs=1e-12)


def test_incomplete_table_rejected():
    table = MetricsReport(errors={("noise", 1): 0.2, ("noise", 2): 0.1,
                                  ("geom", 1): 0.3})
    with pytest.raises(ValueError, match="missing"):
        average_accuracy(table)


def test_report_from_accuracies():
    rep = report_from_accuracies({("noise", 1): 0.9, ("noise", 2): 0.8},
                                 clean_accuracy=0.95)
    assert rep.errors[("noise", 1)] == pytest.approx(0.1)
    assert rep.e_nat == pytest.approx(0.05)


def test_coverage_ratio_zero_for_identical_input():
    spec = NetworkSpec(input_dim=2, n_blocks=3, width=6, n_classes=2)
    net = init_params(spec, RngStream(1))
    x = RngStream(2).standard_normal((8, 2))
    layers = coverage_ratio(net, x, x.copy())
    assert len(layers) == 3
    for lc in layers:
        assert lc.median_ratio == 0.0
        assert lc.frac_within_2 == 1.0


def test_coverage_ratio_scale_equivariance():
    # doubling every scale halves the ratios
    from addlab.addnet import softplus_inverse
    from addlab.numkit import Tensor

    spec = NetworkSpec(input_dim=2, n_blocks=2, width=6, n_classes=2)
    net = init_params(spec, RngStream(4))
    x = RngStream(5).standard_normal((8, 2))
    x_prime = x + 0.2
    ref = None
    for s, factor in ((0.2, 1.0), (0.4, 0.5)):
        for add in net.add_blocks:
            add.W = Tensor(np.zeros((6, 6)))
            add.b = Tensor(np.full(6, softplus_inverse(s - add.floor)))
        layers = coverage_ratio(net, x, x_prime)
        if ref is None:
            ref = [lc.median_ratio for lc in layers]
        else:
            for lc, r in zip(layers, ref):
                assert lc.median_ratio == pytest.approx(r * factor, rel=1e-9)


def test_coverage_ratio_nonnegative():
    spec = NetworkSpec(input_dim=2, n_blocks=2, width=4, n_classes=2)
    net = init_params(spec, RngStream(7))
    x = RngStream(8).standard_normal((16, 2))
    for lc in coverage_ratio(net, x, x + 0.5):
        assert lc.median_ratio >= 0.0
        assert 0.0 <= lc.frac_within_2 <= 1.0
