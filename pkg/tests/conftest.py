"""Shared helpers: seeded inputs for every registered operation kind."""
import numpy as np

from addlab.numkit import RngStream, Tensor, apply


def _signed_away_from_zero(rng, shape, floor):
    x = rng.standard_normal(shape)
    return np.sign(x) * (np.abs(x) + floor)


def kind_check_cases(kind: str, seed: int):
    """Scalar-valued closures probing one operation kind at a seeded point.

    Returns a list of (fn, point) pairs for ``grad_check``; each fn folds
    the op's output into a scalar through fixed random weights so every
    output element contributes to the gradient.
    """
    rng = RngStream(seed).derive(f"kindcheck/{kind}")

    def folded(build, out_shape):
        w = Tensor(rng.standard_normal(out_shape))
        return lambda x: apply("sum", apply("mul", build(x), w))

    a = rng.standard_normal((3, 4))
    cases = []
    if kind in ("add", "sub", "mul"):
        b = Tensor(rng.standard_normal((3, 4)))
        row = Tensor(rng.standard_normal((4,)))
        cases.append((folded(lambda x: apply(kind, x, b), (3, 4)), a))
        cases.append((folded(lambda x: apply(kind, row, x), (3, 4)), a))
    elif kind == "div":
        denom = Tensor(_signed_away_from_zero(rng, (3, 4), 0.5))
        numer = Tensor(rng.standard_normal((3, 4)))
        cases.append((folded(lambda x: apply("div", x, denom), (3, 4)), a))
        cases.append(
            (folded(lambda x: apply("div", numer, x), (3, 4)),
             _signed_away_from_zero(rng, (3, 4), 0.5))
        )
    elif kind == "matmul":
        lhs = Tensor(rng.standard_normal((3, 4)))
        rhs = Tensor(rng.standard_normal((4, 2)))
        cases.append((folded(lambda x: apply("matmul", x, rhs), (3, 2)), a))
        cases.append((folded(lambda x: apply("matmul", lhs, x), (3, 2)),
                      rng.standard_normal((4, 2))))
    elif kind == "relu":
        # keep coordinates away from the kink so central differences apply
        point = _signed_away_from_zero(rng, (3, 4), 1e-3)
        cases.append((folded(lambda x: apply("relu", x), (3, 4)), point))
    elif kind == "log":
        point = np.abs(rng.standard_normal((3, 4))) + 0.1
        cases.append((folded(lambda x: apply("log", x), (3, 4)), point))
    elif kind in ("neg", "softplus", "tanh", "exp", "square"):
        cases.append((folded(lambda x: apply(kind, x), (3, 4)), a))
    elif kind in ("sum", "mean"):
        cases.append((lambda x: apply(kind, x), a))
        cases.append((folded(lambda x: apply(kind, x, axis=0), (4,)), a))
        cases.append((folded(lambda x: apply(kind, x, axis=1), (3,)), a))
    elif kind == "log_softmax":
        cases.append((folded(lambda x: apply("log_softmax", x), (3, 4)), a))
    else:
        raise AssertionError(f"no gradient-check case for kind {kind!r}")
    return cases
