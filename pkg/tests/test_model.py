import math

import numpy as np
import pytest

from fapareto.errors import ArchitectureMismatch, ConfigError, DatasetError
from fapareto.model import (
    Architecture,
    ParamVector,
    TrainConfig,
    forward,
    gradient,
    init_params,
    loss,
    predict,
    tune,
)


def hand_net(activation="relu"):
    # 2 inputs -> 1 hidden unit -> logistic output
    arch = Architecture(2, (1,), activation)
    # layout: W0 (2x1), b0 (1), W1 (1x1), b1 (1)
    return ParamVector(arch, [0.5, -1.0, 0.25, 2.0, -0.5])


def zeros(arch):
    return ParamVector(arch, np.zeros(arch.n_params))


def fd_gradient(p, batch, h=1e-6):
    out = np.empty(p.values.size)
    for i in range(p.values.size):
        up, dn = p.values.copy(), p.values.copy()
        up[i] += h
        dn[i] -= h
        out[i] = (loss(ParamVector(p.arch, up), batch) - loss(ParamVector(p.arch, dn), batch)) / (2 * h)
    return out


def test_param_counts():
    assert Architecture(4, (16,)).n_params == 4 * 16 + 16 + 16 + 1 == 97
    assert Architecture(7, ()).n_params == 8
    assert Architecture(3, (5, 2)).n_params == 3 * 5 + 5 + 5 * 2 + 2 + 2 + 1


def test_layout_contiguous():
    arch = Architecture(5, (7, 3), "tanh")
    off = 0
    for name, shape, o in arch.tensor_layout:
        assert o == off
        off += int(np.prod(shape))
    assert off == arch.n_params


@pytest.mark.parametrize("bad", [dict(input_dim=0), dict(input_dim=3, hidden_dims=(0,)), dict(input_dim=3, activation="gelu")])
def test_bad_architecture(bad):
    with pytest.raises(ConfigError):
        Architecture(**bad)


def test_init_deterministic_and_biases_zero(small_arch):
    a, b = init_params(small_arch, 9), init_params(small_arch, 9)
    assert a.values.tobytes() == b.values.tobytes()
    for name, t in a.tensors():
        if name.startswith("b"):
            assert np.all(t == 0)
    assert init_params(small_arch, 10).values.tobytes() != a.values.tobytes()


def test_init_scale_matches_fan_in():
    arch = Architecture(400, (300,))
    w0 = dict(init_params(arch, 0).tensors())["W0"]
    assert w0.std() == pytest.approx(1 / math.sqrt(400), rel=0.02)


def test_values_read_only(small_params):
    with pytest.raises(ValueError):
        small_params.values[0] = 1.0


def test_forward_zero_params_is_half(small_arch, rng):
    assert forward(zeros(small_arch), rng.normal(size=4)) == 0.5


def test_forward_hand_computed():
    # hidden = relu(0.5*1 - 1*0.2 + 0.25) = 0.55; logit = 2*0.55 - 0.5 = 0.6
    assert forward(hand_net(), [1.0, 0.2]) == pytest.approx(0.6456563062257954, abs=1e-15)
    assert forward(hand_net("tanh"), [1.0, 0.2]) == pytest.approx(0.6227038031534381, abs=1e-15)


def test_forward_monotone_in_output_bias(small_params, rng):
    x = rng.normal(size=4)
    out = []
    for b in np.linspace(-3, 3, 13):
        v = small_params.values.copy()
        v[-1] = b
        out.append(forward(ParamVector(small_params.arch, v), x))
    assert all(b > a for a, b in zip(out, out[1:]))


def test_forward_dimension_mismatch(small_params):
    with pytest.raises(ArchitectureMismatch):
        forward(small_params, np.zeros(3))


def test_predict_tie_rule_and_hand_case(small_arch):
    assert np.all(predict(zeros(small_arch), np.zeros((5, 4))) == 1)
    v = np.zeros(small_arch.n_params)
    v[-1] = 20.0
    assert predict(ParamVector(small_arch, v), np.ones(4)) == 1
    v[-1] = -20.0
    assert predict(ParamVector(small_arch, v), np.ones(4)) == 0
    # hand net: x=[1,0.2] -> p=0.6457 -> 1; x=[0,1] -> hidden relu(-0.75)=0, logit -0.5 -> 0
    assert list(predict(hand_net(), [[1.0, 0.2], [0.0, 1.0]])) == [1, 0]


def test_loss_zero_params_is_ln2(small_arch, rng):
    X = rng.normal(size=(11, 4))
    y = rng.integers(0, 2, 11)
    assert loss(zeros(small_arch), (X, y)) == pytest.approx(math.log(2), abs=1e-15)


def test_loss_perfect_predictions():
    arch = Architecture(1, ())
    p = ParamVector(arch, [100.0, 0.0])
    assert loss(p, ([[-1.0], [1.0]], [0, 1])) <= 1e-10


def test_loss_hand_three_examples():
    arch = Architecture(1, ())
    p = ParamVector(arch, [2.0, -1.0])
    # logits -1, 1, 3 with labels 0, 1, 1
    assert loss(p, ([[0.0], [1.0], [2.0]], [0, 1, 1])) == pytest.approx(0.22503690887006256, abs=1e-12)


def test_loss_empty_batch(small_params):
    with pytest.raises(DatasetError):
        loss(small_params, (np.zeros((0, 4)), np.zeros(0)))


@pytest.mark.parametrize("hidden,act", [((), "relu"), ((6,), "relu"), ((5, 3), "tanh"), ((8,), "tanh")])
def test_gradient_matches_finite_differences(hidden, act, rng):
    arch = Architecture(3, hidden, act)
    p = ParamVector(arch, rng.normal(size=arch.n_params))
    batch = (rng.normal(size=(9, 3)), rng.integers(0, 2, 9))
    g = gradient(p, batch).values
    fd = fd_gradient(p, batch)
    rel = np.abs(g - fd) / np.maximum(np.maximum(np.abs(g), np.abs(fd)), 1e-6)
    assert rel.max() <= 1e-4


def test_gradient_logistic_closed_form(rng):
    arch = Architecture(4, ())
    p = ParamVector(arch, rng.normal(size=5))
    X = rng.normal(size=(7, 4))
    y = rng.integers(0, 2, 7)
    phat = 1 / (1 + np.exp(-(X @ p.values[:4] + p.values[4])))
    expected = np.r_[X.T @ (phat - y), (phat - y).sum()] / 7
    np.testing.assert_allclose(gradient(p, (X, y)).values, expected, rtol=1e-12, atol=1e-15)


def test_gradient_vanishes_at_perfect_fit():
    arch = Architecture(1, ())
    p = ParamVector(arch, [60.0, 0.0])
    g = gradient(p, ([[-1.0], [1.0], [2.0]], [0, 1, 1])).values
    assert np.linalg.norm(g) <= 1e-6


def test_tune_zero_lr_is_identity(small_params, rng):
    X, y = rng.normal(size=(50, 4)), rng.integers(0, 2, 50)
    out = tune(small_params, (X, y), TrainConfig(learning_rate=0.0, seed=1))
    assert out.values.tobytes() == small_params.values.tobytes()


def test_tune_deterministic_and_pure(small_params, rng):
    X, y = rng.normal(size=(70, 4)), rng.integers(0, 2, 70)
    before = small_params.values.tobytes()
    cfg = TrainConfig(seed=5, epochs_per_tune=2, batch_size=8)
    a, b = tune(small_params, (X, y), cfg), tune(small_params, (X, y), cfg)
    assert a.values.tobytes() == b.values.tobytes()
    assert small_params.values.tobytes() == before
    assert a.values.tobytes() != before


def test_tune_single_full_batch_step_exact(small_params, rng):
    X, y = rng.normal(size=(40, 4)), rng.integers(0, 2, 40)
    lr = 0.3
    out = tune(small_params, (X, y), TrainConfig(learning_rate=lr, batch_size=40, seed=2))
    expected = small_params.values - lr * gradient(small_params, (X, y)).values
    assert out.values.tobytes() == expected.tobytes()


def test_full_batch_step_decreases_loss():
    rng = np.random.default_rng(0)
    for _ in range(25):
        arch = Architecture(5, (int(rng.integers(1, 9)),), rng.choice(["relu", "tanh"]))
        p = ParamVector(arch, rng.normal(size=arch.n_params))
        X, y = rng.normal(size=(30, 5)), rng.integers(0, 2, 30)
        after = tune(p, (X, y), TrainConfig(learning_rate=1e-3, batch_size=30))
        assert loss(after, (X, y)) < loss(p, (X, y))


def test_tune_empty_dataset(small_params):
    with pytest.raises(DatasetError):
        tune(small_params, (np.zeros((0, 4)), np.zeros(0)), TrainConfig())
