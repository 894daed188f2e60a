"""Network tests. The gradient oracle is central finite differences of the
public predict function, so it exercises normalization and the output
nonlinearity exactly as callers see them."""

import numpy as np
import pytest

from lpattr.data import generate_dataset
from lpattr.encodings import make_encoding
from lpattr.errors import ConfigurationError, TrainingDivergenceError, ValidationError
from lpattr.fixtures import lp_box
from lpattr.nn import (
    AnalyticModel,
    Model,
    ModelConfig,
    accuracy,
    fit_arrays,
    load_model,
    save_model,
    train_model,
)

UNIT_BOX2 = np.array([[0.0, 1.0], [0.0, 1.0]])


def tiny_config(**kw):
    base = dict(depth=3, hidden_width=8, epochs=3, seed=1)
    base.update(kw)
    return ModelConfig(**base)


def small_trained(activation="smooth-softplus", loss="squared-error", seed=1):
    rng = np.random.Generator(np.random.PCG64(99))
    X = rng.uniform(0, 1, size=(256, 2))
    y = (X.sum(axis=1) > 1).astype(float) if loss == "logistic" else np.sin(X[:, 0]) + X[:, 1]
    cfg = tiny_config(activation=activation, loss=loss, seed=seed)
    return fit_arrays(X, y, cfg, UNIT_BOX2)


def fd_gradient(model, x, h=1e-4):
    g = np.zeros_like(x)
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (model.predict(x + e) - model.predict(x - e)) / (2 * h)
    return g


@pytest.mark.parametrize("activation", ["smooth-softplus", "tanh", "piecewise-linear"])
def test_gradient_matches_finite_differences(activation):
    model = small_trained(activation=activation)
    rng = np.random.Generator(np.random.PCG64(7))
    for x in rng.uniform(0.05, 0.95, size=(25, 2)):
        got = model.input_gradient(x)
        want = fd_gradient(model, x)
        assert np.abs(got - want).max() <= 1e-3 * (1 + np.abs(want).max())


def test_gradient_matches_finite_differences_logistic():
    model = small_trained(loss="logistic")
    rng = np.random.Generator(np.random.PCG64(8))
    for x in rng.uniform(0.05, 0.95, size=(25, 2)):
        got = model.input_gradient(x)
        want = fd_gradient(model, x)
        assert np.abs(got - want).max() <= 1e-3 * (1 + np.abs(want).max())


def test_gradient_respects_input_normalization():
    # same data expressed in a 10x wider box must give the same function of
    # the original coordinates, hence 10x smaller gradient per unit
    rng = np.random.Generator(np.random.PCG64(12))
    X = rng.uniform(0, 1, size=(128, 2))
    y = X[:, 0] * 2
    m1 = fit_arrays(X, y, tiny_config(), UNIT_BOX2)
    m2 = fit_arrays(X * 10, y, tiny_config(), UNIT_BOX2 * 10)
    x = np.array([0.4, 0.7])
    np.testing.assert_allclose(m1.predict(x), m2.predict(x * 10), atol=1e-12)
    np.testing.assert_allclose(m1.input_gradient(x), m2.input_gradient(x * 10) * 10, atol=1e-9)


def test_constant_target_learned():
    rng = np.random.Generator(np.random.PCG64(21))
    X = rng.uniform(0, 1, size=(2000, 2))
    y = np.full(2000, 0.37)
    model = fit_arrays(X, y, ModelConfig(seed=1), UNIT_BOX2)
    held = rng.uniform(0, 1, size=(100, 2))
    assert np.abs(model.predict_many(held) - 0.37).max() <= 0.01


def test_zero_weight_model_zero_gradient():
    cfg = tiny_config()
    model = Model(
        weights=[np.zeros((8, 2)), np.zeros((8, 8)), np.zeros((1, 8))],
        biases=[np.zeros(8), np.zeros(8), np.zeros(1)],
        config=cfg,
        input_dim=2,
        bbox=UNIT_BOX2,
    )
    np.testing.assert_array_equal(model.input_gradient([0.3, 0.4]), [0.0, 0.0])


def test_logistic_predictions_in_unit_interval():
    model = small_trained(loss="logistic")
    rng = np.random.Generator(np.random.PCG64(31))
    p = model.predict_many(rng.uniform(-2, 3, size=(200, 2)))
    assert (p >= 0).all() and (p <= 1).all()


def test_logistic_requires_binary_targets():
    X = np.zeros((10, 2))
    y = np.linspace(0, 2, 10)
    with pytest.raises(ConfigurationError):
        fit_arrays(X, y, tiny_config(loss="logistic"), UNIT_BOX2)


def test_depth_counts_weight_layers():
    model = small_trained()
    assert len(model.weights) == model.config.depth
    assert model.weights[0].shape == (8, 2)
    assert model.weights[-1].shape == (1, 8)


def test_config_validation():
    with pytest.raises(ConfigurationError):
        ModelConfig(depth=1)
    with pytest.raises(ConfigurationError):
        ModelConfig(activation="swish")
    with pytest.raises(ConfigurationError):
        ModelConfig(loss="hinge")
    with pytest.raises(ConfigurationError):
        ModelConfig(momentum=1.0)


def test_dimension_mismatch():
    model = small_trained()
    with pytest.raises(ValidationError):
        model.predict([1.0, 2.0, 3.0])
    with pytest.raises(ValidationError):
        model.input_gradient([1.0])


def test_divergence_raises_with_state():
    rng = np.random.Generator(np.random.PCG64(41))
    X = rng.uniform(0, 1, size=(64, 2))
    y = rng.uniform(0, 1, size=64)
    with np.errstate(all="ignore"), pytest.raises(TrainingDivergenceError) as exc:
        fit_arrays(X, y, tiny_config(learning_rate=1e9, epochs=50), UNIT_BOX2)
    assert exc.value.last_state is not None


def test_training_determinism(tmp_path):
    lp = lp_box()
    ds = generate_dataset(lp, make_encoding(lp, "boundary-distance"), 400, seed=3)
    cfg = tiny_config(epochs=2)
    p1, p2 = tmp_path / "m1.bin", tmp_path / "m2.bin"
    save_model(train_model(ds, cfg), p1)
    save_model(train_model(ds, cfg), p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_model_round_trip(tmp_path):
    model = small_trained()
    path = tmp_path / "model.bin"
    save_model(model, path)
    back = load_model(path)
    rng = np.random.Generator(np.random.PCG64(51))
    X = rng.uniform(0, 1, size=(50, 2))
    np.testing.assert_array_equal(model.predict_many(X), back.predict_many(X))
    np.testing.assert_array_equal(model.input_gradient_many(X), back.input_gradient_many(X))
    assert back.config == model.config
    assert back.training_summary.keys() == model.training_summary.keys()


def test_train_model_uses_split_and_reports():
    lp = lp_box()
    ds = generate_dataset(lp, make_encoding(lp, "feasibility"), 1000, seed=5)
    model = train_model(ds, tiny_config(epochs=5))
    assert "train_loss" in model.training_summary
    assert "val_loss" in model.training_summary
    assert "val_accuracy" in model.training_summary


def test_accuracy_helper():
    model = AnalyticModel(fn=lambda X: X[:, 0], grad=lambda X: np.ones_like(X), input_dim=2)
    X = np.array([[0.9, 0.0], [0.1, 0.0], [0.8, 0.0], [0.2, 0.0]])
    y = np.array([1.0, 0.0, 0.0, 1.0])
    assert accuracy(model, X, y) == pytest.approx(0.5)


def test_analytic_model_interface():
    m = AnalyticModel(fn=lambda X: X[:, 0] ** 2, grad=lambda X: np.column_stack([2 * X[:, 0], np.zeros(len(X))]), input_dim=2)
    assert m.predict([3.0, 1.0]) == pytest.approx(9.0)
    np.testing.assert_allclose(m.input_gradient([3.0, 1.0]), [6.0, 0.0])
