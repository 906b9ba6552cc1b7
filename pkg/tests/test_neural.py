import numpy as np
import pytest

from dataset import select_features
from errors import ConfigurationError, DivergenceError, DomainError
from estimators.early_stopping import EarlyStopping
from estimators.linear import fit_ols
from estimators.neural import (
    backprop_gradients,
    build_train_config,
    finite_diff_gradients,
    forward,
    forward_batch,
    gradient_check_error,
    init_mlp,
    loss_mse,
    train_mlp,
)
from models.linear import Standardization
from models.mlp import MlpModel

FEATURES = ["weight", "chest", "abdomen", "hip", "thigh"]


def _same_parameters(a: MlpModel, b: MlpModel) -> bool:
    return all(np.array_equal(x, y) for x, y in zip(a.weights + a.biases, b.weights + b.biases))


def _zeroed(model: MlpModel) -> MlpModel:
    return model.with_parameters(
        [np.zeros_like(w) for w in model.weights], [np.zeros_like(b) for b in model.biases]
    )


def _reference_forward(model: MlpModel, x: np.ndarray) -> float:
    """Plain-loop forward pass used as an independent check"""
    a = [(x[j] - model.standardization.means[j]) / model.standardization.sds[j] for j in range(len(x))]
    for k, (W, b) in enumerate(zip(model.weights, model.biases)):
        z = [sum(W[i, j] * a[j] for j in range(len(a))) + b[i] for i in range(W.shape[0])]
        if k < len(model.weights) - 1:
            if model.activation == "relu":
                z = [max(v, 0.0) for v in z]
            elif model.activation == "tanh":
                z = [float(np.tanh(v)) for v in z]
        a = z
    return a[0]


class TestInit:
    def test_same_seed_same_parameters(self):
        a = init_mlp([5, 16, 8, 1], "relu", seed=7)
        b = init_mlp([5, 16, 8, 1], "relu", seed=7)
        assert _same_parameters(a, b)
        assert not _same_parameters(a, init_mlp([5, 16, 8, 1], "relu", seed=8))

    def test_scaled_uniform_and_zero_bias(self):
        model = init_mlp([5, 16, 8, 1], "relu", seed=3)
        for w, fan_in in zip(model.weights, (5, 16, 8)):
            assert np.all(np.abs(w) <= 1.0 / np.sqrt(fan_in))
        assert all(np.all(b == 0) for b in model.biases)
        assert model.descriptor == "mlp[5-16-8-1](relu)"

    @pytest.mark.parametrize("dims", [[5, 16, 0, 1], [5, 2], [5], [5, -3, 1]])
    def test_invalid_dims(self, dims):
        with pytest.raises(ConfigurationError):
            init_mlp(dims, "relu", seed=0)

    def test_unknown_activation(self):
        with pytest.raises(ConfigurationError):
            init_mlp([3, 1], "sigmoid")

    def test_parameters_are_read_only(self):
        model = init_mlp([3, 4, 1], "tanh", seed=1)
        with pytest.raises(ValueError):
            model.weights[0][0, 0] = 1.0

    def test_serialization(self):
        model = init_mlp([3, 4, 1], "tanh", seed=1, feature_names=("a", "b", "c"))
        restored = MlpModel.from_dict(model.to_dict())
        assert _same_parameters(model, restored)
        assert restored.feature_names == ("a", "b", "c")
        assert MlpModel.is_serialized(model.to_dict())


class TestForward:
    def test_zero_network(self):
        model = _zeroed(init_mlp([5, 16, 8, 1], "relu", seed=0))
        assert forward(model, [80.0, 100.0, 90.0, 99.0, 59.0]) == 0.0

    def test_affine_case(self):
        std = Standardization(means=(1.0, 2.0, 3.0, 4.0, 5.0), sds=(2.0, 2.0, 1.0, 4.0, 0.5))
        w = np.array([[0.5, -1.0, 2.0, 0.25, 1.5]])
        b = np.array([3.0])
        model = init_mlp([5, 1], "identity", seed=0, standardization=std).with_parameters([w], [b])
        x = np.array([3.0, 0.0, 4.0, 8.0, 5.5])
        x_tilde = (x - np.array(std.means)) / np.array(std.sds)
        assert forward(model, x) == pytest.approx(float(w[0] @ x_tilde + b[0]), abs=1e-12)

    @pytest.mark.parametrize("activation", ["relu", "tanh", "identity"])
    def test_matches_reference(self, activation):
        rng = np.random.default_rng(11)
        std = Standardization(means=tuple(rng.normal(size=4)), sds=tuple(rng.uniform(0.5, 2.0, 4)))
        model = init_mlp([4, 6, 3, 1], activation, seed=21, standardization=std)
        model = model.with_parameters(model.weights, [rng.normal(size=b.shape) for b in model.biases])
        x = rng.normal(size=4)
        assert forward(model, x) == pytest.approx(_reference_forward(model, x), abs=1e-12)

    def test_arity_mismatch(self):
        model = init_mlp([5, 1], "relu")
        with pytest.raises(ConfigurationError):
            forward(model, [1.0, 2.0])
        with pytest.raises(ConfigurationError):
            forward_batch(model, np.ones((3, 4)))


class TestLoss:
    def test_values(self):
        assert loss_mse([1.0, 2.0], [1.0, 2.0]) == 0.0
        assert loss_mse([0, 0], [1, 3]) == pytest.approx(5.0)
        assert loss_mse([2], [5]) == pytest.approx(9.0)

    def test_empty(self):
        with pytest.raises(DomainError):
            loss_mse([], [])


class TestGradients:
    def test_zero_at_perfect_fit(self):
        rng = np.random.default_rng(0)
        model = init_mlp([3, 5, 1], "tanh", seed=2)
        X = rng.normal(size=(6, 3))
        grads = backprop_gradients(model, X, forward_batch(model, X))
        assert np.allclose(grads.flat(), 0.0, atol=1e-14)

    def test_single_weight_by_hand(self):
        std = Standardization(means=(1.0,), sds=(2.0,))
        model = init_mlp([1, 1], "identity", standardization=std).with_parameters(
            [np.array([[0.7]])], [np.array([0.2])]
        )
        x, y = 5.0, 1.0
        x_tilde = (x - 1.0) / 2.0
        residual = 0.7 * x_tilde + 0.2 - y
        grads = backprop_gradients(model, [[x]], [y])
        assert grads.weights[0][0, 0] == pytest.approx(2 * residual * x_tilde)
        assert grads.biases[0][0] == pytest.approx(2 * residual)

        numeric = finite_diff_gradients(model, [[x]], [y])
        assert numeric.weights[0][0, 0] == pytest.approx(2 * residual * x_tilde, abs=1e-8)
        assert numeric.biases[0][0] == pytest.approx(2 * residual, abs=1e-8)

    def test_finite_difference_zero_network(self):
        model = _zeroed(init_mlp([3, 4, 1], "relu", seed=0))
        numeric = finite_diff_gradients(model, np.ones((2, 3)), np.zeros(2))
        assert np.allclose(numeric.flat(), 0.0, atol=1e-12)

    def test_backprop_matches_finite_differences(self):
        rng = np.random.default_rng(12345)
        worst = 0.0
        for trial in range(100):
            depth = int(rng.integers(0, 3))
            dims = [int(rng.integers(1, 5))] + [int(rng.integers(1, 6)) for _ in range(depth)] + [1]
            activation = "tanh" if trial % 4 else "identity"
            std = Standardization(
                means=tuple(rng.normal(size=dims[0])), sds=tuple(rng.uniform(0.5, 2.0, dims[0]))
            )
            model = init_mlp(dims, activation, seed=int(rng.integers(0, 2**32)), standardization=std)
            model = model.with_parameters(
                model.weights, [rng.normal(0, 0.5, b.shape) for b in model.biases]
            )
            m = int(rng.integers(1, 9))
            X = rng.normal(size=(m, dims[0]))
            y = rng.normal(size=m)
            error = gradient_check_error(
                backprop_gradients(model, X, y), finite_diff_gradients(model, X, y, epsilon=1e-5)
            )
            worst = max(worst, error)
        assert worst <= 1e-4

    def test_relu_away_from_kinks(self):
        rng = np.random.default_rng(4)
        model = init_mlp([3, 8, 4, 1], "relu", seed=9)
        model = model.with_parameters(model.weights, [np.full(b.shape, 0.3) for b in model.biases])
        X = rng.normal(size=(5, 3))
        y = rng.normal(size=5)
        error = gradient_check_error(backprop_gradients(model, X, y), finite_diff_gradients(model, X, y))
        assert error <= 1e-4

    def test_shape_mismatch(self):
        model = init_mlp([3, 1], "relu")
        with pytest.raises(ConfigurationError):
            backprop_gradients(model, np.ones((2, 3)), np.ones(3))
        with pytest.raises(ConfigurationError):
            finite_diff_gradients(model, np.ones((2, 3)), np.ones(2), epsilon=0)


class TestEarlyStopping:
    def test_patience_zero_stops_at_first_plateau(self):
        stopper = EarlyStopping(patience=0)
        assert [stopper(e, loss) for e, loss in enumerate([5.0, 4.0, 4.5])] == [False, False, True]
        assert stopper.best_epoch == 1

    def test_patience_counts_consecutive_epochs(self):
        stopper = EarlyStopping(patience=2)
        decisions = [stopper(e, loss, state=e) for e, loss in enumerate([5.0, 4.0, 4.5, 3.5, 3.6, 3.7])]
        assert decisions == [False, False, False, False, False, True]
        assert stopper.best_state == 3

    def test_restoration_tracks_lowest_loss(self):
        stopper = EarlyStopping(patience=1, min_delta=1e-3)
        stopper(0, 5.0, state="first")
        assert stopper(1, 4.9999, state="second")
        assert stopper.best_state == "second"


class TestTrainMlp:
    @pytest.fixture
    def design(self, synthetic_records):
        return select_features(synthetic_records, FEATURES)

    def test_realizable_affine_target(self):
        rng = np.random.default_rng(8)
        X = rng.normal(size=(200, 5)) * [10, 5, 8, 4, 3] + [80, 100, 92, 99, 59]
        y = X @ np.array([0.1, -0.05, 0.6, 0.2, 0.1]) - 40.0
        cfg = build_train_config(
            hidden_dims=[], activation="identity", learning_rate=0.05, batch_size=16,
            max_epochs=300, holdout_fraction=0.0, early_stopping_patience=300,
            early_stopping_min_delta=0.0,
        )
        model, trace = train_mlp(X, y, cfg)
        assert min(trace.train_losses) < 1e-6
        assert loss_mse(forward_batch(model, X), y) < 1e-6

    def test_deterministic(self, design):
        X, y = design
        cfg = build_train_config(seed=5, max_epochs=5)
        a, trace_a = train_mlp(X, y, cfg, FEATURES)
        b, trace_b = train_mlp(X, y, cfg, FEATURES)
        assert _same_parameters(a, b)
        assert trace_a == trace_b
        assert a.feature_names == tuple(FEATURES)

    def test_best_epoch_restored(self, design):
        X, y = design
        cfg = build_train_config(
            seed=1, learning_rate=0.05, max_epochs=40, holdout_fraction=0.0,
            early_stopping_patience=5,
        )
        model, trace = train_mlp(X, y, cfg)
        best = min(trace.monitored_losses)
        assert trace.monitored_losses[trace.best_epoch] == best
        assert loss_mse(forward_batch(model, X), y) == pytest.approx(best, rel=1e-9)

    def test_holdout_is_traced(self, design):
        X, y = design
        _, trace = train_mlp(X, y, build_train_config(seed=2, max_epochs=8, holdout_fraction=0.2))
        assert trace.has_holdout
        assert all(e.holdout_loss is not None for e in trace.epochs)
        assert len(trace) <= 8

    def test_linear_network_matches_ols(self, design):
        X, y = design
        cfg = build_train_config(
            hidden_dims=[], activation="identity", learning_rate=0.1, batch_size=len(y),
            max_epochs=3000, holdout_fraction=0.0, early_stopping_patience=3000,
            early_stopping_min_delta=0.0,
        )
        model, _ = train_mlp(X, y, cfg)
        ols = fit_ols(X, y)
        gap = forward_batch(model, X) - ols.predict(X)
        assert float(np.sqrt(np.mean(gap ** 2))) < 1e-3

    def test_divergence(self, design):
        X, y = design
        cfg = build_train_config(
            hidden_dims=[], activation="identity", learning_rate=1e3, batch_size=len(y),
            max_epochs=500, holdout_fraction=0.0, early_stopping_patience=500,
        )
        with pytest.raises(DivergenceError):
            train_mlp(X, y, cfg)

    def test_too_few_samples(self):
        with pytest.raises(DomainError):
            train_mlp(np.ones((1, 2)), np.ones(1))

    @pytest.mark.parametrize(
        "override",
        [{"holdout_fraction": 0.5}, {"batch_size": 0}, {"activation": "softplus"}, {"hidden_dims": [4, 0]}],
    )
    def test_invalid_config(self, override):
        with pytest.raises(ConfigurationError):
            build_train_config(**override)
