"""Unit tests for features, the network, training and model files."""

from __future__ import annotations

import numpy as np
import pytest

from stylearmor.errors import DegenerateCorpus, ModelFormatError, SchemaMismatch
from stylearmor.lang.parser import parse
from stylearmor.lang.render import render
from stylearmor.model import (
    FeatureVector,
    Hyperparams,
    Model,
    accuracy,
    build_schema,
    load_model,
    loss_and_grad,
    predict,
    predict_label,
    predict_vector,
    save_model,
    train,
    vectorize,
)
from stylearmor.model.features import STYLE_SLOTS
from stylearmor.model.network import active_sizes, forward, init_params

SIZES = [4, 6, 6, 3]


@pytest.fixture
def corpus(pancakes, target_programs):
    return [(pancakes, "a"), *((p, "b") for p in target_programs)]


@pytest.fixture
def hp():
    return Hyperparams(batch_size=4, learning_rate=0.05, epochs=60, hidden_sizes=(8, 8), vocab_size=64)


def _numeric_grad(params, x, y, width, eps=1e-6):
    out = []
    for a in params.arrays():
        g = np.zeros_like(a)
        for idx in np.ndindex(a.shape):
            old = a[idx]
            a[idx] = old + eps
            up = loss_and_grad(params, x, y, width)[0]
            a[idx] = old - eps
            down = loss_and_grad(params, x, y, width)[0]
            a[idx] = old
            g[idx] = (up - down) / (2 * eps)
        out.append(g)
    return out


class TestNetwork:
    """Tests for the forward pass and its gradient."""

    def test_active_sizes(self):
        assert active_sizes(SIZES, None) == SIZES
        assert active_sizes(SIZES, 0.5) == [4, 3, 3, 3]
        assert active_sizes(SIZES, 0.8) == [4, 5, 5, 3]
        with pytest.raises(ValueError):
            active_sizes(SIZES, 0.0)

    def test_probabilities(self):
        params = init_params(SIZES, np.random.default_rng(0))
        probs, _ = forward(params, np.random.default_rng(1).normal(size=(5, 4)), 0.5)
        assert probs.shape == (5, 3)
        assert np.allclose(probs.sum(axis=1), 1.0)

    @pytest.mark.parametrize("width", [0.8, 0.9, 1.0])
    def test_gradient_matches_finite_differences(self, width):
        rng = np.random.default_rng(7)
        params = init_params(SIZES, rng)
        x = rng.normal(size=(5, 4))
        y = np.array([0, 1, 2, 1, 0])
        _, grads = loss_and_grad(params, x, y, width)
        for analytic, numeric in zip(grads.arrays(), _numeric_grad(params, x, y, width)):
            assert np.allclose(analytic, numeric, rtol=1e-4, atol=1e-7)

    def test_gradient_zero_outside_slice(self):
        rng = np.random.default_rng(3)
        params = init_params(SIZES, rng)
        _, grads = loss_and_grad(params, rng.normal(size=(4, 4)), np.array([0, 1, 2, 0]), 0.5)
        assert not grads.weights[0][3:].any()
        assert not grads.weights[1][:, 3:].any()
        assert not grads.biases[1][3:].any()

    def test_empty_batch(self):
        params = init_params(SIZES, np.random.default_rng(0))
        with pytest.raises(ValueError):
            loss_and_grad(params, np.zeros((0, 4)), np.zeros(0, dtype=int))

    def test_accumulates_into_buffer(self):
        rng = np.random.default_rng(5)
        params = init_params(SIZES, rng)
        x, y = rng.normal(size=(3, 4)), np.array([2, 1, 0])
        _, once = loss_and_grad(params, x, y)
        buffer = params.zeros_like()
        loss_and_grad(params, x, y, out=buffer)
        loss_and_grad(params, x, y, out=buffer)
        for a, b in zip(buffer.arrays(), once.arrays()):
            assert np.allclose(a, 2 * b)


class TestFeatures:
    """Tests for the feature schema."""

    def test_vocabulary(self, pancakes):
        schema = build_schema([pancakes], size=10)
        assert len(schema.vocab) == 10
        assert list(schema.vocab) == sorted(schema.vocab)
        assert schema.dimension == 10 + len(STYLE_SLOTS)
        assert vectorize(pancakes, schema).values.shape == (schema.dimension,)

    def test_no_vocabulary(self, pancakes):
        schema = build_schema([pancakes], size=0)
        assert schema.vocab == ()
        assert vectorize(pancakes, schema).values.shape == (len(STYLE_SLOTS),)

    def test_isomorphic_programs_agree(self, pancakes):
        schema = build_schema([pancakes], size=32)
        again = parse(render(pancakes))
        assert np.array_equal(vectorize(pancakes, schema).values, vectorize(again, schema).values)


class TestTraining:
    """Tests for training and prediction."""

    def test_hyperparams(self):
        with pytest.raises(ValueError):
            Hyperparams(batch_size=0)
        with pytest.raises(ValueError):
            Hyperparams(hidden_sizes=())
        with pytest.raises(ValueError):
            Hyperparams(optimizer="rmsprop")

    def test_learns_the_training_set(self, corpus, hp):
        model = train(corpus, hp)
        assert model.labels == ("a", "b")
        assert accuracy(model, corpus) == 1.0
        assert model.history[-1] < model.history[0]

    def test_deterministic(self, corpus, hp):
        first, again = train(corpus, hp), train(corpus, hp)
        for a, b in zip(first.params.arrays(), again.params.arrays()):
            assert np.array_equal(a, b)

    def test_sgd(self, corpus):
        model = train(corpus, Hyperparams(batch_size=2, epochs=5, hidden_sizes=(4,), optimizer="sgd", vocab_size=16))
        assert len(model.history) == 5

    def test_one_author(self, pancakes, hp):
        with pytest.raises(DegenerateCorpus):
            train([(pancakes, "a")], hp)

    def test_prediction(self, corpus, hp, pancakes):
        model = train(corpus, hp)
        probs = predict(model, pancakes)
        assert probs.shape == (2,)
        assert predict_label(model, pancakes) == "a"

    def test_schema_mismatch(self, corpus, hp, pancakes):
        model = train(corpus, hp)
        other = build_schema([pancakes], size=3)
        with pytest.raises(SchemaMismatch):
            predict_vector(model, vectorize(pancakes, other))
        with pytest.raises(SchemaMismatch):
            predict_vector(model, FeatureVector(np.zeros(2), model.schema.schema_id))

    def test_model_checks_layers(self, corpus, hp):
        model = train(corpus, hp)
        with pytest.raises(ValueError):
            Model(model.layer_sizes, model.params, ("a", "b", "c"), model.schema)


class TestStore:
    """Tests for model files."""

    def test_round_trip(self, tmp_path, corpus, hp, pancakes):
        model = train(corpus, hp)
        path = tmp_path / "models" / "model.npz"
        save_model(path, model)
        loaded = load_model(path)
        assert loaded.labels == model.labels
        assert loaded.layer_sizes == model.layer_sizes
        assert loaded.schema.schema_id == model.schema.schema_id
        assert loaded.history == model.history
        assert np.array_equal(predict(loaded, pancakes), predict(model, pancakes))

    def test_not_a_model(self, tmp_path):
        path = tmp_path / "model.npz"
        path.write_text("not a model", encoding="utf-8")
        with pytest.raises(ModelFormatError):
            load_model(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ModelFormatError):
            load_model(tmp_path / "absent.npz")

    def test_wrong_version(self, tmp_path):
        path = tmp_path / "model.npz"
        with path.open("wb") as f:
            np.savez(f, header=np.array('{"version": 99}'))
        with pytest.raises(ModelFormatError):
            load_model(path)
