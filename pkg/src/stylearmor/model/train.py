"""Mini-batch training of the attribution network."""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from stylearmor.errors import DegenerateCorpus
from stylearmor.lang.program import Program
from stylearmor.model.features import DEFAULT_VOCAB_SIZE, FeatureSchema, build_schema, vectorize_many
from stylearmor.model.network import Model, Params, init_params, loss_and_grad

logger = logging.getLogger(__name__)

LabeledProgram = tuple[Program, str]

# (row indices of the batch, iteration) -> (loss, gradient)
Objective = Callable[[np.ndarray, int], tuple[float, Params]]

OPTIMIZERS = ("adam", "sgd")


@dataclass(frozen=True)
class Hyperparams:
    batch_size: int = 128
    learning_rate: float = 1e-4
    epochs: int = 200
    hidden_sizes: tuple[int, ...] = (64, 64)
    seed: int = 0
    optimizer: str = "adam"
    vocab_size: int = DEFAULT_VOCAB_SIZE
    patience: int = 10
    min_delta: float = 1e-5

    def __post_init__(self) -> None:
        for name in ("batch_size", "learning_rate", "epochs", "patience"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not self.hidden_sizes or any(h <= 0 for h in self.hidden_sizes):
            raise ValueError("hidden sizes must be positive")
        if self.seed < 0 or self.vocab_size < 0:
            raise ValueError("seed and vocab_size must be non-negative")
        if self.optimizer not in OPTIMIZERS:
            raise ValueError(f"optimizer must be one of {', '.join(OPTIMIZERS)}")


class Sgd:
    def __init__(self, learning_rate: float) -> None:
        self.learning_rate = learning_rate

    def step(self, params: Params, grads: Params) -> None:
        for p, g in zip(params.arrays(), grads.arrays()):
            p -= self.learning_rate * g


class Adam:
    def __init__(self, learning_rate: float, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8) -> None:
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m: list[np.ndarray] | None = None
        self.v: list[np.ndarray] | None = None

    def step(self, params: Params, grads: Params) -> None:
        arrays = params.arrays()
        if self.m is None or self.v is None:
            self.m = [np.zeros_like(a) for a in arrays]
            self.v = [np.zeros_like(a) for a in arrays]
        self.t += 1
        scale = self.learning_rate * np.sqrt(1 - self.beta2**self.t) / (1 - self.beta1**self.t)
        for p, g, m, v in zip(arrays, grads.arrays(), self.m, self.v):
            m *= self.beta1
            m += (1 - self.beta1) * g
            v *= self.beta2
            v += (1 - self.beta2) * g * g
            p -= scale * m / (np.sqrt(v) + self.eps)


def make_optimizer(hp: Hyperparams) -> Sgd | Adam:
    return Adam(hp.learning_rate) if hp.optimizer == "adam" else Sgd(hp.learning_rate)


def converged(history: Sequence[float], hp: Hyperparams) -> bool:
    """Loss improved by less than ``min_delta`` over the last ``patience`` epochs."""
    if len(history) <= hp.patience:
        return False
    return history[-hp.patience - 1] - min(history[-hp.patience :]) < hp.min_delta


def label_corpus(corpus: Sequence[LabeledProgram]) -> tuple[tuple[str, ...], np.ndarray]:
    """Sorted label list and the integer label of every item.

    Raises:
        DegenerateCorpus: with fewer than two authors.
    """
    labels = tuple(sorted({author for _, author in corpus}))
    if len(labels) < 2:
        raise DegenerateCorpus(f"need at least two authors, got {len(labels)}")
    index = {a: i for i, a in enumerate(labels)}
    return labels, np.array([index[a] for _, a in corpus], dtype=np.int64)


def new_model(labels: tuple[str, ...], schema: FeatureSchema, hp: Hyperparams) -> tuple[Model, np.random.Generator]:
    """Freshly initialized model and the generator that goes on to shuffle batches."""
    rng = np.random.default_rng(hp.seed)
    sizes = (schema.dimension, *hp.hidden_sizes, len(labels))
    return Model(sizes, init_params(sizes, rng), labels, schema, hp.seed), rng


def run_epochs(model: Model, hp: Hyperparams, n_items: int, objective: Objective, rng: np.random.Generator) -> None:
    """Shuffle, batch, step; append the mean epoch loss to ``model.history``."""
    optimizer = make_optimizer(hp)
    iteration = 0
    for epoch in range(hp.epochs):
        order = rng.permutation(n_items)
        total = 0.0
        for start in range(0, n_items, hp.batch_size):
            batch = order[start : start + hp.batch_size]
            loss, grads = objective(batch, iteration)
            optimizer.step(model.params, grads)
            total += loss * len(batch)
            iteration += 1
        model.history.append(total / n_items)
        if converged(model.history, hp):
            logger.debug("converged after %d epochs (loss %.6f)", epoch + 1, model.history[-1])
            break


def fit(x: np.ndarray, y: np.ndarray, labels: tuple[str, ...], schema: FeatureSchema, hp: Hyperparams) -> Model:
    model, rng = new_model(labels, schema, hp)

    def objective(batch: np.ndarray, iteration: int) -> tuple[float, Params]:
        return loss_and_grad(model.params, x[batch], y[batch])

    run_epochs(model, hp, len(x), objective, rng)
    return model


def train(corpus: Sequence[LabeledProgram], hp: Hyperparams, schema: FeatureSchema | None = None) -> Model:
    """Train the baseline classifier.

    The vocabulary is built from ``corpus`` unless ``schema`` is given.

    Args:
        corpus: ``(program, author)`` pairs.
        hp: Network shape, optimizer and schedule; ``hp.seed`` fixes
            initialization and batch order.
        schema: A frozen vocabulary to reuse.

    Returns:
        Model: The trained network with its labels, schema and loss history.

    Raises:
        DegenerateCorpus: with fewer than two authors.
    """
    labels, y = label_corpus(corpus)
    programs = [p for p, _ in corpus]
    if schema is None:
        schema = build_schema(programs, hp.vocab_size)
    model = fit(vectorize_many(programs, schema), y, labels, schema, hp)
    logger.info("trained on %d programs, %d authors, final loss %.4f", len(corpus), len(labels), model.history[-1])
    return model


def accuracy(model: Model, corpus: Sequence[LabeledProgram]) -> float:
    if not corpus:
        return 0.0
    probs = model.predict_matrix(vectorize_many([p for p, _ in corpus], model.schema))
    predicted = [model.labels[int(i)] for i in np.argmax(probs, axis=1)]
    return sum(p == a for p, (_, a) in zip(predicted, corpus)) / len(corpus)
