"""Feed-forward classifier with width-sliced evaluation.

Weights are stored as ``(fan_out, fan_in)`` matrices. At width ``w`` every
hidden layer keeps only its first ``ceil(w * size)`` units; the input and the
output layer are never sliced, so the sub-network at a smaller width is a
sub-graph of the one at any larger width.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from stylearmor.errors import SchemaMismatch
from stylearmor.lang.program import Program
from stylearmor.model.features import FeatureSchema, FeatureVector, vectorize, vectorize_many


@dataclass
class Params:
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def zeros_like(self) -> Params:
        return Params([np.zeros_like(w) for w in self.weights], [np.zeros_like(b) for b in self.biases])

    def copy(self) -> Params:
        return Params([w.copy() for w in self.weights], [b.copy() for b in self.biases])

    def arrays(self) -> list[np.ndarray]:
        """Weights and biases interleaved layer by layer."""
        return [a for pair in zip(self.weights, self.biases) for a in pair]

    def __add__(self, other: Params) -> Params:
        return Params(
            [a + b for a, b in zip(self.weights, other.weights)],
            [a + b for a, b in zip(self.biases, other.biases)],
        )

    def max_abs(self) -> float:
        return max((float(np.max(np.abs(a))) for a in self.arrays() if a.size), default=0.0)


def init_params(layer_sizes: Sequence[int], rng: np.random.Generator) -> Params:
    """Glorot-uniform weights, zero biases."""
    weights, biases = [], []
    for fan_in, fan_out in zip(layer_sizes, layer_sizes[1:]):
        limit = math.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return Params(weights, biases)


def active_sizes(layer_sizes: Sequence[int], width: float | None) -> list[int]:
    """Units in use per layer; only hidden layers shrink."""
    if width is None or width >= 1.0:
        return list(layer_sizes)
    if width <= 0.0:
        raise ValueError("width must be in (0, 1]")
    last = len(layer_sizes) - 1
    return [n if i in (0, last) else max(1, math.ceil(width * n)) for i, n in enumerate(layer_sizes)]


def softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def forward(params: Params, x: np.ndarray, width: float | None = None) -> tuple[np.ndarray, list[np.ndarray]]:
    """Class probabilities for the rows of ``x`` and the activations per layer."""
    sizes = active_sizes([params.weights[0].shape[1], *(w.shape[0] for w in params.weights)], width)
    activations = [x]
    a = x
    last = len(params.weights) - 1
    for i, (w, b) in enumerate(zip(params.weights, params.biases)):
        z = a @ w[: sizes[i + 1], : sizes[i]].T + b[: sizes[i + 1]]
        a = softmax(z) if i == last else np.tanh(z)
        activations.append(a)
    return a, activations


def loss_and_grad(
    params: Params,
    x: np.ndarray,
    y: np.ndarray,
    width: float | None = None,
    *,
    out: Params | None = None,
) -> tuple[float, Params]:
    """Mean cross-entropy over the batch and its gradient.

    Gradients have the full parameter shapes and are zero outside the slice
    used at ``width``. With ``out`` the gradient is added into that buffer,
    which is also returned.
    """
    if len(x) == 0:
        raise ValueError("empty batch")
    probs, acts = forward(params, x, width)
    n = len(x)
    picked = probs[np.arange(n), y]
    loss = float(-np.mean(np.log(np.clip(picked, 1e-300, None))))
    grads = out if out is not None else params.zeros_like()
    delta = probs.copy()
    delta[np.arange(n), y] -= 1.0
    delta /= n
    for i in range(len(params.weights) - 1, -1, -1):
        rows, cols = delta.shape[1], acts[i].shape[1]
        grads.weights[i][:rows, :cols] += delta.T @ acts[i]
        grads.biases[i][:rows] += delta.sum(axis=0)
        if i > 0:
            upstream = delta @ params.weights[i][:rows, :cols]
            delta = upstream * (1.0 - acts[i] ** 2)
    return loss, grads


@dataclass
class Model:
    """A trained classifier together with the feature schema it expects.

    ``labels`` are sorted, so ``argmax`` already breaks ties toward the
    lexicographically smaller author id.
    """

    layer_sizes: tuple[int, ...]
    params: Params
    labels: tuple[str, ...]
    schema: FeatureSchema
    seed: int = 0
    history: list[float] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.layer_sizes[-1] != len(self.labels):
            raise ValueError("output layer size must equal the number of labels")
        if self.layer_sizes[0] != self.schema.dimension:
            raise SchemaMismatch(
                f"input layer has {self.layer_sizes[0]} units, schema has {self.schema.dimension}"
            )

    def label_index(self, author_id: str) -> int:
        return self.labels.index(author_id)

    def predict_matrix(self, x: np.ndarray, width: float | None = None) -> np.ndarray:
        return forward(self.params, x, width)[0]


def predict_vector(model: Model, vector: FeatureVector) -> np.ndarray:
    """Raises SchemaMismatch when ``vector`` was built for another schema."""
    if vector.schema_id != model.schema.schema_id or vector.values.shape != (model.schema.dimension,):
        raise SchemaMismatch(f"vector schema {vector.schema_id} does not match model {model.schema.schema_id}")
    return model.predict_matrix(vector.values[None, :])[0]


def predict(model: Model, program: Program) -> np.ndarray:
    """Probability per label, in ``model.labels`` order."""
    return predict_vector(model, vectorize(program, model.schema))


def predict_label(model: Model, program: Program) -> str:
    return model.labels[int(np.argmax(predict(model, program)))]


def predict_labels(model: Model, programs: Sequence[Program]) -> list[str]:
    if not programs:
        return []
    probs = model.predict_matrix(vectorize_many(programs, model.schema))
    return [model.labels[int(i)] for i in np.argmax(probs, axis=1)]
