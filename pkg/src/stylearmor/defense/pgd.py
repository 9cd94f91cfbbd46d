"""Worst-case single-attribute adversarial training.

Every epoch, each training program is paired with whichever of its
single-attribute perturbations the current model finds hardest (highest
loss), and the full network trains on the originals plus those worst cases.
Unlike the attacks, this inner step reads the model.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence

import numpy as np

from stylearmor.defense.augment import Augmented, attribute_perturbations, author_profiles
from stylearmor.model.features import build_schema, vectorize_many
from stylearmor.model.network import Model, forward, loss_and_grad
from stylearmor.model.train import Hyperparams, LabeledProgram, converged, label_corpus, make_optimizer, new_model

logger = logging.getLogger(__name__)


def candidate_pool(corpus: Sequence[LabeledProgram], seed: int = 0) -> tuple[Augmented, list[int]]:
    """All certified single-attribute perturbations, and the corpus index each came from."""
    donors = list(author_profiles(corpus).values())
    pool = Augmented()
    owners: list[int] = []
    for k, (program, author) in enumerate(corpus):
        before = len(pool.items)
        attribute_perturbations(program, author, donors, seed=seed, out=pool)
        owners.extend([k] * (len(pool.items) - before))
    return pool, owners


def worst_cases(model: Model, x_pool: np.ndarray, y_pool: np.ndarray, owners: np.ndarray) -> np.ndarray:
    """Index into the pool of the highest-loss candidate per owner."""
    if len(x_pool) == 0:
        return np.empty(0, dtype=np.int64)
    probs = forward(model.params, x_pool)[0]
    losses = -np.log(np.clip(probs[np.arange(len(y_pool)), y_pool], 1e-300, None))
    best: dict[int, int] = {}
    for i, owner in enumerate(owners.tolist()):
        if owner not in best or losses[i] > losses[best[owner]]:
            best[owner] = i
    return np.array([best[k] for k in sorted(best)], dtype=np.int64)


def train_pgd_at(corpus: Sequence[LabeledProgram], hp: Hyperparams, *, seed: int = 0) -> Model:
    """Raises DegenerateCorpus with fewer than two authors."""
    labels, y = label_corpus(corpus)
    pool, owner_list = candidate_pool(corpus, seed)
    programs = [p for p, _ in corpus]
    schema = build_schema(programs + [p for p, _ in pool.items], hp.vocab_size)
    x = vectorize_many(programs, schema)
    x_pool = vectorize_many([p for p, _ in pool.items], schema)
    y_pool = y[np.array(owner_list, dtype=np.int64)] if owner_list else np.empty(0, dtype=np.int64)
    owners = np.array(owner_list, dtype=np.int64)
    model, rng = new_model(labels, schema, hp)
    optimizer = make_optimizer(hp)
    for epoch in range(hp.epochs):
        chosen = worst_cases(model, x_pool, y_pool, owners)
        x_epoch = np.vstack([x, x_pool[chosen]])
        y_epoch = np.concatenate([y, y_pool[chosen]])
        order = rng.permutation(len(x_epoch))
        total = 0.0
        for start in range(0, len(order), hp.batch_size):
            batch = order[start : start + hp.batch_size]
            loss, grads = loss_and_grad(model.params, x_epoch[batch], y_epoch[batch])
            optimizer.step(model.params, grads)
            total += loss * len(batch)
        model.history.append(total / len(order))
        if converged(model.history, hp):
            logger.debug("pgd-at converged after %d epochs", epoch + 1)
            break
    logger.info("pgd-at: %d programs, %d candidates, final loss %.4f", len(corpus), len(x_pool), model.history[-1])
    return model
