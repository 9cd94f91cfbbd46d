"""Gradient-augmented training on the full network and sampled sub-networks.

Each iteration takes one batch from U for the full network and one batch
from U' that every sampled sub-network evaluates. Both losses are
back-propagated into a single gradient buffer, so the update applied to the
shared parameters is the sum of the full-network and sub-network gradients.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from stylearmor.errors import DegenerateCorpus
from stylearmor.model.features import build_schema, vectorize_many
from stylearmor.model.network import Model, Params, loss_and_grad
from stylearmor.model.train import Hyperparams, LabeledProgram, label_corpus, new_model, run_epochs
from stylearmor.transforms.base import TransformPlan

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AugmentationConfig:
    """Switches for one defense configuration.

    ``sequences`` selects replaying ingested plans instead of per-attribute
    perturbation; ``perturb=False`` leaves U' empty.
    """

    targets: frozenset[str] = frozenset()
    tau: float = 0.0
    sequences: tuple[TransformPlan, ...] | None = None
    perturb: bool = True
    subnetworks: int = 3
    width_lower_bound: float = 0.8
    seed: int = 0

    def __post_init__(self) -> None:
        if self.subnetworks < 0:
            raise ValueError("subnetworks must be non-negative")
        if not 0.0 < self.width_lower_bound < 1.0:
            raise ValueError("width lower bound must be in (0, 1)")
        if self.tau < 0:
            raise ValueError("tau must be non-negative")


def sample_widths(n: int, alpha: float, seed: int, iteration: int) -> list[float]:
    """``n`` widths uniform on ``[alpha, 1]``, keyed by ``(seed, iteration)``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return []
    rng = np.random.default_rng([seed, iteration])
    return rng.uniform(alpha, 1.0, size=n).tolist()


@dataclass
class RopgenGradients:
    loss_std: float
    loss_subnet: float
    g_std: Params
    g_subnet: Params
    g_total: Params = field(repr=False)


def ropgen_gradients(
    params: Params,
    batch: tuple[np.ndarray, np.ndarray],
    sub_batch: tuple[np.ndarray, np.ndarray] | None,
    widths: Sequence[float],
) -> RopgenGradients:
    """The full-network, sub-network and combined gradients of one iteration, computed separately."""
    loss_std, g_std = loss_and_grad(params, *batch)
    g_subnet = params.zeros_like()
    loss_subnet = 0.0
    g_total = params.zeros_like()
    loss_and_grad(params, *batch, out=g_total)
    if sub_batch is not None:
        for w in widths:
            loss_subnet += loss_and_grad(params, *sub_batch, w, out=g_subnet)[0]
            loss_and_grad(params, *sub_batch, w, out=g_total)
    return RopgenGradients(loss_std, loss_subnet, g_std, g_subnet, g_total)


class _SubBatches:
    """Endless reshuffled batches over U', independent of the U shuffler."""

    def __init__(self, size: int, batch_size: int, seed: int) -> None:
        self.size = size
        self.batch_size = batch_size
        self.rng = np.random.default_rng([seed, 1])
        self.order = np.empty(0, dtype=np.int64)
        self.cursor = 0

    def next(self) -> np.ndarray:
        if self.cursor >= len(self.order):
            self.order = self.rng.permutation(self.size)
            self.cursor = 0
        batch = self.order[self.cursor : self.cursor + self.batch_size]
        self.cursor += self.batch_size
        return batch


def train_ropgen(
    u: Sequence[LabeledProgram],
    u_prime: Sequence[LabeledProgram],
    hp: Hyperparams,
    cfg: AugmentationConfig,
) -> Model:
    """Train the hardened model.

    With no sub-networks (or an empty U') this is plain training on U and
    reproduces the baseline trainer exactly.

    Args:
        u: The training corpus, augmented with imitations when the
            configuration has targets.
        u_prime: Perturbed programs every sampled sub-network is trained on.
        hp: Shared with the baseline trainer.
        cfg: Sub-network count, width lower bound and seed.

    Returns:
        Model: The full-width network.

    Raises:
        DegenerateCorpus: when U has fewer than two authors, or U' carries a
            label U lacks.
    """
    labels, y = label_corpus(u)
    programs = [p for p, _ in u]
    extra = [p for p, _ in u_prime]
    schema = build_schema(programs + extra, hp.vocab_size)
    x = vectorize_many(programs, schema)
    model, rng = new_model(labels, schema, hp)
    n = cfg.subnetworks if u_prime else 0
    if cfg.subnetworks and not u_prime:
        logger.warning("no perturbed programs; training without sub-networks")
    if n:
        unknown = sorted({a for _, a in u_prime} - set(labels))
        if unknown:
            raise DegenerateCorpus(f"perturbed programs carry unknown labels: {', '.join(unknown)}")
        index = {a: i for i, a in enumerate(labels)}
        x_sub = vectorize_many(extra, schema)
        y_sub = np.array([index[a] for _, a in u_prime], dtype=np.int64)
        sub_batches = _SubBatches(len(u_prime), hp.batch_size, cfg.seed)

    def objective(batch: np.ndarray, iteration: int) -> tuple[float, Params]:
        if not n:
            g = ropgen_gradients(model.params, (x[batch], y[batch]), None, ())
        else:
            sub = sub_batches.next()
            widths = sample_widths(n, cfg.width_lower_bound, cfg.seed, iteration)
            g = ropgen_gradients(model.params, (x[batch], y[batch]), (x_sub[sub], y_sub[sub]), widths)
        return g.loss_std + g.loss_subnet, g.g_total

    run_epochs(model, hp, len(u), objective, rng)
    logger.info(
        "ropgen: |U|=%d |U'|=%d n=%d alpha=%.2f, final loss %.4f",
        len(u),
        len(u_prime),
        n,
        cfg.width_lower_bound,
        model.history[-1],
    )
    return model
