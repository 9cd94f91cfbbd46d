"""Stratified κ-fold splits over a corpus."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np
from sklearn.model_selection import StratifiedKFold

from stylearmor.errors import TooFewPrograms
from stylearmor.evaluation.corpus import Corpus
from stylearmor.model.train import LabeledProgram


@dataclass(frozen=True)
class Fold:
    index: int
    train: tuple[int, ...]
    test: tuple[int, ...]

    def split(self, corpus: Corpus) -> tuple[list[LabeledProgram], list[LabeledProgram]]:
        return corpus.subset(self.train), corpus.subset(self.test)


def stratified_folds(corpus: Corpus, kappa: int = 10, seed: int = 0) -> list[Fold]:
    """κ folds whose test parts partition the corpus.

    Each author's programs spread over the folds as evenly as possible, so
    per-author test counts differ by at most one.

    Args:
        corpus: Programs with author labels.
        kappa: Number of folds, at least 2.
        seed: Shuffles programs before they are dealt to folds.

    Returns:
        list[Fold]: Index-ordered folds holding item indices into ``corpus``.

    Raises:
        TooFewPrograms: when some author has fewer than ``kappa`` programs.
    """
    if kappa < 2:
        raise ValueError("kappa must be at least 2")
    counts = Counter(corpus.labels)
    for author in corpus.authors:
        if counts[author] < kappa:
            raise TooFewPrograms(author, counts[author], kappa)
    y = np.array(corpus.labels)
    splitter = StratifiedKFold(n_splits=kappa, shuffle=True, random_state=seed)
    return [
        Fold(k, tuple(int(i) for i in train), tuple(int(i) for i in test))
        for k, (train, test) in enumerate(splitter.split(np.zeros((len(y), 1)), y))
    ]
