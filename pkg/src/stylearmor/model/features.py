"""Feature vectors: token n-gram frequencies plus an encoded style profile.

The token block counts unigrams and bigrams of the rendered source over a
frozen vocabulary and is L2-normalized; the style block has one slot per
attribute category, fixed for every schema.
"""

from __future__ import annotations

import json
import logging
from collections.abc import Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from sklearn.feature_extraction.text import CountVectorizer
from sklearn.preprocessing import normalize

from stylearmor.lang.lexer import tokenize
from stylearmor.lang.program import Program
from stylearmor.lang.render import render
from stylearmor.style.attrs import CATALOG, NUMERIC, TRANSFORMABLE_IDS, StyleProfile, extract_profile
from stylearmor.utils.text import short_hash

logger = logging.getLogger(__name__)

DEFAULT_VOCAB_SIZE = 512


def _style_slots() -> tuple[str, ...]:
    slots: list[str] = []
    for attribute_id in sorted(TRANSFORMABLE_IDS):
        attribute = CATALOG[attribute_id]
        if attribute.exhaustive:
            slots.extend(f"a{attribute_id}:{c}" for c in attribute.categories)
        elif attribute.kind == NUMERIC:
            slots.append(f"a{attribute_id}:value")
        else:
            slots.extend((f"a{attribute_id}:present", f"a{attribute_id}:count"))
    return tuple(slots)


STYLE_SLOTS = _style_slots()


def source_terms(program: Program) -> list[str]:
    """Unigrams and bigrams of the rendered source, so isomorphic trees agree."""
    words = [t.text for t in tokenize(render(program)) if t.kind != "eof"]
    return words + [f"{a} {b}" for a, b in zip(words, words[1:])]


def style_block(profile: StyleProfile) -> np.ndarray:
    out = np.zeros(len(STYLE_SLOTS))
    index = {slot: i for i, slot in enumerate(STYLE_SLOTS)}
    for attribute_id, value in profile.values.items():
        if attribute_id not in TRANSFORMABLE_IDS:
            continue
        if CATALOG[attribute_id].exhaustive:
            total = value.total or 1
            for token, freq in value.entries:
                out[index[f"a{attribute_id}:{token}"]] = freq / total
        elif value.kind == NUMERIC:
            x = float(value.number or 0.0)
            out[index[f"a{attribute_id}:value"]] = x / (1.0 + x)
        else:
            n = len(value.entries)
            out[index[f"a{attribute_id}:present"]] = 1.0
            out[index[f"a{attribute_id}:count"]] = n / (1.0 + n)
    return out


@dataclass(frozen=True)
class FeatureSchema:
    """Frozen token vocabulary; the style block layout is implied."""

    vocab: tuple[str, ...] = ()

    @property
    def dimension(self) -> int:
        return len(self.vocab) + len(STYLE_SLOTS)

    @cached_property
    def schema_id(self) -> str:
        return short_hash(json.dumps([list(self.vocab), list(STYLE_SLOTS)]))

    @cached_property
    def _vectorizer(self) -> CountVectorizer | None:
        if not self.vocab:
            return None
        return CountVectorizer(analyzer=lambda terms: terms, vocabulary=list(self.vocab))

    def token_block(self, docs: Sequence[list[str]]) -> np.ndarray:
        if self._vectorizer is None:
            return np.zeros((len(docs), 0))
        counts = self._vectorizer.transform(docs)
        return normalize(counts, norm="l2").toarray()


@dataclass(frozen=True)
class FeatureVector:
    values: np.ndarray
    schema_id: str


def build_schema(programs: Sequence[Program], size: int = DEFAULT_VOCAB_SIZE) -> FeatureSchema:
    """Top-``size`` terms by document frequency over ``programs``."""
    if size <= 0 or not programs:
        return FeatureSchema()
    # Binary counts make the max_features ranking a document-frequency one.
    vectorizer = CountVectorizer(analyzer=lambda terms: terms, binary=True, max_features=size)
    vectorizer.fit([source_terms(p) for p in programs])
    vocab = tuple(sorted(vectorizer.vocabulary_))
    logger.debug("feature schema: %d terms from %d programs", len(vocab), len(programs))
    return FeatureSchema(vocab)


def vectorize_many(programs: Sequence[Program], schema: FeatureSchema) -> np.ndarray:
    """Rows of :func:`vectorize` for many programs at once."""
    if not programs:
        return np.zeros((0, schema.dimension))
    tokens = schema.token_block([source_terms(p) for p in programs])
    styles = np.stack([style_block(extract_profile(p)) for p in programs])
    return np.hstack([tokens, styles])


def vectorize(program: Program, schema: FeatureSchema) -> FeatureVector:
    return FeatureVector(vectorize_many([program], schema)[0], schema.schema_id)
