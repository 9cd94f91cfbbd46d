"""Identifier naming conventions.

Single-word lowercase names (``i``, ``pos``) and all-caps names (``MAX``)
follow no convention and are never classified.
"""

from __future__ import annotations

import re

CAMEL = "camel"
PASCAL = "pascal"
UNDERSCORE = "underscore_separated"
LEADING_UNDERSCORE = "leading_underscore"

CONVENTIONS = (CAMEL, PASCAL, UNDERSCORE, LEADING_UNDERSCORE)

_CAMEL_RE = re.compile(r"^[a-z][a-z0-9]*(?:[A-Z][a-z0-9]*)+$")
_PASCAL_RE = re.compile(r"^(?:[A-Z][a-z0-9]*)+$")
_UNDERSCORE_RE = re.compile(r"^[a-z][a-z0-9]*(?:_[a-z0-9]+)+$")
_WORD_RE = re.compile(r"[A-Z]?[a-z0-9]+|[A-Z]+(?![a-z])")

# Names handed out when a name-set attribute has no donor author.
GENERIC_NAMES = (
    "tmp",
    "val",
    "cnt",
    "idx",
    "cur",
    "res",
    "num",
    "acc",
    "buf",
    "len",
    "top",
    "pre",
)


def classify(name: str) -> str | None:
    if name.startswith("_"):
        return LEADING_UNDERSCORE
    if _UNDERSCORE_RE.match(name):
        return UNDERSCORE
    if _CAMEL_RE.match(name):
        return CAMEL
    if _PASCAL_RE.match(name) and any(c.islower() for c in name):
        return PASCAL
    return None


def split_words(name: str) -> list[str]:
    """Lowercase words of an identifier: ``getWrongPos`` -> ``[get, wrong, pos]``."""
    words: list[str] = []
    for part in name.strip("_").split("_"):
        words.extend(w.lower() for w in _WORD_RE.findall(part))
    return words


def convert(name: str, convention: str) -> str | None:
    """Spell ``name`` in ``convention``, or None when it cannot carry it."""
    words = split_words(name)
    if not words:
        return None
    if convention == CAMEL:
        out = words[0] + "".join(w.capitalize() for w in words[1:])
    elif convention == PASCAL:
        out = "".join(w.capitalize() for w in words)
    elif convention == UNDERSCORE:
        out = "_".join(words)
    elif convention == LEADING_UNDERSCORE:
        out = "_" + "_".join(words)
    else:
        raise ValueError(f"unknown naming convention {convention!r}")
    if out[0].isdigit() or classify(out) != convention:
        return None
    return out
