from __future__ import annotations

import hashlib
import re

_SLUG_RE = re.compile(r"[^A-Za-z0-9_.-]+")


def stable_hash(text: str) -> str:
    """Stable SHA-256 hex digest of ``text``.

    Used for feature-schema ids and config digests, so it must not depend on
    ``PYTHONHASHSEED``.

    Examples:
        >>> stable_hash("hello world")
        'b94d27b9934d3e08a52e52d7da7dabfac484efe37a5380ee9088f7ace2efcde9'
    """
    h = hashlib.sha256()
    h.update(text.encode("utf-8", errors="ignore"))
    return h.hexdigest()


def short_hash(text: str, length: int = 12) -> str:
    return stable_hash(text)[:length]


def slugify(text: str) -> str:
    """File-name-safe rendering of an author id or label.

    Examples:
        >>> slugify("author 7/b")
        'author_7_b'
    """
    return _SLUG_RE.sub("_", text.strip()) or "_"


def one_line(text: str) -> str:
    """Collapse whitespace so a reason fits in one TSV field."""
    return " ".join((text or "").split())
