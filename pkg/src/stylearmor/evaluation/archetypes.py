"""Style archetypes: a full assignment of style choices for one synthetic author.

Every generated program of an author is written in that author's archetype,
so its extracted profile agrees with the archetype on every attribute the
archetype fixes.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field, replace

import numpy as np

from stylearmor.style import naming
from stylearmor.style.attrs import StyleProfile

# Two-word phrases per name role; each author spells one of them in its own convention.
ROLE_PHRASES: dict[str, tuple[tuple[str, str], ...]] = {
    "count": (("item", "count"), ("num", "items"), ("elem", "count"), ("list", "size")),
    "total": (("run", "sum"), ("sum", "all"), ("acc", "total"), ("grand", "total")),
    "data": (("input", "list"), ("arr", "data"), ("values", "buf"), ("num", "list")),
    "best": (("max", "value"), ("best", "val"), ("top", "value"), ("peak", "val")),
    "gap": (("abs", "diff"), ("gap", "size"), ("dist", "val"), ("delta", "abs")),
    "spread": (("diff", "sum"), ("total", "gap"), ("spread", "acc"), ("dev", "total")),
    "swap": (("swap", "tmp"), ("hold", "val"), ("temp", "cell"), ("saved", "val")),
    "left": (("left", "end"), ("lo", "idx"), ("from", "pos"), ("start", "pos")),
    "right": (("right", "end"), ("hi", "idx"), ("to", "pos"), ("end", "pos")),
    "value": (("first", "num"), ("num", "a"), ("lhs", "val"), ("arg", "a")),
    "other": (("second", "num"), ("num", "b"), ("rhs", "val"), ("arg", "b")),
    "cases": (("test", "cases"), ("case", "num"), ("query", "count"), ("round", "count")),
    "queries": (("query", "num"), ("ask", "count"), ("num", "queries"), ("req", "count")),
    "low": (("low", "bound"), ("min", "ok"), ("range", "lo"), ("floor", "val")),
    "high": (("high", "bound"), ("max", "ok"), ("range", "hi"), ("ceil", "val")),
    "hits": (("hit", "count"), ("in", "range"), ("match", "num"), ("good", "cnt")),
    "digits": (("digit", "sum"), ("sum", "digits"), ("dig", "total"), ("digits", "acc")),
    "rest": (("rest", "val"), ("remain", "part"), ("left", "over"), ("tail", "num")),
    "found": (("prime", "count"), ("num", "primes"), ("found", "cnt"), ("primes", "seen")),
    "current": (("cur", "val"), ("this", "num"), ("now", "val"), ("read", "val")),
    "cand": (("cand", "num"), ("test", "val"), ("x", "val"), ("number", "in")),
    "gcd_fn": (("calc", "gcd"), ("get", "gcd"), ("find", "gcd"), ("gcd", "of")),
    "prime_fn": (("is", "prime"), ("check", "prime"), ("prime", "test"), ("test", "prime")),
}

INDEX_PAIRS = (("i", "j"), ("k", "l"), ("p", "q"), ("u", "v"), ("x", "y"), ("r", "s"))
WIDE_ALIASES = ("ll", "i64", "lint")
BOUND_MACROS = ("MAXN", "LIMIT", "SIZE")
EXTRA_HEADERS = ("string.h", "math.h", "stdlib.h")

# Attribute id -> Archetype field holding its categorical choice.
CATEGORICAL_FIELDS = {
    1: "naming",
    5: "access",
    7: "init",
    8: "same_type",
    10: "increment",
    14: "main_return",
    19: "allocation",
    20: "loop",
    21: "conditional",
    22: "compound_if",
}

_CHOICES = {
    "naming": naming.CONVENTIONS,
    "access": ("index_form", "pointer_form"),
    "init": ("init_in_decl", "init_separate"),
    "same_type": ("combined", "separate"),
    "increment": ("postfix", "prefix", "plus_assign", "long_form"),
    "main_return": ("explicit_return0", "implicit_return"),
    "allocation": ("static_array", "dynamic_alloc"),
    "loop": ("for_loop", "while_loop"),
    "conditional": ("ternary", "if_else"),
    "compound_if": ("logical_and_compound", "nested_ifs"),
}


@dataclass(frozen=True)
class Archetype:
    author_id: str
    naming: str = naming.UNDERSCORE
    access: str = "index_form"
    init: str = "init_in_decl"
    same_type: str = "separate"
    increment: str = "postfix"
    main_return: str = "explicit_return0"
    allocation: str = "static_array"
    loop: str = "for_loop"
    conditional: str = "if_else"
    compound_if: str = "logical_and_compound"
    wide_alias: str | None = None
    bound_macro: str | None = None
    extra_headers: tuple[str, ...] = ()
    indices: tuple[str, str] = ("i", "j")
    names: dict[str, str] = field(default_factory=dict, compare=False, hash=False)

    @property
    def choices(self) -> tuple:
        """Every choice except the author id, for telling archetypes apart."""
        return (
            *(getattr(self, f) for f in _CHOICES),
            self.wide_alias,
            self.bound_macro,
            self.extra_headers,
            self.indices,
            tuple(sorted(self.names.items())),
        )

    @property
    def headers(self) -> frozenset[str]:
        out = {"stdio.h", *self.extra_headers}
        if self.allocation == "dynamic_alloc":
            out.add("stdlib.h")
        return frozenset(out)

    @property
    def vocabulary(self) -> frozenset[str]:
        return frozenset(self.names.values()) | frozenset(self.indices)

    def name(self, role: str) -> str:
        return self.names[role]

    def renamed(self, author_id: str) -> Archetype:
        return replace(self, author_id=author_id)


def spell(words: tuple[str, str], convention: str) -> str:
    out = naming.convert("_".join(words), convention)
    if out is None:
        raise ValueError(f"{words} cannot be spelled in {convention}")
    return out


def role_names(convention: str, picks: dict[str, int] | None = None) -> dict[str, str]:
    picks = picks or {}
    return {role: spell(options[picks.get(role, 0)], convention) for role, options in ROLE_PHRASES.items()}


def canonical(author_id: str = "canonical") -> Archetype:
    """The reference rendering every other archetype is checked against."""
    return Archetype(author_id, names=role_names(naming.UNDERSCORE))


def draw_archetype(author_id: str, rng: np.random.Generator) -> Archetype:
    def pick(options: Sequence):
        return options[int(rng.integers(len(options)))]

    chosen = {f: pick(options) for f, options in _CHOICES.items()}
    wide_alias = pick((None, *WIDE_ALIASES))
    bound_macro = pick((None, *BOUND_MACROS))
    extra = tuple(h for h in EXTRA_HEADERS if rng.random() < 0.4)
    indices = pick(INDEX_PAIRS)
    picks = {role: int(rng.integers(len(options))) for role, options in ROLE_PHRASES.items()}
    return Archetype(
        author_id,
        **chosen,
        wide_alias=wide_alias,
        bound_macro=bound_macro,
        extra_headers=extra,
        indices=indices,
        names=role_names(chosen["naming"], picks),
    )


def draw_archetypes(author_ids: Sequence[str], seed: int, *, identical: bool = False) -> list[Archetype]:
    """Pairwise distinct archetypes, one per author (all equal when ``identical``)."""
    rng = np.random.default_rng([seed, 2])
    if identical:
        first = draw_archetype(author_ids[0], rng)
        return [first.renamed(a) for a in author_ids]
    out: list[Archetype] = []
    seen: set[tuple] = set()
    for author_id in author_ids:
        while True:
            archetype = draw_archetype(author_id, rng)
            if archetype.choices not in seen:
                break
        seen.add(archetype.choices)
        out.append(archetype)
    return out


def violations(profile: StyleProfile, archetype: Archetype) -> list[int]:
    """Attribute ids on which ``profile`` disagrees with ``archetype``.

    A categorical attribute agrees when the archetype's choice is among its
    most frequent tokens; a name set agrees when it stays inside what the
    archetype may use.
    """
    bad: list[int] = []
    for attribute_id, field_name in CATEGORICAL_FIELDS.items():
        value = profile.get(attribute_id)
        if value is None:
            continue
        top = max(f for _, f in value.entries)
        if value.frequency(getattr(archetype, field_name)) != top:
            bad.append(attribute_id)
    allowed = {
        2: archetype.vocabulary,
        3: archetype.vocabulary,
        11: frozenset({archetype.wide_alias} - {None}),
        12: frozenset({archetype.bound_macro} - {None}),
        13: archetype.headers,
    }
    for attribute_id, names in allowed.items():
        value = profile.get(attribute_id)
        if value is not None and not value.token_set <= names:
            bad.append(attribute_id)
    return sorted(bad)
