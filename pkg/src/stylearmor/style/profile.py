"""Author profiles synthesized from program profiles, and discrepancy sets."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path

from stylearmor.errors import EmptyInput, ProfileFormatError
from stylearmor.style.attrs import NUMERIC, AttributeValue, StyleProfile
from stylearmor.style.formats import dump_values, iter_lines, parse_attr_line

EXTRACTION_ONLY = frozenset({17})


@dataclass(frozen=True)
class AuthorProfile:
    author_id: str
    profile: dict[int, AttributeValue] = field(default_factory=dict)
    support: int = 0

    def get(self, attribute_id: int) -> AttributeValue | None:
        return self.profile.get(attribute_id)


@dataclass(frozen=True)
class Discrepancy:
    attribute_id: int
    program_value: AttributeValue
    target_value: AttributeValue | None


@dataclass(frozen=True)
class DiscrepancySet:
    items: tuple[Discrepancy, ...] = ()

    @property
    def attribute_ids(self) -> list[int]:
        return [d.attribute_id for d in self.items]

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)


def synthesize(author_id: str, profiles: Sequence[StyleProfile]) -> AuthorProfile:
    """Merge program profiles into one author profile.

    Numeric attributes average over the programs that exhibit them; set
    attributes sum frequencies, ordered by descending total with ties broken
    lexicographically.

    Raises:
        EmptyInput: when ``profiles`` is empty.
    """
    if not profiles:
        raise EmptyInput(f"no profiles to synthesize for {author_id!r}")
    numbers: dict[int, list[float]] = {}
    totals: dict[int, dict[str, int]] = {}
    kinds: dict[int, str] = {}
    for p in profiles:
        for attribute_id, value in p.values.items():
            kinds[attribute_id] = value.kind
            if value.kind == NUMERIC:
                numbers.setdefault(attribute_id, []).append(float(value.number or 0.0))
            else:
                bucket = totals.setdefault(attribute_id, {})
                for token, freq in value.entries:
                    bucket[token] = bucket.get(token, 0) + freq
    merged: dict[int, AttributeValue] = {}
    for attribute_id in sorted(kinds):
        if attribute_id in numbers:
            xs = numbers[attribute_id]
            merged[attribute_id] = AttributeValue.numeric(sum(xs) / len(xs))
        else:
            entries = sorted(totals[attribute_id].items(), key=lambda kv: (-kv[1], kv[0]))
            merged[attribute_id] = AttributeValue(kinds[attribute_id], entries=tuple(entries))
    return AuthorProfile(author_id, merged, len(profiles))


def discrepancies(program: StyleProfile, target: AuthorProfile, tau: float = 0.0) -> DiscrepancySet:
    """Attributes of ``program`` that differ from ``target``.

    A numeric attribute is discrepant when the gap exceeds ``tau``; a set
    attribute when its tokens are not a subset of the target's. Attributes the
    target never shows are discrepant; extraction-only attributes never are.
    """
    if tau < 0:
        raise ValueError("tau must be non-negative")
    items = []
    for attribute_id in sorted(program.values):
        if attribute_id in EXTRACTION_ONLY:
            continue
        mine = program.values[attribute_id]
        theirs = target.get(attribute_id)
        if theirs is None:
            items.append(Discrepancy(attribute_id, mine, None))
        elif mine.kind == NUMERIC:
            if abs(float(mine.number or 0.0) - float(theirs.number or 0.0)) > tau:
                items.append(Discrepancy(attribute_id, mine, theirs))
        elif not mine.token_set <= theirs.token_set:
            items.append(Discrepancy(attribute_id, mine, theirs))
    return DiscrepancySet(tuple(items))


def dump_author_profile(author: AuthorProfile) -> str:
    lines = [f"author {author.author_id}", f"support {author.support}", *dump_values(author.profile)]
    return "\n".join(lines) + "\n"


def load_author_profile(text: str) -> AuthorProfile:
    """Raises ProfileFormatError on malformed input or missing headers."""
    author_id = None
    support = None
    values: dict[int, AttributeValue] = {}
    for line_no, line in iter_lines(text):
        head, _, rest = line.partition(" ")
        if head == "author" and rest.strip():
            author_id = rest.strip()
        elif head == "support" and rest.strip().isdigit():
            support = int(rest.strip())
        else:
            attribute_id, value = parse_attr_line(line_no, line)
            values[attribute_id] = value
    if author_id is None or support is None:
        raise ProfileFormatError(0, "missing author/support header")
    return AuthorProfile(author_id, dict(sorted(values.items())), support)


def read_author_profile(path: Path) -> AuthorProfile:
    return load_author_profile(path.read_text(encoding="utf-8"))


def write_author_profile(path: Path, author: AuthorProfile) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_author_profile(author), encoding="utf-8")
