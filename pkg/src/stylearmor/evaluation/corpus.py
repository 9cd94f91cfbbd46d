"""Labeled program corpora.

On disk a corpus is ``corpus/<author>/<program>.c``; a generated corpus also
carries ``external/<author>/<program>.c``, the held-out pair per author that
attacks synthesize target profiles from.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from stylearmor.errors import DegenerateCorpus, EmptyInput, InsufficientTemplates, StylearmorError
from stylearmor.evaluation.archetypes import Archetype, canonical, draw_archetypes, violations
from stylearmor.evaluation.templates import TEMPLATES, TaskTemplate, render_task
from stylearmor.lang.interp import IoTrace, execute
from stylearmor.lang.parser import DEFAULT_MAX_BYTES, parse
from stylearmor.lang.program import Program
from stylearmor.lang.render import render
from stylearmor.model.train import LabeledProgram
from stylearmor.style.attrs import extract_profile

logger = logging.getLogger(__name__)

EXTERNAL_PER_AUTHOR = 2


@dataclass(frozen=True)
class Corpus:
    """Programs with author labels; ``authors`` is sorted and every author has a program."""

    items: tuple[LabeledProgram, ...]
    authors: tuple[str, ...]
    external: dict[str, tuple[Program, ...]] = field(default_factory=dict, compare=False)
    skipped: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        if list(self.authors) != sorted(set(self.authors)):
            raise ValueError("authors must be sorted and distinct")
        labels = {a for _, a in self.items}
        if labels != set(self.authors):
            missing = sorted(set(self.authors) - labels) or sorted(labels - set(self.authors))
            raise ValueError(f"authors and item labels disagree on {', '.join(missing)}")

    def __len__(self) -> int:
        return len(self.items)

    @property
    def labels(self) -> list[str]:
        return [a for _, a in self.items]

    def programs_of(self, author: str) -> list[Program]:
        return [p for p, a in self.items if a == author]

    def subset(self, indices: Sequence[int]) -> list[LabeledProgram]:
        return [self.items[int(k)] for k in indices]


def from_items(items: Sequence[LabeledProgram], **kwargs) -> Corpus:
    return Corpus(tuple(items), tuple(sorted({a for _, a in items})), **kwargs)


# ---------------------------------------------------------------------------
# Generation
# ---------------------------------------------------------------------------

Reference = Callable[[TaskTemplate, int], list[IoTrace]]


def _reference_runs() -> Reference:
    """Traces of the canonical rendering of each (template, variant), computed once."""
    cache: dict[tuple[str, int], list[IoTrace]] = {}

    def reference(template: TaskTemplate, variant: int) -> list[IoTrace]:
        key = (template.name, variant)
        if key not in cache:
            program = parse(render_task(template, canonical(), variant), f"canonical/{template.name}.c")
            runs = [execute(program, vector) for vector in template.inputs]
            bad = [t for t in runs if t.status != "ok"]
            if bad:
                raise InsufficientTemplates(f"template {template.name} fails its own inputs: {bad[0].status}")
            cache[key] = runs
        return cache[key]

    return reference


def realize(template: TaskTemplate, archetype: Archetype, variant: int, reference: Reference) -> Program:
    """Render one task in ``archetype`` and check it.

    Raises:
        InsufficientTemplates: when the rendering does not parse, behaves
            differently from the canonical rendering, or strays from the archetype.
    """
    name = f"{archetype.author_id}/{template.name}_{variant}.c"
    try:
        program = parse(render_task(template, archetype, variant), name)
        runs = [execute(program, vector) for vector in template.inputs]
    except StylearmorError as exc:
        raise InsufficientTemplates(f"{name}: {exc}") from exc
    for got, want in zip(runs, reference(template, variant)):
        if got.status != "ok" or got.outputs != want.outputs:
            raise InsufficientTemplates(f"{name}: differs from the reference on inputs {list(got.inputs)}")
    bad = violations(extract_profile(program), archetype)
    if bad:
        raise InsufficientTemplates(f"{name}: off-archetype on {', '.join(f'#{i}' for i in bad)}")
    return program


def _author_programs(
    archetype: Archetype, tasks: Sequence[TaskTemplate], count: int, reference: Reference
) -> list[Program]:
    """``count`` programs cycling through ``tasks``; a later cycle uses the next variant."""
    out: list[Program] = []
    rejected: set[str] = set()
    k = 0
    while len(out) < count:
        if len(rejected) == len(tasks):
            raise InsufficientTemplates(f"no task renders in the style of {archetype.author_id}")
        template, variant = tasks[k % len(tasks)], k // len(tasks)
        k += 1
        if template.name in rejected:
            continue
        try:
            out.append(realize(template, archetype, variant, reference))
        except InsufficientTemplates as exc:
            logger.warning("dropping task %s for %s: %s", template.name, archetype.author_id, exc)
            rejected.add(template.name)
    return out


def generate_corpus(
    n_authors: int,
    programs_per_author: int,
    task_count: int,
    seed: int = 0,
    *,
    identical_archetypes: bool = False,
    external_per_author: int = EXTERNAL_PER_AUTHOR,
) -> Corpus:
    """A synthetic corpus with one distinct style archetype per author.

    ``identical_archetypes`` gives every author the same archetype, which
    leaves nothing but chance for an attribution model to learn from.

    Args:
        n_authors: Authors, named ``a01``, ``a02`` and so on.
        programs_per_author: Labeled programs per author.
        task_count: Distinct task templates drawn for the whole corpus.
        seed: Fixes archetypes, task choice and variants.
        external_per_author: Extra programs per author kept out of ``items``
            for building target profiles.

    Returns:
        Corpus: Items in author order, with the held-out programs in ``external``.

    Example:
        corpus = generate_corpus(5, 10, 5, seed=0)

    Raises:
        DegenerateCorpus: for fewer than two authors.
        InsufficientTemplates: when ``task_count`` exceeds the available
            templates, or an author's archetype cannot render enough of them.
    """
    if n_authors < 2:
        raise DegenerateCorpus("a corpus needs at least two authors")
    if programs_per_author < 1:
        raise ValueError("programs_per_author must be positive")
    if not 1 <= task_count <= len(TEMPLATES):
        raise InsufficientTemplates(f"task_count must be in [1, {len(TEMPLATES)}], got {task_count}")
    authors = [f"a{k + 1:02d}" for k in range(n_authors)]
    archetypes = draw_archetypes(authors, seed, identical=identical_archetypes)
    rng = np.random.default_rng([seed, 3])
    tasks = [TEMPLATES[int(k)] for k in sorted(rng.choice(len(TEMPLATES), size=task_count, replace=False))]
    reference = _reference_runs()
    items: list[LabeledProgram] = []
    external: dict[str, tuple[Program, ...]] = {}
    for archetype in archetypes:
        programs = _author_programs(archetype, tasks, programs_per_author + external_per_author, reference)
        items.extend((p, archetype.author_id) for p in programs[:programs_per_author])
        external[archetype.author_id] = tuple(programs[programs_per_author:])
    logger.info(
        "generated %d programs for %d authors over %d tasks (seed %d)", len(items), n_authors, task_count, seed
    )
    return Corpus(tuple(items), tuple(authors), external)


# ---------------------------------------------------------------------------
# Disk layout
# ---------------------------------------------------------------------------


def _read_tree(root: Path, max_bytes: int) -> tuple[list[LabeledProgram], list[tuple[str, str]]]:
    items: list[LabeledProgram] = []
    skipped: list[tuple[str, str]] = []
    for author_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        for path in sorted(author_dir.glob("*.c")):
            name = f"{author_dir.name}/{path.name}"
            try:
                items.append((parse(path.read_text(encoding="utf-8"), name, max_bytes=max_bytes), author_dir.name))
            except (OSError, UnicodeDecodeError, StylearmorError) as exc:
                logger.warning("skipping %s: %s", name, exc)
                skipped.append((name, str(exc)))
    return items, skipped


def load_corpus(path: Path, *, max_bytes: int = DEFAULT_MAX_BYTES) -> Corpus:
    """Read ``<author>/<program>.c`` files below ``path``.

    When ``path`` holds a ``corpus`` directory (the layout ``write_corpus``
    produces) programs come from there and held-out pairs from ``external``.
    Files that do not parse are skipped and listed in ``Corpus.skipped``.

    Raises:
        EmptyInput: when no program could be read.
    """
    root = Path(path)
    if not root.is_dir():
        raise EmptyInput(f"{root} is not a directory")
    generated = (root / "corpus").is_dir()
    items, skipped = _read_tree(root / "corpus" if generated else root, max_bytes)
    if not items:
        raise EmptyInput(f"no programs under {root}")
    external: dict[str, tuple[Program, ...]] = {}
    if generated and (root / "external").is_dir():
        extra, extra_skipped = _read_tree(root / "external", max_bytes)
        skipped.extend(extra_skipped)
        for program, author in extra:
            external[author] = (*external.get(author, ()), program)
    return from_items(items, external=external, skipped=tuple(skipped))


def write_corpus(corpus: Corpus, root: Path) -> list[Path]:
    """Write ``corpus/`` and ``external/`` below ``root``; returns the files written."""
    written: list[Path] = []
    groups = [("corpus", corpus.items)]
    groups.append(("external", [(p, a) for a, programs in corpus.external.items() for p in programs]))
    for folder, items in groups:
        for program, author in items:
            path = Path(root) / folder / author / Path(program.source_name).name
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(render(program), encoding="utf-8")
            written.append(path)
    return written
