"""Single-attribute perturbation and the random-replacement baseline.

Exhaustive attributes flip to another category of their closed vocabulary.
Open-ended attributes take the donor author's values, or names from a fixed
pool when no donor is available. Programs without global constants, type
aliases or macros can be given their first one.
"""

from __future__ import annotations

import logging
from collections import Counter
from collections.abc import Iterator, Sequence

import numpy as np

from stylearmor.attacks.imitation import AttackOutcome
from stylearmor.errors import InternalRewriteFault, NotApplicable, NotTransformable
from stylearmor.lang.nodes import IntLit, TypeSpec, walk
from stylearmor.lang.program import Program
from stylearmor.style import naming
from stylearmor.style.attrs import CATALOG, NUMERIC, TRANSFORMABLE_IDS, AttributeValue, extract_profile
from stylearmor.style.profile import AuthorProfile
from stylearmor.transforms.base import TransformPlan, TransformStep, apply, used_names
from stylearmor.transforms.planner import REMOVE_KINDS, Verifier, conversion, rename_step
from stylearmor.transforms.preproc import HARMLESS_HEADERS, encode_type

logger = logging.getLogger(__name__)

NAME_POOLS: dict[int, tuple[str, ...]] = {
    2: naming.GENERIC_NAMES,
    3: naming.GENERIC_NAMES,
    4: ("LIMIT", "MAXN", "BOUND", "CAP", "SIZE"),
    11: ("ll", "i64", "lint", "num_t"),
    12: ("MAXN", "LIM", "TOP", "CAP"),
}

# Attributes a program without them can still be given.
INTRODUCIBLE = frozenset({4, 11, 12})


def _shuffled(rng: np.random.Generator, items: Sequence[str]) -> list[str]:
    return [items[i] for i in rng.permutation(len(items))]


def _categorical(attribute_id: int, mine: AttributeValue, rng: np.random.Generator) -> Iterator[TransformStep]:
    categories = CATALOG[attribute_id].categories
    for source in _shuffled(rng, mine.tokens):
        for dest in _shuffled(rng, [c for c in categories if c != source]):
            step = conversion(attribute_id, source, dest)
            if step is not None:
                yield step


def _names(
    program: Program,
    attribute_id: int,
    mine: AttributeValue,
    donor: AuthorProfile | None,
    rng: np.random.Generator,
) -> Iterator[TransformStep]:
    theirs = donor.get(attribute_id) if donor is not None else None
    if donor is not None and theirs is None:
        if attribute_id in REMOVE_KINDS:
            kind, key = REMOVE_KINDS[attribute_id]
            for name in _shuffled(rng, mine.tokens):
                yield TransformStep.make(attribute_id, kind, **{key: name})
        return
    names = theirs.tokens if theirs is not None else _shuffled(rng, NAME_POOLS[attribute_id])
    step, _ = rename_step(attribute_id, mine.tokens, names, used_names(program.ast))
    if step is not None:
        yield step


def _headers(mine: AttributeValue, donor: AuthorProfile | None, rng: np.random.Generator) -> Iterator[TransformStep]:
    theirs = donor.get(13) if donor is not None else None
    if donor is not None:
        wanted = theirs.token_set if theirs is not None else frozenset()
        for header in mine.tokens:
            if header not in wanted:
                yield TransformStep.make(13, "remove_include", header=header)
        for header in theirs.tokens if theirs is not None else ():
            if header not in mine.token_set and header in HARMLESS_HEADERS:
                yield TransformStep.make(13, "add_include", header=header)
        return
    removals = [TransformStep.make(13, "remove_include", header=h) for h in mine.tokens]
    additions = [
        TransformStep.make(13, "add_include", header=h) for h in HARMLESS_HEADERS if h not in mine.token_set
    ]
    candidates = removals + additions
    for i in rng.permutation(len(candidates)):
        yield candidates[i]


def _depth(program: Program, mine: AttributeValue, donor: AuthorProfile | None, rng) -> Iterator[TransformStep]:
    split = [TransformStep.make(23, "split_function")]
    inline = [
        TransformStep.make(23, "inline_function", name=fn.name)
        for fn in program.ast.functions
        if fn.name != "main"
    ]
    theirs = donor.get(23) if donor is not None else None
    if theirs is not None and theirs.number is not None and theirs.number != mine.number:
        yield from split if theirs.number < (mine.number or 0.0) else inline
        return
    options = split + inline
    for i in rng.permutation(len(options)):
        yield options[i]


def _introductions(
    program: Program,
    attribute_id: int,
    donor: AuthorProfile | None,
    rng: np.random.Generator,
) -> Iterator[TransformStep]:
    """Steps that give a program its first global constant, type alias or macro."""
    theirs = donor.get(attribute_id) if donor is not None else None
    taken = used_names(program.ast)
    pool = theirs.tokens if theirs is not None else _shuffled(rng, NAME_POOLS[attribute_id])
    name = next((n for n in pool if n not in taken), None)
    if name is None:
        return
    if attribute_id == 11:
        bases = dict.fromkeys(
            n.base for n in walk(program.ast) if isinstance(n, TypeSpec) and not n.alias and n.base != "void"
        )
        for base in bases:
            yield TransformStep.make(11, "introduce_typedef", type=encode_type(base), alias=name)
        return
    kind = "hoist_literal" if attribute_id == 4 else "introduce_macro"
    literals = Counter(
        n.value for fn in program.ast.functions for n in walk(fn.body) if isinstance(n, IntLit) and n.value >= 0
    )
    for value, _ in literals.most_common():
        yield TransformStep.make(attribute_id, kind, name=name, value=value)


def candidate_steps(
    program: Program,
    attribute_id: int,
    mine: AttributeValue,
    donor: AuthorProfile | None,
    rng: np.random.Generator,
) -> Iterator[TransformStep]:
    """Steps that would each change ``attribute_id``, in the order to try them."""
    attribute = CATALOG[attribute_id]
    if attribute.exhaustive:
        yield from _categorical(attribute_id, mine, rng)
    elif attribute.kind == NUMERIC:
        yield from _depth(program, mine, donor, rng)
    elif attribute_id == 13:
        yield from _headers(mine, donor, rng)
    else:
        yield from _names(program, attribute_id, mine, donor, rng)


def perturbation(
    program: Program,
    attribute_id: int,
    *,
    donor: AuthorProfile | None = None,
    donors: Sequence[AuthorProfile] = (),
    seed: int = 0,
    verify: Verifier | None = None,
) -> AttackOutcome:
    """Change one attribute of ``program`` with a single step.

    Without an explicit ``donor``, open-ended attributes draw one from
    ``donors`` using the seed, and fall back to the name pools. A program
    without global constants, type aliases or macros gets its first one.

    Args:
        program: The program to change.
        attribute_id: Catalog id of the attribute to perturb.
        donor: Author whose values to adopt, if any.
        donors: Authors to draw a donor from when ``donor`` is None.
        seed: Seeds every random choice; recorded in the step.
        verify: Optional veto over each candidate result.

    Returns:
        The outcome of the first candidate step that applies and passes ``verify``.

    Raises:
        NotTransformable: for extraction-only and unsupported attributes.
        NotApplicable: when the attribute cannot be introduced or changed.
    """
    if attribute_id not in TRANSFORMABLE_IDS:
        raise NotTransformable(attribute_id)
    kind = f"perturb#{attribute_id}"
    mine = extract_profile(program).get(attribute_id)
    if mine is None and attribute_id not in INTRODUCIBLE:
        raise NotApplicable(kind, f"attribute #{attribute_id} does not occur")
    rng = np.random.default_rng([seed, attribute_id])
    if donor is None and donors and not CATALOG[attribute_id].exhaustive:
        donor = donors[int(rng.integers(len(donors)))]
    skipped: list[tuple[int, str]] = []
    if mine is None:
        steps = _introductions(program, attribute_id, donor, rng)
    else:
        steps = candidate_steps(program, attribute_id, mine, donor, rng)
    for step in steps:
        step = step.with_params(seed=seed)
        try:
            after = apply(program, step)
        except NotApplicable as exc:
            skipped.append((attribute_id, f"{step.kind}: {exc.reason}"))
            continue
        except InternalRewriteFault as exc:
            logger.warning("%s", exc)
            skipped.append((attribute_id, f"{step.kind}: rewrite fault"))
            continue
        reason = verify(program, after) if verify is not None else None
        if reason is not None:
            skipped.append((attribute_id, f"{step.kind}: {reason}"))
            continue
        target = donor.author_id if donor is not None else ""
        return AttackOutcome(program, after, TransformPlan((step,)), target, tuple(skipped))
    raise NotApplicable(kind, skipped[-1][1] if skipped else "no rewrite changes this attribute")


def perturb_attribute(
    program: Program,
    attribute_id: int,
    donor: AuthorProfile | None = None,
    seed: int = 0,
    *,
    donors: Sequence[AuthorProfile] = (),
) -> Program:
    return perturbation(program, attribute_id, donor=donor, donors=donors, seed=seed).manipulated


def random_replacement(program: Program, seed: int = 0, *, verify: Verifier | None = None) -> AttackOutcome:
    """Perturb every transformable attribute once, in ascending id order."""
    current = program
    steps: list[TransformStep] = []
    skipped: list[tuple[int, str]] = []
    for attribute_id in sorted(extract_profile(program).applicable & TRANSFORMABLE_IDS):
        try:
            outcome = perturbation(current, attribute_id, seed=seed, verify=verify)
        except NotApplicable as exc:
            skipped.append((attribute_id, exc.reason))
            continue
        steps.extend(outcome.plan)
        current = outcome.manipulated
    return AttackOutcome(program, current, TransformPlan(tuple(steps)), "", tuple(skipped))


def random_replace(program: Program, seed: int = 0) -> Program:
    return random_replacement(program, seed).manipulated
