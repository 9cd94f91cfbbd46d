"""Training-set augmentation: style imitations and single-attribute perturbations.

Every augmented item keeps the label of the program it was derived from and
is certified by the semantics oracle; an item that fails is dropped with a
recorded reason.
"""

from __future__ import annotations

import logging
from collections.abc import Collection, Sequence
from dataclasses import dataclass, field

from stylearmor.attacks.imitation import imitate_profile
from stylearmor.attacks.perturb import perturbation
from stylearmor.errors import NotApplicable
from stylearmor.lang.oracle import check_equivalent
from stylearmor.lang.program import Program
from stylearmor.model.train import LabeledProgram
from stylearmor.style.attrs import TRANSFORMABLE_IDS, extract_profile
from stylearmor.style.profile import AuthorProfile, synthesize
from stylearmor.transforms.base import TransformPlan
from stylearmor.transforms.planner import execute_plan

logger = logging.getLogger(__name__)

ORIGINAL = "original"
IMITATION = "imitation"
PERTURBATION = "perturbation"
SEQUENCE = "sequence"


@dataclass(frozen=True)
class Provenance:
    """Where an augmented item came from.

    ``detail`` is the imitated author, the perturbed attribute id, or the
    index of the ingested plan.
    """

    source: str
    label: str
    origin: str
    detail: str = ""
    steps: int = 0


@dataclass
class Augmented:
    """Labeled programs with one provenance record each, plus what was dropped and why."""

    items: list[LabeledProgram] = field(default_factory=list)
    provenance: list[Provenance] = field(default_factory=list)
    skipped: list[tuple[str, str]] = field(default_factory=list)

    def add(self, program: Program, record: Provenance) -> None:
        """Append ``program`` under the label ``record`` carries, keeping provenance aligned with items."""
        self.items.append((program, record.label))
        self.provenance.append(record)

    def skip(self, source: str, reason: str) -> None:
        logger.debug("augment: dropped %s: %s", source, reason)
        self.skipped.append((source, reason))


@dataclass(frozen=True)
class AugmentedSets:
    u: list[LabeledProgram]
    u_prime: list[LabeledProgram]
    provenance: list[Provenance]
    skipped: list[tuple[str, str]]


def author_profiles(corpus: Sequence[LabeledProgram]) -> dict[str, AuthorProfile]:
    """One synthesized profile per author, from that author's programs in ``corpus``."""
    grouped: dict[str, list[Program]] = {}
    for program, author in corpus:
        grouped.setdefault(author, []).append(program)
    return {a: synthesize(a, [extract_profile(p) for p in grouped[a]]) for a in sorted(grouped)}


def _certify(original: Program, candidate: Program, seed: int) -> str | None:
    verdict = check_equivalent(original, candidate, seed=seed)
    return None if verdict.equivalent else verdict.label


def augment_imitation(
    corpus: Sequence[LabeledProgram],
    targets: Collection[str],
    *,
    tau: float = 0.0,
    seed: int = 0,
    budget: int | None = None,
) -> Augmented:
    """The corpus plus, for every program of an author in ``targets``, one
    imitation of each other author, labeled with the program's own author.

    Target profiles are synthesized from the other authors' programs in
    ``corpus``.
    """
    out = Augmented()
    for program, author in corpus:
        out.add(program, Provenance(program.source_name, author, ORIGINAL))
    profiles = author_profiles(corpus)
    for program, author in corpus:
        if author not in targets:
            continue
        for other, profile in profiles.items():
            if other == author:
                continue
            outcome = imitate_profile(program, profile, tau=tau, budget=budget)
            where = f"{program.source_name} as {other}"
            if outcome.no_op:
                out.skip(where, "empty plan")
                continue
            reason = _certify(program, outcome.manipulated, seed)
            if reason is not None:
                out.skip(where, reason)
                continue
            out.add(outcome.manipulated, Provenance(program.source_name, author, IMITATION, other, len(outcome.plan)))
    logger.info("imitation augmentation: %d items, %d dropped", len(out.items), len(out.skipped))
    return out


def attribute_perturbations(
    program: Program,
    author: str,
    donors: Sequence[AuthorProfile],
    *,
    seed: int = 0,
    out: Augmented | None = None,
) -> Augmented:
    """One perturbed twin per transformable attribute that ``program`` exhibits."""
    out = out if out is not None else Augmented()
    others = [d for d in donors if d.author_id != author]
    for attribute_id in sorted(extract_profile(program).applicable & TRANSFORMABLE_IDS):
        where = f"{program.source_name} #{attribute_id}"
        try:
            outcome = perturbation(program, attribute_id, donors=others, seed=seed)
        except NotApplicable as exc:
            out.skip(where, exc.reason)
            continue
        reason = _certify(program, outcome.manipulated, seed)
        if reason is not None:
            out.skip(where, reason)
            continue
        out.add(outcome.manipulated, Provenance(program.source_name, author, PERTURBATION, str(attribute_id), 1))
    return out


def augment_perturbation(
    corpus: Sequence[LabeledProgram],
    *,
    sequences: Sequence[TransformPlan] | None = None,
    seed: int = 0,
) -> Augmented:
    """Perturbed twins of every program.

    With ``sequences`` each ingested plan is replayed on each program and the
    result kept when at least one step applied. Otherwise every transformable
    attribute of every program is perturbed once, open-ended attributes taking
    their values from a seeded choice among the other authors.
    """
    out = Augmented()
    if sequences is not None:
        for program, author in corpus:
            for index, plan in enumerate(sequences):
                where = f"{program.source_name} plan {index}"
                result = execute_plan(program, plan)
                if not result.applied:
                    out.skip(where, "no step applied")
                    continue
                reason = _certify(program, result.program, seed)
                if reason is not None:
                    out.skip(where, reason)
                    continue
                out.add(result.program, Provenance(program.source_name, author, SEQUENCE, str(index), result.applied))
    else:
        donors = list(author_profiles(corpus).values())
        for program, author in corpus:
            attribute_perturbations(program, author, donors, seed=seed, out=out)
    logger.info("perturbation augmentation: %d items, %d dropped", len(out.items), len(out.skipped))
    return out


def augment(
    corpus: Sequence[LabeledProgram],
    targets: Collection[str],
    *,
    tau: float = 0.0,
    sequences: Sequence[TransformPlan] | None = None,
    perturb: bool = True,
    seed: int = 0,
) -> AugmentedSets:
    """Build U (corpus plus imitations) and U' (perturbations) in one go."""
    u = augment_imitation(corpus, targets, tau=tau, seed=seed)
    u_prime = augment_perturbation(corpus, sequences=sequences, seed=seed) if perturb else Augmented()
    return AugmentedSets(
        u.items,
        u_prime.items,
        u.provenance + u_prime.provenance,
        u.skipped + u_prime.skipped,
    )
