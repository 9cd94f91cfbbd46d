"""Coding-style imitation: make a program look like a target author's.

Attacks are black-box. Nothing here reads a trained model; success is decided
by whoever evaluates the manipulated program.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from functools import cached_property

from stylearmor.lang.diff import diff_lines
from stylearmor.lang.interp import DEFAULT_FUEL
from stylearmor.lang.oracle import Verdict, check_equivalent, input_vectors
from stylearmor.lang.program import Program
from stylearmor.lang.render import render
from stylearmor.style.attrs import extract_profile
from stylearmor.style.profile import AuthorProfile, discrepancies, synthesize
from stylearmor.transforms.base import TransformPlan
from stylearmor.transforms.planner import Verifier, build_plan

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AttackOutcome:
    """The manipulated program and how it was obtained.

    An empty plan leaves ``manipulated`` equal to ``original`` and marks the
    outcome as a no-op.
    """

    original: Program
    manipulated: Program
    plan: TransformPlan
    chosen_target: str = ""
    skipped: tuple[tuple[int, str], ...] = field(default=())

    @property
    def no_op(self) -> bool:
        return len(self.plan) == 0

    @cached_property
    def changed_lines(self) -> int:
        if self.no_op:
            return 0
        return diff_lines(render(self.original), render(self.manipulated))

    def verdict(self, *, seed: int = 0, fuel: int = DEFAULT_FUEL) -> Verdict:
        return check_equivalent(self.original, self.manipulated, seed=seed, fuel=fuel)


def oracle_verifier(seed: int = 0, fuel: int = DEFAULT_FUEL) -> Verifier:
    """A step verifier that rejects any rewrite the interpreter can tell apart."""
    vectors = input_vectors(seed)

    def verify(before: Program, after: Program) -> str | None:
        verdict = check_equivalent(before, after, vectors=vectors, fuel=fuel)
        return None if verdict.equivalent else verdict.reason

    return verify


def imitate_profile(
    program: Program,
    target: AuthorProfile,
    *,
    tau: float = 0.0,
    budget: int | None = None,
    verify: Verifier | None = None,
) -> AttackOutcome:
    """Move ``program`` toward an already synthesized author profile."""
    disc = discrepancies(extract_profile(program), target, tau)
    result = build_plan(program, disc, target, tau=tau, budget=budget, verify=verify)
    manipulated = result.program if result.applied else program
    logger.debug(
        "imitate %s as %s: %d step(s), %d skip(s)",
        program.source_name,
        target.author_id,
        result.applied,
        len(result.skipped),
    )
    return AttackOutcome(program, manipulated, result.plan, target.author_id, tuple(result.skipped))


def imitate(
    program: Program,
    target_programs: Sequence[Program],
    target_id: str,
    *,
    tau: float = 0.0,
    budget: int | None = None,
    verify: Verifier | None = None,
) -> AttackOutcome:
    """Extract, synthesize, find discrepancies, plan and apply.

    Inapplicable steps become skip records; the pipeline never aborts on a
    rewrite failure.

    Args:
        program: The program to disguise.
        target_programs: Programs of the author to imitate.
        target_id: That author's id, recorded as the chosen target.
        tau: Numeric tolerance for discrepancies.
        budget: At most this many steps (the φ of a φ-adversary); None for no limit.
        verify: Optional per-step check, e.g. :func:`oracle_verifier`.

    Returns:
        AttackOutcome: The original, the manipulated program and the applied plan.

    Raises:
        EmptyInput: when ``target_programs`` is empty.
    """
    target = synthesize(target_id, [extract_profile(p) for p in target_programs])
    return imitate_profile(program, target, tau=tau, budget=budget, verify=verify)
