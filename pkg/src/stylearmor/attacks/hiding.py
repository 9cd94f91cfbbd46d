"""Coding-style hiding: imitate whichever other author changes the most lines."""

from __future__ import annotations

import logging
from collections.abc import Sequence

from stylearmor.attacks.imitation import AttackOutcome, imitate_profile
from stylearmor.errors import NoCandidates
from stylearmor.lang.program import Program
from stylearmor.style.profile import AuthorProfile
from stylearmor.transforms.base import TransformPlan
from stylearmor.transforms.planner import Verifier

logger = logging.getLogger(__name__)


def candidate_outcomes(
    program: Program,
    own_id: str,
    authors: Sequence[AuthorProfile],
    *,
    tau: float = 0.0,
    budget: int | None = None,
    verify: Verifier | None = None,
) -> list[AttackOutcome]:
    """Dry-run imitation toward every author except ``own_id``, sorted by author id."""
    others = sorted((a for a in authors if a.author_id != own_id), key=lambda a: a.author_id)
    return [imitate_profile(program, a, tau=tau, budget=budget, verify=verify) for a in others]


def select_candidate(outcomes: Sequence[AttackOutcome]) -> AttackOutcome | None:
    """Most changed lines wins; ties go to the smaller author id; empty plans never win."""
    best = None
    for outcome in sorted(outcomes, key=lambda o: o.chosen_target):
        if outcome.no_op:
            continue
        if best is None or outcome.changed_lines > best.changed_lines:
            best = outcome
    return best


def hide(
    program: Program,
    own_id: str,
    authors: Sequence[AuthorProfile],
    *,
    tau: float = 0.0,
    budget: int | None = None,
    verify: Verifier | None = None,
) -> AttackOutcome:
    """Untargeted attack: pick the disguise that retains the least of ``program``.

    When no candidate yields a non-empty plan the outcome is a no-op aimed at
    the smallest candidate id.

    Args:
        program: The program to disguise.
        own_id: Its true author, never chosen as a disguise.
        authors: Candidate profiles; ties on changed lines go to the smaller id.

    Returns:
        AttackOutcome: The imitation that changed the most lines.

    Raises:
        NoCandidates: when no author other than ``own_id`` is given.
    """
    outcomes = candidate_outcomes(program, own_id, authors, tau=tau, budget=budget, verify=verify)
    if not outcomes:
        raise NoCandidates(f"no author other than {own_id!r} to hide behind")
    best = select_candidate(outcomes)
    if best is None:
        first = outcomes[0]
        logger.debug("hide %s: every candidate plan is empty", program.source_name)
        return AttackOutcome(program, program, TransformPlan(budget=budget), first.chosen_target, first.skipped)
    logger.debug("hide %s: chose %s (%d lines)", program.source_name, best.chosen_target, best.changed_lines)
    return best
