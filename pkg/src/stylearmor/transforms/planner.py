"""Turn a discrepancy set into an ordered, applied transform plan.

Planning and application are one pass: each step is tried on the program
produced by the steps before it, so a step that no longer applies is recorded
as skipped instead of ending up in the plan. Attributes are handled in
ascending id order and every site of a discrepant attribute is changed.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass, field

from stylearmor.errors import InternalRewriteFault, NotApplicable
from stylearmor.lang.program import Program
from stylearmor.style.attrs import CATALOG, CATEGORICAL, NAME_SET, AttributeValue, extract_profile
from stylearmor.style.profile import AuthorProfile, DiscrepancySet, discrepancies
from stylearmor.transforms.base import TransformPlan, TransformStep, apply, used_names

logger = logging.getLogger(__name__)

# Returns None when ``after`` is acceptable, else the reason to reject it.
Verifier = Callable[[Program, Program], str | None]

# Kind that moves every site of an attribute to ``category``.
TO_CATEGORY: dict[tuple[int, str], str] = {
    (5, "index_form"): "pointer_to_index",
    (5, "pointer_form"): "index_to_pointer",
    (6, "at_scope_start"): "decl_to_scope_start",
    (6, "at_first_use"): "decl_to_first_use",
    (7, "init_in_decl"): "merge_init",
    (7, "init_separate"): "split_init",
    (8, "combined"): "merge_decl_list",
    (8, "separate"): "split_decl_list",
    (9, "chained"): "combine_assign_chain",
    (9, "separate"): "split_assign_chain",
    (14, "explicit_return0"): "add_return0",
    (14, "implicit_return"): "remove_return0",
    (19, "static_array"): "dynamic_to_static",
    (19, "dynamic_alloc"): "static_to_dynamic",
    (20, "for_loop"): "while_to_for",
    (20, "while_loop"): "for_to_while",
    (22, "logical_and_compound"): "merge_nested_ifs",
    (22, "nested_ifs"): "split_and_condition",
}

CONDITIONAL_KINDS: dict[tuple[str, str], str] = {
    ("ternary", "if_else"): "ternary_to_if",
    ("if_else", "ternary"): "if_to_ternary",
    ("if_else", "switch"): "if_chain_to_switch",
    ("switch", "if_else"): "switch_to_if_chain",
}

RENAME_KINDS = {
    2: "rename_temporaries",
    3: "rename_locals",
    4: "rename_global",
    11: "rename_typedef",
    12: "rename_macro",
}
REMOVE_KINDS = {
    4: ("inline_constant", "name"),
    11: ("eliminate_typedef", "alias"),
    12: ("eliminate_macro", "name"),
}

MAX_DEPTH_STEPS = 8


def conversion(attribute_id: int, source: str, dest: str) -> TransformStep | None:
    """Step turning ``source`` sites of a categorical attribute into ``dest``."""
    if source == dest:
        return None
    if attribute_id == 1:
        return TransformStep.make(1, "rename_convention", to=dest, **{"from": source})
    if attribute_id == 10:
        return TransformStep.make(10, "increment_form", to=dest, **{"from": source})
    if attribute_id == 21:
        kind = CONDITIONAL_KINDS.get((source, dest))
        return TransformStep.make(21, kind) if kind else None
    kind = TO_CATEGORY.get((attribute_id, dest))
    return TransformStep.make(attribute_id, kind) if kind else None


def rename_step(
    attribute_id: int, mine: list[str], donor: list[str], taken: set[str]
) -> tuple[TransformStep | None, list[str]]:
    """Map names not in ``donor`` to unused donor names by rank.

    Returns the step (None when nothing can be mapped) and the names left over.
    """
    offending = [n for n in mine if n not in donor]
    available = [n for n in donor if n not in mine and n not in taken]
    pairs = list(zip(offending, available))
    left = offending[len(pairs) :]
    if not pairs:
        return None, left
    mapping = ",".join(f"{a}:{b}" for a, b in pairs)
    return TransformStep.make(attribute_id, RENAME_KINDS[attribute_id], map=mapping), left


@dataclass
class PlanResult:
    plan: TransformPlan
    program: Program
    skipped: list[tuple[int, str]] = field(default_factory=list)

    @property
    def applied(self) -> int:
        return len(self.plan)


class _Run:
    def __init__(self, program: Program, budget: int | None, verify: Verifier | None) -> None:
        self.current = program
        self.budget = budget
        self.verify = verify
        self.steps: list[TransformStep] = []
        self.skipped: list[tuple[int, str]] = []

    @property
    def exhausted(self) -> bool:
        return self.budget is not None and len(self.steps) >= self.budget

    def skip(self, attribute_id: int, reason: str) -> None:
        logger.debug("skip #%d: %s", attribute_id, reason)
        self.skipped.append((attribute_id, reason))

    def attempt(self, step: TransformStep) -> bool:
        if self.exhausted:
            return False
        try:
            after = apply(self.current, step)
        except NotApplicable as exc:
            self.skip(step.attribute_id, f"{step.kind}: {exc.reason}")
            return False
        except InternalRewriteFault as exc:
            logger.warning("%s", exc)
            self.skip(step.attribute_id, f"{step.kind}: rewrite fault")
            return False
        if self.verify is not None:
            reason = self.verify(self.current, after)
            if reason is not None:
                self.skip(step.attribute_id, f"{step.kind}: {reason}")
                return False
        self.steps.append(step)
        self.current = after
        return True

    def result(self) -> PlanResult:
        plan = TransformPlan(tuple(self.steps), self.budget, tuple(self.skipped))
        return PlanResult(plan, self.current, list(self.skipped))


def _still_discrepant(run: _Run, attribute_id: int, target: AuthorProfile, tau: float) -> AttributeValue | None:
    profile = extract_profile(run.current)
    if attribute_id in discrepancies(profile, target, tau).attribute_ids:
        return profile.get(attribute_id)
    return None


def _categorical(run: _Run, attribute_id: int, mine: AttributeValue, theirs: AttributeValue | None) -> None:
    if theirs is None:
        run.skip(attribute_id, "target never shows this attribute")
        return
    for source in mine.tokens:
        if source in theirs.token_set:
            continue
        if run.exhausted:
            return
        for dest in theirs.tokens:
            step = conversion(attribute_id, source, dest)
            if step is not None and run.attempt(step):
                break
        else:
            run.skip(attribute_id, f"no conversion from {source}")


def _name_set(run: _Run, attribute_id: int, mine: AttributeValue, theirs: AttributeValue | None) -> None:
    if attribute_id == 13:
        for header in mine.tokens:
            if theirs is None or header not in theirs.token_set:
                run.attempt(TransformStep.make(13, "remove_include", header=header))
        return
    if theirs is None:
        if attribute_id not in REMOVE_KINDS:
            run.skip(attribute_id, "target never shows this attribute")
            return
        kind, key = REMOVE_KINDS[attribute_id]
        for name in mine.tokens:
            run.attempt(TransformStep.make(attribute_id, kind, **{key: name}))
        return
    step, left = rename_step(attribute_id, mine.tokens, theirs.tokens, used_names(run.current.ast))
    if step is not None:
        run.attempt(step)
    if left:
        run.skip(attribute_id, f"no unused target names for {', '.join(left)}")


def _depth(run: _Run, target: AuthorProfile, tau: float) -> None:
    goal = float(target.get(23).number or 0.0)
    for _ in range(MAX_DEPTH_STEPS):
        value = extract_profile(run.current).get(23)
        depth = float(value.number or 0.0) if value is not None else 0.0
        if depth - goal > tau:
            if not run.attempt(TransformStep.make(23, "split_function")):
                return
        elif goal - depth > tau:
            if not _inline_deeper(run, depth):
                run.skip(23, "no helper whose inlining deepens the program")
                return
        else:
            return


def _inline_deeper(run: _Run, depth: float) -> bool:
    for fn in run.current.ast.functions:
        if fn.name == "main":
            continue
        step = TransformStep.make(23, "inline_function", name=fn.name)
        try:
            after = apply(run.current, step)
        except (NotApplicable, InternalRewriteFault):
            continue
        if (extract_profile(after).get(23).number or 0.0) > depth:
            return run.attempt(step)
    return False


def build_plan(
    program: Program,
    disc: DiscrepancySet,
    target: AuthorProfile,
    *,
    tau: float = 0.0,
    budget: int | None = None,
    verify: Verifier | None = None,
) -> PlanResult:
    """Plan and apply steps moving ``program`` toward ``target``.

    Attributes are visited in ascending id order, and one that earlier steps
    already brought within ``tau`` is passed over. At most ``budget`` steps are
    applied; ``verify`` may veto any step.

    Args:
        program: The program to rewrite.
        disc: Discrepant attributes of ``program`` against ``target``.
        target: The synthesized profile to move toward.

    Returns:
        PlanResult: The program after the applied steps, the plan of those
        steps and a skip record for every attribute that could not move.
    """
    run = _Run(program, budget, verify)
    for attribute_id in sorted(disc.attribute_ids):
        if run.exhausted:
            break
        mine = _still_discrepant(run, attribute_id, target, tau)
        if mine is None:
            continue
        kind = CATALOG[attribute_id].kind
        theirs = target.get(attribute_id)
        if kind == CATEGORICAL:
            _categorical(run, attribute_id, mine, theirs)
        elif kind == NAME_SET:
            _name_set(run, attribute_id, mine, theirs)
        elif theirs is None:
            run.skip(attribute_id, "target never shows this attribute")
        else:
            _depth(run, target, tau)
    return run.result()


def plan_imitation(
    program: Program,
    disc: DiscrepancySet,
    target: AuthorProfile,
    *,
    tau: float = 0.0,
    budget: int | None = None,
) -> TransformPlan:
    """The steps :func:`build_plan` applies; skips ride along in ``plan.skipped``."""
    return build_plan(program, disc, target, tau=tau, budget=budget).plan


def execute_plan(program: Program, plan: TransformPlan, *, verify: Verifier | None = None) -> PlanResult:
    """Apply a stored plan in order, skipping steps that no longer apply."""
    run = _Run(program, plan.budget, verify)
    for step in plan:
        run.attempt(step)
    return run.result()
