"""Plan files: one step per line.

    budget 3
    step 2 rename_temporaries map=st:n,pos:ret
    step 20 while_to_for
    skip 23 split_function: statement jumps out of itself

``budget`` is optional; ``skip`` lines record steps a planner dropped and
are informational when a plan is replayed. ``#`` starts a comment.
"""

from __future__ import annotations

from pathlib import Path

from stylearmor.errors import PlanFormatError
from stylearmor.transforms.base import IDENT_RE, TransformPlan, TransformStep


def dump_plan(plan: TransformPlan) -> str:
    lines = []
    if plan.budget is not None:
        lines.append(f"budget {plan.budget}")
    lines.extend(str(step) for step in plan)
    lines.extend(f"skip {attribute_id} {' '.join(reason.split())}" for attribute_id, reason in plan.skipped)
    return "\n".join(lines) + "\n" if lines else ""


def _parse_step(line_no: int, line: str) -> TransformStep:
    words = line.split()
    if len(words) < 3 or not words[1].isdigit() or not IDENT_RE.match(words[2]):
        raise PlanFormatError(line_no, line)
    params = []
    for word in words[3:]:
        key, sep, value = word.partition("=")
        if not sep or not IDENT_RE.match(key) or not value:
            raise PlanFormatError(line_no, line)
        params.append((key, value))
    return TransformStep(int(words[1]), words[2], tuple(params))


def load_plan(text: str) -> TransformPlan:
    """Parse a plan file.

    Kinds are not checked here; an unregistered kind surfaces as UnknownKind
    when the step is applied.

    Raises:
        PlanFormatError: on a malformed line, steps out of attribute order, or
            more steps than the budget allows.
    """
    steps: list[TransformStep] = []
    skipped: list[tuple[int, str]] = []
    budget = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        if head == "step":
            steps.append(_parse_step(line_no, line))
        elif head == "budget" and rest.strip().isdigit() and budget is None:
            budget = int(rest.strip())
        elif head == "skip":
            attribute_id, _, reason = rest.strip().partition(" ")
            if not attribute_id.isdigit():
                raise PlanFormatError(line_no, line)
            skipped.append((int(attribute_id), reason.strip()))
        else:
            raise PlanFormatError(line_no, line)
    try:
        return TransformPlan(tuple(steps), budget, tuple(skipped))
    except ValueError as exc:
        raise PlanFormatError(0, str(exc)) from exc


def read_plan(path: Path) -> TransformPlan:
    return load_plan(path.read_text(encoding="utf-8"))


def write_plan(path: Path, plan: TransformPlan) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_plan(plan), encoding="utf-8")
