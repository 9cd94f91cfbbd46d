"""Accuracy and attack success rates.

Targeted success is counted per (program, target) pair, the primary rate,
and per program (a program counts once if any of its targets succeeded).
Untargeted success is counted over originals the model classified correctly.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field, fields


@dataclass(frozen=True)
class AttackRecord:
    """One manipulated program as the model saw it.

    ``target`` is empty for untargeted attacks; ``attributes`` are the ids
    touched by the applied plan.
    """

    source: str
    author: str
    predicted: str
    target: str = ""
    attributes: tuple[int, ...] = ()

    @property
    def success(self) -> bool:
        if self.target:
            return self.predicted == self.target
        return self.predicted != self.author


def _rate(num: int, den: int) -> float:
    return num / den if den else 0.0


@dataclass
class Counts:
    """Raw counts; rates are derived so folds can be summed exactly."""

    n_test: int = 0
    n_correct: int = 0
    tar_pairs: int = 0
    tar_success: int = 0
    tar_programs: int = 0
    tar_program_success: int = 0
    unt_total: int = 0
    unt_success: int = 0
    manipulated: int = 0
    involvement: dict[int, tuple[int, int]] = field(default_factory=dict)

    @property
    def acc(self) -> float:
        return _rate(self.n_correct, self.n_test)

    @property
    def asr_tar(self) -> float:
        return _rate(self.tar_success, self.tar_pairs)

    @property
    def asr_tar_programs(self) -> float:
        return _rate(self.tar_program_success, self.tar_programs)

    @property
    def asr_unt(self) -> float:
        return _rate(self.unt_success, self.unt_total)

    def involvement_rates(self) -> dict[int, tuple[float, float]]:
        """Per attribute: share of manipulated programs touching it, and touching it successfully."""
        return {
            a: (_rate(touched, self.manipulated), _rate(won, self.manipulated))
            for a, (touched, won) in sorted(self.involvement.items())
        }

    def __add__(self, other: Counts) -> Counts:
        names = [f.name for f in fields(self) if f.name != "involvement"]
        scalars = {n: getattr(self, n) + getattr(other, n) for n in names}
        merged = dict(self.involvement)
        for a, (touched, won) in other.involvement.items():
            t0, w0 = merged.get(a, (0, 0))
            merged[a] = (t0 + touched, w0 + won)
        return Counts(**scalars, involvement=dict(sorted(merged.items())))


def accuracy_counts(truth: Sequence[str], predicted: Sequence[str]) -> tuple[int, int]:
    """``(correct, total)``."""
    if len(truth) != len(predicted):
        raise ValueError("truth and predictions differ in length")
    return sum(t == p for t, p in zip(truth, predicted)), len(truth)


def involvement(records: Sequence[AttackRecord]) -> tuple[int, dict[int, tuple[int, int]]]:
    """Manipulated-program count, and per attribute ``(touched, touched and succeeded)``."""
    manipulated = [r for r in records if r.attributes]
    out: dict[int, tuple[int, int]] = {}
    for r in manipulated:
        for a in set(r.attributes):
            touched, won = out.get(a, (0, 0))
            out[a] = (touched + 1, won + int(r.success))
    return len(manipulated), dict(sorted(out.items()))


def tally(
    truth: Sequence[str],
    predicted: Sequence[str],
    targeted: Sequence[AttackRecord] = (),
    untargeted: Sequence[AttackRecord] = (),
) -> Counts:
    """Counts for one fold.

    Attribute involvement is measured on the targeted records when there
    are any, otherwise on the untargeted ones.
    """
    correct, total = accuracy_counts(truth, predicted)
    by_program: dict[str, bool] = {}
    for r in targeted:
        by_program[r.source] = by_program.get(r.source, False) or r.success
    manipulated, touched = involvement(targeted if targeted else untargeted)
    return Counts(
        n_test=total,
        n_correct=correct,
        tar_pairs=len(targeted),
        tar_success=sum(r.success for r in targeted),
        tar_programs=len(by_program),
        tar_program_success=sum(by_program.values()),
        unt_total=len(untargeted),
        unt_success=sum(r.success for r in untargeted),
        manipulated=manipulated,
        involvement=touched,
    )
