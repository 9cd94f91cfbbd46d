"""Evaluation reports: ``name=value`` files and Rich tables."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, fields
from pathlib import Path

from rich.table import Table

from stylearmor.errors import ReportFormatError
from stylearmor.evaluation.metrics import Counts

HEADER = "# stylearmor evaluation report"
_COUNT_KEYS = tuple(f.name for f in fields(Counts) if f.name != "involvement")


@dataclass(frozen=True)
class EvalReport:
    """Pooled counts of one (defense, attack, φ) cell plus its per-fold counts."""

    defense: str
    attack: str
    counts: Counts
    phi: int | None = None
    per_fold: tuple[Counts, ...] = ()
    config_digest: str = ""

    @property
    def acc(self) -> float:
        return self.counts.acc

    @property
    def asr_tar(self) -> float:
        return self.counts.asr_tar

    @property
    def asr_unt(self) -> float:
        return self.counts.asr_unt

    @property
    def cell(self) -> str:
        phi = "" if self.phi is None else f"__phi{self.phi}"
        return f"{self.defense}__{self.attack}{phi}"


def _f(x: float) -> str:
    return f"{x:.4f}"


def _count_lines(prefix: str, c: Counts) -> list[str]:
    lines = [
        f"{prefix}acc={_f(c.acc)}",
        f"{prefix}asr_tar={_f(c.asr_tar)}",
        f"{prefix}asr_tar_programs={_f(c.asr_tar_programs)}",
        f"{prefix}asr_unt={_f(c.asr_unt)}",
    ]
    lines += [f"{prefix}{k}={getattr(c, k)}" for k in _COUNT_KEYS]
    for a, (touched, won) in c.involvement.items():
        lines.append(f"{prefix}involvement.{a}={touched},{won}")
    return lines


def dump_report(report: EvalReport) -> str:
    """Rates to four decimals, then the counts they come from.

    ``asr_tar`` is over (program, target) pairs; ``asr_tar_programs`` counts a
    program once when any of its targets succeeded.
    """
    lines = [
        HEADER,
        f"defense={report.defense}",
        f"attack={report.attack}",
        f"phi={'none' if report.phi is None else report.phi}",
        f"config={report.config_digest}",
        "asr_tar_denominator=pairs",
    ]
    lines += _count_lines("", report.counts)
    for a, (touched, won) in report.counts.involvement_rates().items():
        lines.append(f"involvement_rate.{a}={_f(touched)},{_f(won)}")
    for k, c in enumerate(report.per_fold):
        lines += _count_lines(f"fold.{k}.", c)
    return "\n".join(lines) + "\n"


def _counts_from(values: dict[str, str], line_of: dict[str, int]) -> Counts:
    kwargs: dict[str, int] = {}
    involvement: dict[int, tuple[int, int]] = {}
    for key, value in values.items():
        try:
            if key in _COUNT_KEYS:
                kwargs[key] = int(value)
            elif key.startswith("involvement."):
                touched, won = value.split(",")
                involvement[int(key.split(".", 1)[1])] = (int(touched), int(won))
        except ValueError as exc:
            raise ReportFormatError(line_of[key], f"{key}={value}") from exc
    return Counts(**kwargs, involvement=dict(sorted(involvement.items())))


def load_report(text: str) -> EvalReport:
    """Inverse of :func:`dump_report`; rate lines are recomputed, not read."""
    top: dict[str, str] = {}
    folds: dict[int, dict[str, str]] = {}
    line_of: dict[str, int] = {}
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ReportFormatError(n, raw)
        line_of[key] = n
        if key.startswith("fold."):
            parts = key.split(".", 2)
            if len(parts) != 3 or not parts[1].isdigit():
                raise ReportFormatError(n, raw)
            folds.setdefault(int(parts[1]), {})[parts[2]] = value
            line_of[parts[2]] = n
        else:
            top[key] = value
    for required in ("defense", "attack"):
        if required not in top:
            raise ReportFormatError(0, f"missing {required}")
    phi = top.get("phi", "none")
    try:
        phi_value = None if phi == "none" else int(phi)
    except ValueError as exc:
        raise ReportFormatError(line_of.get("phi", 0), f"phi={phi}") from exc
    return EvalReport(
        defense=top["defense"],
        attack=top["attack"],
        counts=_counts_from(top, line_of),
        phi=phi_value,
        per_fold=tuple(_counts_from(folds[k], line_of) for k in sorted(folds)),
        config_digest=top.get("config", ""),
    )


def write_report(path: Path, report: EvalReport) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_report(report), encoding="utf-8")


def read_report(path: Path) -> EvalReport:
    return load_report(path.read_text(encoding="utf-8"))


def report_table(reports: Sequence[EvalReport], title: str = "Evaluation") -> Table:
    t = Table(title=title)
    t.add_column("defense")
    t.add_column("attack")
    t.add_column("φ", justify="right")
    t.add_column("acc", justify="right")
    t.add_column("asr_tar", justify="right")
    t.add_column("asr_unt", justify="right")
    t.add_column("pairs", justify="right")
    t.add_column("hidden", justify="right")
    for r in reports:
        c = r.counts
        t.add_row(
            r.defense,
            r.attack,
            "—" if r.phi is None else str(r.phi),
            _f(c.acc),
            _f(c.asr_tar),
            _f(c.asr_unt),
            f"{c.tar_success}/{c.tar_pairs}",
            f"{c.unt_success}/{c.unt_total}",
        )
    return t


def involvement_table(report: EvalReport) -> Table:
    t = Table(title=f"Attribute involvement ({report.defense}, {report.attack})")
    t.add_column("attribute", justify="right")
    t.add_column("touched", justify="right")
    t.add_column("touched & succeeded", justify="right")
    for a, (touched, won) in report.counts.involvement_rates().items():
        t.add_row(f"#{a}", _f(touched), _f(won))
    return t
