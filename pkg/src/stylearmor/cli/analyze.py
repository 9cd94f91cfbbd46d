from __future__ import annotations

from pathlib import Path

import typer
from rich.table import Table

from stylearmor.cli.common import (
    CONFIG_OPTION,
    OUT_OPTION,
    SEED_OPTION,
    TAU_OPTION,
    VERBOSE_OPTION,
    console,
    handle_errors,
    oracle_vectors,
    open_run,
    read_program,
    read_programs,
    setup,
    trace_summary,
)
from stylearmor.lang.interp import execute
from stylearmor.lang.oracle import dump_trace
from stylearmor.lang.render import render
from stylearmor.style.attrs import CATALOG, NUMERIC, AttributeValue, extract_profile
from stylearmor.style.formats import dump_profile, format_number
from stylearmor.style.profile import DiscrepancySet, discrepancies, synthesize, write_author_profile
from stylearmor.utils.text import slugify


def _value_text(value: AttributeValue | None, limit: int = 6) -> str:
    if value is None:
        return "—"
    if value.kind == NUMERIC:
        return format_number(value.number or 0.0)
    shown = ", ".join(f"{t}:{f}" for t, f in value.entries[:limit])
    more = len(value.entries) - limit
    return shown + (f" (+{more})" if more > 0 else "")


def profile_table(values: dict[int, AttributeValue], title: str) -> Table:
    t = Table(title=title)
    t.add_column("#", justify="right")
    t.add_column("attribute")
    t.add_column("value")
    for attribute_id in sorted(values):
        t.add_row(str(attribute_id), CATALOG[attribute_id].name, _value_text(values[attribute_id]))
    return t


def discrepancy_table(disc: DiscrepancySet, title: str) -> Table:
    t = Table(title=title)
    t.add_column("#", justify="right")
    t.add_column("attribute")
    t.add_column("program")
    t.add_column("target")
    for d in disc:
        t.add_row(
            str(d.attribute_id),
            CATALOG[d.attribute_id].name,
            _value_text(d.program_value),
            _value_text(d.target_value),
        )
    return t


def parse_cmd(
    program: Path = typer.Argument(..., exists=True, dir_okay=False, help="Mini-C source file."),
    run: bool = typer.Option(False, "--run", help="Also execute on the oracle's seeded inputs."),
    seed: int | None = SEED_OPTION,
    out: Path | None = OUT_OPTION,
    config: Path | None = CONFIG_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """Parse a program and write its canonical rendering (and, with --run, its traces).

    Example:
        $ stylearmor parse corpus/a01/array_sum_0.c --run
    """
    settings = setup(config, verbose)
    seed = settings.seed if seed is None else seed
    with handle_errors():
        p = read_program(program, settings)
        r = open_run(settings, "parse", out, inputs={"program": program}, seed=seed, run=run)
        rendered = r.path(f"{program.stem}.c")
        rendered.write_text(render(p), encoding="utf-8")
        console.print(f"[green]Parsed[/green] {program} -> {rendered}")
        statuses = []
        if run:
            for k, vector in enumerate(oracle_vectors(settings, seed)):
                trace = execute(p, vector, settings.fuel)
                r.path("traces", f"{k}.trace").write_text(dump_trace(trace), encoding="utf-8")
                console.print(f"  input {k}: {trace_summary(trace)}")
                statuses.append(trace.status)
        r.write_manifest(rendered=str(rendered), trace_statuses=statuses)


def extract(
    program: Path = typer.Argument(..., exists=True, dir_okay=False, help="Mini-C source file."),
    out: Path | None = OUT_OPTION,
    config: Path | None = CONFIG_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """Extract the coding-style profile of one program into ``<stem>.profile``.

    Example:
        $ stylearmor extract corpus/a01/array_sum_0.c
    """
    settings = setup(config, verbose)
    with handle_errors():
        p = read_program(program, settings)
        profile = extract_profile(p)
        r = open_run(settings, "extract", out, inputs={"program": program}, seed=settings.seed)
        path = r.path(f"{program.stem}.profile")
        path.write_text(dump_profile(profile), encoding="utf-8")
        console.print(profile_table(profile.values, f"Style profile of {program.name}"))
        console.print(f"Wrote {path}")
        r.write_manifest(profile=str(path), attributes=sorted(profile.applicable))


def profile(
    sources: list[Path] = typer.Argument(..., exists=True, help="Program files or directories of *.c files."),
    author: str = typer.Option(..., "--author", "-a", help="Author id the profile belongs to."),
    against: Path | None = typer.Option(
        None, "--against", exists=True, dir_okay=False, help="Show this program's discrepancies from the profile."
    ),
    tau: float | None = TAU_OPTION,
    out: Path | None = OUT_OPTION,
    config: Path | None = CONFIG_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """Synthesize an author profile from programs; optionally compare a program with it.

    Example:
        $ stylearmor profile external/a02 --author a02 --against corpus/a01/array_sum_0.c
    """
    settings = setup(config, verbose)
    tau = settings.tau if tau is None else tau
    with handle_errors():
        programs = read_programs(sources, settings)
        target = synthesize(author, [extract_profile(p) for p in programs])
        inputs = {f"source{k}": s for k, s in enumerate(sources)}
        if against is not None:
            inputs["against"] = against
        r = open_run(settings, "profile", out, inputs=inputs, seed=settings.seed, author=author, tau=tau)
        path = r.path(f"{slugify(author)}.profile")
        write_author_profile(path, target)
        console.print(profile_table(target.profile, f"Author {author} ({target.support} programs)"))
        console.print(f"Wrote {path}")
        found: list[int] = []
        if against is not None:
            disc = discrepancies(extract_profile(read_program(against, settings)), target, tau)
            found = disc.attribute_ids
            console.print(discrepancy_table(disc, f"{against.name} vs {author} (tau={tau:g})"))
        r.write_manifest(profile=str(path), support=target.support, discrepancies=found)
