from __future__ import annotations

from pathlib import Path

import typer
from rich.table import Table

from stylearmor.attacks.hiding import hide as hide_program
from stylearmor.attacks.imitation import AttackOutcome, imitate_profile, oracle_verifier
from stylearmor.attacks.perturb import perturbation, random_replacement
from stylearmor.cli.common import (
    CERTIFY_OPTION,
    CONFIG_OPTION,
    OUT_OPTION,
    PHI_OPTION,
    SEED_OPTION,
    TAU_OPTION,
    VERBOSE_OPTION,
    Run,
    console,
    handle_errors,
    open_run,
    read_program,
    read_programs,
    setup,
    verdict_for,
)
from stylearmor.config import Settings
from stylearmor.evaluation.corpus import load_corpus
from stylearmor.lang.program import Program
from stylearmor.lang.render import render
from stylearmor.style.attrs import extract_profile
from stylearmor.style.profile import AuthorProfile, synthesize
from stylearmor.transforms.base import TransformPlan
from stylearmor.transforms.planfile import read_plan, write_plan
from stylearmor.transforms.planner import execute_plan


def _verifier(settings: Settings, seed: int, certify: bool):
    return oracle_verifier(seed, settings.fuel) if certify else None


def plan_table(plan: TransformPlan, title: str) -> Table:
    t = Table(title=title)
    t.add_column("#", justify="right")
    t.add_column("kind")
    t.add_column("params")
    for step in plan:
        params = " ".join(f"{k}={v}" for k, v in step.params)
        t.add_row(str(step.attribute_id), step.kind, params)
    return t


def _finish(r: Run, program: Path, outcome: AttackOutcome, settings: Settings, seed: int) -> None:
    """Write the manipulated program, its plan and the attack report; log skips."""
    stem = program.stem
    manipulated = r.path(f"{stem}.{r.config.command}.c")
    manipulated.write_text(render(outcome.manipulated), encoding="utf-8")
    plan_path = r.path(f"{stem}.plan")
    write_plan(plan_path, outcome.plan)
    verdict = verdict_for(outcome.original, outcome.manipulated, settings, seed)
    report = [
        f"original={program.resolve()}",
        f"target={outcome.chosen_target}",
        f"plan={plan_path}",
        f"steps={len(outcome.plan)}",
        f"changed_lines={outcome.changed_lines}",
        f"oracle={verdict.label}",
    ]
    r.path("attack.txt").write_text("\n".join(report) + "\n", encoding="utf-8")
    r.skip_all((f"{program}#{a}", reason) for a, reason in outcome.skipped)
    if len(outcome.plan):
        console.print(plan_table(outcome.plan, f"Plan for {program.name}"))
    else:
        console.print("[yellow]No-op[/yellow]: nothing to change.")
    target = f" as [bold]{outcome.chosen_target}[/bold]" if outcome.chosen_target else ""
    colour = "green" if verdict.equivalent else "red"
    console.print(
        f"{program.name}{target}: {len(outcome.plan)} step(s), {outcome.changed_lines} changed line(s), "
        f"oracle [{colour}]{verdict.label}[/{colour}]"
    )
    console.print(f"Wrote {manipulated}")
    r.write_manifest(
        manipulated=str(manipulated),
        plan=str(plan_path),
        target=outcome.chosen_target,
        steps=len(outcome.plan),
        changed_lines=outcome.changed_lines,
        oracle=verdict.label,
        skipped=len(outcome.skipped),
    )


def imitate(
    program: Path = typer.Option(..., "--program", "-p", exists=True, dir_okay=False, help="Program to disguise."),
    target_corpus: list[Path] = typer.Option(
        ..., "--target-corpus", "-t", exists=True, help="Target author's programs (files or a directory)."
    ),
    target_id: str | None = typer.Option(None, "--target-id", help="Target author id (default: directory name)."),
    tau: float | None = TAU_OPTION,
    phi: int | None = PHI_OPTION,
    certify: bool = CERTIFY_OPTION,
    seed: int | None = SEED_OPTION,
    out: Path | None = OUT_OPTION,
    config: Path | None = CONFIG_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """Transform a program so it follows a target author's coding style.

    Writes the manipulated program, the plan file and the oracle verdict.

    Example:
        $ stylearmor imitate --program p.c --target-corpus corpus/a2 --tau 0
    """
    settings = setup(config, verbose)
    seed = settings.seed if seed is None else seed
    tau = settings.tau if tau is None else tau
    with handle_errors():
        original = read_program(program, settings)
        targets = read_programs(target_corpus, settings)
        author = target_id or target_corpus[0].resolve().name
        profile = synthesize(author, [extract_profile(p) for p in targets])
        inputs = {"program": program, **{f"target{k}": t for k, t in enumerate(target_corpus)}}
        r = open_run(settings, "imitate", out, inputs=inputs, seed=seed, target=author, tau=tau, phi=phi)
        verify = _verifier(settings, seed, certify)
        outcome = imitate_profile(original, profile, tau=tau, budget=phi, verify=verify)
        _finish(r, program, outcome, settings, seed)


def _author_profiles(corpus_dir: Path, settings: Settings) -> dict[str, AuthorProfile]:
    corpus = load_corpus(corpus_dir, max_bytes=settings.max_source_bytes)
    sources: dict[str, list[Program]] = {}
    for author in corpus.authors:
        sources[author] = list(corpus.external.get(author, ())) or corpus.programs_of(author)
    return {a: synthesize(a, [extract_profile(p) for p in ps]) for a, ps in sources.items()}


def hide(
    program: Path = typer.Option(..., "--program", "-p", exists=True, dir_okay=False, help="Program to disguise."),
    corpus: Path = typer.Option(
        ..., "--corpus", "-c", exists=True, file_okay=False, help="Candidate authors as <author>/<program>.c."
    ),
    author: str = typer.Option(..., "--author", "-a", help="The program's real author; never a candidate."),
    tau: float | None = TAU_OPTION,
    phi: int | None = PHI_OPTION,
    certify: bool = CERTIFY_OPTION,
    seed: int | None = SEED_OPTION,
    out: Path | None = OUT_OPTION,
    config: Path | None = CONFIG_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """Disguise a program as whichever other author changes the most lines.

    Example:
        $ stylearmor hide --program corpus/a01/array_sum_0.c --corpus gen/ --author a01
    """
    settings = setup(config, verbose)
    seed = settings.seed if seed is None else seed
    tau = settings.tau if tau is None else tau
    with handle_errors():
        original = read_program(program, settings)
        profiles = _author_profiles(corpus, settings)
        inputs = {"program": program, "corpus": corpus}
        r = open_run(settings, "hide", out, inputs=inputs, seed=seed, author=author, tau=tau, phi=phi)
        verify = _verifier(settings, seed, certify)
        outcome = hide_program(original, author, list(profiles.values()), tau=tau, budget=phi, verify=verify)
        _finish(r, program, outcome, settings, seed)


def perturb(
    program: Path = typer.Argument(..., exists=True, dir_okay=False, help="Program to perturb."),
    attribute: int | None = typer.Option(
        None, "--attribute", "-a", help="Change only this attribute (default: every attribute once)."
    ),
    donor: list[Path] = typer.Option(
        [], "--donor", help="Programs of an author to borrow open-ended values from (files or a directory)."
    ),
    plan: Path | None = typer.Option(
        None, "--plan", exists=True, dir_okay=False, help="Replay this plan file instead of perturbing."
    ),
    certify: bool = CERTIFY_OPTION,
    seed: int | None = SEED_OPTION,
    out: Path | None = OUT_OPTION,
    config: Path | None = CONFIG_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """Perturb one attribute, every attribute (random replacement), or replay a plan.

    Example:
        $ stylearmor perturb p.c --attribute 20 --seed 3
    """
    settings = setup(config, verbose)
    seed = settings.seed if seed is None else seed
    if plan is not None and attribute is not None:
        raise typer.BadParameter("--plan and --attribute are mutually exclusive")
    with handle_errors():
        original = read_program(program, settings)
        inputs: dict[str, Path | str] = {"program": program}
        if plan is not None:
            inputs["plan"] = plan
        inputs.update({f"donor{k}": d for k, d in enumerate(donor)})
        r = open_run(settings, "perturb", out, inputs=inputs, seed=seed, attribute=attribute)
        verify = _verifier(settings, seed, certify)
        if plan is not None:
            result = execute_plan(original, read_plan(plan), verify=verify)
            manipulated = result.program if result.applied else original
            outcome = AttackOutcome(original, manipulated, result.plan, "", tuple(result.skipped))
        elif attribute is not None:
            profile = None
            if donor:
                programs = read_programs(donor, settings)
                profile = synthesize(donor[0].resolve().name, [extract_profile(p) for p in programs])
            outcome = perturbation(original, attribute, donor=profile, seed=seed, verify=verify)
        else:
            outcome = random_replacement(original, seed, verify=verify)
        _finish(r, program, outcome, settings, seed)
