from __future__ import annotations

import dataclasses
from collections.abc import Sequence
from pathlib import Path

import typer
from rich.table import Table

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
    setup,
)
from stylearmor.config import Settings
from stylearmor.defense.augment import augment
from stylearmor.defense.trainer import AugmentationConfig, train_ropgen
from stylearmor.evaluation.corpus import Corpus, generate_corpus, load_corpus, write_corpus
from stylearmor.evaluation.matrix import (
    ATTACKS,
    AttackParams,
    ExperimentConfig,
    default_sequences,
    evaluate as evaluate_model,
    run_matrix,
    target_profiles,
)
from stylearmor.evaluation.report import EvalReport, involvement_table, report_table, write_report
from stylearmor.model.store import load_model, save_model
from stylearmor.model.train import Hyperparams, accuracy, train as train_model
from stylearmor.transforms.base import TransformPlan
from stylearmor.transforms.planfile import read_plan

# Ablation names start with "-"; these spellings survive any shell or option parser.
DEFENSE_ALIASES = {"no-ci": "-CI", "no-ga": "-GA", "no-cp-ga": "-CP-GA"}

EPOCHS_OPTION = typer.Option(None, "--epochs", help="Training epochs (default: settings.epochs).")
SEQUENCES_OPTION = typer.Option(
    [], "--sequences", help="Plan files to replay as perturbations (repeatable)."
)


def _hyperparams(settings: Settings, seed: int, epochs: int | None) -> Hyperparams:
    hp = settings.hyperparams(seed)
    return hp if epochs is None else dataclasses.replace(hp, epochs=epochs)


def _load(path: Path, settings: Settings, r: Run | None = None) -> Corpus:
    corpus = load_corpus(path, max_bytes=settings.max_source_bytes)
    if r is not None:
        r.skip_all(corpus.skipped)
    return corpus


def _plans(paths: Sequence[Path]) -> tuple[TransformPlan, ...] | None:
    return tuple(read_plan(p) for p in paths) if paths else None


def _defense_name(name: str) -> str:
    return DEFENSE_ALIASES.get(name.lower(), name)


def corpus_table(corpus: Corpus, title: str) -> Table:
    t = Table(title=title)
    t.add_column("author")
    t.add_column("programs", justify="right")
    t.add_column("held out", justify="right")
    for author in corpus.authors:
        t.add_row(author, str(len(corpus.programs_of(author))), str(len(corpus.external.get(author, ()))))
    return t


def gen_corpus(
    authors: int = typer.Option(5, "--authors", help="Number of authors (at least 2)."),
    programs: int = typer.Option(10, "--programs", help="Programs per author."),
    tasks: int = typer.Option(5, "--tasks", help="Distinct task templates to draw."),
    external: int = typer.Option(2, "--external", help="Held-out programs per author for target profiles."),
    identical_archetypes: bool = typer.Option(
        False, "--identical-archetypes", help="Give every author the same style (control experiment)."
    ),
    seed: int | None = SEED_OPTION,
    out: Path | None = OUT_OPTION,
    config: Path | None = CONFIG_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """Generate a synthetic corpus: ``corpus/<author>/*.c`` plus ``external/<author>/*.c``.

    Example:
        $ stylearmor gen-corpus --authors 5 --programs 10 --seed 1 -o gen/
    """
    settings = setup(config, verbose)
    seed = settings.seed if seed is None else seed
    with handle_errors():
        corpus = generate_corpus(
            authors,
            programs,
            tasks,
            seed,
            identical_archetypes=identical_archetypes,
            external_per_author=external,
        )
        r = open_run(
            settings,
            "gen-corpus",
            out,
            seed=seed,
            authors=authors,
            programs=programs,
            tasks=tasks,
            external=external,
            identical_archetypes=identical_archetypes,
        )
        written = write_corpus(corpus, r.dir)
        console.print(corpus_table(corpus, f"Generated corpus (seed {seed})"))
        console.print(f"Wrote {len(written)} files under {r.dir}")
        r.write_manifest(files=len(written), programs=len(corpus), authors=list(corpus.authors))


def train(
    corpus: Path = typer.Argument(..., exists=True, file_okay=False, help="Corpus directory."),
    epochs: int | None = EPOCHS_OPTION,
    seed: int | None = SEED_OPTION,
    out: Path | None = OUT_OPTION,
    config: Path | None = CONFIG_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """Train the baseline attribution model and save it as ``model.npz``.

    Example:
        $ stylearmor train gen/ --seed 0
    """
    settings = setup(config, verbose)
    seed = settings.seed if seed is None else seed
    with handle_errors():
        hp = _hyperparams(settings, seed, epochs)
        r = open_run(settings, "train", out, inputs={"corpus": corpus}, seed=seed, hp=dataclasses.asdict(hp))
        data = _load(corpus, settings, r)
        model = train_model(data.items, hp)
        path = r.path("model.npz")
        save_model(path, model)
        acc = accuracy(model, data.items)
        console.print(f"Trained on {len(data)} programs of {len(data.authors)} authors; training acc {acc:.4f}")
        console.print(f"Wrote {path}")
        r.write_manifest(model=str(path), programs=len(data), training_accuracy=acc, loss_history=model.history)


def train_ropgen_cmd(
    corpus: Path = typer.Argument(..., exists=True, file_okay=False, help="Corpus directory."),
    targets: list[str] = typer.Option(
        [], "--target", help="Authors whose programs are imitated during augmentation (default: all)."
    ),
    imitation: bool = typer.Option(True, "--imitation/--no-imitation", help="Augment with imitations."),
    perturb: bool = typer.Option(True, "--perturb/--no-perturb", help="Augment with perturbations."),
    subnetworks: int | None = typer.Option(None, "--subnetworks", "-n", help="Sub-networks per iteration."),
    alpha: float | None = typer.Option(None, "--alpha", help="Width lower bound of the sub-networks."),
    sequences: list[Path] = SEQUENCES_OPTION,
    tau: float | None = TAU_OPTION,
    epochs: int | None = EPOCHS_OPTION,
    seed: int | None = SEED_OPTION,
    out: Path | None = OUT_OPTION,
    config: Path | None = CONFIG_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """Train a hardened model with data and gradient augmentation.

    ``--no-imitation``, ``--subnetworks 0`` and ``--no-perturb`` give the
    ablated configurations.

    Example:
        $ stylearmor train-ropgen gen/ --subnetworks 3 --alpha 0.8
    """
    settings = setup(config, verbose)
    seed = settings.seed if seed is None else seed
    tau = settings.tau if tau is None else tau
    with handle_errors():
        hp = _hyperparams(settings, seed, epochs)
        inputs = {"corpus": corpus, **{f"sequence{k}": s for k, s in enumerate(sequences)}}
        r = open_run(settings, "train-ropgen", out, inputs=inputs, seed=seed, hp=dataclasses.asdict(hp))
        data = _load(corpus, settings, r)
        unknown = sorted(set(targets) - set(data.authors))
        if unknown:
            raise ValueError(f"unknown target author(s): {', '.join(unknown)}")
        chosen = frozenset(targets or data.authors) if imitation else frozenset()
        cfg = AugmentationConfig(
            targets=chosen,
            tau=tau,
            sequences=_plans(sequences),
            perturb=perturb,
            subnetworks=settings.subnetworks if subnetworks is None else subnetworks,
            width_lower_bound=settings.width_lower_bound if alpha is None else alpha,
            seed=seed,
        )
        sets = augment(data.items, cfg.targets, tau=cfg.tau, sequences=cfg.sequences, perturb=cfg.perturb, seed=seed)
        r.skip_all(sets.skipped)
        model = train_ropgen(sets.u, sets.u_prime, hp, cfg)
        path = r.path("model.npz")
        save_model(path, model)
        provenance = r.path("provenance.tsv")
        lines = ["source\tlabel\torigin\tdetail\tsteps"]
        lines += [f"{p.source}\t{p.label}\t{p.origin}\t{p.detail}\t{p.steps}" for p in sets.provenance]
        provenance.write_text("\n".join(lines) + "\n", encoding="utf-8")
        console.print(f"|P|={len(data)} |U|={len(sets.u)} |U'|={len(sets.u_prime)} skipped={len(sets.skipped)}")
        console.print(f"Wrote {path}")
        r.write_manifest(
            model=str(path),
            augmentation={
                "targets": sorted(cfg.targets),
                "tau": cfg.tau,
                "perturb": cfg.perturb,
                "sequences": len(cfg.sequences or ()),
                "subnetworks": cfg.subnetworks,
                "width_lower_bound": cfg.width_lower_bound,
            },
            p=len(data),
            u=len(sets.u),
            u_prime=len(sets.u_prime),
            skipped=len(sets.skipped),
            loss_history=model.history,
        )


def _print_reports(reports: Sequence[EvalReport], title: str, involvement: bool) -> None:
    console.print(report_table(reports, title))
    if involvement:
        for report in reports:
            if report.counts.involvement:
                console.print(involvement_table(report))


def evaluate(
    model: Path = typer.Option(..., "--model", "-m", exists=True, dir_okay=False, help="Model file from train."),
    corpus: Path = typer.Option(..., "--corpus", "-c", exists=True, file_okay=False, help="Test corpus directory."),
    attack: str = typer.Option("imitate", "--attack", help=f"One of: {', '.join(ATTACKS)}."),
    phi: int | None = PHI_OPTION,
    target_authors: int | None = typer.Option(
        None, "--target-authors", help="Attack the programs of this many random authors (imitate)."
    ),
    sequences: list[Path] = SEQUENCES_OPTION,
    involvement: bool = typer.Option(False, "--involvement", help="Also print attribute involvement."),
    tau: float | None = TAU_OPTION,
    certify: bool = CERTIFY_OPTION,
    seed: int | None = SEED_OPTION,
    out: Path | None = OUT_OPTION,
    config: Path | None = CONFIG_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """Measure a stored model's accuracy and its robustness to one attack.

    Example:
        $ stylearmor evaluate --model run/model.npz --corpus gen/ --attack hide
    """
    settings = setup(config, verbose)
    seed = settings.seed if seed is None else seed
    tau = settings.tau if tau is None else tau
    if attack not in ATTACKS:
        raise typer.BadParameter(f"attack must be one of {', '.join(ATTACKS)}", param_hint="--attack")
    with handle_errors():
        inputs = {"model": model, "corpus": corpus, **{f"sequence{k}": s for k, s in enumerate(sequences)}}
        r = open_run(settings, "evaluate", out, inputs=inputs, seed=seed, attack=attack, phi=phi, tau=tau)
        m = load_model(model)
        data = _load(corpus, settings, r)
        replay = _plans(sequences) or (default_sequences(data, seed) if attack == "perturb_sequences" else ())
        params = AttackParams(tau, phi, seed, certify, target_authors, tuple(replay))
        counts = evaluate_model(m, data.items, attack, profiles=target_profiles(data, data.items), params=params)
        report = EvalReport("model", attack, counts, phi, (counts,))
        path = r.path("report.txt")
        write_report(path, report)
        _print_reports([report], f"{model.name} on {corpus.name}", involvement)
        console.print(f"Wrote {path}")
        r.write_manifest(report=str(path), acc=report.acc, asr_tar=report.asr_tar, asr_unt=report.asr_unt)


def matrix(
    corpus: Path = typer.Argument(..., exists=True, file_okay=False, help="Corpus directory."),
    defenses: list[str] = typer.Option(
        ["baseline", "ropgen"],
        "--defense",
        "-d",
        help="baseline, ropgen, -CI (no-ci), -GA (no-ga), -CP-GA (no-cp-ga), basic-at, pgd-at.",
    ),
    attacks: list[str] = typer.Option(["imitate", "hide"], "--attack", help=f"Any of: {', '.join(ATTACKS)}."),
    phis: list[int] = typer.Option([], "--phi", help="Budgets to sweep (repeatable; default: unbounded)."),
    kappa: int | None = typer.Option(None, "--kappa", help="Folds (default: settings.kappa)."),
    max_folds: int | None = typer.Option(None, "--max-folds", help="Only run the first folds."),
    target_authors: int | None = typer.Option(
        None, "--target-authors", help="Attack the programs of this many random authors (imitate)."
    ),
    targets: list[str] = typer.Option([], "--target", help="Authors imitated during augmentation (default: all)."),
    sequences: list[Path] = SEQUENCES_OPTION,
    involvement: bool = typer.Option(False, "--involvement", help="Also print attribute involvement."),
    tau: float | None = TAU_OPTION,
    epochs: int | None = EPOCHS_OPTION,
    certify: bool = CERTIFY_OPTION,
    seed: int | None = SEED_OPTION,
    out: Path | None = OUT_OPTION,
    config: Path | None = CONFIG_OPTION,
    verbose: bool = VERBOSE_OPTION,
):
    """Cross-validate every defense against every attack; one report per cell.

    Example:
        $ stylearmor matrix gen/ -d baseline -d ropgen -d no-ci --attack imitate --kappa 5
    """
    settings = setup(config, verbose)
    seed = settings.seed if seed is None else seed
    tau = settings.tau if tau is None else tau
    names = [_defense_name(d) for d in defenses]
    with handle_errors():
        cfg = ExperimentConfig(
            kappa=settings.kappa if kappa is None else kappa,
            seed=seed,
            tau=tau,
            phis=tuple(phis) or (None,),
            target_authors=target_authors,
            certify=certify,
            max_folds=max_folds,
            subnetworks=settings.subnetworks,
            width_lower_bound=settings.width_lower_bound,
            targets=tuple(targets) or None,
            hp=_hyperparams(settings, seed, epochs),
        )
        inputs = {"corpus": corpus, **{f"sequence{k}": s for k, s in enumerate(sequences)}}
        r = open_run(
            settings,
            "matrix",
            out,
            inputs=inputs,
            seed=seed,
            defenses=names,
            attacks=list(attacks),
            experiment=dataclasses.asdict(cfg),
            digest=cfg.digest,
        )
        data = _load(corpus, settings, r)
        reports = run_matrix(data, names, attacks, cfg, sequences=_plans(sequences))
        paths = []
        for report in reports:
            path = r.path("reports", f"{report.cell}.txt")
            write_report(path, report)
            paths.append(str(path))
        _print_reports(reports, f"{corpus.name}: {cfg.kappa}-fold matrix (config {cfg.digest})", involvement)
        console.print(f"Wrote {len(paths)} reports under {r.dir / 'reports'}")
        r.write_manifest(
            reports=paths,
            cells={rep.cell: {"acc": rep.acc, "asr_tar": rep.asr_tar, "asr_unt": rep.asr_unt} for rep in reports},
        )
