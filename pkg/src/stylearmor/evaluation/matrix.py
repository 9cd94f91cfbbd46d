"""Defense × attack experiments over stratified folds.

Attacks run black-box: every manipulated program is produced first and only
then shown to the model for a verdict.
"""

from __future__ import annotations

import json
import logging
from collections.abc import Callable, Sequence
from dataclasses import asdict, dataclass, field

import numpy as np

from stylearmor.attacks.hiding import hide
from stylearmor.attacks.imitation import AttackOutcome, imitate_profile, oracle_verifier
from stylearmor.attacks.perturb import random_replacement
from stylearmor.defense.augment import augment
from stylearmor.defense.pgd import train_pgd_at
from stylearmor.defense.trainer import AugmentationConfig, train_ropgen
from stylearmor.evaluation.corpus import Corpus
from stylearmor.evaluation.folds import stratified_folds
from stylearmor.evaluation.metrics import AttackRecord, Counts, tally
from stylearmor.evaluation.report import EvalReport
from stylearmor.lang.program import Program
from stylearmor.model.network import Model, predict_labels
from stylearmor.model.train import Hyperparams, LabeledProgram, train
from stylearmor.style.attrs import extract_profile
from stylearmor.style.profile import AuthorProfile, synthesize
from stylearmor.transforms.base import TransformPlan
from stylearmor.transforms.planner import execute_plan
from stylearmor.utils.text import short_hash

logger = logging.getLogger(__name__)

ATTACKS = ("imitate", "hide", "random_replace", "perturb_sequences")
DEFENSES = ("baseline", "ropgen", "-CI", "-GA", "-CP-GA", "basic-at", "pgd-at")


@dataclass(frozen=True)
class AttackParams:
    tau: float = 0.0
    budget: int | None = None
    seed: int = 0
    certify: bool = True
    target_authors: int | None = None
    sequences: tuple[TransformPlan, ...] = ()


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a matrix run depends on; ``digest`` names it in reports."""

    kappa: int = 10
    seed: int = 0
    tau: float = 0.0
    phis: tuple[int | None, ...] = (None,)
    target_authors: int | None = None
    certify: bool = True
    max_folds: int | None = None
    subnetworks: int = 3
    width_lower_bound: float = 0.8
    targets: tuple[str, ...] | None = None
    hp: Hyperparams = field(default_factory=Hyperparams)

    def __post_init__(self) -> None:
        if any(phi is not None and phi < 0 for phi in self.phis):
            raise ValueError("phi must be non-negative")
        if self.max_folds is not None and self.max_folds < 1:
            raise ValueError("max_folds must be positive")

    @property
    def digest(self) -> str:
        return short_hash(json.dumps(asdict(self), sort_keys=True, default=str))


# ---------------------------------------------------------------------------
# Attacks
# ---------------------------------------------------------------------------


def target_profiles(corpus: Corpus, train_items: Sequence[LabeledProgram]) -> dict[str, AuthorProfile]:
    """One profile per author from its held-out programs, else from its training programs."""
    grouped: dict[str, list[Program]] = {}
    for program, author in train_items:
        grouped.setdefault(author, []).append(program)
    out: dict[str, AuthorProfile] = {}
    for author in corpus.authors:
        source = list(corpus.external.get(author, ())) or grouped.get(author, [])
        if source:
            out[author] = synthesize(author, [extract_profile(p) for p in source])
    return out


def select_authors(authors: Sequence[str], count: int | None, seed: int) -> set[str]:
    """All authors, or a seeded subset of ``count`` of them."""
    if count is None or count >= len(authors):
        return set(authors)
    rng = np.random.default_rng([seed, 4])
    return {authors[int(k)] for k in rng.choice(len(authors), size=count, replace=False)}


def _record(program: Program, author: str, outcome: AttackOutcome, predicted: str, target: str = "") -> AttackRecord:
    return AttackRecord(program.source_name, author, predicted, target, tuple(outcome.plan.attribute_ids))


def _within_budget(outcome: AttackOutcome, budget: int | None, verify) -> AttackOutcome:
    if budget is None or len(outcome.plan) <= budget:
        return outcome
    result = execute_plan(outcome.original, outcome.plan.truncated(budget), verify=verify)
    manipulated = result.program if result.applied else outcome.original
    return AttackOutcome(outcome.original, manipulated, result.plan, outcome.chosen_target, outcome.skipped)


def _replay(program: Program, plan: TransformPlan, budget: int | None, verify) -> AttackOutcome:
    if budget is not None and len(plan) > budget:
        plan = plan.truncated(budget)
    result = execute_plan(program, plan, verify=verify)
    return AttackOutcome(program, result.program if result.applied else program, result.plan)


def _untargeted_from(author: str, source: str, variants: Sequence[AttackRecord]) -> AttackRecord:
    """A program is hidden when any of its variants escapes its author."""
    for r in variants:
        if r.predicted != author:
            return AttackRecord(source, author, r.predicted, "", r.attributes)
    touched = tuple(sorted({a for r in variants for a in r.attributes}))
    return AttackRecord(source, author, author, "", touched)


def evaluate(
    model: Model,
    test: Sequence[LabeledProgram],
    attack: str,
    *,
    profiles: dict[str, AuthorProfile],
    params: AttackParams | None = None,
) -> Counts:
    """Accuracy on ``test`` and the success of ``attack`` against ``model``.

    ``imitate`` attacks every test program of the selected authors once per
    other author; the other attacks only touch correctly classified programs.

    Args:
        model: The attributed model; it only sees finished programs.
        test: Held-out labeled programs.
        attack: One of ``imitate``, ``hide``, ``random_replace`` or ``perturb_sequences``.
        profiles: Target profiles by author id.
        params: Tolerance, budget, seed and certification for the attack.

    Returns:
        Counts: Accuracy and success counts for this fold.

    Raises:
        ValueError: for an unknown attack.
    """
    if attack not in ATTACKS:
        raise ValueError(f"unknown attack {attack!r}; expected one of {', '.join(ATTACKS)}")
    params = params or AttackParams()
    truth = [a for _, a in test]
    predicted = predict_labels(model, [p for p, _ in test])
    correct = [k for k, (t, p) in enumerate(zip(truth, predicted)) if t == p]
    verify = oracle_verifier(params.seed) if params.certify else None
    jobs: list[tuple[int, str, AttackOutcome]] = []
    if attack == "imitate":
        chosen = select_authors(sorted(profiles), params.target_authors, params.seed)
        for k, (program, author) in enumerate(test):
            if author not in chosen:
                continue
            for target in sorted(profiles):
                if target != author:
                    outcome = imitate_profile(
                        program, profiles[target], tau=params.tau, budget=params.budget, verify=verify
                    )
                    jobs.append((k, target, outcome))
    else:
        for k in correct:
            program, author = test[k]
            if attack == "hide":
                others = [p for a, p in sorted(profiles.items()) if a != author]
                if not others:
                    continue
                outcome = hide(program, author, others, tau=params.tau, budget=params.budget, verify=verify)
                jobs.append((k, "", outcome))
            elif attack == "random_replace":
                outcome = random_replacement(program, params.seed, verify=verify)
                jobs.append((k, "", _within_budget(outcome, params.budget, verify)))
            else:
                for plan in params.sequences:
                    jobs.append((k, "", _replay(program, plan, params.budget, verify)))
    labels = predict_labels(model, [o.manipulated for _, _, o in jobs])
    records = [_record(test[k][0], test[k][1], o, label, target) for (k, target, o), label in zip(jobs, labels)]
    if attack not in ("imitate", "perturb_sequences"):
        return tally(truth, predicted, (), records)
    per_program: dict[int, list[AttackRecord]] = {}
    for (k, _, _), r in zip(jobs, records):
        per_program.setdefault(k, []).append(r)
    hidden = [_untargeted_from(truth[k], test[k][0].source_name, per_program[k]) for k in correct if k in per_program]
    return tally(truth, predicted, records if attack == "imitate" else (), hidden)


def default_sequences(corpus: Corpus, seed: int = 0) -> tuple[TransformPlan, ...]:
    """Random-replacement plans recorded on the held-out programs, for replay elsewhere."""
    plans: list[TransformPlan] = []
    for author in corpus.authors:
        for program in corpus.external.get(author, ()):
            plan = random_replacement(program, seed).plan
            if len(plan):
                plans.append(plan)
    return tuple(plans)


# ---------------------------------------------------------------------------
# Defenses
# ---------------------------------------------------------------------------

Trainer = Callable[[Sequence[LabeledProgram]], Model]


def defense_trainer(name: str, cfg: ExperimentConfig, *, sequences: Sequence[TransformPlan] | None = None) -> Trainer:
    """How to fit one defense on a training fold.

    ``cfg.targets`` restricts the authors imitated during augmentation (all
    by default); ``basic-at`` always imitates every author, ``-CI`` none.
    Configurations without sub-networks train on U and U' merged.
    """
    if name not in DEFENSES:
        raise ValueError(f"unknown defense {name!r}; expected one of {', '.join(DEFENSES)}")
    hp = cfg.hp

    def fit(items: Sequence[LabeledProgram]) -> Model:
        if name == "baseline":
            return train(items, hp)
        if name == "pgd-at":
            return train_pgd_at(items, hp, seed=cfg.seed)
        authors = frozenset(a for _, a in items)
        chosen = authors if cfg.targets is None else authors & frozenset(cfg.targets)
        ac = AugmentationConfig(
            targets={"-CI": frozenset(), "basic-at": authors}.get(name, chosen),
            tau=cfg.tau,
            sequences=tuple(sequences) if sequences is not None else None,
            perturb=name != "-CP-GA",
            subnetworks=cfg.subnetworks if name in ("ropgen", "-CI") else 0,
            width_lower_bound=cfg.width_lower_bound,
            seed=cfg.seed,
        )
        sets = augment(items, ac.targets, tau=ac.tau, sequences=ac.sequences, perturb=ac.perturb, seed=ac.seed)
        u, u_prime = sets.u, sets.u_prime
        if not ac.subnetworks:
            u, u_prime = u + u_prime, []
        return train_ropgen(u, u_prime, hp, ac)

    return fit


# ---------------------------------------------------------------------------
# Matrix
# ---------------------------------------------------------------------------


def run_matrix(
    corpus: Corpus,
    defenses: Sequence[str],
    attacks: Sequence[str],
    cfg: ExperimentConfig,
    *,
    sequences: Sequence[TransformPlan] | None = None,
) -> list[EvalReport]:
    """One report per (defense, attack, φ) cell, counts pooled over folds.

    Folds run in index order; each defense is trained once per fold and
    shared by every attack and φ.

    Args:
        corpus: Labeled programs plus held-out programs for target profiles.
        defenses: Names from ``DEFENSES``.
        attacks: Names from ``ATTACKS``.
        cfg: Fold count, seed, budgets and hyperparameters; its digest tags every report.
        sequences: Plans replayed by ``perturb_sequences``, recorded from held-out
            programs when omitted. When given, defenses also augment by replaying them.

    Returns:
        list[EvalReport]: Defense-major, then attack, then φ in ``cfg.phis`` order.

    Raises:
        ValueError: for an unknown defense or attack.
        TooFewPrograms: when an author has fewer than ``cfg.kappa`` programs.
    """
    unknown = [x for x in defenses if x not in DEFENSES] + [x for x in attacks if x not in ATTACKS]
    if unknown:
        raise ValueError(f"unknown defense or attack: {', '.join(unknown)}")
    replay = tuple(sequences) if sequences is not None else ()
    if "perturb_sequences" in attacks and not replay:
        replay = default_sequences(corpus, cfg.seed)
    folds = stratified_folds(corpus, cfg.kappa, cfg.seed)
    if cfg.max_folds is not None:
        folds = folds[: cfg.max_folds]
    cells = [(d, a, phi) for d in defenses for a in attacks for phi in cfg.phis]
    per_cell: dict[tuple, list[Counts]] = {cell: [] for cell in cells}
    for fold in folds:
        train_items, test_items = fold.split(corpus)
        profiles = target_profiles(corpus, train_items)
        for d in defenses:
            model = defense_trainer(d, cfg, sequences=sequences)(train_items)
            for a in attacks:
                for phi in cfg.phis:
                    params = AttackParams(
                        tau=cfg.tau,
                        budget=phi,
                        seed=cfg.seed,
                        certify=cfg.certify,
                        target_authors=cfg.target_authors,
                        sequences=replay,
                    )
                    counts = evaluate(model, test_items, a, profiles=profiles, params=params)
                    per_cell[(d, a, phi)].append(counts)
                    logger.info(
                        "fold %d %s/%s phi=%s: acc=%.4f asr_tar=%.4f asr_unt=%.4f",
                        fold.index,
                        d,
                        a,
                        phi,
                        counts.acc,
                        counts.asr_tar,
                        counts.asr_unt,
                    )
    reports = []
    for d, a, phi in cells:
        per_fold = per_cell[(d, a, phi)]
        total = Counts()
        for c in per_fold:
            total = total + c
        reports.append(EvalReport(d, a, total, phi, tuple(per_fold), cfg.digest))
    return reports
