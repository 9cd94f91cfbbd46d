"""Synthetic corpora, cross validation and the attack/defense evaluation matrix."""

from stylearmor.evaluation.archetypes import Archetype, draw_archetypes, violations
from stylearmor.evaluation.corpus import Corpus, generate_corpus, load_corpus, write_corpus
from stylearmor.evaluation.folds import Fold, stratified_folds
from stylearmor.evaluation.matrix import (
    ATTACKS,
    DEFENSES,
    AttackParams,
    ExperimentConfig,
    defense_trainer,
    evaluate,
    run_matrix,
    target_profiles,
)
from stylearmor.evaluation.metrics import AttackRecord, Counts, tally
from stylearmor.evaluation.report import EvalReport, dump_report, load_report, read_report, write_report

__all__ = [
    "ATTACKS",
    "DEFENSES",
    "Archetype",
    "AttackParams",
    "AttackRecord",
    "Corpus",
    "Counts",
    "EvalReport",
    "ExperimentConfig",
    "Fold",
    "defense_trainer",
    "draw_archetypes",
    "dump_report",
    "evaluate",
    "generate_corpus",
    "load_corpus",
    "load_report",
    "read_report",
    "run_matrix",
    "stratified_folds",
    "tally",
    "target_profiles",
    "violations",
    "write_corpus",
    "write_report",
]
