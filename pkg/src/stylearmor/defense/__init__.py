"""Hardened training: data augmentation and gradient augmentation."""

from stylearmor.defense.augment import (
    Augmented,
    AugmentedSets,
    Provenance,
    augment,
    augment_imitation,
    augment_perturbation,
    author_profiles,
)
from stylearmor.defense.pgd import train_pgd_at
from stylearmor.defense.trainer import AugmentationConfig, ropgen_gradients, sample_widths, train_ropgen

__all__ = [
    "AugmentationConfig",
    "Augmented",
    "AugmentedSets",
    "Provenance",
    "augment",
    "augment_imitation",
    "augment_perturbation",
    "author_profiles",
    "ropgen_gradients",
    "sample_widths",
    "train_pgd_at",
    "train_ropgen",
]
