"""Black-box coding-style attacks. Nothing in this package imports ``stylearmor.model``."""

from stylearmor.attacks.hiding import candidate_outcomes, hide, select_candidate
from stylearmor.attacks.imitation import AttackOutcome, imitate, imitate_profile, oracle_verifier
from stylearmor.attacks.perturb import perturb_attribute, perturbation, random_replace, random_replacement

__all__ = [
    "AttackOutcome",
    "candidate_outcomes",
    "hide",
    "imitate",
    "imitate_profile",
    "oracle_verifier",
    "perturb_attribute",
    "perturbation",
    "random_replace",
    "random_replacement",
    "select_candidate",
]
