"""Coding-style attributes, profiles and synthesis."""

from stylearmor.style.attrs import (
    CATALOG,
    AttributeValue,
    StyleProfile,
    applicable_attributes,
    extract_profile,
)
from stylearmor.style.profile import AuthorProfile, DiscrepancySet, discrepancies, synthesize

__all__ = [
    "CATALOG",
    "AttributeValue",
    "AuthorProfile",
    "DiscrepancySet",
    "StyleProfile",
    "applicable_attributes",
    "discrepancies",
    "extract_profile",
    "synthesize",
]
