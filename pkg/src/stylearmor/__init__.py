"""Coding-style attacks on authorship attribution, and hardened training against them."""

__all__ = []
__version__ = "0.1.0"
