"""Mini-C language core: parse, render, interpret, diff."""

from stylearmor.lang.diff import diff_lines
from stylearmor.lang.interp import IoTrace, execute, interpret
from stylearmor.lang.oracle import Verdict, check_equivalent, input_vectors
from stylearmor.lang.parser import parse
from stylearmor.lang.program import MacroDef, Program
from stylearmor.lang.render import render

__all__ = [
    "IoTrace",
    "MacroDef",
    "Program",
    "Verdict",
    "check_equivalent",
    "diff_lines",
    "execute",
    "input_vectors",
    "interpret",
    "parse",
    "render",
]
