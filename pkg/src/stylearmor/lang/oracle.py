"""Semantics oracle built on the interpreter.

Two programs are equivalent on an input vector when both complete with equal
outputs and exit codes, both fault with the same kind after equal outputs, or
both run out of fuel with one output sequence a prefix of the other.
"""

from __future__ import annotations

import json
import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from stylearmor.errors import UnsupportedConstruct
from stylearmor.lang.interp import DEFAULT_FUEL, IoTrace, execute
from stylearmor.lang.program import Program

logger = logging.getLogger(__name__)

DEFAULT_VECTORS = 5
DEFAULT_VECTOR_LENGTH = 32
DEFAULT_MAX_VALUE = 100


@dataclass(frozen=True)
class Verdict:
    equivalent: bool
    reason: str = ""

    @property
    def label(self) -> str:
        return "equivalent" if self.equivalent else f"diverged:{self.reason}"


def input_vectors(
    seed: int,
    count: int = DEFAULT_VECTORS,
    length: int = DEFAULT_VECTOR_LENGTH,
    max_value: int = DEFAULT_MAX_VALUE,
) -> list[list[int]]:
    """Seeded integer input vectors with entries uniform in ``[0, max_value]``."""
    rng = np.random.default_rng(seed)
    return [rng.integers(0, max_value, size=length, endpoint=True).tolist() for _ in range(count)]


def compare_traces(a: IoTrace, b: IoTrace) -> Verdict:
    if a.status != b.status:
        return Verdict(False, f"status {a.status} vs {b.status}")
    if a.status == "fuel":
        shorter, longer = sorted((a.outputs, b.outputs), key=len)
        if longer[: len(shorter)] != shorter:
            return Verdict(False, "outputs before fuel exhaustion differ")
        return Verdict(True)
    if a.status == "fault" and a.fault != b.fault:
        return Verdict(False, f"fault {a.fault} vs {b.fault}")
    if a.outputs != b.outputs:
        return Verdict(False, "outputs differ")
    if a.status == "ok" and a.exit_code != b.exit_code:
        return Verdict(False, f"exit code {a.exit_code} vs {b.exit_code}")
    return Verdict(True)


def check_equivalent(
    original: Program,
    candidate: Program,
    *,
    seed: int = 0,
    vectors: Sequence[Sequence[int]] | None = None,
    fuel: int = DEFAULT_FUEL,
) -> Verdict:
    """Run both programs on every input vector and compare the traces.

    A program the interpreter cannot model is never certified.
    """
    if vectors is None:
        vectors = input_vectors(seed)
    for i, vector in enumerate(vectors):
        try:
            left = execute(original, vector, fuel)
            right = execute(candidate, vector, fuel)
        except UnsupportedConstruct as exc:
            return Verdict(False, f"unverifiable: {exc.name}")
        verdict = compare_traces(left, right)
        if not verdict.equivalent:
            logger.debug("vector %d: %s", i, verdict.reason)
            return Verdict(False, f"vector {i}: {verdict.reason}")
    return Verdict(True)


def dump_trace(trace: IoTrace) -> str:
    """Serialize a trace: ``#`` header lines, then one line per output item."""
    header = [
        f"# status {trace.status}" + (f" {trace.fault}" if trace.fault else ""),
        f"# exit {trace.exit_code}",
        "# inputs " + " ".join(str(x) for x in trace.inputs),
    ]
    return "\n".join([*(h.rstrip() for h in header), *trace.lines()]) + "\n"


def load_trace(text: str) -> IoTrace:
    status, fault, code = "ok", "", 0
    inputs: list[int | float] = []
    outputs: list[int | str] = []
    for line in text.splitlines():
        if line.startswith("# status"):
            parts = line.split()
            status = parts[2]
            fault = parts[3] if len(parts) > 3 else ""
        elif line.startswith("# exit"):
            code = int(line.split()[2])
        elif line.startswith("# inputs"):
            inputs = [json.loads(x) for x in line.split()[2:]]
        elif line.startswith('"'):
            outputs.append(json.loads(line))
        elif line:
            outputs.append(int(line))
    return IoTrace(tuple(inputs), tuple(outputs), status, fault, code)
