"""Exception hierarchy shared by every stylearmor package.

Each error carries the structured fields callers branch on; the message is
only for humans. The CLI maps any ``StylearmorError`` to exit status 2.
"""

from __future__ import annotations


class StylearmorError(Exception):
    """Base class for all domain errors."""


class CSyntaxError(StylearmorError):
    """Grammar violation in Mini-C source."""

    def __init__(self, line: int, column: int, expected: str, found: str = "") -> None:
        self.line = line
        self.column = column
        self.expected = expected
        self.found = found
        at = f" but found {found!r}" if found else ""
        super().__init__(f"{line}:{column}: expected {expected}{at}")


class UnsupportedConstruct(StylearmorError):
    """A construct outside the Mini-C subset (or rejected by the interpreter)."""

    def __init__(self, name: str, line: int = 0, column: int = 0) -> None:
        self.name = name
        self.line = line
        self.column = column
        where = f" at {line}:{column}" if line else ""
        super().__init__(f"unsupported construct: {name}{where}")


class FuelExhausted(StylearmorError):
    def __init__(self, steps: int) -> None:
        self.steps = steps
        super().__init__(f"fuel exhausted after {steps} steps")


class RuntimeFault(StylearmorError):
    """Deterministic runtime failure detected by the interpreter."""

    KINDS = (
        "out_of_bounds",
        "div_zero",
        "read_past_input",
        "uninitialized_read",
        "stack_overflow",
        "use_after_free",
    )

    def __init__(self, kind: str, detail: str = "") -> None:
        if kind not in self.KINDS:
            raise ValueError(f"unknown fault kind {kind!r}")
        self.kind = kind
        self.detail = detail
        super().__init__(f"{kind}: {detail}" if detail else kind)


class EmptyInput(StylearmorError):
    pass


class UnknownKind(StylearmorError):
    def __init__(self, kind: str) -> None:
        self.kind = kind
        super().__init__(f"unknown transform kind {kind!r}")


class NotApplicable(StylearmorError):
    def __init__(self, kind: str, reason: str) -> None:
        self.kind = kind
        self.reason = reason
        super().__init__(f"{kind} not applicable: {reason}")


class InternalRewriteFault(StylearmorError):
    """A rewrite produced a tree that no longer renders to valid Mini-C."""


class NoCandidates(StylearmorError):
    pass


class NotTransformable(StylearmorError):
    def __init__(self, attribute_id: int) -> None:
        self.attribute_id = attribute_id
        super().__init__(f"attribute #{attribute_id} has no transform")


class DegenerateCorpus(StylearmorError):
    pass


class SchemaMismatch(StylearmorError):
    pass


class InsufficientTemplates(StylearmorError):
    pass


class TooFewPrograms(StylearmorError):
    def __init__(self, author: str, count: int, kappa: int) -> None:
        self.author = author
        self.count = count
        self.kappa = kappa
        super().__init__(f"author {author!r} has {count} programs, fewer than kappa={kappa}")


class _LineFormatError(StylearmorError):
    def __init__(self, line_no: int, text: str) -> None:
        self.line_no = line_no
        self.text = text
        super().__init__(f"line {line_no}: cannot parse {text!r}")


class PlanFormatError(_LineFormatError):
    pass


class ProfileFormatError(_LineFormatError):
    pass


class ModelFormatError(StylearmorError):
    pass


class ReportFormatError(_LineFormatError):
    pass
