"""Transform steps and plans, the family registry, and checked application.

A family rewrites one kind of site. :func:`apply` works on a deep copy of the
program, then re-resolves names (capture check), renders, reparses and
compares trees, so every successful step yields a program whose source text
round-trips.
"""

from __future__ import annotations

import copy
import logging
import re
from collections.abc import Iterator
from dataclasses import dataclass
from functools import cached_property
from typing import NoReturn

from stylearmor.errors import (
    CSyntaxError,
    InternalRewriteFault,
    NotApplicable,
    StylearmorError,
    UnknownKind,
    UnsupportedConstruct,
)
from stylearmor.lang.lexer import KEYWORDS, tokenize
from stylearmor.lang.nodes import (
    EXTERNAL,
    DeclStmt,
    Declarator,
    Define,
    FunctionDef,
    Ident,
    Include,
    Param,
    TranslationUnit,
    Typedef,
    TypeSpec,
    walk,
)
from stylearmor.lang.parser import parse
from stylearmor.lang.program import Program
from stylearmor.lang.render import render
from stylearmor.lang.scope import EXTERNAL_NAMES, Symbol, check_bindings, max_uid

logger = logging.getLogger(__name__)

IDENT_RE = re.compile(r"^[A-Za-z_]\w*$")
COMMON_PARAMS = ("site", "seed")


@dataclass(frozen=True)
class TransformStep:
    """One rewrite: a registered ``kind`` plus string parameters.

    ``params`` keeps insertion order so plan files are stable.
    """

    attribute_id: int
    kind: str
    params: tuple[tuple[str, str], ...] = ()

    @classmethod
    def make(cls, attribute_id: int, kind: str, **params: object) -> TransformStep:
        return cls(attribute_id, kind, tuple((k, str(v)) for k, v in params.items() if v is not None))

    def param(self, key: str, default: str | None = None) -> str | None:
        for k, v in self.params:
            if k == key:
                return v
        return default

    def with_params(self, **params: object) -> TransformStep:
        merged = dict(self.params)
        merged.update({k: str(v) for k, v in params.items() if v is not None})
        return TransformStep(self.attribute_id, self.kind, tuple(merged.items()))

    def __str__(self) -> str:
        args = "".join(f" {k}={v}" for k, v in self.params)
        return f"step {self.attribute_id} {self.kind}{args}"


@dataclass(frozen=True)
class TransformPlan:
    """Ordered steps; ``skipped`` records ``(attribute_id, reason)`` pairs."""

    steps: tuple[TransformStep, ...] = ()
    budget: int | None = None
    skipped: tuple[tuple[int, str], ...] = ()

    def __post_init__(self) -> None:
        ids = [s.attribute_id for s in self.steps]
        if ids != sorted(ids):
            raise ValueError("plan steps must be in ascending attribute order")
        if self.budget is not None:
            if self.budget < 0:
                raise ValueError("budget must be non-negative")
            if len(self.steps) > self.budget:
                raise ValueError(f"plan has {len(self.steps)} steps, over budget {self.budget}")

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self) -> Iterator[TransformStep]:
        return iter(self.steps)

    @property
    def attribute_ids(self) -> list[int]:
        return list(dict.fromkeys(s.attribute_id for s in self.steps))

    def truncated(self, budget: int) -> TransformPlan:
        return TransformPlan(self.steps[:budget], budget, self.skipped)


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------


class Family:
    """Base class for a rewrite family.

    ``sites`` lists candidate positions in source order on the context's own
    tree; ``rewrite`` mutates that tree at one site or raises NotApplicable.
    Exhaustive families are applied until no site is left; the others stop
    after the first site that succeeds.
    """

    kind = ""
    attribute_id = 0
    required: tuple[str, ...] = ()
    optional: tuple[str, ...] = ()
    exhaustive = True

    def sites(self, ctx: RewriteContext) -> list:
        raise NotImplementedError

    def rewrite(self, ctx: RewriteContext, site: object) -> None:
        raise NotImplementedError

    def check_params(self, step: TransformStep) -> None:
        allowed = set(self.required) | set(self.optional) | set(COMMON_PARAMS)
        for key, _ in step.params:
            if key not in allowed:
                raise NotApplicable(step.kind, f"unknown parameter '{key}'")
        for key in self.required:
            if step.param(key) is None:
                raise NotApplicable(step.kind, f"missing parameter '{key}'")


_FAMILIES: dict[str, Family] = {}


def register(cls: type[Family]) -> type[Family]:
    family = cls()
    if family.kind in _FAMILIES:
        raise ValueError(f"duplicate transform kind {family.kind!r}")
    _FAMILIES[family.kind] = family
    return cls


def get_family(kind: str) -> Family:
    try:
        return _FAMILIES[kind]
    except KeyError:
        raise UnknownKind(kind) from None


def kinds(attribute_id: int | None = None) -> list[str]:
    return sorted(k for k, f in _FAMILIES.items() if attribute_id is None or f.attribute_id == attribute_id)


# ---------------------------------------------------------------------------
# Rewrite context
# ---------------------------------------------------------------------------


def macro_body_names(tu: TranslationUnit) -> set[str]:
    """Identifiers and parameter names appearing in ``#define`` bodies."""
    names: set[str] = set()
    for item in tu.items:
        if isinstance(item, Define):
            names.update(t.text for t in tokenize(item.body) if t.kind == "ident")
            names.update(item.params or ())
    return names


def used_names(tu: TranslationUnit) -> set[str]:
    """Every spelling a new declaration must avoid."""
    names: set[str] = set(KEYWORDS) | set(EXTERNAL_NAMES) | macro_body_names(tu)
    for node in walk(tu, expansions=True):
        if isinstance(node, (Ident, Declarator, FunctionDef, Define)):
            names.add(node.name)
        elif isinstance(node, Typedef):
            names.add(node.alias)
    return names


def ref(name: str, uid: int | None) -> Ident:
    """A fresh use of a declaration, pre-bound so capture checks cover it."""
    return Ident(name, binding=uid)


def external(name: str) -> Ident:
    return Ident(name, binding=EXTERNAL)


class RewriteContext:
    def __init__(self, program: Program, step: TransformStep) -> None:
        self.program = program
        self.step = step
        self.tu: TranslationUnit = copy.deepcopy(program.ast)
        self.symbols: dict[int, Symbol] = program.symbols
        self._next_uid = max_uid(self.tu) + 1

    # -- parameters -------------------------------------------------------

    def param(self, key: str, default: str | None = None) -> str | None:
        return self.step.param(key, default)

    def mapping(self, key: str = "map") -> dict[str, str]:
        """``a:b,c:d`` as an ordered dict; identifiers only."""
        raw = self.param(key) or ""
        out: dict[str, str] = {}
        for chunk in filter(None, raw.split(",")):
            old, sep, new = chunk.partition(":")
            if not sep or not IDENT_RE.match(old) or not IDENT_RE.match(new):
                self.fail(f"malformed {key} entry {chunk!r}")
            out[old] = new
        if not out:
            self.fail(f"empty {key}")
        return out

    def fail(self, reason: str) -> NoReturn:
        raise NotApplicable(self.step.kind, reason)

    # -- names and ids ----------------------------------------------------

    def fresh_uid(self) -> int:
        uid = self._next_uid
        self._next_uid += 1
        return uid

    @cached_property
    def names_in_use(self) -> set[str]:
        return used_names(self.tu)

    @cached_property
    def macro_body_names(self) -> set[str]:
        return macro_body_names(self.tu)

    def name_available(self, name: str) -> bool:
        return bool(IDENT_RE.match(name)) and name not in self.names_in_use

    def fresh_name(self, base: str) -> str:
        name, n = base, 1
        while not self.name_available(name):
            name = f"{base}{n}"
            n += 1
        self.names_in_use.add(name)
        return name

    # -- declarations -----------------------------------------------------

    def declarations(self) -> dict[int, tuple[Declarator, TypeSpec]]:
        """Every variable declarator of the current tree with its type."""
        out: dict[int, tuple[Declarator, TypeSpec]] = {}
        for node in walk(self.tu):
            if isinstance(node, DeclStmt):
                for d in node.declarators:
                    out[d.uid] = (d, node.spec)
            elif isinstance(node, Param):
                out[node.declarator.uid] = (node.declarator, node.spec)
        return out

    def insertion_index(self) -> int:
        """Index of the first top-level item after the leading directives and typedefs."""
        for i, item in enumerate(self.tu.items):
            if not isinstance(item, (Include, Define, Typedef)):
                return i
        return len(self.tu.items)

    # -- completion -------------------------------------------------------

    def finish(self) -> Program:
        problems = check_bindings(self.tu)
        if problems:
            self.fail(problems[0])
        text = render(self.tu)
        try:
            new = parse(text, self.program.source_name)
        except (CSyntaxError, UnsupportedConstruct) as exc:
            raise InternalRewriteFault(f"{self.step.kind}: rewritten source does not parse: {exc}") from exc
        if new.ast != self.tu:
            raise InternalRewriteFault(f"{self.step.kind}: rewritten tree does not survive rendering")
        return new


# ---------------------------------------------------------------------------
# Application
# ---------------------------------------------------------------------------


def _rewrite(family: Family, ctx: RewriteContext, site: object) -> Program:
    """Rewrite one site and finish; crashes inside a family surface as InternalRewriteFault."""
    try:
        family.rewrite(ctx, site)
        return ctx.finish()
    except StylearmorError:
        raise
    except Exception as exc:
        raise InternalRewriteFault(f"{ctx.step.kind}: {type(exc).__name__}: {exc}") from exc


def apply(program: Program, step: TransformStep) -> Program:
    """Apply ``step`` to every applicable site (or only ``site=k``).

    Args:
        program: Left untouched; the rewrite works on a copy.
        step: Kind and parameters; ``site=k`` restricts it to the k-th site.

    Returns:
        Program: Reparsed from the rewritten source.

    Raises:
        UnknownKind: for an unregistered kind.
        NotApplicable: when no site can be rewritten safely.
        InternalRewriteFault: when a rewrite breaks rendering or crashes; never expected.
    """
    family = get_family(step.kind)
    if step.attribute_id != family.attribute_id:
        raise NotApplicable(step.kind, f"kind belongs to attribute #{family.attribute_id}")
    family.check_params(step)
    site = step.param("site")
    if site is not None:
        if not site.isdigit():
            raise NotApplicable(step.kind, f"bad site {site!r}")
        ctx = RewriteContext(program, step)
        sites = family.sites(ctx)
        if int(site) >= len(sites):
            raise NotApplicable(step.kind, f"site {site} out of range ({len(sites)} sites)")
        return _rewrite(family, ctx, sites[int(site)])

    current = program
    applied = 0
    skip = 0
    reason = "no candidate site"
    budget: int | None = None
    while True:
        ctx = RewriteContext(current, step)
        sites = family.sites(ctx)
        if budget is None:
            budget = 4 * len(sites) + 8
        if skip >= len(sites) or budget == 0:
            break
        budget -= 1
        try:
            current = _rewrite(family, ctx, sites[skip])
        except NotApplicable as exc:
            reason = exc.reason
            skip += 1
            continue
        applied += 1
        if not family.exhaustive:
            break
    if applied == 0:
        raise NotApplicable(step.kind, reason)
    logger.debug("%s: rewrote %d site(s), %d left as is", step, applied, skip)
    return current


def applicable(step: TransformStep, program: Program) -> bool:
    """Dry-run ``step``; True iff it would rewrite at least one site.

    Raises:
        UnknownKind: for an unregistered kind.
    """
    get_family(step.kind)
    try:
        apply(program, step)
    except NotApplicable:
        return False
    except InternalRewriteFault:
        logger.warning("%s: rewrite fault during dry run", step, exc_info=True)
        return False
    return True
