"""Coding-style attribute catalog and per-program extraction.

An attribute is present in a profile only when the program contains at least
one witness site for it; frequencies count witness sites.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field

from stylearmor.lang.nodes import (
    Assign,
    Binary,
    Call,
    Cast,
    Compound,
    DeclStmt,
    Deref,
    Expr,
    ExprStmt,
    For,
    FunctionDef,
    Ident,
    If,
    Include,
    Index,
    IntLit,
    MacroUse,
    Define,
    Node,
    Postfix,
    Prefix,
    Return,
    SizeofType,
    Stmt,
    Switch,
    Ternary,
    TypeSpec,
    Typedef,
    While,
    iter_children,
    walk,
)
from stylearmor.lang.program import Program
from stylearmor.style import naming

NUMERIC = "numeric"
CATEGORICAL = "categorical_set"
NAME_SET = "name_set"
UNSUPPORTED = "unsupported"


@dataclass(frozen=True)
class Attribute:
    id: int
    name: str
    kind: str
    categories: tuple[str, ...] = ()
    transformable: bool = True

    @property
    def exhaustive(self) -> bool:
        return self.kind == CATEGORICAL


CATALOG: dict[int, Attribute] = {
    a.id: a
    for a in (
        Attribute(1, "identifier naming method", CATEGORICAL, naming.CONVENTIONS),
        Attribute(2, "temporary variable names", NAME_SET),
        Attribute(3, "non-temporary local names", NAME_SET),
        Attribute(4, "global declarations", NAME_SET),
        Attribute(5, "array/pointer element access", CATEGORICAL, ("index_form", "pointer_form")),
        Attribute(6, "local declaration placement", CATEGORICAL, ("at_scope_start", "at_first_use")),
        Attribute(7, "local initialization placement", CATEGORICAL, ("init_in_decl", "init_separate")),
        Attribute(8, "same-type declarations", CATEGORICAL, ("combined", "separate")),
        Attribute(9, "variable assignment", CATEGORICAL, ("chained", "separate")),
        Attribute(10, "increment form", CATEGORICAL, ("postfix", "prefix", "plus_assign", "long_form")),
        Attribute(11, "user-defined types", NAME_SET),
        Attribute(12, "macros", NAME_SET),
        Attribute(13, "included headers", NAME_SET),
        Attribute(14, "return in main", CATEGORICAL, ("explicit_return0", "implicit_return")),
        Attribute(17, "stream redirection", CATEGORICAL, ("freopen",), transformable=False),
        Attribute(19, "array allocation", CATEGORICAL, ("static_array", "dynamic_alloc")),
        Attribute(20, "loop structure", CATEGORICAL, ("for_loop", "while_loop")),
        Attribute(21, "conditional structure", CATEGORICAL, ("ternary", "if_else", "switch")),
        Attribute(22, "compound if", CATEGORICAL, ("logical_and_compound", "nested_ifs")),
        Attribute(23, "maximum nesting depth", NUMERIC),
    )
}

# C++-only rows of the attribute table; never extracted.
UNSUPPORTED_IDS = frozenset({15, 16, 18})

TRANSFORMABLE_IDS = frozenset(a.id for a in CATALOG.values() if a.transformable)


@dataclass(frozen=True)
class AttributeValue:
    """Numeric value or ordered ``(token, frequency)`` entries."""

    kind: str
    number: float | None = None
    entries: tuple[tuple[str, int], ...] = ()

    @classmethod
    def numeric(cls, number: float) -> AttributeValue:
        return cls(NUMERIC, number=number)

    @classmethod
    def from_sites(cls, kind: str, sites: Iterable[str]) -> AttributeValue:
        """Count tokens; order by descending frequency, ties by first occurrence."""
        counts: dict[str, int] = {}
        for token in sites:
            counts[token] = counts.get(token, 0) + 1
        ordered = sorted(counts.items(), key=lambda kv: -kv[1])
        return cls(kind, entries=tuple(ordered))

    @property
    def tokens(self) -> list[str]:
        return [t for t, _ in self.entries]

    @property
    def token_set(self) -> frozenset[str]:
        return frozenset(self.tokens)

    @property
    def total(self) -> int:
        return sum(f for _, f in self.entries)

    def frequency(self, token: str) -> int:
        return dict(self.entries).get(token, 0)


@dataclass(frozen=True)
class StyleProfile:
    values: dict[int, AttributeValue] = field(default_factory=dict)
    program_ref: str = ""

    @property
    def applicable(self) -> set[int]:
        return set(self.values)

    def get(self, attribute_id: int) -> AttributeValue | None:
        return self.values.get(attribute_id)


# ---------------------------------------------------------------------------
# Witness predicates shared with the transform engine
# ---------------------------------------------------------------------------


def is_element_deref(e: Expr) -> bool:
    """``*(a + i)`` style element access."""
    return isinstance(e, Deref) and isinstance(e.operand, Binary) and e.operand.op == "+"


def increment_form(e: Expr | None) -> str | None:
    """Category of a statement-position increment/decrement of a variable."""
    if isinstance(e, Postfix) and isinstance(e.operand, Ident):
        return "postfix"
    if isinstance(e, Prefix) and isinstance(e.operand, Ident):
        return "prefix"
    if not isinstance(e, Assign) or not isinstance(e.target, Ident):
        return None
    if e.op in ("+=", "-=") and _is_one(e.value):
        return "plus_assign"
    v = e.value
    if (
        e.op == "="
        and isinstance(v, Binary)
        and v.op in ("+", "-")
        and isinstance(v.left, Ident)
        and v.left.name == e.target.name
        and _is_one(v.right)
    ):
        return "long_form"
    return None


def _is_one(e: Expr) -> bool:
    return isinstance(e, IntLit) and e.value == 1


def is_simple_assign(s: Stmt, value_ident: bool = False) -> bool:
    """``x = e;`` (with ``e`` a plain identifier when ``value_ident``)."""
    if not (isinstance(s, ExprStmt) and isinstance(s.expr, Assign)):
        return False
    a = s.expr
    if a.op != "=" or not isinstance(a.target, Ident):
        return False
    return isinstance(a.value, Ident) if value_ident else True


def is_chained_assign(s: Stmt) -> bool:
    if not (isinstance(s, ExprStmt) and isinstance(s.expr, Assign)):
        return False
    return any(isinstance(n, (Assign, Prefix, Postfix)) for n in walk(s.expr.value))


def separate_assign_pair(first: Stmt, second: Stmt) -> str | None:
    """Which split-assignment shape two adjacent statements form, if any.

    ``pre``: ``++i; t = i;``  ``post``: ``t = i; i++;``  ``chain``: ``b = e; a = b;``
    """
    inc = increment_form(first.expr) if isinstance(first, ExprStmt) else None
    if inc in ("postfix", "prefix") and is_simple_assign(second, value_ident=True):
        var = first.expr.operand.name
        a = second.expr
        if a.value.name == var and a.target.name != var:
            return "pre"
    if is_simple_assign(first, value_ident=True) and isinstance(second, ExprStmt):
        inc2 = increment_form(second.expr)
        if inc2 in ("postfix", "prefix"):
            a = first.expr
            var = second.expr.operand.name
            if a.value.name == var and a.target.name != var:
                return "post"
    if is_simple_assign(first) and is_simple_assign(second, value_ident=True):
        b = first.expr.target.name
        a2 = second.expr
        if a2.value.name == b and a2.target.name != b:
            if not any(isinstance(n, Ident) and n.name == a2.target.name for n in walk(first.expr.value)):
                return "chain"
    return None


def leading_decl_count(items: list[Stmt]) -> int:
    n = 0
    while n < len(items) and isinstance(items[n], DeclStmt):
        n += 1
    return n


def separate_init_targets(items: list[Stmt], k: int) -> list[tuple[int, int]]:
    """Pairs ``(declarator index, statement index)`` for declarators of
    ``items[k]`` first assigned in the contiguous ``v = e;`` run that follows."""
    decl = items[k]
    assert isinstance(decl, DeclStmt)
    pending = {d.name: i for i, d in enumerate(decl.declarators) if d.init is None and not d.dims}
    out: list[tuple[int, int]] = []
    j = k + 1
    while j < len(items) and is_simple_assign(items[j]) and pending:
        name = items[j].expr.target.name
        if name in pending:
            out.append((pending.pop(name), j))
        j += 1
    return out


def same_type_runs(items: list[Stmt]) -> list[tuple[int, int]]:
    """Maximal runs ``[start, end)`` of at least two adjacent single-declarator
    declarations with the same type."""
    runs: list[tuple[int, int]] = []
    i = 0
    while i < len(items):
        s = items[i]
        if isinstance(s, DeclStmt) and len(s.declarators) == 1:
            j = i + 1
            while (
                j < len(items)
                and isinstance(items[j], DeclStmt)
                and len(items[j].declarators) == 1
                and items[j].spec == s.spec
            ):
                j += 1
            if j - i >= 2:
                runs.append((i, j))
            i = j
        else:
            i += 1
    return runs


def nested_if_site(s: If) -> bool:
    """An else-less ``if`` whose then-branch begins with an else-less ``if``."""
    if s.other is not None:
        return False
    inner = s.then
    if isinstance(inner, Compound):
        inner = inner.items[0] if inner.items else None
    return isinstance(inner, If) and inner.other is None


def nesting_depth(node: Node) -> int:
    """Deepest chain of nested loop/conditional statements under ``node``."""
    return _depth(node, else_if=False)


def _depth(node: Node, else_if: bool) -> int:
    own = 1 if isinstance(node, (For, While, Switch)) or (isinstance(node, If) and not else_if) else 0
    best = 0
    if isinstance(node, If):
        best = _depth(node.then, False)
        if node.other is not None:
            best = max(best, _depth(node.other, isinstance(node.other, If)))
        return own + best
    for child in iter_children(node):
        if isinstance(child, Stmt):
            best = max(best, _depth(child, False))
    return own + best


# ---------------------------------------------------------------------------
# Extraction
# ---------------------------------------------------------------------------


class _Extractor:
    def __init__(self, program: Program) -> None:
        self.program = program
        self.symbols = program.symbols
        self.sites: dict[int, list[str]] = {i: [] for i in CATALOG}
        self.names_seen: dict[str, None] = {}

    def add(self, attribute_id: int, token: str) -> None:
        self.sites[attribute_id].append(token)

    def see_name(self, name: str) -> None:
        self.names_seen.setdefault(name, None)

    def run(self) -> StyleProfile:
        tu = self.program.ast
        depth = None
        for item in tu.items:
            if isinstance(item, Include):
                self.add(13, item.header)
            elif isinstance(item, Define):
                self.add(12, item.name)
            elif isinstance(item, Typedef):
                self.add(11, item.alias)
            elif isinstance(item, DeclStmt):
                for d in item.declarators:
                    self.see_name(d.name)
                    self.add(4, d.name)
                    if d.dims:
                        self.add(19, "static_array")
                self.alias_uses(item.spec)
                if len(item.declarators) > 1:
                    self.add(8, "combined")
                self.exprs(item)
            elif isinstance(item, FunctionDef):
                self.function(item)
                d = nesting_depth(item.body)
                depth = d if depth is None else max(depth, d)
        self.top_level_runs(tu.items)
        for name in self.names_seen:
            category = naming.classify(name)
            if category is not None:
                self.add(1, category)
        values: dict[int, AttributeValue] = {}
        for attribute_id, sites in self.sites.items():
            if sites:
                values[attribute_id] = AttributeValue.from_sites(CATALOG[attribute_id].kind, sites)
        if depth is not None:
            values[23] = AttributeValue.numeric(float(depth))
        return StyleProfile(dict(sorted(values.items())), self.program.source_name)

    def top_level_runs(self, items: list) -> None:
        for _ in same_type_runs(items):
            self.add(8, "separate")

    def alias_uses(self, spec: TypeSpec) -> None:
        if spec.alias:
            self.add(11, spec.base)

    def function(self, fn: FunctionDef) -> None:
        if fn.name != "main":
            self.see_name(fn.name)
        self.alias_uses(fn.ret)
        for p in fn.params:
            self.see_name(p.declarator.name)
            self.add(3, p.declarator.name)
            self.alias_uses(p.spec)
        self.block(fn.body.items)
        if fn.name == "main":
            last = fn.body.items[-1] if fn.body.items else None
            if isinstance(last, Return) and isinstance(last.value, IntLit) and last.value.value == 0:
                self.add(14, "explicit_return0")
            elif not isinstance(last, Return):
                self.add(14, "implicit_return")

    def block(self, items: list[Stmt]) -> None:
        leading = leading_decl_count(items)
        for k, s in enumerate(items):
            if isinstance(s, DeclStmt):
                self.add(6, "at_scope_start" if k < leading else "at_first_use")
                if len(s.declarators) > 1:
                    self.add(8, "combined")
                separate = {i for i, _ in separate_init_targets(items, k)}
                for i, d in enumerate(s.declarators):
                    if d.init is not None:
                        self.add(7, "init_in_decl")
                    elif i in separate:
                        self.add(7, "init_separate")
            if k + 1 < len(items):
                shape = separate_assign_pair(s, items[k + 1])
                if shape is not None:
                    self.add(9, "separate")
            if is_chained_assign(s):
                self.add(9, "chained")
            if isinstance(s, ExprStmt):
                form = increment_form(s.expr)
                if form is not None:
                    self.add(10, form)
            self.stmt(s)
        for _ in same_type_runs(items):
            self.add(8, "separate")

    def declaration(self, s: DeclStmt) -> None:
        self.alias_uses(s.spec)
        for d in s.declarators:
            self.see_name(d.name)
            sym = self.symbols.get(d.uid)
            self.add(2 if sym is not None and sym.depth >= 1 else 3, d.name)
            if d.dims:
                self.add(19, "static_array")

    def stmt(self, s: Stmt) -> None:
        if isinstance(s, DeclStmt):
            self.declaration(s)
            self.exprs(s)
            return
        if isinstance(s, Compound):
            self.block(s.items)
            return
        if isinstance(s, For):
            self.add(20, "for_loop")
            if isinstance(s.init, DeclStmt):
                self.declaration(s.init)
                self.exprs(s.init)
            elif s.init is not None:
                self.expr(s.init)
            if s.cond is not None:
                self.expr(s.cond)
            if s.step is not None:
                self.expr(s.step)
                form = increment_form(s.step)
                if form is not None:
                    self.add(10, form)
            self.body(s.body)
            return
        if isinstance(s, While):
            self.add(20, "while_loop")
            self.expr(s.cond)
            self.body(s.body)
            return
        if isinstance(s, If):
            self.if_chain(s)
            return
        if isinstance(s, Switch):
            self.add(21, "switch")
            self.expr(s.subject)
            self.block(s.body.items)
            return
        self.exprs(s)

    def body(self, s: Stmt) -> None:
        if isinstance(s, Compound):
            self.block(s.items)
        else:
            self.stmt(s)

    def if_chain(self, s: If) -> None:
        if s.other is not None:
            self.add(21, "if_else")
        current: Stmt | None = s
        while isinstance(current, If):
            if isinstance(current.cond, Binary) and current.cond.op == "&&":
                self.add(22, "logical_and_compound")
            if nested_if_site(current):
                self.add(22, "nested_ifs")
            self.expr(current.cond)
            self.body(current.then)
            current = current.other
        if current is not None:
            self.body(current)

    def exprs(self, node: Node) -> None:
        for child in _direct_exprs(node):
            self.expr(child)

    def expr(self, e: Expr) -> None:
        for n in walk(e):
            if isinstance(n, Index):
                self.add(5, "index_form")
            elif is_element_deref(n):
                self.add(5, "pointer_form")
            elif isinstance(n, Ternary):
                self.add(21, "ternary")
            elif isinstance(n, MacroUse):
                self.add(12, n.name)
            elif isinstance(n, Call):
                name = n.func.name
                if name == "freopen":
                    self.add(17, "freopen")
                elif name == "malloc":
                    self.add(19, "dynamic_alloc")
                elif self.symbols.get(n.func.binding or -1, None) is not None:
                    self.add(3, name)
            elif isinstance(n, (Cast, SizeofType)):
                self.alias_uses(n.type.spec)


def _direct_exprs(node: Node) -> Iterator[Expr]:
    if isinstance(node, DeclStmt):
        for d in node.declarators:
            for dim in d.dims:
                if dim is not None:
                    yield dim
            if d.init is not None:
                yield d.init
        return
    for child in iter_children(node):
        if isinstance(child, Expr):
            yield child


def extract_profile(program: Program) -> StyleProfile:
    """Style profile of one program; attributes without witnesses are absent."""
    return _Extractor(program).run()


def applicable_attributes(program: Program) -> set[int]:
    return extract_profile(program).applicable
