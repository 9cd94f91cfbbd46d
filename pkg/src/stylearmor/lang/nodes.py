"""AST node classes for Mini-C.

Nodes are plain dataclasses. Equality ignores source positions, declaration
ids and resolved bindings, so ``==`` on two trees is AST isomorphism.
Programs treat their trees as immutable; rewrites work on deep copies.
"""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass, field, fields
from typing import Union

EXTERNAL = 0  # binding of library names (scanf, printf, ...)


@dataclass
class Node:
    line: int = field(default=0, compare=False, kw_only=True, repr=False)
    column: int = field(default=0, compare=False, kw_only=True, repr=False)


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------


@dataclass
class TypeSpec(Node):
    """Base type of a declaration: keyword sequence (``long long``) or alias."""

    base: str
    const: bool = False
    alias: bool = False


@dataclass
class TypeName(Node):
    """Abstract declarator used by casts and ``sizeof``: ``int *``."""

    spec: TypeSpec
    pointer: int = 0


# ---------------------------------------------------------------------------
# Expressions
# ---------------------------------------------------------------------------


@dataclass
class Expr(Node):
    pass


@dataclass
class Ident(Expr):
    name: str
    binding: int | None = field(default=None, compare=False)


@dataclass
class IntLit(Expr):
    value: int
    text: str


@dataclass
class FloatLit(Expr):
    value: float
    text: str


@dataclass
class CharLit(Expr):
    value: int
    text: str


@dataclass
class StringLit(Expr):
    value: str
    text: str


@dataclass
class Unary(Expr):
    """``-x``, ``+x``, ``!x``, ``~x``."""

    op: str
    operand: Expr


@dataclass
class Prefix(Expr):
    """``++x`` / ``--x``."""

    op: str
    operand: Expr


@dataclass
class Postfix(Expr):
    """``x++`` / ``x--``."""

    op: str
    operand: Expr


@dataclass
class Deref(Expr):
    operand: Expr


@dataclass
class AddrOf(Expr):
    operand: Expr


@dataclass
class Binary(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass
class Assign(Expr):
    """Simple or compound assignment; ``op`` is ``=``, ``+=``, ..."""

    op: str
    target: Expr
    value: Expr


@dataclass
class Ternary(Expr):
    cond: Expr
    then: Expr
    other: Expr


@dataclass
class Call(Expr):
    func: Ident
    args: list[Expr]


@dataclass
class Index(Expr):
    base: Expr
    index: Expr


@dataclass
class Cast(Expr):
    type: TypeName
    operand: Expr


@dataclass
class SizeofType(Expr):
    type: TypeName


@dataclass
class SizeofExpr(Expr):
    operand: Expr


@dataclass
class Comma(Expr):
    items: list[Expr]


@dataclass
class MacroUse(Expr):
    """Use of a ``#define``d name. Rendered as written, evaluated as expanded."""

    name: str
    args: list[Expr] | None
    expansion: Expr = field(compare=False)


@dataclass
class InitList(Expr):
    items: list[Expr]


# ---------------------------------------------------------------------------
# Declarations and statements
# ---------------------------------------------------------------------------


@dataclass
class Declarator(Node):
    """One declared name. ``dims`` holds array sizes (None for ``[]``)."""

    name: str
    pointer: int = 0
    dims: list[Expr | None] = field(default_factory=list)
    init: Expr | None = None
    uid: int = field(default=0, compare=False)


@dataclass
class Stmt(Node):
    pass


@dataclass
class DeclStmt(Stmt):
    spec: TypeSpec
    declarators: list[Declarator]


@dataclass
class Compound(Stmt):
    items: list[Stmt]


@dataclass
class ExprStmt(Stmt):
    expr: Expr


@dataclass
class EmptyStmt(Stmt):
    pass


@dataclass
class If(Stmt):
    cond: Expr
    then: Stmt
    other: Stmt | None = None


@dataclass
class While(Stmt):
    cond: Expr
    body: Stmt


@dataclass
class For(Stmt):
    init: DeclStmt | Expr | None
    cond: Expr | None
    step: Expr | None
    body: Stmt


@dataclass
class Switch(Stmt):
    subject: Expr
    body: Compound


@dataclass
class CaseLabel(Stmt):
    value: Expr


@dataclass
class DefaultLabel(Stmt):
    pass


@dataclass
class Return(Stmt):
    value: Expr | None = None


@dataclass
class Break(Stmt):
    pass


@dataclass
class Continue(Stmt):
    pass


# ---------------------------------------------------------------------------
# Top level
# ---------------------------------------------------------------------------


@dataclass
class Include(Node):
    header: str
    system: bool = True


@dataclass
class Define(Node):
    """``#define``; ``body`` is the raw replacement text."""

    name: str
    params: list[str] | None
    body: str


@dataclass
class Typedef(Node):
    spec: TypeSpec
    alias: str
    uid: int = field(default=0, compare=False)


@dataclass
class Param(Node):
    spec: TypeSpec
    declarator: Declarator


@dataclass
class FunctionDef(Node):
    ret: TypeSpec
    pointer: int
    name: str
    params: list[Param]
    body: Compound
    uid: int = field(default=0, compare=False)


TopLevel = Union[Include, Define, Typedef, DeclStmt, FunctionDef]


@dataclass
class TranslationUnit(Node):
    items: list[TopLevel]

    @property
    def functions(self) -> list[FunctionDef]:
        return [it for it in self.items if isinstance(it, FunctionDef)]

    def function(self, name: str) -> FunctionDef | None:
        for fn in self.functions:
            if fn.name == name:
                return fn
        return None


# ---------------------------------------------------------------------------
# Generic traversal
# ---------------------------------------------------------------------------


def iter_children(node: Node, expansions: bool = False) -> Iterator[Node]:
    """Yield direct child nodes in field order (source order).

    A macro use's ``expansion`` is derived from its args and the macro body,
    so it is skipped unless ``expansions`` is set.
    """
    for f in fields(node):
        if not f.compare and f.name in ("line", "column", "uid", "binding"):
            continue
        if f.name == "expansion" and not expansions:
            continue
        value = getattr(node, f.name)
        if isinstance(value, Node):
            yield value
        elif isinstance(value, list):
            for item in value:
                if isinstance(item, Node):
                    yield item


def walk(node: Node, expansions: bool = False) -> Iterator[Node]:
    """Pre-order traversal in source order."""
    stack = [node]
    while stack:
        current = stack.pop()
        yield current
        stack.extend(reversed(list(iter_children(current, expansions))))


def idents(node: Node, expansions: bool = False) -> Iterator[Ident]:
    for n in walk(node, expansions):
        if isinstance(n, Ident):
            yield n
