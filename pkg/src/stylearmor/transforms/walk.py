"""Tree positions and read/write analysis used by the rewrite families."""

from __future__ import annotations

from collections.abc import Callable, Iterator
from dataclasses import dataclass, fields

from stylearmor.lang.nodes import (
    EXTERNAL,
    AddrOf,
    Assign,
    Break,
    Call,
    Compound,
    Continue,
    DeclStmt,
    Deref,
    Expr,
    For,
    FunctionDef,
    Ident,
    Index,
    MacroUse,
    Node,
    Postfix,
    Prefix,
    Return,
    Stmt,
    Switch,
    TranslationUnit,
    While,
    walk,
)


@dataclass(frozen=True, eq=False)
class Slot:
    """A child position: ``owner.key`` or ``owner.key[index]``."""

    owner: Node
    key: str
    index: int | None = None

    def get(self) -> Node:
        value = getattr(self.owner, self.key)
        return value if self.index is None else value[self.index]

    def set(self, node: Node) -> None:
        if self.index is None:
            setattr(self.owner, self.key, node)
        else:
            getattr(self.owner, self.key)[self.index] = node

    @property
    def siblings(self) -> list | None:
        """The statement list holding this slot, if it is a list slot."""
        return getattr(self.owner, self.key) if self.index is not None else None


def child_slots(node: Node, *, expansions: bool = False) -> Iterator[Slot]:
    for f in fields(node):
        if f.name in ("line", "column", "uid", "binding") or (f.name == "expansion" and not expansions):
            continue
        value = getattr(node, f.name)
        if isinstance(value, Node):
            yield Slot(node, f.name)
        elif isinstance(value, list):
            for i, item in enumerate(value):
                if isinstance(item, Node):
                    yield Slot(node, f.name, i)


def stmt_slots(root: Node) -> Iterator[Slot]:
    """Every statement position under ``root`` in source order.

    Function bodies, ``switch`` bodies and ``for`` headers are not positions
    themselves; the statements inside them are.
    """
    if isinstance(root, TranslationUnit):
        for fn in root.functions:
            yield from stmt_slots(fn.body)
        return
    if isinstance(root, FunctionDef):
        yield from stmt_slots(root.body)
        return
    for slot in child_slots(root):
        child = slot.get()
        if not isinstance(child, Stmt) or (isinstance(root, For) and slot.key == "init"):
            continue
        if not isinstance(root, Switch):
            yield slot
        yield from stmt_slots(child)


def expr_slots(root: Node, *, into_macros: bool = False) -> Iterator[Slot]:
    """Every expression position under ``root``, outermost first.

    Macro uses are opaque unless ``into_macros``: their arguments are re-read
    from source on reparse, so rewrites never reach inside them.
    """
    for slot in child_slots(root):
        child = slot.get()
        if isinstance(child, Expr):
            yield slot
            if isinstance(child, MacroUse) and not into_macros:
                continue
        yield from expr_slots(child, into_macros=into_macros)


def all_expr_slots(root: Node) -> Iterator[Slot]:
    """Every expression position, including macro arguments and expansions."""
    for slot in child_slots(root, expansions=True):
        child = slot.get()
        if isinstance(child, Expr):
            yield slot
        yield from all_expr_slots(child)


def statement_lists(root: Node) -> Iterator[tuple[list[Stmt], bool]]:
    """Every statement list in source order, flagged when it is a ``switch`` body."""
    switch_bodies = {id(n.body) for n in walk(root) if isinstance(n, Switch)}
    for node in walk(root):
        if isinstance(node, Compound):
            yield node.items, id(node) in switch_bodies


def replace_exprs(root: Node, fn: Callable[[Expr], Expr | None], *, into_macros: bool = False) -> int:
    """Post-order rewrite: ``fn`` returns a replacement or None to keep a node.

    Returns the number of replacements.
    """
    count = 0
    for slot in list(child_slots(root)):
        child = slot.get()
        if isinstance(child, MacroUse) and not into_macros:
            replacement = fn(child)
            if replacement is not None:
                slot.set(replacement)
                count += 1
            continue
        count += replace_exprs(child, fn, into_macros=into_macros)
        if isinstance(child, Expr):
            replacement = fn(child)
            if replacement is not None:
                slot.set(replacement)
                count += 1
    return count


# ---------------------------------------------------------------------------
# Reads, writes and control flow
# ---------------------------------------------------------------------------


def written_uids(node: Node) -> set[int]:
    """Declarations possibly modified under ``node`` (assignment, ++/--, ``&x``)."""
    out: set[int] = set()
    for n in walk(node, expansions=True):
        target = None
        if isinstance(n, Assign):
            target = n.target
        elif isinstance(n, (Prefix, Postfix, AddrOf)):
            target = n.operand
        while target is not None and not isinstance(target, Ident):
            target = getattr(target, "base", None)
        if isinstance(target, Ident) and target.binding is not None:
            out.add(target.binding)
    return out


def read_uids(node: Node) -> set[int]:
    return {n.binding for n in walk(node, expansions=True) if isinstance(n, Ident) and n.binding is not None}


def reads_memory(node: Node) -> bool:
    """Whether ``node`` loads through ``a[i]`` or ``*p``."""
    return any(isinstance(n, (Index, Deref)) for n in walk(node, expansions=True))


def writes_memory(node: Node) -> bool:
    """Whether ``node`` may store through ``a[i]`` or ``*p``.

    Any call counts: its arguments may point anywhere (``scanf``, helpers).
    """
    for n in walk(node, expansions=True):
        if isinstance(n, Call):
            return True
        if isinstance(n, Assign):
            target = n.target
        elif isinstance(n, (Prefix, Postfix)):
            target = n.operand
        else:
            continue
        if isinstance(target, (Index, Deref)):
            return True
    return False


def has_side_effects(node: Node) -> bool:
    return any(isinstance(n, (Assign, Prefix, Postfix, Call)) for n in walk(node, expansions=True))


def calls_user_function(node: Node) -> bool:
    return any(isinstance(n, Call) and n.func.binding != EXTERNAL for n in walk(node, expansions=True))


def escaping_jumps(stmt: Stmt) -> list[Stmt]:
    """``return`` anywhere, plus ``break``/``continue`` not bound inside ``stmt``."""
    out: list[Stmt] = []
    _jumps(stmt, loop=False, switch=False, out=out)
    return out


def _jumps(node: Node, *, loop: bool, switch: bool, out: list[Stmt]) -> None:
    if isinstance(node, Return):
        out.append(node)
    elif isinstance(node, Break) and not (loop or switch):
        out.append(node)
    elif isinstance(node, Continue) and not loop:
        out.append(node)
    inner_loop = loop or isinstance(node, (For, While))
    inner_switch = switch or isinstance(node, Switch)
    for slot in child_slots(node):
        child = slot.get()
        if isinstance(child, Stmt):
            _jumps(child, loop=inner_loop, switch=inner_switch, out=out)


def loop_continues(body: Stmt) -> bool:
    """Whether ``body`` holds a ``continue`` aimed at its enclosing loop."""
    return any(isinstance(j, Continue) for j in escaping_jumps(body))


def switch_breaks(stmts: list[Stmt]) -> bool:
    """Whether a ``break`` in ``stmts`` would leave an enclosing switch."""
    return any(isinstance(j, Break) for s in stmts for j in escaping_jumps(s))


def declared_names(items: list[Stmt]) -> set[str]:
    out: set[str] = set()
    for s in items:
        if isinstance(s, DeclStmt):
            out.update(d.name for d in s.declarators)
    return out
