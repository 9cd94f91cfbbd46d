"""Declaration rewrites: global constants (#4), placement (#6),
initialization (#7) and declaration lists (#8)."""

from __future__ import annotations

import copy

from stylearmor.lang.nodes import (
    Assign,
    CaseLabel,
    DeclStmt,
    Declarator,
    ExprStmt,
    Ident,
    InitList,
    IntLit,
    Stmt,
    TypeSpec,
    Unary,
    walk,
)
from stylearmor.lang.interp import FLOAT_TYPES
from stylearmor.style.attrs import leading_decl_count, same_type_runs, separate_init_targets
from stylearmor.transforms.base import Family, RewriteContext, ref, register
from stylearmor.transforms.walk import (
    Slot,
    all_expr_slots,
    calls_user_function,
    expr_slots,
    has_side_effects,
    read_uids,
    reads_memory,
    statement_lists,
    writes_memory,
    written_uids,
)


def block_lists(ctx: RewriteContext) -> list[list[Stmt]]:
    """Statement lists of function bodies, excluding ``switch`` bodies."""
    return [items for fn in ctx.tu.functions for items, is_switch in statement_lists(fn.body) if not is_switch]


def decl_lists(ctx: RewriteContext) -> list[list]:
    """Top-level items followed by every block list."""
    return [ctx.tu.items, *block_lists(ctx)]


def is_constant(e) -> bool:
    return not any(isinstance(n, Ident) for n in walk(e, expansions=True))


def _int_literal(e) -> int | None:
    if isinstance(e, IntLit):
        return e.value
    if isinstance(e, Unary) and e.op == "-" and isinstance(e.operand, IntLit):
        return -e.operand.value
    return None


def int_param(ctx: RewriteContext, key: str) -> int:
    raw = ctx.param(key) or ""
    try:
        return int(raw)
    except ValueError:
        ctx.fail(f"{key} must be an integer, got {raw!r}")


# ---------------------------------------------------------------------------
# #4 global constants
# ---------------------------------------------------------------------------


@register
class HoistLiteral(Family):
    """Replace an integer literal in function bodies by a new global constant.

    Array sizes and case labels keep their literals.
    """

    kind = "hoist_literal"
    attribute_id = 4
    required = ("name", "value")

    def sites(self, ctx: RewriteContext) -> list[None]:
        return [None] if self.slots(ctx, int_param(ctx, "value")) else []

    @staticmethod
    def slots(ctx: RewriteContext, value: int) -> list[Slot]:
        out = []
        for fn in ctx.tu.functions:
            fixed = set()
            for node in walk(fn.body):
                if isinstance(node, Declarator):
                    fixed.update(id(n) for dim in node.dims if dim is not None for n in walk(dim))
                elif isinstance(node, CaseLabel):
                    fixed.update(id(n) for n in walk(node.value))
            for slot in expr_slots(fn.body):
                node = slot.get()
                if isinstance(node, IntLit) and node.value == value and id(node) not in fixed:
                    out.append(slot)
        return out

    def rewrite(self, ctx: RewriteContext, site: None) -> None:
        name = ctx.param("name")
        value = int_param(ctx, "value")
        if value < 0:
            ctx.fail("only non-negative literals are hoisted")
        if not ctx.name_available(name):
            ctx.fail(f"'{name}' is already in use")
        uid = ctx.fresh_uid()
        for slot in self.slots(ctx, value):
            slot.set(ref(name, uid))
        decl = DeclStmt(TypeSpec("int", const=True), [Declarator(name, init=IntLit(value, str(value)), uid=uid)])
        ctx.tu.items.insert(ctx.insertion_index(), decl)
        ctx.names_in_use.add(name)


@register
class InlineConstant(Family):
    """Replace a never-written integer global that has a literal initializer by the literal."""

    kind = "inline_constant"
    attribute_id = 4
    required = ("name",)

    def find(self, ctx: RewriteContext) -> tuple[int, DeclStmt, Declarator] | None:
        name = ctx.param("name")
        for i, item in enumerate(ctx.tu.items):
            if isinstance(item, DeclStmt):
                for d in item.declarators:
                    if d.name == name:
                        return i, item, d
        return None

    def sites(self, ctx: RewriteContext) -> list[None]:
        return [None] if self.find(ctx) is not None else []

    def rewrite(self, ctx: RewriteContext, site: None) -> None:
        index, decl, d = self.find(ctx)
        if d.dims or d.pointer or _int_literal(d.init) is None:
            ctx.fail(f"'{d.name}' is not a scalar with a literal initializer")
        if decl.spec.alias or decl.spec.base in FLOAT_TYPES:
            ctx.fail(f"'{d.name}' is not an integer")
        if d.uid in written_uids(ctx.tu):
            ctx.fail(f"'{d.name}' is written")
        if d.name in ctx.macro_body_names:
            ctx.fail(f"'{d.name}' is mentioned by a macro body")
        for slot in list(all_expr_slots(ctx.tu)):
            node = slot.get()
            if isinstance(node, Ident) and node.binding == d.uid:
                slot.set(copy.deepcopy(d.init))
        decl.declarators.remove(d)
        if not decl.declarators:
            del ctx.tu.items[index]


# ---------------------------------------------------------------------------
# #6 declaration placement
# ---------------------------------------------------------------------------


@register
class DeclToScopeStart(Family):
    """Move a mid-block declaration to the end of the block's leading declarations.

    Initializers stay where they were, as assignments.
    """

    kind = "decl_to_scope_start"
    attribute_id = 6

    def sites(self, ctx: RewriteContext) -> list[tuple[list, int]]:
        out = []
        for items in block_lists(ctx):
            lead = leading_decl_count(items)
            out.extend((items, k) for k in range(lead, len(items)) if isinstance(items[k], DeclStmt))
        return out

    def rewrite(self, ctx: RewriteContext, site: tuple[list, int]) -> None:
        items, k = site
        decl = items[k]
        assigns: list[Stmt] = []
        for d in decl.declarators:
            if any(dim is None or not is_constant(dim) for dim in d.dims):
                ctx.fail(f"'{d.name}' has a run-time size")
            if d.init is None:
                continue
            if d.dims or isinstance(d.init, InitList) or decl.spec.const:
                ctx.fail(f"initializer of '{d.name}' cannot become an assignment")
            assigns.append(ExprStmt(Assign("=", ref(d.name, d.uid), d.init)))
            d.init = None
        lead = leading_decl_count(items)
        items[k : k + 1] = assigns
        items.insert(lead, decl)


@register
class DeclToFirstUse(Family):
    """Move a leading declaration down to just before the first statement using it."""

    kind = "decl_to_first_use"
    attribute_id = 6

    def sites(self, ctx: RewriteContext) -> list[tuple[list, int]]:
        out = []
        for items in block_lists(ctx):
            lead = leading_decl_count(items)
            if lead < len(items):
                out.extend((items, k) for k in range(lead))
        return out

    def rewrite(self, ctx: RewriteContext, site: tuple[list, int]) -> None:
        items, k = site
        decl = items[k]
        uids = {d.uid for d in decl.declarators}
        lead = leading_decl_count(items)
        first = next((j for j in range(k + 1, len(items)) if read_uids(items[j]) & uids), None)
        if first is None:
            ctx.fail("declaration is never used")
        if first <= lead:
            ctx.fail("first use directly follows the declarations")
        skipped = items[k + 1 : first]
        for d in decl.declarators:
            parts = [*(x for x in d.dims if x is not None), *([d.init] if d.init is not None else [])]
            for part in parts:
                if has_side_effects(part):
                    ctx.fail(f"initializer of '{d.name}' has side effects")
                reads = read_uids(part)
                if any(reads & written_uids(s) for s in skipped):
                    ctx.fail(f"initializer of '{d.name}' reads a variable written before its first use")
                if reads_memory(part) and any(writes_memory(s) for s in skipped):
                    ctx.fail(f"initializer of '{d.name}' reads memory stored to before its first use")
                if any(calls_user_function(s) for s in skipped) and any(
                    ctx.symbols.get(u) is not None and ctx.symbols[u].kind == "global" for u in reads
                ):
                    ctx.fail(f"initializer of '{d.name}' reads a global a call may change")
        del items[k]
        items.insert(first - 1, decl)


# ---------------------------------------------------------------------------
# #7 initialization placement
# ---------------------------------------------------------------------------


def _splittable(spec: TypeSpec, d: Declarator) -> bool:
    return not d.dims and not isinstance(d.init, InitList) and not spec.const


@register
class SplitInit(Family):
    """``int a = 1, b;`` -> ``int a, b; a = 1;``"""

    kind = "split_init"
    attribute_id = 7

    def sites(self, ctx: RewriteContext) -> list[tuple[list, int]]:
        out = []
        for items in block_lists(ctx):
            for k, s in enumerate(items):
                if isinstance(s, DeclStmt) and any(d.init is not None for d in s.declarators):
                    out.append((items, k))
        return out

    def rewrite(self, ctx: RewriteContext, site: tuple[list, int]) -> None:
        items, k = site
        decl = items[k]
        assigns = []
        for d in decl.declarators:
            if d.init is None:
                continue
            if not _splittable(decl.spec, d):
                ctx.fail(f"initializer of '{d.name}' cannot become an assignment")
            assigns.append(ExprStmt(Assign("=", ref(d.name, d.uid), d.init)))
            d.init = None
        items[k + 1 : k + 1] = assigns


@register
class MergeInit(Family):
    """``int a; a = 1;`` -> ``int a = 1;``"""

    kind = "merge_init"
    attribute_id = 7

    def sites(self, ctx: RewriteContext) -> list[tuple[list, int, int, int]]:
        out = []
        for items in block_lists(ctx):
            for k, s in enumerate(items):
                if isinstance(s, DeclStmt) and not s.spec.const:
                    out.extend((items, k, i, j) for i, j in separate_init_targets(items, k))
        return out

    def rewrite(self, ctx: RewriteContext, site: tuple[list, int, int, int]) -> None:
        items, k, i, j = site
        d = items[k].declarators[i]
        value = items[j].expr.value
        between = items[k + 1 : j]
        if d.uid in read_uids(value):
            ctx.fail(f"'{d.name}' is read by its own initializer")
        if between:
            if has_side_effects(value):
                ctx.fail(f"value assigned to '{d.name}' has side effects")
            if any(read_uids(value) & written_uids(s) for s in between):
                ctx.fail(f"value assigned to '{d.name}' reads a variable assigned earlier")
            if reads_memory(value) and any(writes_memory(s) for s in between):
                ctx.fail(f"value assigned to '{d.name}' reads memory stored to earlier")
            if any(d.uid in read_uids(s) for s in between):
                ctx.fail(f"'{d.name}' is read before its assignment")
        d.init = value
        del items[j]


# ---------------------------------------------------------------------------
# #8 declaration lists
# ---------------------------------------------------------------------------


@register
class SplitDeclList(Family):
    """``int a, b;`` -> ``int a; int b;`` (blocks and file scope)."""

    kind = "split_decl_list"
    attribute_id = 8

    def sites(self, ctx: RewriteContext) -> list[tuple[list, int]]:
        out = []
        for items in decl_lists(ctx):
            out.extend((items, k) for k, s in enumerate(items) if isinstance(s, DeclStmt) and len(s.declarators) > 1)
        return out

    def rewrite(self, ctx: RewriteContext, site: tuple[list, int]) -> None:
        items, k = site
        decl = items[k]
        items[k : k + 1] = [DeclStmt(copy.deepcopy(decl.spec), [d]) for d in decl.declarators]


@register
class MergeDeclList(Family):
    """Adjacent same-type single declarations -> one declaration list."""

    kind = "merge_decl_list"
    attribute_id = 8

    def sites(self, ctx: RewriteContext) -> list[tuple[list, int, int]]:
        return [(items, start, end) for items in decl_lists(ctx) for start, end in same_type_runs(items)]

    def rewrite(self, ctx: RewriteContext, site: tuple[list, int, int]) -> None:
        items, start, end = site
        run = items[start:end]
        items[start:end] = [DeclStmt(run[0].spec, [d for s in run for d in s.declarators])]
