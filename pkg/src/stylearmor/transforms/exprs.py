"""Expression-level rewrites: element access (#5), assignment chains (#9)
and increment forms (#10)."""

from __future__ import annotations

from stylearmor.lang.nodes import (
    Assign,
    Binary,
    Deref,
    ExprStmt,
    For,
    Ident,
    Index,
    IntLit,
    Postfix,
    Prefix,
    walk,
)
from stylearmor.style.attrs import (
    increment_form,
    is_chained_assign,
    is_element_deref,
    separate_assign_pair,
)
from stylearmor.transforms.base import Family, RewriteContext, ref, register
from stylearmor.transforms.decls import block_lists
from stylearmor.transforms.walk import Slot, expr_slots, stmt_slots

INCREMENT_FORMS = ("postfix", "prefix", "plus_assign", "long_form")


# ---------------------------------------------------------------------------
# #5 element access
# ---------------------------------------------------------------------------


def _function_expr_slots(ctx: RewriteContext):
    for fn in ctx.tu.functions:
        yield from expr_slots(fn.body)


@register
class IndexToPointer(Family):
    """``a[i]`` -> ``*(a + i)``"""

    kind = "index_to_pointer"
    attribute_id = 5

    def sites(self, ctx: RewriteContext) -> list[Slot]:
        return [s for s in _function_expr_slots(ctx) if isinstance(s.get(), Index)]

    def rewrite(self, ctx: RewriteContext, site: Slot) -> None:
        node = site.get()
        site.set(Deref(Binary("+", node.base, node.index)))


@register
class PointerToIndex(Family):
    """``*(a + i)`` -> ``a[i]`` when ``a`` is an array or pointer."""

    kind = "pointer_to_index"
    attribute_id = 5

    def sites(self, ctx: RewriteContext) -> list[Slot]:
        return [s for s in _function_expr_slots(ctx) if is_element_deref(s.get())]

    def rewrite(self, ctx: RewriteContext, site: Slot) -> None:
        node = site.get()
        base = node.operand.left
        if not self.addressable(ctx, base):
            ctx.fail("left operand is not known to be an array or pointer")
        site.set(Index(base, node.operand.right))

    @staticmethod
    def addressable(ctx: RewriteContext, e) -> bool:
        if isinstance(e, Index) or is_element_deref(e):
            return True
        if isinstance(e, Ident):
            found = ctx.declarations().get(e.binding)
            return found is not None and (found[0].pointer > 0 or bool(found[0].dims))
        return False


# ---------------------------------------------------------------------------
# #9 assignment chains
# ---------------------------------------------------------------------------


@register
class SplitAssignChain(Family):
    """``a = b = e;`` -> ``b = e; a = b;``; ``a = i++;`` -> ``a = i; i++;``;
    ``a = ++i;`` -> ``++i; a = i;``"""

    kind = "split_assign_chain"
    attribute_id = 9

    def sites(self, ctx: RewriteContext) -> list[tuple[list, int]]:
        return [(items, k) for items in block_lists(ctx) for k, s in enumerate(items) if is_chained_assign(s)]

    def rewrite(self, ctx: RewriteContext, site: tuple[list, int]) -> None:
        items, k = site
        outer = items[k].expr
        if outer.op != "=" or not isinstance(outer.target, Ident):
            ctx.fail("only plain assignments to a variable are split")
        target = outer.target
        inner = outer.value
        if isinstance(inner, Assign) and inner.op == "=" and isinstance(inner.target, Ident):
            var = inner.target
            if var.binding == target.binding or any(
                isinstance(n, Ident) and n.binding == target.binding for n in walk(inner.value, expansions=True)
            ):
                ctx.fail("chain mentions its own target")
            items[k : k + 1] = [ExprStmt(inner), ExprStmt(Assign("=", target, ref(var.name, var.binding)))]
            return
        if isinstance(inner, (Prefix, Postfix)) and isinstance(inner.operand, Ident):
            var = inner.operand
            if var.binding == target.binding:
                ctx.fail("increment of the assigned variable")
            copy_back = ExprStmt(Assign("=", target, ref(var.name, var.binding)))
            if isinstance(inner, Postfix):
                items[k : k + 1] = [copy_back, ExprStmt(inner)]
            else:
                items[k : k + 1] = [ExprStmt(inner), copy_back]
            return
        ctx.fail("embedded assignment is not a simple chain")


@register
class CombineAssignChain(Family):
    """Inverse of ``split_assign_chain`` on adjacent statement pairs."""

    kind = "combine_assign_chain"
    attribute_id = 9

    def sites(self, ctx: RewriteContext) -> list[tuple[list, int]]:
        out = []
        for items in block_lists(ctx):
            out.extend((items, k) for k in range(len(items) - 1) if separate_assign_pair(items[k], items[k + 1]))
        return out

    def rewrite(self, ctx: RewriteContext, site: tuple[list, int]) -> None:
        items, k = site
        first, second = items[k], items[k + 1]
        shape = separate_assign_pair(first, second)
        if shape == "pre":
            inc = first.expr
            combined = Assign("=", second.expr.target, Prefix(inc.op, inc.operand))
        elif shape == "post":
            inc = second.expr
            combined = Assign("=", first.expr.target, Postfix(inc.op, inc.operand))
        else:
            combined = Assign("=", second.expr.target, first.expr)
        items[k : k + 2] = [ExprStmt(combined)]


# ---------------------------------------------------------------------------
# #10 increment forms
# ---------------------------------------------------------------------------


def spell_increment(var: Ident, op: str, form: str):
    """``op`` is ``+`` or ``-``."""
    twin = ref(var.name, var.binding)
    if form == "postfix":
        return Postfix(op * 2, twin)
    if form == "prefix":
        return Prefix(op * 2, twin)
    if form == "plus_assign":
        return Assign(op + "=", twin, IntLit(1, "1"))
    return Assign("=", twin, Binary(op, ref(var.name, var.binding), IntLit(1, "1")))


def increment_parts(e) -> tuple[Ident, str]:
    if isinstance(e, (Prefix, Postfix)):
        return e.operand, e.op[0]
    if e.op in ("+=", "-="):
        return e.target, e.op[0]
    return e.target, e.value.op


@register
class IncrementForm(Family):
    """Respell statement-position increments (and ``for`` steps) as ``to``."""

    kind = "increment_form"
    attribute_id = 10
    required = ("to",)
    optional = ("from",)

    def sites(self, ctx: RewriteContext) -> list[Slot]:
        to = ctx.param("to")
        source = ctx.param("from")
        if to not in INCREMENT_FORMS or (source is not None and source not in INCREMENT_FORMS):
            ctx.fail(f"unknown increment form {to!r}")
        out = []
        for fn in ctx.tu.functions:
            for slot in stmt_slots(fn):
                s = slot.get()
                candidates = []
                if isinstance(s, ExprStmt):
                    candidates.append(Slot(s, "expr"))
                elif isinstance(s, For) and s.step is not None:
                    candidates.append(Slot(s, "step"))
                for c in candidates:
                    form = increment_form(c.get())
                    if form is not None and form != to and (source is None or form == source):
                        out.append(c)
        return out

    def rewrite(self, ctx: RewriteContext, site: Slot) -> None:
        var, op = increment_parts(site.get())
        site.set(spell_increment(var, op, ctx.param("to")))
