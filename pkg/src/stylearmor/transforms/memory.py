"""Array allocation (#19): fixed-size local arrays and ``malloc``'d buffers."""

from __future__ import annotations

import copy

from stylearmor.lang.nodes import (
    AddrOf,
    Assign,
    Binary,
    Break,
    Call,
    Cast,
    Continue,
    DeclStmt,
    Declarator,
    ExprStmt,
    Ident,
    Include,
    IntLit,
    Node,
    Postfix,
    Prefix,
    Return,
    SizeofExpr,
    SizeofType,
    Stmt,
    TypeName,
    TypeSpec,
    walk,
)
from stylearmor.transforms.base import Family, RewriteContext, external, ref, register
from stylearmor.transforms.decls import block_lists
from stylearmor.transforms.walk import has_side_effects, read_uids


def _mentions(node: Node, uid: int) -> bool:
    return uid in read_uids(node)


def _address_taken(node: Node, uid: int) -> bool:
    """``&a`` or ``sizeof a``: the two places an array and a pointer differ."""
    for n in walk(node, expansions=True):
        if isinstance(n, (AddrOf, SizeofExpr)) and _mentions(n.operand, uid):
            if isinstance(n, SizeofExpr) or isinstance(n.operand, Ident):
                return True
    return False


def _reassigned(node: Node, uid: int) -> bool:
    for n in walk(node, expansions=True):
        target = n.target if isinstance(n, Assign) else n.operand if isinstance(n, (Prefix, Postfix)) else None
        if isinstance(target, Ident) and target.binding == uid:
            return True
    return False


def _is_free_of(s: Stmt, uid: int) -> bool:
    if not (isinstance(s, ExprStmt) and isinstance(s.expr, Call) and s.expr.func.name == "free"):
        return False
    args = s.expr.args
    return len(args) == 1 and isinstance(args[0], Ident) and args[0].binding == uid


def _free_calls(node: Node, uid: int) -> int:
    return sum(
        1
        for n in walk(node, expansions=True)
        if isinstance(n, Call) and n.func.name == "free" and any(_mentions(a, uid) for a in n.args)
    )


def _malloc_count(call: Call, spec: TypeSpec):
    """Element count of ``malloc(n * sizeof(T))`` (or ``sizeof(T) * n``, or ``sizeof(T)``)."""
    if len(call.args) != 1:
        return None
    arg = call.args[0]
    unit = TypeName(TypeSpec(spec.base, alias=spec.alias))

    def is_unit(e) -> bool:
        return isinstance(e, SizeofType) and e.type == unit

    if is_unit(arg):
        return IntLit(1, "1")
    if isinstance(arg, Binary) and arg.op == "*":
        if is_unit(arg.right) and not any(isinstance(n, SizeofType) for n in walk(arg.left)):
            return arg.left
        if is_unit(arg.left) and not any(isinstance(n, SizeofType) for n in walk(arg.right)):
            return arg.right
    return None


def _malloc_call(e) -> Call | None:
    if isinstance(e, Cast):
        e = e.operand
    if isinstance(e, Call) and e.func.name == "malloc":
        return e
    return None


def ensure_include(ctx: RewriteContext, header: str) -> None:
    if any(isinstance(it, Include) and it.header == header for it in ctx.tu.items):
        return
    index = max((i + 1 for i, it in enumerate(ctx.tu.items) if isinstance(it, Include)), default=0)
    ctx.tu.items.insert(index, Include(header))


@register
class StaticToDynamic(Family):
    """``T a[n];`` -> ``T *a = malloc(n * sizeof(T));`` plus ``free(a);`` at block end."""

    kind = "static_to_dynamic"
    attribute_id = 19

    def sites(self, ctx: RewriteContext) -> list[tuple[list, int]]:
        out = []
        for items in block_lists(ctx):
            for k, s in enumerate(items):
                if isinstance(s, DeclStmt) and any(d.dims for d in s.declarators):
                    out.append((items, k))
        return out

    def rewrite(self, ctx: RewriteContext, site: tuple[list, int]) -> None:
        items, k = site
        decl = items[k]
        if len(decl.declarators) != 1:
            ctx.fail("array shares its declaration with other variables")
        d = decl.declarators[0]
        if len(d.dims) != 1 or d.dims[0] is None or d.pointer or d.init is not None or decl.spec.const:
            ctx.fail(f"'{d.name}' is not a plain one-dimensional array")
        if has_side_effects(d.dims[0]):
            ctx.fail(f"size of '{d.name}' has side effects")
        rest = items[k + 1 :]
        if any(_address_taken(s, d.uid) for s in rest):
            ctx.fail(f"'{d.name}' is used with & or sizeof")
        last = rest[-1] if rest else None
        free = ExprStmt(Call(external("free"), [ref(d.name, d.uid)]))
        if isinstance(last, (Return, Break, Continue)):
            if _mentions(last, d.uid):
                ctx.fail(f"'{d.name}' is read by the block's final jump")
            items.insert(len(items) - 1, free)
        else:
            items.append(free)
        unit = SizeofType(TypeName(TypeSpec(decl.spec.base, alias=decl.spec.alias)))
        size = Binary("*", d.dims[0], unit)
        items[k] = DeclStmt(
            copy.deepcopy(decl.spec),
            [Declarator(d.name, 1, [], Call(external("malloc"), [size]), uid=d.uid)],
        )
        ensure_include(ctx, "stdlib.h")


@register
class DynamicToStatic(Family):
    """``T *a = malloc(n * sizeof(T)); ... free(a);`` -> ``T a[n]; ...``"""

    kind = "dynamic_to_static"
    attribute_id = 19

    def sites(self, ctx: RewriteContext) -> list[tuple[list, int]]:
        out = []
        for items in block_lists(ctx):
            for k, s in enumerate(items):
                if isinstance(s, DeclStmt) and any(_malloc_call(d.init) for d in s.declarators):
                    out.append((items, k))
        return out

    def rewrite(self, ctx: RewriteContext, site: tuple[list, int]) -> None:
        items, k = site
        decl = items[k]
        if len(decl.declarators) != 1:
            ctx.fail("buffer shares its declaration with other variables")
        d = decl.declarators[0]
        call = _malloc_call(d.init)
        if d.pointer != 1 or d.dims:
            ctx.fail(f"'{d.name}' is not a single-level pointer")
        count = _malloc_count(call, decl.spec)
        if count is None:
            ctx.fail(f"allocation of '{d.name}' is not n * sizeof(element)")
        if has_side_effects(count):
            ctx.fail(f"size of '{d.name}' has side effects")
        rest = items[k + 1 :]
        frees = [j for j, s in enumerate(rest) if _is_free_of(s, d.uid)]
        if len(frees) != 1 or sum(_free_calls(s, d.uid) for s in rest) != 1:
            ctx.fail(f"'{d.name}' is not freed exactly once in its block")
        j = frees[0]
        if any(_mentions(s, d.uid) for s in rest[j + 1 :]):
            ctx.fail(f"'{d.name}' is used after it is freed")
        if any(_reassigned(s, d.uid) or _address_taken(s, d.uid) for s in rest):
            ctx.fail(f"'{d.name}' is reassigned, or used with & or sizeof")
        del items[k + 1 + j]
        items[k] = DeclStmt(copy.deepcopy(decl.spec), [Declarator(d.name, 0, [count], None, uid=d.uid)])
