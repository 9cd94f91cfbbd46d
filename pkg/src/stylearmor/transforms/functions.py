"""Function-level rewrites: ``return 0;`` in main (#14) and nesting depth (#23).

``split_function`` hoists one nested statement into a new ``void`` function.
Every non-array variable the statement shares with its function is passed by
address, so reads of uninitialized variables still happen (and fault) at the
same point; arrays are passed as ``T name[]``. ``inline_function`` is the
inverse and restores a split exactly.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass

from stylearmor.lang.nodes import (
    AddrOf,
    Assign,
    Call,
    CaseLabel,
    Compound,
    DeclStmt,
    Declarator,
    DefaultLabel,
    Deref,
    EmptyStmt,
    ExprStmt,
    FunctionDef,
    Ident,
    IntLit,
    MacroUse,
    Param,
    Postfix,
    Prefix,
    Return,
    SizeofExpr,
    Stmt,
    Switch,
    TypeSpec,
    walk,
)
from stylearmor.style.attrs import nesting_depth
from stylearmor.transforms.base import Family, RewriteContext, ref, register
from stylearmor.transforms.walk import (
    Slot,
    calls_user_function,
    escaping_jumps,
    read_uids,
    replace_exprs,
    stmt_slots,
    written_uids,
)

# ---------------------------------------------------------------------------
# #14 return in main
# ---------------------------------------------------------------------------


def _main(ctx: RewriteContext) -> FunctionDef | None:
    return ctx.tu.function("main")


def _is_return0(s: Stmt | None) -> bool:
    return isinstance(s, Return) and isinstance(s.value, IntLit) and s.value.value == 0


@register
class AddReturn0(Family):
    kind = "add_return0"
    attribute_id = 14

    def sites(self, ctx: RewriteContext) -> list[FunctionDef]:
        main = _main(ctx)
        if main is None or (main.body.items and isinstance(main.body.items[-1], Return)):
            return []
        return [main]

    def rewrite(self, ctx: RewriteContext, site: FunctionDef) -> None:
        if site.ret.base == "void" and site.pointer == 0:
            ctx.fail("main returns void")
        site.body.items.append(Return(IntLit(0, "0")))


@register
class RemoveReturn0(Family):
    """Drop a final ``return 0;`` from main; falling off main also exits with 0."""

    kind = "remove_return0"
    attribute_id = 14

    def sites(self, ctx: RewriteContext) -> list[FunctionDef]:
        main = _main(ctx)
        if main is None or not main.body.items or not _is_return0(main.body.items[-1]):
            return []
        return [main]

    def rewrite(self, ctx: RewriteContext, site: FunctionDef) -> None:
        site.body.items.pop()


# ---------------------------------------------------------------------------
# #23 split
# ---------------------------------------------------------------------------


def deepest_function(ctx: RewriteContext) -> FunctionDef | None:
    best, depth = None, -1
    for fn in ctx.tu.functions:
        d = nesting_depth(fn.body)
        if d > depth:
            best, depth = fn, d
    return best


def _list_slots(fn: FunctionDef) -> list[Slot]:
    """Statement positions inside blocks (not ``switch`` bodies), preorder."""
    switch_bodies = {id(n.body) for n in walk(fn.body) if isinstance(n, Switch)}
    return [
        s
        for s in stmt_slots(fn)
        if s.index is not None and isinstance(s.owner, Compound) and id(s.owner) not in switch_bodies
    ]


def split_score(fn: FunctionDef, slot: Slot) -> int:
    """Nesting depth left after hoisting the statement at ``slot``."""
    stmt = slot.get()
    slot.set(EmptyStmt())
    try:
        rest = nesting_depth(fn.body)
    finally:
        slot.set(stmt)
    return max(rest, nesting_depth(stmt))


@dataclass
class _Shared:
    """A variable of the enclosing function used by the hoisted statement."""

    name: str
    uid: int
    spec: TypeSpec
    declarator: Declarator
    new_uid: int = 0

    @property
    def is_array(self) -> bool:
        return bool(self.declarator.dims)


@register
class SplitFunction(Family):
    """Hoist the nested statement whose removal lowers the function's depth most."""

    kind = "split_function"
    attribute_id = 23
    optional = ("function", "name")
    exhaustive = False

    def target(self, ctx: RewriteContext) -> FunctionDef | None:
        wanted = ctx.param("function")
        return ctx.tu.function(wanted) if wanted is not None else deepest_function(ctx)

    def sites(self, ctx: RewriteContext) -> list[Slot]:
        fn = self.target(ctx)
        if fn is None:
            return []
        depth = nesting_depth(fn.body)
        scored = []
        for order, slot in enumerate(_list_slots(fn)):
            if isinstance(slot.get(), (DeclStmt, CaseLabel, DefaultLabel, EmptyStmt)):
                continue
            score = split_score(fn, slot)
            if score < depth:
                scored.append((score, order, slot))
        return [slot for _, _, slot in sorted(scored, key=lambda t: (t[0], t[1]))]

    def shared_variables(self, ctx: RewriteContext, fn: FunctionDef, stmt: Stmt) -> list[_Shared]:
        inner = {n.uid for n in walk(stmt) if isinstance(n, Declarator)}
        decls = ctx.declarations()
        out: dict[int, _Shared] = {}
        for n in walk(stmt):
            if isinstance(n, MacroUse):
                used = read_uids(n) - inner
                if any(ctx.symbols.get(u) is not None and ctx.symbols[u].kind in ("local", "param") for u in used):
                    ctx.fail(f"macro '{n.name}' mentions a variable of '{fn.name}'")
            if not isinstance(n, Ident) or n.binding in inner or n.binding in out:
                continue
            sym = ctx.symbols.get(n.binding)
            if sym is None or sym.kind not in ("local", "param"):
                continue
            d, spec = decls[n.binding]
            out[n.binding] = _Shared(n.name, n.binding, spec, d)
        shared = list(out.values())
        for v in shared:
            if len(v.declarator.dims) > 1:
                ctx.fail(f"'{v.name}' is a multi-dimensional array")
            if v.is_array and any(
                isinstance(n, (AddrOf, SizeofExpr)) and v.uid in read_uids(n.operand) for n in walk(stmt)
            ):
                ctx.fail(f"array '{v.name}' is used with & or sizeof")
        return shared

    def rewrite(self, ctx: RewriteContext, site: Slot) -> None:
        fn = self.target(ctx)
        stmt = site.get()
        if escaping_jumps(stmt):
            ctx.fail("statement jumps out of itself")
        shared = self.shared_variables(ctx, fn, stmt)
        wanted = ctx.param("name")
        if wanted is not None:
            if not ctx.name_available(wanted):
                ctx.fail(f"'{wanted}' is already in use")
            name = wanted
            ctx.names_in_use.add(name)
        else:
            name = ctx.fresh_name(f"split_{fn.name}")

        params, args = [], []
        by_uid: dict[int, _Shared] = {}
        for v in shared:
            v.new_uid = ctx.fresh_uid()
            by_uid[v.uid] = v
            spec = copy.deepcopy(v.spec)
            if v.is_array:
                params.append(Param(spec, Declarator(v.name, v.declarator.pointer, [None], uid=v.new_uid)))
                args.append(ref(v.name, v.uid))
            else:
                params.append(Param(spec, Declarator(v.name, v.declarator.pointer + 1, uid=v.new_uid)))
                args.append(AddrOf(ref(v.name, v.uid)))

        def relink(e):
            if isinstance(e, AddrOf) and isinstance(e.operand, Deref) and isinstance(e.operand.operand, Ident):
                target = e.operand.operand
                if target.binding in {v.new_uid for v in shared if not v.is_array}:
                    return target
            if isinstance(e, Ident) and e.binding in by_uid:
                v = by_uid[e.binding]
                fresh = ref(v.name, v.new_uid)
                return fresh if v.is_array else Deref(fresh)
            return None

        replace_exprs(stmt, relink)
        body = stmt if isinstance(stmt, Compound) else Compound([stmt])
        uid = ctx.fresh_uid()
        helper = FunctionDef(TypeSpec("void"), 0, name, params, body, uid=uid)
        site.set(ExprStmt(Call(ref(name, uid), args)))
        ctx.tu.items.insert(next(i for i, it in enumerate(ctx.tu.items) if it is fn), helper)


# ---------------------------------------------------------------------------
# #23 inline
# ---------------------------------------------------------------------------


def _reassigned(node, uid: int) -> bool:
    """``p = ...``, ``p++`` or ``&p``: uses that need ``p`` to stay a variable."""
    for n in walk(node, expansions=True):
        if isinstance(n, Assign) and isinstance(n.target, Ident) and n.target.binding == uid:
            return True
        if isinstance(n, (Prefix, Postfix, AddrOf)) and isinstance(n.operand, Ident) and n.operand.binding == uid:
            return True
    return False


def call_sites(ctx: RewriteContext, fn: FunctionDef) -> list[Call]:
    return [n for n in walk(ctx.tu, expansions=True) if isinstance(n, Call) and n.func.binding == fn.uid]


@register
class InlineFunction(Family):
    """Replace the only call of a ``void`` helper by the helper's body."""

    kind = "inline_function"
    attribute_id = 23
    required = ("name",)
    exhaustive = False

    def sites(self, ctx: RewriteContext) -> list[FunctionDef]:
        fn = ctx.tu.function(ctx.param("name"))
        return [fn] if fn is not None and fn.name != "main" else []

    def call_slot(self, ctx: RewriteContext, fn: FunctionDef) -> tuple[FunctionDef, Slot]:
        calls = call_sites(ctx, fn)
        if len(calls) != 1:
            ctx.fail(f"'{fn.name}' is called {len(calls)} times")
        for caller in ctx.tu.functions:
            for slot in stmt_slots(caller):
                s = slot.get()
                if isinstance(s, ExprStmt) and s.expr is calls[0]:
                    if caller is fn:
                        ctx.fail(f"'{fn.name}' calls itself")
                    return caller, slot
        ctx.fail(f"the call of '{fn.name}' is not a statement")

    def rewrite(self, ctx: RewriteContext, site: FunctionDef) -> None:
        fn = site
        if fn.ret.base != "void" or fn.pointer:
            ctx.fail(f"'{fn.name}' returns a value")
        if any(isinstance(n, Return) for n in walk(fn.body)):
            ctx.fail(f"'{fn.name}' returns early")
        caller, slot = self.call_slot(ctx, fn)
        call = slot.get().expr
        if len(fn.params) != len(call.args):
            ctx.fail(f"'{fn.name}' is called with {len(call.args)} arguments")
        param_uids = {p.declarator.uid for p in fn.params}
        for n in walk(fn.body):
            if isinstance(n, MacroUse) and read_uids(n) & param_uids:
                ctx.fail(f"macro '{n.name}' mentions a parameter of '{fn.name}'")

        through: dict[int, Ident] = {}  # *p -> caller variable
        direct: dict[int, Ident] = {}  # p -> caller variable
        copies: list[Stmt] = []
        addressed = {a.operand.binding for a in call.args if isinstance(a, AddrOf) and isinstance(a.operand, Ident)}
        taken = {n.name for n in walk(caller) if isinstance(n, (Ident, Declarator))}
        for p, arg in zip(fn.params, call.args):
            d = p.declarator
            if len(d.dims) > 1:
                ctx.fail(f"parameter '{d.name}' is a multi-dimensional array")
            fixed = not _reassigned(fn.body, d.uid)
            if fixed and d.pointer and not d.dims and isinstance(arg, AddrOf) and isinstance(arg.operand, Ident):
                through[d.uid] = arg.operand
            elif fixed and isinstance(arg, Ident) and self.stable(ctx, fn, arg, addressed):
                direct[d.uid] = arg
            else:
                local = ctx.fresh_name(d.name) if d.name in taken else d.name
                uid = ctx.fresh_uid()
                pointer = d.pointer + len(d.dims)
                copies.append(DeclStmt(copy.deepcopy(p.spec), [Declarator(local, pointer, [], arg, uid=uid)]))
                direct[d.uid] = ref(local, uid)

        made: list[AddrOf] = []  # held so their ids stay unique

        def substitute(e):
            if isinstance(e, Deref) and any(e.operand is a for a in made):
                return e.operand.operand
            if isinstance(e, Ident) and e.binding in through:
                var = through[e.binding]
                address = AddrOf(ref(var.name, var.binding))
                made.append(address)
                return address
            if isinstance(e, Ident) and e.binding in direct:
                var = direct[e.binding]
                return ref(var.name, var.binding)
            return None

        body = copy.deepcopy(fn.body)
        replace_exprs(body, substitute)
        declares = any(isinstance(s, DeclStmt) for s in body.items)
        if copies or declares or slot.siblings is None:
            slot.set(Compound([*copies, *body.items]))
        else:
            slot.siblings[slot.index : slot.index + 1] = body.items
        ctx.tu.items[:] = [it for it in ctx.tu.items if it is not fn]

    @staticmethod
    def stable(ctx: RewriteContext, fn: FunctionDef, arg: Ident, addressed: set[int]) -> bool:
        """Whether ``arg`` keeps its value while the helper runs."""
        if arg.binding in addressed:
            return False
        sym = ctx.symbols.get(arg.binding)
        if sym is None:
            return False
        if sym.kind == "global":
            return not calls_user_function(fn.body) and arg.binding not in written_uids(fn.body)
        return True
