"""Control-flow rewrites: loops (#20), conditionals (#21) and compound
conditions (#22)."""

from __future__ import annotations

import copy

from stylearmor.lang.nodes import (
    Assign,
    Binary,
    Break,
    CaseLabel,
    CharLit,
    Compound,
    Continue,
    DeclStmt,
    DefaultLabel,
    ExprStmt,
    For,
    Ident,
    If,
    IntLit,
    Return,
    Stmt,
    Switch,
    Ternary,
    Unary,
    While,
    walk,
)
from stylearmor.lang.interp import FLOAT_TYPES
from stylearmor.style.attrs import increment_form, nested_if_site
from stylearmor.transforms.base import Family, RewriteContext, ref, register
from stylearmor.transforms.exprs import increment_parts
from stylearmor.transforms.walk import (
    Slot,
    declared_names,
    has_side_effects,
    loop_continues,
    stmt_slots,
    switch_breaks,
)


def _slots_of(ctx: RewriteContext, node_type: type) -> list[Slot]:
    return [s for fn in ctx.tu.functions for s in stmt_slots(fn) if isinstance(s.get(), node_type)]


def _as_block(s: Stmt) -> Compound:
    return s if isinstance(s, Compound) else Compound([s])


def _unwrap(s: Stmt) -> Stmt | None:
    """The single statement of ``s`` (itself, or the only item of a block)."""
    if isinstance(s, Compound):
        return s.items[0] if len(s.items) == 1 else None
    return s


# ---------------------------------------------------------------------------
# #20 loops
# ---------------------------------------------------------------------------


@register
class WhileToFor(Family):
    """``x = a; while (c) { ...; x++; }`` -> ``for (x = a; c; x++) { ... }``

    The assignment before the loop and the trailing increment are absorbed
    only when they touch a variable of the condition.
    """

    kind = "while_to_for"
    attribute_id = 20

    def sites(self, ctx: RewriteContext) -> list[Slot]:
        return _slots_of(ctx, While)

    def rewrite(self, ctx: RewriteContext, site: Slot) -> None:
        loop = site.get()
        if loop_continues(loop.body):
            ctx.fail("loop body continues")
        cond_uids = {n.binding for n in walk(loop.cond, expansions=True) if isinstance(n, Ident)}
        body = loop.body
        step = None
        if isinstance(body, Compound) and body.items:
            last = body.items[-1]
            if isinstance(last, ExprStmt) and increment_form(last.expr) is not None:
                var, _ = increment_parts(last.expr)
                if var.binding in cond_uids:
                    step = last.expr
                    body = Compound(body.items[:-1])
        init = None
        siblings = site.siblings
        if siblings is not None and site.index > 0:
            prev = siblings[site.index - 1]
            if (
                isinstance(prev, ExprStmt)
                and isinstance(prev.expr, Assign)
                and isinstance(prev.expr.target, Ident)
                and prev.expr.target.binding in cond_uids
            ):
                init = prev.expr
        site.set(For(init, loop.cond, step, body))
        if init is not None:
            del siblings[site.index - 1]


@register
class ForToWhile(Family):
    """``for (init; c; step) body`` -> ``init; while (c) { body step; }``

    A declaration in the header moves to the enclosing block, or into a new
    block around the loop when its name would clash there.
    """

    kind = "for_to_while"
    attribute_id = 20

    def sites(self, ctx: RewriteContext) -> list[Slot]:
        return _slots_of(ctx, For)

    def rewrite(self, ctx: RewriteContext, site: Slot) -> None:
        loop = site.get()
        if loop.step is not None and loop_continues(loop.body):
            ctx.fail("loop body continues past the step")
        cond = loop.cond if loop.cond is not None else IntLit(1, "1")
        body = loop.body
        if loop.step is not None:
            body = Compound([*_as_block(body).items, ExprStmt(loop.step)])
        replacement: list[Stmt] = []
        if isinstance(loop.init, DeclStmt):
            replacement.append(loop.init)
        elif loop.init is not None:
            replacement.append(ExprStmt(loop.init))
        replacement.append(While(cond, body))
        siblings = site.siblings
        if len(replacement) == 1:
            site.set(replacement[0])
        elif siblings is not None and not self.clashes(loop, siblings, site.index):
            siblings[site.index : site.index + 1] = replacement
        else:
            site.set(Compound(replacement))

    @staticmethod
    def clashes(loop: For, siblings: list[Stmt], index: int) -> bool:
        if not isinstance(loop.init, DeclStmt):
            return False
        names = {d.name for d in loop.init.declarators}
        if names & declared_names(siblings):
            return True
        later = siblings[index + 1 :]
        return any(isinstance(n, Ident) and n.name in names for s in later for n in walk(s, expansions=True))


# ---------------------------------------------------------------------------
# #21 conditionals
# ---------------------------------------------------------------------------


def _pure_target(e) -> bool:
    return isinstance(e, Ident)


@register
class TernaryToIf(Family):
    """``x = c ? a : b;`` / ``return c ? a : b;`` / ``c ? a : b;`` -> if/else."""

    kind = "ternary_to_if"
    attribute_id = 21

    def sites(self, ctx: RewriteContext) -> list[Slot]:
        return [s for fn in ctx.tu.functions for s in stmt_slots(fn) if self.shape(s.get()) is not None]

    @staticmethod
    def shape(s: Stmt) -> str | None:
        if isinstance(s, Return) and isinstance(s.value, Ternary):
            return "return"
        if isinstance(s, ExprStmt):
            e = s.expr
            if isinstance(e, Ternary):
                return "bare"
            if isinstance(e, Assign) and e.op == "=" and _pure_target(e.target) and isinstance(e.value, Ternary):
                return "assign"
        return None

    def rewrite(self, ctx: RewriteContext, site: Slot) -> None:
        s = site.get()
        shape = self.shape(s)
        if shape == "return":
            t = s.value
            then, other = Return(t.then), Return(t.other)
        elif shape == "bare":
            t = s.expr
            then, other = ExprStmt(t.then), ExprStmt(t.other)
        else:
            t = s.expr.value
            target = s.expr.target
            then = ExprStmt(Assign("=", target, t.then))
            other = ExprStmt(Assign("=", ref(target.name, target.binding), t.other))
        site.set(If(t.cond, Compound([then]), Compound([other])))


@register
class IfToTernary(Family):
    """Inverse of ``ternary_to_if`` for if/else pairs of matching single statements."""

    kind = "if_to_ternary"
    attribute_id = 21

    def sites(self, ctx: RewriteContext) -> list[Slot]:
        return [s for s in _slots_of(ctx, If) if self.pair(s.get()) is not None]

    @staticmethod
    def pair(s: If) -> tuple[Stmt, Stmt] | None:
        if s.other is None or isinstance(s.other, If):
            return None
        a, b = _unwrap(s.then), _unwrap(s.other)
        if isinstance(a, Return) and isinstance(b, Return) and a.value is not None and b.value is not None:
            return a, b
        if isinstance(a, ExprStmt) and isinstance(b, ExprStmt):
            x, y = a.expr, b.expr
            if (
                isinstance(x, Assign)
                and isinstance(y, Assign)
                and x.op == y.op == "="
                and _pure_target(x.target)
                and isinstance(y.target, Ident)
                and x.target.binding == y.target.binding
            ):
                return a, b
        return None

    def rewrite(self, ctx: RewriteContext, site: Slot) -> None:
        s = site.get()
        a, b = self.pair(s)
        if isinstance(a, Return):
            site.set(Return(Ternary(s.cond, a.value, b.value)))
        else:
            site.set(ExprStmt(Assign("=", a.expr.target, Ternary(s.cond, a.expr.value, b.expr.value))))


def _case_constant(e) -> int | None:
    if isinstance(e, (IntLit, CharLit)):
        return e.value
    if isinstance(e, Unary) and e.op == "-" and isinstance(e.operand, IntLit):
        return -e.operand.value
    return None


def _equality_test(cond) -> tuple[Ident, object] | None:
    """``v == k`` or ``k == v`` with ``v`` a variable and ``k`` a literal."""
    if not isinstance(cond, Binary) or cond.op != "==":
        return None
    if isinstance(cond.left, Ident) and _case_constant(cond.right) is not None:
        return cond.left, cond.right
    if isinstance(cond.right, Ident) and _case_constant(cond.left) is not None:
        return cond.right, cond.left
    return None


def _integer_variable(ctx: RewriteContext, var: Ident) -> bool:
    found = ctx.declarations().get(var.binding)
    if found is None:
        return False
    d, spec = found
    base = dict(ctx.program.typedefs).get(spec.base, spec.base) if spec.alias else spec.base
    return not d.pointer and not d.dims and base not in FLOAT_TYPES


def _chain(s: If) -> tuple[list[tuple[object, Stmt]], Stmt | None]:
    arms = []
    current: Stmt | None = s
    while isinstance(current, If):
        arms.append((current.cond, current.then))
        current = current.other
    return arms, current


def _arm_items(body: Stmt) -> list[Stmt]:
    block = _as_block(body)
    if any(isinstance(x, DeclStmt) for x in block.items):
        return [block]
    return list(block.items)


def _terminated(items: list[Stmt]) -> bool:
    return bool(items) and isinstance(items[-1], (Return, Continue, Break))


@register
class IfChainToSwitch(Family):
    """``if (v == 1) ... else if (v == 2) ... else ...`` -> ``switch (v)``."""

    kind = "if_chain_to_switch"
    attribute_id = 21

    def sites(self, ctx: RewriteContext) -> list[Slot]:
        heads = []
        for slot in _slots_of(ctx, If):
            if isinstance(slot.owner, If) and slot.key == "other":
                continue
            arms, _ = _chain(slot.get())
            if len(arms) >= 2 and all(_equality_test(c) is not None for c, _ in arms):
                heads.append(slot)
        return heads

    def rewrite(self, ctx: RewriteContext, site: Slot) -> None:
        arms, rest = _chain(site.get())
        tests = [_equality_test(c) for c, _ in arms]
        subject = tests[0][0]
        if any(v.binding != subject.binding for v, _ in tests):
            ctx.fail("conditions test different variables")
        if not _integer_variable(ctx, subject):
            ctx.fail(f"'{subject.name}' is not an integer variable")
        values = [_case_constant(k) for _, k in tests]
        if len(set(values)) != len(values):
            ctx.fail("repeated case constant")
        bodies = [body for _, body in arms] + ([rest] if rest is not None else [])
        if switch_breaks(bodies):
            ctx.fail("a branch breaks out of an enclosing statement")
        items: list[Stmt] = []
        for (_, constant), (_, body) in zip(tests, arms):
            items.append(CaseLabel(constant))
            items.extend(self.group(body))
        if rest is not None:
            items.append(DefaultLabel())
            items.extend(self.group(rest))
        site.set(Switch(subject, Compound(items)))

    @staticmethod
    def group(body: Stmt) -> list[Stmt]:
        out = _arm_items(body)
        return out if _terminated(out) and not isinstance(out[-1], Break) else [*out, Break()]


@register
class SwitchToIfChain(Family):
    """``switch (v)`` with break-terminated groups -> if/else-if chain."""

    kind = "switch_to_if_chain"
    attribute_id = 21

    def sites(self, ctx: RewriteContext) -> list[Slot]:
        return _slots_of(ctx, Switch)

    def rewrite(self, ctx: RewriteContext, site: Slot) -> None:
        s = site.get()
        if has_side_effects(s.subject):
            ctx.fail("switch subject has side effects")
        groups = self.groups(ctx, s.body.items)
        chain: Stmt | None = None
        for labels, body in reversed(groups):
            block = Compound(body)
            if any(isinstance(x, DefaultLabel) for x in labels):
                if chain is not None:
                    ctx.fail("default is not the last group")
                chain = block
                continue
            cond = None
            for label in labels:
                test = Binary("==", copy.deepcopy(s.subject), label.value)
                cond = test if cond is None else Binary("||", cond, test)
            chain = If(cond, block, chain)
        if not isinstance(chain, If):
            ctx.fail("switch has no case label")
        site.set(chain)

    @staticmethod
    def groups(ctx: RewriteContext, items: list[Stmt]) -> list[tuple[list[Stmt], list[Stmt]]]:
        out: list[tuple[list[Stmt], list[Stmt]]] = []
        i = 0
        while i < len(items):
            labels = []
            while i < len(items) and isinstance(items[i], (CaseLabel, DefaultLabel)):
                labels.append(items[i])
                i += 1
            if not labels:
                ctx.fail("statement before the first label")
            body = []
            while i < len(items) and not isinstance(items[i], (CaseLabel, DefaultLabel)):
                body.append(items[i])
                i += 1
            last_group = i == len(items)
            if _terminated(body):
                if isinstance(body[-1], Break):
                    body = body[:-1]
            elif not last_group:
                ctx.fail("group falls through")
            if switch_breaks(body):
                ctx.fail("break inside a group")
            out.append((labels, body))
        return out


# ---------------------------------------------------------------------------
# #22 compound conditions
# ---------------------------------------------------------------------------


@register
class SplitAndCondition(Family):
    """``if (a && b) s`` -> ``if (a) { if (b) s }`` (no else)."""

    kind = "split_and_condition"
    attribute_id = 22

    def sites(self, ctx: RewriteContext) -> list[Slot]:
        return [
            s
            for s in _slots_of(ctx, If)
            if s.get().other is None
            and isinstance(s.get().cond, Binary)
            and s.get().cond.op == "&&"
        ]

    def rewrite(self, ctx: RewriteContext, site: Slot) -> None:
        s = site.get()
        inner = If(s.cond.right, _as_block(s.then))
        site.set(If(s.cond.left, Compound([inner])))


@register
class MergeNestedIfs(Family):
    """``if (a) { if (b) s }`` -> ``if (a && b) s``"""

    kind = "merge_nested_ifs"
    attribute_id = 22

    def sites(self, ctx: RewriteContext) -> list[Slot]:
        return [s for s in _slots_of(ctx, If) if nested_if_site(s.get()) and isinstance(_unwrap(s.get().then), If)]

    def rewrite(self, ctx: RewriteContext, site: Slot) -> None:
        s = site.get()
        inner = _unwrap(s.then)
        site.set(If(Binary("&&", s.cond, inner.cond), _as_block(inner.then)))
