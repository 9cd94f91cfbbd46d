"""Identifier renames: naming convention (#1), temporaries (#2), other locals (#3), globals (#4).

Renames go by declaration uid, never by spelling, so two variables that
happen to share a name in different scopes are only renamed together when
the family asks for it. A new name must be unused anywhere in the program.
"""

from __future__ import annotations

from stylearmor.lang.nodes import Declarator, FunctionDef, Ident, walk
from stylearmor.style import naming as conventions
from stylearmor.transforms.base import Family, RewriteContext, register


def rename_uids(ctx: RewriteContext, uids: set[int], old: str, new: str) -> None:
    if old in ctx.macro_body_names:
        ctx.fail(f"'{old}' is mentioned by a macro body")
    if not ctx.name_available(new):
        ctx.fail(f"'{new}' is already in use")
    for node in walk(ctx.tu, expansions=True):
        if isinstance(node, (Declarator, FunctionDef)) and node.uid in uids:
            node.name = new
        elif isinstance(node, Ident) and node.binding in uids:
            node.name = new
    ctx.names_in_use.add(new)


def user_declarations(ctx: RewriteContext) -> list[tuple[str, int, str, int]]:
    """``(name, uid, kind, depth)`` of user variables and functions, source order.

    ``main`` is not a user name.
    """
    out = []
    for node in walk(ctx.tu):
        uid = getattr(node, "uid", 0)
        if isinstance(node, FunctionDef) and node.name == "main":
            continue
        if isinstance(node, (Declarator, FunctionDef)) and uid in ctx.symbols:
            sym = ctx.symbols[uid]
            out.append((node.name, uid, sym.kind, sym.depth))
    return out


class _MapRename(Family):
    required = ("map",)

    def owns(self, kind: str, depth: int) -> bool:
        raise NotImplementedError

    def targets(self, ctx: RewriteContext, old: str) -> set[int]:
        return {uid for name, uid, kind, depth in user_declarations(ctx) if name == old and self.owns(kind, depth)}

    def sites(self, ctx: RewriteContext) -> list[str]:
        mapping = ctx.mapping()
        values = set(mapping.values())
        return [old for old, new in mapping.items() if old != new and old not in values and self.targets(ctx, old)]

    def rewrite(self, ctx: RewriteContext, site: str) -> None:
        rename_uids(ctx, self.targets(ctx, site), site, ctx.mapping()[site])


@register
class RenameTemporaries(_MapRename):
    kind = "rename_temporaries"
    attribute_id = 2

    def owns(self, kind: str, depth: int) -> bool:
        return kind == "local" and depth >= 1


@register
class RenameLocals(_MapRename):
    kind = "rename_locals"
    attribute_id = 3

    def owns(self, kind: str, depth: int) -> bool:
        return kind in ("param", "function") or (kind == "local" and depth == 0)


@register
class RenameGlobal(_MapRename):
    kind = "rename_global"
    attribute_id = 4

    def owns(self, kind: str, depth: int) -> bool:
        return kind == "global"


@register
class RenameConvention(Family):
    """Respell every identifier of one convention (or of any other) in ``to``."""

    kind = "rename_convention"
    attribute_id = 1
    required = ("to",)
    optional = ("from",)

    def target(self, ctx: RewriteContext) -> str:
        to = ctx.param("to")
        if to not in conventions.CONVENTIONS:
            ctx.fail(f"unknown naming convention {to!r}")
        return to

    def sites(self, ctx: RewriteContext) -> list[str]:
        to = self.target(ctx)
        source = ctx.param("from")
        out: dict[str, None] = {}
        for name, _, _, _ in user_declarations(ctx):
            category = conventions.classify(name)
            if category is None or category == to or (source is not None and category != source):
                continue
            if conventions.convert(name, to) is not None:
                out.setdefault(name, None)
        return list(out)

    def rewrite(self, ctx: RewriteContext, site: str) -> None:
        new = conventions.convert(site, self.target(ctx))
        uids = {uid for name, uid, _, _ in user_declarations(ctx) if name == site}
        rename_uids(ctx, uids, site, new)
