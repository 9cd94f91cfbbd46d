"""Preprocessor-level rewrites: type aliases (#11), macros (#12) and headers (#13)."""

from __future__ import annotations

import copy

from stylearmor.lang.lexer import tokenize
from stylearmor.lang.nodes import Define, Ident, Include, IntLit, MacroUse, Typedef, TypeSpec, walk
from stylearmor.lang.parser import VALID_BASE_TYPES
from stylearmor.lang.scope import EXTERNAL_NAMES
from stylearmor.transforms.base import Family, RewriteContext, register
from stylearmor.transforms.decls import HoistLiteral, int_param
from stylearmor.transforms.walk import all_expr_slots

# Library names each removable header provides.
HEADER_NAMES: dict[str, frozenset[str]] = {
    "stdio.h": frozenset({"scanf", "printf", "freopen", "stdin", "stdout"}),
    "stdlib.h": frozenset({"malloc", "free", "NULL"}),
}
# Headers that may be added without changing behavior.
HARMLESS_HEADERS = ("stdio.h", "stdlib.h", "string.h", "math.h", "limits.h", "ctype.h")


def decode_type(raw: str | None) -> str:
    """Plan files spell multi-word types with underscores: ``long_long``."""
    return (raw or "").replace("_", " ")


def encode_type(base: str) -> str:
    return base.replace(" ", "_")


def _type_specs(ctx: RewriteContext) -> list[TypeSpec]:
    """Every type specifier outside macro expansions, typedef items excluded."""
    return [n for item in ctx.tu.items if not isinstance(item, Typedef) for n in walk(item) if isinstance(n, TypeSpec)]


def _typedef(ctx: RewriteContext, alias: str) -> tuple[int, Typedef] | None:
    for i, item in enumerate(ctx.tu.items):
        if isinstance(item, Typedef) and item.alias == alias:
            return i, item
    return None


# ---------------------------------------------------------------------------
# #11 type aliases
# ---------------------------------------------------------------------------


@register
class IntroduceTypedef(Family):
    """``typedef long long ll;`` and respell every ``long long`` as ``ll``."""

    kind = "introduce_typedef"
    attribute_id = 11
    required = ("type", "alias")

    def sites(self, ctx: RewriteContext) -> list[None]:
        base = decode_type(ctx.param("type"))
        specs = [s for s in _type_specs(ctx) if not s.alias and s.base == base]
        return [None] if specs else []

    def rewrite(self, ctx: RewriteContext, site: None) -> None:
        base = decode_type(ctx.param("type"))
        alias = ctx.param("alias")
        if base not in VALID_BASE_TYPES or base == "void":
            ctx.fail(f"cannot alias type {base!r}")
        if not ctx.name_available(alias):
            ctx.fail(f"'{alias}' is already in use")
        for spec in _type_specs(ctx):
            if not spec.alias and spec.base == base:
                spec.base = alias
                spec.alias = True
        ctx.tu.items.insert(ctx.insertion_index(), Typedef(TypeSpec(base), alias, uid=ctx.fresh_uid()))
        ctx.names_in_use.add(alias)


@register
class EliminateTypedef(Family):
    """Drop a typedef and spell its uses with the aliased type."""

    kind = "eliminate_typedef"
    attribute_id = 11
    required = ("alias",)

    def sites(self, ctx: RewriteContext) -> list[None]:
        return [None] if _typedef(ctx, ctx.param("alias")) is not None else []

    def rewrite(self, ctx: RewriteContext, site: None) -> None:
        alias = ctx.param("alias")
        index, item = _typedef(ctx, alias)
        if alias in ctx.macro_body_names:
            ctx.fail(f"'{alias}' is mentioned by a macro body")
        for spec in _type_specs(ctx):
            if spec.alias and spec.base == alias:
                spec.base = item.spec.base
                spec.alias = item.spec.alias
                spec.const = spec.const or item.spec.const
        del ctx.tu.items[index]


@register
class RenameTypedef(Family):
    kind = "rename_typedef"
    attribute_id = 11
    required = ("map",)

    def sites(self, ctx: RewriteContext) -> list[str]:
        mapping = ctx.mapping()
        values = set(mapping.values())
        return [old for old in mapping if old not in values and _typedef(ctx, old) is not None]

    def rewrite(self, ctx: RewriteContext, site: str) -> None:
        new = ctx.mapping()[site]
        if site in ctx.macro_body_names:
            ctx.fail(f"'{site}' is mentioned by a macro body")
        if not ctx.name_available(new):
            ctx.fail(f"'{new}' is already in use")
        _, item = _typedef(ctx, site)
        item.alias = new
        for spec in _type_specs(ctx):
            if spec.alias and spec.base == site:
                spec.base = new
        ctx.names_in_use.add(new)


# ---------------------------------------------------------------------------
# #12 macros
# ---------------------------------------------------------------------------


def _define(ctx: RewriteContext, name: str) -> tuple[int, Define] | None:
    for i, item in enumerate(ctx.tu.items):
        if isinstance(item, Define) and item.name == name:
            return i, item
    return None


def _other_bodies_mention(ctx: RewriteContext, name: str) -> bool:
    for item in ctx.tu.items:
        if isinstance(item, Define) and item.name != name:
            if any(t.kind == "ident" and t.text == name for t in tokenize(item.body)):
                return True
    return False


@register
class IntroduceMacro(Family):
    """``#define NAME v`` for a repeated integer literal, used at every occurrence."""

    kind = "introduce_macro"
    attribute_id = 12
    required = ("name", "value")

    def sites(self, ctx: RewriteContext) -> list[None]:
        return [None] if HoistLiteral.slots(ctx, int_param(ctx, "value")) else []

    def rewrite(self, ctx: RewriteContext, site: None) -> None:
        name = ctx.param("name")
        value = int_param(ctx, "value")
        if value < 0:
            ctx.fail("only non-negative literals become macros")
        if not ctx.name_available(name):
            ctx.fail(f"'{name}' is already in use")
        for slot in HoistLiteral.slots(ctx, value):
            slot.set(MacroUse(name, None, IntLit(value, str(value))))
        index = max((i + 1 for i, it in enumerate(ctx.tu.items) if isinstance(it, (Include, Define))), default=0)
        ctx.tu.items.insert(index, Define(name, None, str(value)))
        ctx.names_in_use.add(name)


@register
class EliminateMacro(Family):
    """Replace every use of a macro by its expansion and drop the ``#define``."""

    kind = "eliminate_macro"
    attribute_id = 12
    required = ("name",)

    def sites(self, ctx: RewriteContext) -> list[None]:
        return [None] if _define(ctx, ctx.param("name")) is not None else []

    def rewrite(self, ctx: RewriteContext, site: None) -> None:
        name = ctx.param("name")
        index, _ = _define(ctx, name)
        if _other_bodies_mention(ctx, name):
            ctx.fail(f"'{name}' is used by another macro")
        # Innermost first: an argument may itself use the macro.
        for slot in reversed(list(all_expr_slots(ctx.tu))):
            node = slot.get()
            if isinstance(node, MacroUse) and node.name == name:
                slot.set(copy.deepcopy(node.expansion))
        del ctx.tu.items[index]


@register
class RenameMacro(Family):
    kind = "rename_macro"
    attribute_id = 12
    required = ("map",)

    def sites(self, ctx: RewriteContext) -> list[str]:
        mapping = ctx.mapping()
        values = set(mapping.values())
        return [old for old in mapping if old not in values and _define(ctx, old) is not None]

    def rewrite(self, ctx: RewriteContext, site: str) -> None:
        new = ctx.mapping()[site]
        if _other_bodies_mention(ctx, site):
            ctx.fail(f"'{site}' is used by another macro")
        if not ctx.name_available(new):
            ctx.fail(f"'{new}' is already in use")
        _, item = _define(ctx, site)
        item.name = new
        for node in walk(ctx.tu, expansions=True):
            if isinstance(node, MacroUse) and node.name == site:
                node.name = new
        ctx.names_in_use.add(new)


# ---------------------------------------------------------------------------
# #13 headers
# ---------------------------------------------------------------------------


def used_library_names(ctx: RewriteContext) -> set[str]:
    names = {n.name for n in walk(ctx.tu, expansions=True) if isinstance(n, Ident) and n.name in EXTERNAL_NAMES}
    return names | (ctx.macro_body_names & EXTERNAL_NAMES)


@register
class AddInclude(Family):
    """Add an unused standard header after the existing ones."""

    kind = "add_include"
    attribute_id = 13
    required = ("header",)

    def sites(self, ctx: RewriteContext) -> list[None]:
        header = ctx.param("header")
        return [] if header in {i.header for i in ctx.tu.items if isinstance(i, Include)} else [None]

    def rewrite(self, ctx: RewriteContext, site: None) -> None:
        header = ctx.param("header")
        if header not in HARMLESS_HEADERS:
            ctx.fail(f"<{header}> is not a known standard header")
        index = max((i + 1 for i, it in enumerate(ctx.tu.items) if isinstance(it, Include)), default=0)
        ctx.tu.items.insert(index, Include(header))


@register
class RemoveInclude(Family):
    """Remove a header none of whose library names the program uses."""

    kind = "remove_include"
    attribute_id = 13
    required = ("header",)

    def sites(self, ctx: RewriteContext) -> list[int]:
        header = ctx.param("header")
        return [i for i, it in enumerate(ctx.tu.items) if isinstance(it, Include) and it.header == header]

    def rewrite(self, ctx: RewriteContext, site: int) -> None:
        header = ctx.param("header")
        provided = HEADER_NAMES.get(header, frozenset())
        used = used_library_names(ctx) & provided
        if used:
            ctx.fail(f"<{header}> provides {', '.join(sorted(used))}")
        del ctx.tu.items[site]
