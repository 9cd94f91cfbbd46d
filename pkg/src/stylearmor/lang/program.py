from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from stylearmor.lang.lexer import Token, tokenize
from stylearmor.lang.nodes import Define, Include, TranslationUnit, Typedef
from stylearmor.lang.scope import Symbol, resolve


@dataclass(frozen=True)
class MacroDef:
    name: str
    params: tuple[str, ...] | None
    body: tuple[Token, ...]


@dataclass(frozen=True)
class Program:
    """A parsed Mini-C file.

    ``ast`` is never mutated after construction; transforms build new
    programs. ``includes``, ``macros`` and ``typedefs`` are views of the
    top-level items in source order.
    """

    ast: TranslationUnit
    tokens: tuple[Token, ...]
    source_name: str = "<memory>"

    @property
    def includes(self) -> list[str]:
        return [it.header for it in self.ast.items if isinstance(it, Include)]

    @property
    def macros(self) -> list[MacroDef]:
        out = []
        for it in self.ast.items:
            if isinstance(it, Define):
                body = tuple(t for t in tokenize(it.body) if t.kind != "eof")
                params = tuple(it.params) if it.params is not None else None
                out.append(MacroDef(it.name, params, body))
        return out

    @property
    def typedefs(self) -> list[tuple[str, str]]:
        return [(it.alias, it.spec.base) for it in self.ast.items if isinstance(it, Typedef)]

    @cached_property
    def symbols(self) -> dict[int, Symbol]:
        """Declaration table keyed by uid."""
        return resolve(self.ast, strict=False).symbols

    def isomorphic(self, other: Program) -> bool:
        """AST equality ignoring positions, uids and bindings."""
        return self.ast == other.ast
