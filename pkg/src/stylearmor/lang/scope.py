"""Name resolution for Mini-C.

Every declaration carries a unique ``uid``; resolution writes the uid of the
visible declaration into each ``Ident.binding`` (``EXTERNAL`` for the modeled
library names). Rewrites use :func:`check_bindings` to prove that no existing
use changes its declaration, which is how capture avoidance is enforced for
every transform family.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from stylearmor.errors import CSyntaxError
from stylearmor.lang.nodes import (
    EXTERNAL,
    Compound,
    DeclStmt,
    Declarator,
    Define,
    Expr,
    For,
    FunctionDef,
    Ident,
    Include,
    Node,
    Stmt,
    TranslationUnit,
    Typedef,
    idents,
    iter_children,
    walk,
)

EXTERNAL_NAMES = frozenset({"scanf", "printf", "malloc", "free", "freopen", "stdin", "stdout", "NULL"})


@dataclass(frozen=True)
class Symbol:
    """What a uid names.

    ``depth`` is the block depth inside the owning function: 0 for parameters
    and declarations in the function's outermost block, 1+ for declarations in
    nested compound statements (including ``for`` headers).
    """

    uid: int
    name: str
    kind: str  # global | param | local | function
    function: str = ""
    depth: int = 0


@dataclass
class Resolution:
    symbols: dict[int, Symbol] = field(default_factory=dict)
    problems: list[str] = field(default_factory=list)


class _Resolver:
    def __init__(self, expansions: bool, strict: bool) -> None:
        self.expansions = expansions
        self.strict = strict
        self.scopes: list[dict[str, int]] = []
        self.result = Resolution()
        self.function = ""
        self.depth = 0

    def fail(self, node: Node, message: str) -> None:
        if self.strict:
            raise CSyntaxError(node.line, node.column, message)
        self.result.problems.append(message)

    def declare(self, name: str, uid: int, kind: str, node: Node) -> None:
        scope = self.scopes[-1]
        if name in scope and scope[name] != uid:
            self.fail(node, f"single declaration of '{name}' in its scope")
        scope[name] = uid
        self.result.symbols[uid] = Symbol(uid, name, kind, self.function, self.depth)

    def lookup(self, ident: Ident) -> None:
        for scope in reversed(self.scopes):
            if ident.name in scope:
                ident.binding = scope[ident.name]
                return
        if ident.name in EXTERNAL_NAMES:
            ident.binding = EXTERNAL
            return
        ident.binding = None
        self.fail(ident, f"declaration of '{ident.name}'")

    # -- traversal --------------------------------------------------------

    def unit(self, tu: TranslationUnit) -> None:
        self.scopes.append({})
        for fn in tu.functions:
            self.declare(fn.name, fn.uid, "function", fn)
        for item in tu.items:
            if isinstance(item, FunctionDef):
                self.function_def(item)
            elif isinstance(item, DeclStmt):
                self.decl(item, "global")
            elif isinstance(item, (Include, Define, Typedef)):
                continue
        self.scopes.pop()

    def function_def(self, fn: FunctionDef) -> None:
        self.function = fn.name
        self.depth = 0
        self.scopes.append({})
        for p in fn.params:
            self.declarator(p.declarator, "param")
        for stmt in fn.body.items:
            self.stmt(stmt)
        self.scopes.pop()
        self.function = ""

    def decl(self, d: DeclStmt, kind: str) -> None:
        for dec in d.declarators:
            self.declarator(dec, kind)

    def declarator(self, dec: Declarator, kind: str) -> None:
        for dim in dec.dims:
            if dim is not None:
                self.expr(dim)
        self.declare(dec.name, dec.uid, kind, dec)
        if dec.init is not None:
            self.expr(dec.init)

    def block(self, items: list[Stmt]) -> None:
        self.scopes.append({})
        self.depth += 1
        for stmt in items:
            self.stmt(stmt)
        self.depth -= 1
        self.scopes.pop()

    def stmt(self, s: Stmt) -> None:
        if isinstance(s, Compound):
            self.block(s.items)
        elif isinstance(s, DeclStmt):
            self.decl(s, "local")
        elif isinstance(s, For):
            self.scopes.append({})
            self.depth += 1
            if isinstance(s.init, DeclStmt):
                self.decl(s.init, "local")
            elif s.init is not None:
                self.expr(s.init)
            if s.cond is not None:
                self.expr(s.cond)
            if s.step is not None:
                self.expr(s.step)
            if isinstance(s.body, Compound):
                # The body block shares the header's depth level for naming.
                self.scopes.append({})
                for inner in s.body.items:
                    self.stmt(inner)
                self.scopes.pop()
            else:
                self.stmt(s.body)
            self.depth -= 1
            self.scopes.pop()
        else:
            for child in iter_children(s, self.expansions):
                if isinstance(child, Stmt):
                    self.stmt(child)
                elif isinstance(child, Expr):
                    self.expr(child)

    def expr(self, e: Expr) -> None:
        for node in walk(e, self.expansions):
            if isinstance(node, Ident):
                self.lookup(node)


def resolve(tu: TranslationUnit, *, expansions: bool = True, strict: bool = True) -> Resolution:
    """Bind every identifier use in ``tu`` and return the symbol table.

    Raises:
        CSyntaxError: in strict mode, for an undeclared name or a duplicate
            declaration in one scope.
    """
    r = _Resolver(expansions, strict)
    r.unit(tu)
    return r.result


def check_bindings(tu: TranslationUnit) -> list[str]:
    """Re-resolve ``tu`` and report uses whose stored binding changed.

    Only identifiers that already carry a binding are checked; freshly built
    nodes must set ``binding`` themselves to be covered. Macro expansions are
    included, so a macro use moved out of reach of a name it mentions is
    reported too.
    """
    before = [(ident, ident.binding) for ident in idents(tu, expansions=True) if ident.binding is not None]
    result = resolve(tu, expansions=True, strict=False)
    problems = list(result.problems)
    for ident, old in before:
        if ident.binding != old:
            problems.append(f"'{ident.name}' at {ident.line}:{ident.column} would be captured")
    return problems


def max_uid(tu: TranslationUnit) -> int:
    top = 0
    for node in walk(tu, expansions=True):
        uid = getattr(node, "uid", 0)
        if uid > top:
            top = uid
    return top
