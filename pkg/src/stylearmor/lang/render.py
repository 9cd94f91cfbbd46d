"""Canonical pretty-printer for Mini-C.

Layout is fixed: four-space indentation, K&R braces, one declaration or
statement per line, and the fewest parentheses that keep the tree intact.
``parse(render(p))`` is isomorphic to ``p`` for every parsed program.
"""

from __future__ import annotations

from stylearmor.lang.nodes import (
    AddrOf,
    Assign,
    Binary,
    Break,
    CaseLabel,
    Cast,
    CharLit,
    Comma,
    Compound,
    Continue,
    DeclStmt,
    Declarator,
    DefaultLabel,
    Define,
    Deref,
    EmptyStmt,
    Expr,
    ExprStmt,
    FloatLit,
    For,
    FunctionDef,
    Ident,
    If,
    Include,
    Index,
    InitList,
    IntLit,
    MacroUse,
    Node,
    Param,
    Postfix,
    Prefix,
    Return,
    SizeofExpr,
    SizeofType,
    Stmt,
    StringLit,
    Switch,
    Ternary,
    TranslationUnit,
    TypeName,
    TypeSpec,
    Typedef,
    Unary,
    Call,
    While,
)
from stylearmor.lang.program import Program

INDENT = "    "

_BINARY_PREC = {
    "||": 4,
    "&&": 5,
    "|": 6,
    "^": 7,
    "&": 8,
    "==": 9,
    "!=": 9,
    "<": 10,
    ">": 10,
    "<=": 10,
    ">=": 10,
    "<<": 11,
    ">>": 11,
    "+": 12,
    "-": 12,
    "*": 13,
    "/": 13,
    "%": 13,
}

PREC_COMMA = 1
PREC_ASSIGN = 2
PREC_TERNARY = 3
PREC_UNARY = 14
PREC_POSTFIX = 15
PREC_PRIMARY = 16


def precedence(e: Expr) -> int:
    if isinstance(e, Comma):
        return PREC_COMMA
    if isinstance(e, Assign):
        return PREC_ASSIGN
    if isinstance(e, Ternary):
        return PREC_TERNARY
    if isinstance(e, Binary):
        return _BINARY_PREC[e.op]
    if isinstance(e, (Unary, Prefix, Deref, AddrOf, Cast, SizeofType, SizeofExpr)):
        return PREC_UNARY
    if isinstance(e, (Postfix, Index, Call)):
        return PREC_POSTFIX
    return PREC_PRIMARY


def _wrap(e: Expr, min_prec: int) -> str:
    text = render_expr(e)
    return f"({text})" if precedence(e) < min_prec else text


def _prefixed(op: str, operand: Expr) -> str:
    text = _wrap(operand, PREC_UNARY)
    # "- -x" must not fuse into "--x"
    if op in ("-", "+", "&") and text.startswith(op):
        return f"{op} {text}"
    return op + text


def render_type(spec: TypeSpec) -> str:
    return ("const " if spec.const else "") + spec.base


def render_type_name(t: TypeName) -> str:
    stars = "*" * t.pointer
    return f"{render_type(t.spec)} {stars}" if stars else render_type(t.spec)


def render_declarator(d: Declarator) -> str:
    out = "*" * d.pointer + d.name
    for dim in d.dims:
        out += "[]" if dim is None else f"[{render_expr(dim)}]"
    if d.init is not None:
        out += " = " + _wrap(d.init, PREC_ASSIGN)
    return out


def render_decl(d: DeclStmt) -> str:
    """Declaration text without the trailing semicolon."""
    return render_type(d.spec) + " " + ", ".join(render_declarator(x) for x in d.declarators)


def render_expr(e: Expr) -> str:
    if isinstance(e, Ident):
        return e.name
    if isinstance(e, (IntLit, FloatLit, CharLit, StringLit)):
        return e.text
    if isinstance(e, Binary):
        p = _BINARY_PREC[e.op]
        return f"{_wrap(e.left, p)} {e.op} {_wrap(e.right, p + 1)}"
    if isinstance(e, Assign):
        return f"{_wrap(e.target, PREC_UNARY)} {e.op} {_wrap(e.value, PREC_ASSIGN)}"
    if isinstance(e, Ternary):
        return f"{_wrap(e.cond, PREC_TERNARY + 1)} ? {_wrap(e.then, PREC_ASSIGN)} : {_wrap(e.other, PREC_TERNARY)}"
    if isinstance(e, Unary):
        return _prefixed(e.op, e.operand)
    if isinstance(e, Prefix):
        return _prefixed(e.op, e.operand)
    if isinstance(e, Postfix):
        return _wrap(e.operand, PREC_POSTFIX) + e.op
    if isinstance(e, Deref):
        return _prefixed("*", e.operand)
    if isinstance(e, AddrOf):
        return _prefixed("&", e.operand)
    if isinstance(e, Cast):
        return f"({render_type_name(e.type)}){_wrap(e.operand, PREC_UNARY)}"
    if isinstance(e, SizeofType):
        return f"sizeof({render_type_name(e.type)})"
    if isinstance(e, SizeofExpr):
        return f"sizeof({render_expr(e.operand)})"
    if isinstance(e, Index):
        return f"{_wrap(e.base, PREC_POSTFIX)}[{render_expr(e.index)}]"
    if isinstance(e, Call):
        return f"{e.func.name}({', '.join(_wrap(a, PREC_ASSIGN) for a in e.args)})"
    if isinstance(e, Comma):
        return ", ".join(_wrap(x, PREC_ASSIGN) for x in e.items)
    if isinstance(e, MacroUse):
        if e.args is None:
            return e.name
        return f"{e.name}({', '.join(_wrap(a, PREC_ASSIGN) for a in e.args)})"
    if isinstance(e, InitList):
        return "{" + ", ".join(render_expr(x) for x in e.items) + "}"
    raise TypeError(f"cannot render {type(e).__name__}")


class _Printer:
    def stmt(self, s: Stmt, depth: int) -> list[str]:
        ind = INDENT * depth
        if isinstance(s, Compound):
            return [ind + "{", *self.items(s.items, depth + 1), ind + "}"]
        if isinstance(s, DeclStmt):
            return [ind + render_decl(s) + ";"]
        if isinstance(s, ExprStmt):
            return [ind + render_expr(s.expr) + ";"]
        if isinstance(s, EmptyStmt):
            return [ind + ";"]
        if isinstance(s, If):
            return self.if_stmt(s, depth)
        if isinstance(s, While):
            return self.headed(f"while ({render_expr(s.cond)})", s.body, depth)
        if isinstance(s, For):
            return self.headed(self.for_header(s), s.body, depth)
        if isinstance(s, Switch):
            lines = [ind + f"switch ({render_expr(s.subject)}) {{"]
            for item in s.body.items:
                inner = depth + 1 if isinstance(item, (CaseLabel, DefaultLabel)) else depth + 2
                lines.extend(self.stmt(item, inner))
            return [*lines, ind + "}"]
        if isinstance(s, CaseLabel):
            return [ind + f"case {render_expr(s.value)}:"]
        if isinstance(s, DefaultLabel):
            return [ind + "default:"]
        if isinstance(s, Return):
            return [ind + ("return;" if s.value is None else f"return {render_expr(s.value)};")]
        if isinstance(s, Break):
            return [ind + "break;"]
        if isinstance(s, Continue):
            return [ind + "continue;"]
        raise TypeError(f"cannot render {type(s).__name__}")

    def items(self, items: list[Stmt], depth: int) -> list[str]:
        out: list[str] = []
        for item in items:
            out.extend(self.stmt(item, depth))
        return out

    def headed(self, header: str, body: Stmt, depth: int) -> list[str]:
        ind = INDENT * depth
        if isinstance(body, Compound):
            return [f"{ind}{header} {{", *self.items(body.items, depth + 1), ind + "}"]
        return [ind + header, *self.stmt(body, depth + 1)]

    def if_stmt(self, s: If, depth: int) -> list[str]:
        ind = INDENT * depth
        lines = self.headed(f"if ({render_expr(s.cond)})", s.then, depth)
        if s.other is None:
            return lines
        if isinstance(s.other, If):
            rest = self.if_stmt(s.other, depth)
            rest[0] = ind + "else " + rest[0].lstrip()
        else:
            rest = self.headed("else", s.other, depth)
        if lines[-1] == ind + "}":
            lines[-1] = f"{ind}}} {rest[0].lstrip()}"
            return lines + rest[1:]
        return lines + rest

    def for_header(self, s: For) -> str:
        if isinstance(s.init, DeclStmt):
            init = render_decl(s.init)
        else:
            init = render_expr(s.init) if s.init is not None else ""
        cond = f" {render_expr(s.cond)}" if s.cond is not None else ""
        step = f" {render_expr(s.step)}" if s.step is not None else ""
        return f"for ({init};{cond};{step})"

    def top(self, item: Node) -> list[str]:
        if isinstance(item, Include):
            return [f"#include <{item.header}>" if item.system else f'#include "{item.header}"']
        if isinstance(item, Define):
            head = item.name if item.params is None else f"{item.name}({', '.join(item.params)})"
            return [f"#define {head} {item.body}".rstrip()]
        if isinstance(item, Typedef):
            return [f"typedef {render_type(item.spec)} {item.alias};"]
        if isinstance(item, DeclStmt):
            return [render_decl(item) + ";"]
        if isinstance(item, FunctionDef):
            params = ", ".join(self.param(p) for p in item.params)
            head = f"{render_type(item.ret)} {'*' * item.pointer}{item.name}({params})"
            return [head + " {", *self.items(item.body.items, 1), "}"]
        raise TypeError(f"cannot render {type(item).__name__}")

    @staticmethod
    def param(p: Param) -> str:
        return f"{render_type(p.spec)} {render_declarator(p.declarator)}"


def _group(item: Node) -> str:
    if isinstance(item, (Include, Define, Typedef)):
        return "directive"
    return type(item).__name__


def render(target: Program | TranslationUnit | Stmt | Expr) -> str:
    """Render a program (or a single statement/expression) as source text."""
    if isinstance(target, Program):
        target = target.ast
    if isinstance(target, Expr):
        return render_expr(target)
    printer = _Printer()
    if isinstance(target, Stmt):
        return "\n".join(printer.stmt(target, 0))
    lines: list[str] = []
    previous = None
    for item in target.items:
        group = _group(item)
        if previous is not None and (group != previous or group == "FunctionDef"):
            lines.append("")
        lines.extend(printer.top(item))
        previous = group
    return "\n".join(lines) + "\n"
