"""Recursive-descent parser for the Mini-C subset.

The grammar covers includes, object-like and function-like ``#define``,
``typedef`` of base types, global declarations, functions, ``for``/``while``,
``if``/``else``/``switch``/ternary, ``return``/``break``/``continue`` and the
usual C expression operators. Macros are expanded while parsing: a use becomes
a :class:`MacroUse` node that keeps the surface form for rendering and the
expanded expression for evaluation.
"""

from __future__ import annotations

import itertools
import re
from collections.abc import Iterator

from stylearmor.errors import CSyntaxError, UnsupportedConstruct
from stylearmor.lang.lexer import Token, int_value, tokenize, unescape
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
    TopLevel,
    TranslationUnit,
    TypeName,
    TypeSpec,
    Typedef,
    Unary,
    While,
    Call,
)
from stylearmor.lang.program import Program
from stylearmor.lang.scope import resolve

DEFAULT_MAX_BYTES = 1 << 20

BASE_TYPE_WORDS = frozenset({"int", "long", "float", "double", "char", "void", "unsigned"})

VALID_BASE_TYPES = frozenset(
    {
        "int",
        "long",
        "long int",
        "long long",
        "long long int",
        "float",
        "double",
        "long double",
        "char",
        "void",
        "unsigned",
        "unsigned int",
        "unsigned char",
        "unsigned long",
        "unsigned long int",
        "unsigned long long",
        "unsigned long long int",
    }
)

UNSUPPORTED_KEYWORDS = frozenset({"struct", "union", "enum", "goto", "do", "static"})

ASSIGN_OPS = frozenset({"=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>="})

BINARY_LEVELS: tuple[tuple[str, ...], ...] = (
    ("||",),
    ("&&",),
    ("|",),
    ("^",),
    ("&",),
    ("==", "!="),
    ("<", ">", "<=", ">="),
    ("<<", ">>"),
    ("+", "-"),
    ("*", "/", "%"),
)

_DIRECTIVE_RE = re.compile(r"#\s*(\w*)\s*(.*)$", re.S)
_DEFINE_RE = re.compile(r"([A-Za-z_]\w*)(\(([^)]*)\))?\s*(.*)$", re.S)
_INCLUDE_RE = re.compile(r"""([<"])([^>"]+)[>"]\s*$""")


def _at(node: Node, tok: Token) -> Node:
    node.line = tok.line
    node.column = tok.column
    return node


class _Parser:
    def __init__(
        self,
        tokens: list[Token],
        *,
        macros: dict[str, Define] | None = None,
        typedefs: set[str] | None = None,
        uids: Iterator[int] | None = None,
        expanding: frozenset[str] = frozenset(),
    ) -> None:
        self.tokens = tokens
        self.pos = 0
        self.macros = macros if macros is not None else {}
        self.typedefs = typedefs if typedefs is not None else set()
        self.uids = uids if uids is not None else itertools.count(1)
        self.expanding = expanding

    # -- token helpers ----------------------------------------------------

    def peek(self, offset: int = 0) -> Token:
        i = min(self.pos + offset, len(self.tokens) - 1)
        return self.tokens[i]

    def next(self) -> Token:
        tok = self.peek()
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at(self, text: str) -> bool:
        return self.peek().is_(text)

    def accept(self, text: str) -> Token | None:
        if self.at(text):
            return self.next()
        return None

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"'{text}'")
        return self.next()

    def expect_ident(self) -> Token:
        tok = self.peek()
        if tok.kind != "ident":
            self.error("identifier")
        return self.next()

    def error(self, expected: str) -> None:
        tok = self.peek()
        raise CSyntaxError(tok.line, tok.column, expected, tok.text or "end of input")

    def is_type_start(self, tok: Token) -> bool:
        if tok.kind == "keyword":
            return tok.text in BASE_TYPE_WORDS or tok.text == "const"
        return tok.kind == "ident" and tok.text in self.typedefs

    def check_keyword(self, tok: Token) -> None:
        if tok.kind == "keyword" and tok.text in UNSUPPORTED_KEYWORDS:
            raise UnsupportedConstruct(tok.text, tok.line, tok.column)

    # -- top level --------------------------------------------------------

    def unit(self) -> TranslationUnit:
        items: list[TopLevel] = []
        while self.peek().kind != "eof":
            tok = self.peek()
            if tok.kind == "directive":
                items.append(self.directive())
            elif tok.is_("typedef"):
                items.append(self.typedef())
            else:
                self.check_keyword(tok)
                items.append(self.external_declaration())
        return TranslationUnit(items)

    def directive(self) -> Include | Define:
        tok = self.next()
        m = _DIRECTIVE_RE.match(tok.text)
        word, rest = (m.group(1), m.group(2).strip()) if m else ("", "")
        if word == "include":
            m = _INCLUDE_RE.match(rest)
            if m is None:
                raise CSyntaxError(tok.line, tok.column, "header name", rest)
            return _at(Include(m.group(2), m.group(1) == "<"), tok)
        if word == "define":
            m = _DEFINE_RE.match(rest)
            if m is None:
                raise CSyntaxError(tok.line, tok.column, "macro name", rest)
            name = m.group(1)
            params = None
            if m.group(2):
                params = [p.strip() for p in m.group(3).split(",") if p.strip()]
            define = _at(Define(name, params, m.group(4).strip()), tok)
            if define.body:
                self.validate_macro(define)
            self.macros[name] = define
            return define
        raise UnsupportedConstruct("#" + word, tok.line, tok.column)

    def validate_macro(self, define: Define) -> None:
        body = [t for t in tokenize(define.body) if t.kind != "eof"]
        self.sub_parse(body, define.name)

    def typedef(self) -> Typedef:
        tok = self.expect("typedef")
        spec = self.type_spec()
        if self.at("*"):
            raise UnsupportedConstruct("pointer typedef", tok.line, tok.column)
        name = self.expect_ident()
        self.expect(";")
        self.typedefs.add(name.text)
        return _at(Typedef(spec, name.text, uid=next(self.uids)), tok)

    def external_declaration(self) -> FunctionDef | DeclStmt:
        start = self.peek()
        spec = self.type_spec()
        pointer = self.pointers()
        name = self.expect_ident()
        if self.at("("):
            params = self.params()
            if self.at(";"):
                raise UnsupportedConstruct("function prototype", start.line, start.column)
            if not self.at("{"):
                self.error("'{'")
            fn = FunctionDef(spec, pointer, name.text, params, self.compound(), uid=next(self.uids))
            return _at(fn, start)
        declarators = [self.declarator_rest(name, pointer)]
        while self.accept(","):
            declarators.append(self.declarator())
        self.expect(";")
        return _at(DeclStmt(spec, declarators), start)

    def params(self) -> list[Param]:
        self.expect("(")
        out: list[Param] = []
        if self.accept(")"):
            return out
        if self.at("void") and self.peek(1).is_(")"):
            self.next()
            self.next()
            return out
        while True:
            start = self.peek()
            spec = self.type_spec()
            pointer = self.pointers()
            name = self.expect_ident()
            dims: list[Expr | None] = []
            while self.accept("["):
                if self.accept("]"):
                    dims.append(None)
                    continue
                dims.append(self.expression())
                self.expect("]")
            dec = _at(Declarator(name.text, pointer, dims, None, uid=next(self.uids)), name)
            out.append(_at(Param(spec, dec), start))
            if not self.accept(","):
                break
        self.expect(")")
        return out

    # -- types and declarators --------------------------------------------

    def type_spec(self) -> TypeSpec:
        start = self.peek()
        const = self.accept("const") is not None
        tok = self.peek()
        if tok.kind == "ident" and tok.text in self.typedefs:
            self.next()
            return _at(TypeSpec(tok.text, const, alias=True), start)
        words: list[str] = []
        while self.peek().kind == "keyword" and self.peek().text in BASE_TYPE_WORDS:
            words.append(self.next().text)
        if not words:
            self.check_keyword(self.peek())
            self.error("type name")
        base = " ".join(words)
        if base not in VALID_BASE_TYPES:
            raise UnsupportedConstruct(f"type '{base}'", start.line, start.column)
        return _at(TypeSpec(base, const), start)

    def type_name(self) -> TypeName:
        start = self.peek()
        spec = self.type_spec()
        return _at(TypeName(spec, self.pointers()), start)

    def pointers(self) -> int:
        count = 0
        while self.accept("*"):
            count += 1
        return count

    def declarator(self) -> Declarator:
        pointer = self.pointers()
        return self.declarator_rest(self.expect_ident(), pointer)

    def declarator_rest(self, name: Token, pointer: int) -> Declarator:
        dims: list[Expr | None] = []
        while self.accept("["):
            if self.accept("]"):
                dims.append(None)
                continue
            dims.append(self.expression())
            self.expect("]")
        init = self.initializer() if self.accept("=") else None
        return _at(Declarator(name.text, pointer, dims, init, uid=next(self.uids)), name)

    def initializer(self) -> Expr:
        start = self.peek()
        if not self.accept("{"):
            return self.assignment()
        items: list[Expr] = []
        while not self.accept("}"):
            items.append(self.initializer())
            if not self.accept(","):
                self.expect("}")
                break
        return _at(InitList(items), start)

    def decl_stmt(self) -> DeclStmt:
        start = self.peek()
        spec = self.type_spec()
        declarators = [self.declarator()]
        while self.accept(","):
            declarators.append(self.declarator())
        self.expect(";")
        return _at(DeclStmt(spec, declarators), start)

    # -- statements -------------------------------------------------------

    def compound(self, labels: bool = False) -> Compound:
        start = self.expect("{")
        items: list[Stmt] = []
        while not self.at("}"):
            if self.peek().kind == "eof":
                self.error("'}'")
            tok = self.peek()
            if not labels and (tok.is_("case") or tok.is_("default")):
                raise UnsupportedConstruct("case label outside a switch body", tok.line, tok.column)
            items.append(self.statement())
        self.expect("}")
        return _at(Compound(items), start)

    def statement(self) -> Stmt:
        tok = self.peek()
        if tok.kind == "directive":
            raise UnsupportedConstruct("directive inside a function", tok.line, tok.column)
        self.check_keyword(tok)
        if tok.is_("{"):
            return self.compound()
        if tok.is_("if"):
            self.next()
            self.expect("(")
            cond = self.expression()
            self.expect(")")
            then = self.statement()
            other = self.statement() if self.accept("else") else None
            return _at(If(cond, then, other), tok)
        if tok.is_("while"):
            self.next()
            self.expect("(")
            cond = self.expression()
            self.expect(")")
            return _at(While(cond, self.statement()), tok)
        if tok.is_("for"):
            return self.for_stmt()
        if tok.is_("switch"):
            self.next()
            self.expect("(")
            subject = self.expression()
            self.expect(")")
            if not self.at("{"):
                self.error("'{'")
            return _at(Switch(subject, self.compound(labels=True)), tok)
        if tok.is_("case"):
            self.next()
            value = self.conditional()
            self.expect(":")
            return _at(CaseLabel(value), tok)
        if tok.is_("default"):
            self.next()
            self.expect(":")
            return _at(DefaultLabel(), tok)
        if tok.is_("return"):
            self.next()
            value = None if self.at(";") else self.expression()
            self.expect(";")
            return _at(Return(value), tok)
        if tok.is_("break"):
            self.next()
            self.expect(";")
            return _at(Break(), tok)
        if tok.is_("continue"):
            self.next()
            self.expect(";")
            return _at(Continue(), tok)
        if tok.is_(";"):
            self.next()
            return _at(EmptyStmt(), tok)
        if self.is_type_start(tok):
            return self.decl_stmt()
        expr = self.expression()
        self.expect(";")
        return _at(ExprStmt(expr), tok)

    def for_stmt(self) -> For:
        tok = self.expect("for")
        self.expect("(")
        init: DeclStmt | Expr | None
        if self.accept(";"):
            init = None
        elif self.is_type_start(self.peek()):
            init = self.decl_stmt()
        else:
            init = self.expression()
            self.expect(";")
        cond = None if self.at(";") else self.expression()
        self.expect(";")
        step = None if self.at(")") else self.expression()
        self.expect(")")
        return _at(For(init, cond, step, self.statement()), tok)

    # -- expressions ------------------------------------------------------

    def expression(self) -> Expr:
        start = self.peek()
        first = self.assignment()
        if not self.at(","):
            return first
        items = [first]
        while self.accept(","):
            items.append(self.assignment())
        return _at(Comma(items), start)

    def assignment(self) -> Expr:
        start = self.peek()
        left = self.conditional()
        tok = self.peek()
        if tok.kind == "punct" and tok.text in ASSIGN_OPS:
            if not isinstance(left, (Ident, Index, Deref)):
                self.error("assignable expression before " + repr(tok.text))
            self.next()
            return _at(Assign(tok.text, left, self.assignment()), start)
        return left

    def conditional(self) -> Expr:
        start = self.peek()
        cond = self.binary(0)
        if not self.accept("?"):
            return cond
        then = self.expression()
        self.expect(":")
        return _at(Ternary(cond, then, self.conditional()), start)

    def binary(self, level: int) -> Expr:
        if level == len(BINARY_LEVELS):
            return self.unary()
        start = self.peek()
        left = self.binary(level + 1)
        ops = BINARY_LEVELS[level]
        while self.peek().kind == "punct" and self.peek().text in ops:
            op = self.next().text
            left = _at(Binary(op, left, self.binary(level + 1)), start)
        return left

    def unary(self) -> Expr:
        tok = self.peek()
        if tok.is_("++") or tok.is_("--"):
            self.next()
            return _at(Prefix(tok.text, self.unary()), tok)
        if tok.kind == "punct" and tok.text in ("-", "+", "!", "~"):
            self.next()
            return _at(Unary(tok.text, self.unary()), tok)
        if tok.is_("*"):
            self.next()
            return _at(Deref(self.unary()), tok)
        if tok.is_("&"):
            self.next()
            return _at(AddrOf(self.unary()), tok)
        if tok.is_("sizeof"):
            self.next()
            if self.at("(") and self.is_type_start(self.peek(1)):
                self.next()
                type_name = self.type_name()
                self.expect(")")
                return _at(SizeofType(type_name), tok)
            return _at(SizeofExpr(self.unary()), tok)
        if tok.is_("(") and self.is_type_start(self.peek(1)):
            self.next()
            type_name = self.type_name()
            self.expect(")")
            return _at(Cast(type_name, self.unary()), tok)
        return self.postfix()

    def postfix(self) -> Expr:
        start = self.peek()
        expr = self.primary()
        while True:
            tok = self.peek()
            if tok.is_("["):
                self.next()
                index = self.expression()
                self.expect("]")
                expr = _at(Index(expr, index), start)
            elif tok.is_("("):
                if not isinstance(expr, Ident):
                    self.error("function name before '('")
                self.next()
                args: list[Expr] = []
                if not self.accept(")"):
                    while True:
                        args.append(self.assignment())
                        if not self.accept(","):
                            break
                    self.expect(")")
                expr = _at(Call(expr, args), start)
            elif tok.is_("++") or tok.is_("--"):
                self.next()
                expr = _at(Postfix(tok.text, expr), start)
            elif tok.is_(".") or tok.is_("->"):
                raise UnsupportedConstruct("member access", tok.line, tok.column)
            else:
                return expr

    def primary(self) -> Expr:
        tok = self.peek()
        if tok.kind == "ident":
            if tok.text in self.macros and tok.text not in self.expanding:
                return self.macro_use()
            self.next()
            return _at(Ident(tok.text), tok)
        if tok.kind == "int":
            self.next()
            return _at(IntLit(int_value(tok.text), tok.text), tok)
        if tok.kind == "float":
            self.next()
            return _at(FloatLit(float(tok.text.rstrip("fFlL")), tok.text), tok)
        if tok.kind == "char":
            self.next()
            body = unescape(tok.text[1:-1])
            return _at(CharLit(ord(body[0]) if body else 0, tok.text), tok)
        if tok.kind == "string":
            self.next()
            if self.peek().kind == "string":
                raise UnsupportedConstruct("string literal concatenation", tok.line, tok.column)
            return _at(StringLit(unescape(tok.text[1:-1]), tok.text), tok)
        if tok.is_("("):
            self.next()
            expr = self.expression()
            self.expect(")")
            return expr
        self.check_keyword(tok)
        self.error("expression")
        raise AssertionError("unreachable")

    # -- macros -----------------------------------------------------------

    def macro_use(self) -> MacroUse:
        tok = self.next()
        define = self.macros[tok.text]
        body = [t for t in tokenize(define.body) if t.kind != "eof"]
        if not body:
            raise UnsupportedConstruct(f"empty macro '{tok.text}' used as expression", tok.line, tok.column)
        if define.params is None:
            return _at(MacroUse(tok.text, None, self.sub_parse(body, tok.text)), tok)
        self.expect("(")
        args: list[Expr] = []
        spans: list[list[Token]] = []
        if not self.at(")"):
            while True:
                begin = self.pos
                args.append(self.assignment())
                spans.append(self.tokens[begin : self.pos])
                if not self.accept(","):
                    break
        self.expect(")")
        if len(args) != len(define.params):
            raise CSyntaxError(tok.line, tok.column, f"{len(define.params)} macro arguments")
        expanded: list[Token] = []
        for t in body:
            if t.kind == "ident" and t.text in define.params:
                span = spans[define.params.index(t.text)]
                expanded.append(Token("punct", "(", t.line, t.column))
                expanded.extend(span)
                expanded.append(Token("punct", ")", t.line, t.column))
            else:
                expanded.append(t)
        return _at(MacroUse(tok.text, args, self.sub_parse(expanded, tok.text)), tok)

    def sub_parse(self, tokens: list[Token], name: str) -> Expr:
        end = tokens[-1] if tokens else Token("eof", "", 0, 0)
        sub = _Parser(
            [*tokens, Token("eof", "", end.line, end.column + 1)],
            macros=self.macros,
            typedefs=self.typedefs,
            uids=self.uids,
            expanding=self.expanding | {name},
        )
        try:
            expr = sub.expression()
        except CSyntaxError as exc:
            raise UnsupportedConstruct(f"macro '{name}' is not an expression") from exc
        if sub.peek().kind != "eof":
            raise UnsupportedConstruct(f"macro '{name}' is not an expression")
        return expr


def parse(source: str, source_name: str = "<memory>", *, max_bytes: int = DEFAULT_MAX_BYTES) -> Program:
    """Parse Mini-C source text into a resolved :class:`Program`.

    Raises:
        CSyntaxError: on a grammar violation or an unresolvable name.
        UnsupportedConstruct: on constructs outside Mini-C or oversized input.
    """
    if len(source.encode("utf-8", errors="replace")) > max_bytes:
        raise UnsupportedConstruct(f"source larger than {max_bytes} bytes")
    tokens = tokenize(source)
    tu = _Parser(tokens).unit()
    resolve(tu)
    return Program(tu, tuple(tokens), source_name)
