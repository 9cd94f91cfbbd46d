"""Deterministic tree-walking interpreter for Mini-C.

This is the semantics oracle: a transform is accepted only when the rewritten
program produces the same :class:`IoTrace` as the original. Every storage
location is a cell inside a :class:`Block` (scalars are one-cell blocks), so
pointers, arrays and ``malloc`` share one bounds-checked model.
"""

from __future__ import annotations

import json
import logging
import math
import re
import sys
from collections.abc import Iterator, Sequence
from contextlib import contextmanager
from dataclasses import dataclass, field

from stylearmor.errors import FuelExhausted, RuntimeFault, UnsupportedConstruct
from stylearmor.lang.nodes import (
    EXTERNAL,
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
    Deref,
    EmptyStmt,
    Expr,
    ExprStmt,
    FloatLit,
    For,
    FunctionDef,
    Ident,
    If,
    Index,
    InitList,
    IntLit,
    MacroUse,
    Postfix,
    Prefix,
    Return,
    SizeofExpr,
    SizeofType,
    Stmt,
    StringLit,
    Switch,
    Ternary,
    TypeName,
    TypeSpec,
    Typedef,
    Unary,
    Call,
    While,
    walk,
)
from stylearmor.lang.program import Program

logger = logging.getLogger(__name__)

DEFAULT_FUEL = 1_000_000
MAX_CALL_DEPTH = 256

FLOAT_TYPES = frozenset({"float", "double", "long double"})

TYPE_SIZES = {
    "char": 1,
    "unsigned char": 1,
    "int": 4,
    "unsigned": 4,
    "unsigned int": 4,
    "float": 4,
    "long": 8,
    "long int": 8,
    "long long": 8,
    "long long int": 8,
    "unsigned long": 8,
    "unsigned long int": 8,
    "unsigned long long": 8,
    "unsigned long long int": 8,
    "double": 8,
    "long double": 16,
    "void": 1,
}
POINTER_SIZE = 8

_CONVERSION_RE = re.compile(r"%([-+ #0]*)(\d+|\*)?(?:\.(\d+))?(hh|h|ll|l|L|z)?([diouxXeEfgGcs%])")
_INT_CONVERSIONS = frozenset("diouxX")


@dataclass(frozen=True)
class IoTrace:
    """Observable behaviour of one run.

    ``status`` is ``ok``, ``fault`` or ``fuel``; ``fault`` holds the fault kind
    when ``status == "fault"``. ``outputs`` holds ``%d`` items as ints and
    every other printed piece as text.
    """

    inputs: tuple[int | float, ...]
    outputs: tuple[int | str, ...]
    status: str = "ok"
    fault: str = ""
    exit_code: int = 0
    steps: int = 0

    def lines(self) -> list[str]:
        """One line per output item; text items are quoted, ints are not."""
        out = []
        for item in self.outputs:
            out.append(str(item) if isinstance(item, int) else json.dumps(item))
        return out


# ---------------------------------------------------------------------------
# Storage model
# ---------------------------------------------------------------------------


class _Uninit:
    def __repr__(self) -> str:
        return "UNINIT"


UNINIT = _Uninit()


@dataclass(eq=False)
class Block:
    cells: list
    floating: bool = False
    heap: bool = False
    freed: bool = False
    label: str = ""


@dataclass(frozen=True, eq=False)
class Pointer:
    """Address of ``block.cells[offset]``; ``inner`` is the pointee's array shape."""

    block: Block | None
    offset: int = 0
    inner: tuple[int, ...] = ()

    @property
    def stride(self) -> int:
        return math.prod(self.inner) if self.inner else 1


NULL = Pointer(None)


@dataclass
class Var:
    block: Block
    dims: tuple[int, ...] = ()
    pointer: int = 0


@dataclass
class _Frame:
    vars: dict[int, Var] = field(default_factory=dict)


class _Break(Exception):
    pass


class _Continue(Exception):
    pass


class _Return(Exception):
    def __init__(self, value: object) -> None:
        self.value = value


# ---------------------------------------------------------------------------
# Machine
# ---------------------------------------------------------------------------


class _Machine:
    def __init__(self, program: Program, inputs: Sequence[int | float], fuel: int) -> None:
        self.tu = program.ast
        self.inputs = list(inputs)
        self.cursor = 0
        self.fuel = fuel
        self.steps = 0
        self.outputs: list[int | str] = []
        self.globals: dict[int, Var] = {}
        self.frames: list[_Frame] = []
        self.functions = {fn.uid: fn for fn in self.tu.functions}
        self.aliases = {it.alias: it.spec.base for it in self.tu.items if isinstance(it, Typedef)}

    # -- bookkeeping ------------------------------------------------------

    def tick(self) -> None:
        self.steps += 1
        if self.steps > self.fuel:
            raise FuelExhausted(self.steps)

    def base_type(self, spec: TypeSpec) -> str:
        return self.aliases.get(spec.base, spec.base) if spec.alias else spec.base

    def is_float(self, spec: TypeSpec, pointer: int = 0) -> bool:
        return pointer == 0 and self.base_type(spec) in FLOAT_TYPES

    def type_size(self, t: TypeName) -> int:
        if t.pointer:
            return POINTER_SIZE
        return TYPE_SIZES.get(self.base_type(t.spec), 4)

    def lookup(self, ident: Ident) -> Var:
        uid = ident.binding
        if self.frames and uid in self.frames[-1].vars:
            return self.frames[-1].vars[uid]
        if uid in self.globals:
            return self.globals[uid]
        raise UnsupportedConstruct(f"'{ident.name}' used as a value", ident.line, ident.column)

    # -- cells ------------------------------------------------------------

    def check(self, ptr: Pointer) -> None:
        if ptr.block is None:
            raise RuntimeFault("out_of_bounds", "null pointer access")
        if ptr.block.freed:
            raise RuntimeFault("use_after_free", ptr.block.label)
        if not 0 <= ptr.offset < len(ptr.block.cells):
            raise RuntimeFault("out_of_bounds", f"{ptr.block.label}[{ptr.offset}]")

    def load(self, ptr: Pointer) -> object:
        if ptr.inner:
            return ptr
        self.check(ptr)
        value = ptr.block.cells[ptr.offset]
        if value is UNINIT:
            raise RuntimeFault("uninitialized_read", f"{ptr.block.label}[{ptr.offset}]")
        return value

    def store(self, ptr: Pointer, value: object) -> object:
        self.check(ptr)
        if isinstance(value, float) and not ptr.block.floating:
            value = _truncate(value)
        elif isinstance(value, int) and ptr.block.floating:
            value = float(value)
        ptr.block.cells[ptr.offset] = value
        return value

    # -- declarations -----------------------------------------------------

    def declare(self, spec: TypeSpec, d: Declarator, scope: dict[int, Var], zero: bool) -> None:
        dims = tuple(self.dim_size(x, d) for x in d.dims)
        floating = self.is_float(spec, d.pointer)
        size = math.prod(dims) if dims else 1
        if zero:
            fill: object = NULL if d.pointer and not dims else (0.0 if floating else 0)
        else:
            fill = UNINIT
        block = Block([fill] * size, floating=floating, label=d.name)
        var = Var(block, dims, d.pointer)
        scope[d.uid] = var
        if d.init is not None:
            self.initialize(var, d.init)

    def dim_size(self, dim: Expr | None, d: Declarator) -> int:
        if dim is None:
            if isinstance(d.init, InitList):
                return len(d.init.items)
            if isinstance(d.init, StringLit):
                return len(d.init.value) + 1
            raise UnsupportedConstruct(f"array '{d.name}' without size", d.line, d.column)
        n = self.eval(dim)
        if not isinstance(n, int) or n <= 0:
            raise RuntimeFault("out_of_bounds", f"array '{d.name}' of size {n}")
        return n

    def initialize(self, var: Var, init: Expr) -> None:
        if not var.dims:
            self.store(Pointer(var.block), self.eval(init))
            return
        if isinstance(init, StringLit):
            values: list[object] = [ord(c) for c in init.value] + [0]
        elif isinstance(init, InitList):
            values = [self.eval(x) for x in _flatten(init)]
        else:
            raise UnsupportedConstruct("array initializer", init.line, init.column)
        if len(values) > len(var.block.cells):
            raise RuntimeFault("out_of_bounds", f"initializer for '{var.block.label}'")
        zero = 0.0 if var.block.floating else 0
        for i in range(len(var.block.cells)):
            self.store(Pointer(var.block, i), values[i] if i < len(values) else zero)

    # -- statements -------------------------------------------------------

    def run_main(self) -> int:
        for item in self.tu.items:
            if isinstance(item, DeclStmt):
                for d in item.declarators:
                    self.declare(item.spec, d, self.globals, zero=True)
        main = self.tu.function("main")
        if main is None:
            raise UnsupportedConstruct("program without main")
        result = self.call(main, [0] * len(main.params))
        return result if isinstance(result, int) else 0

    def exec(self, s: Stmt) -> None:
        self.tick()
        if isinstance(s, ExprStmt):
            self.eval(s.expr)
        elif isinstance(s, DeclStmt):
            for d in s.declarators:
                self.declare(s.spec, d, self.frames[-1].vars, zero=False)
        elif isinstance(s, Compound):
            for item in s.items:
                self.exec(item)
        elif isinstance(s, If):
            if self.truth(self.eval(s.cond)):
                self.exec(s.then)
            elif s.other is not None:
                self.exec(s.other)
        elif isinstance(s, While):
            while True:
                self.tick()
                if not self.truth(self.eval(s.cond)):
                    break
                try:
                    self.exec(s.body)
                except _Break:
                    break
                except _Continue:
                    pass
        elif isinstance(s, For):
            self.exec_for(s)
        elif isinstance(s, Switch):
            self.exec_switch(s)
        elif isinstance(s, Return):
            raise _Return(None if s.value is None else self.eval(s.value))
        elif isinstance(s, Break):
            raise _Break()
        elif isinstance(s, Continue):
            raise _Continue()
        elif isinstance(s, (EmptyStmt, CaseLabel, DefaultLabel)):
            return
        else:
            raise UnsupportedConstruct(type(s).__name__, s.line, s.column)

    def exec_for(self, s: For) -> None:
        if isinstance(s.init, DeclStmt):
            self.exec(s.init)
        elif s.init is not None:
            self.eval(s.init)
        while True:
            self.tick()
            if s.cond is not None and not self.truth(self.eval(s.cond)):
                break
            try:
                self.exec(s.body)
            except _Break:
                break
            except _Continue:
                pass
            if s.step is not None:
                self.eval(s.step)

    def exec_switch(self, s: Switch) -> None:
        subject = self.eval(s.subject)
        start = None
        for i, item in enumerate(s.body.items):
            if isinstance(item, CaseLabel) and self.eval(item.value) == subject:
                start = i
                break
        if start is None:
            start = next((i for i, it in enumerate(s.body.items) if isinstance(it, DefaultLabel)), None)
        if start is None:
            return
        try:
            for item in s.body.items[start:]:
                self.exec(item)
        except _Break:
            pass

    def call(self, fn: FunctionDef, args: list[object]) -> object:
        if len(self.frames) >= MAX_CALL_DEPTH:
            raise RuntimeFault("stack_overflow", fn.name)
        if len(args) != len(fn.params):
            raise UnsupportedConstruct(f"call to '{fn.name}' with {len(args)} arguments", fn.line, fn.column)
        frame = _Frame()
        for param, value in zip(fn.params, args):
            d = param.declarator
            pointer = d.pointer + len(d.dims)
            block = Block([UNINIT], floating=self.is_float(param.spec, pointer), label=d.name)
            self.store(Pointer(block), value)
            frame.vars[d.uid] = Var(block, (), pointer)
        self.frames.append(frame)
        try:
            for item in fn.body.items:
                self.exec(item)
            result: object = None
        except _Return as ret:
            result = ret.value
        finally:
            self.frames.pop()
        if result is not None and fn.pointer == 0:
            if self.is_float(fn.ret):
                result = float(result) if not isinstance(result, Pointer) else result
            elif isinstance(result, float):
                result = _truncate(result)
        return result

    # -- expressions ------------------------------------------------------

    def truth(self, value: object) -> bool:
        if isinstance(value, Pointer):
            return value.block is not None
        if value is None:
            raise RuntimeFault("uninitialized_read", "value of a void call")
        return value != 0

    def address(self, e: Expr) -> Pointer:
        """Lvalue evaluation."""
        if isinstance(e, MacroUse):
            return self.address(e.expansion)
        if isinstance(e, Ident):
            var = self.lookup(e)
            return Pointer(var.block, 0, var.dims[1:] if var.dims else ())
        if isinstance(e, Index):
            base = self.eval(e.base)
            index = self.eval(e.index)
            if not isinstance(base, Pointer):
                raise UnsupportedConstruct("subscript of a non-pointer", e.line, e.column)
            return Pointer(base.block, base.offset + _as_int(index) * base.stride, base.inner[1:] if base.inner else ())
        if isinstance(e, Deref):
            ptr = self.eval(e.operand)
            if not isinstance(ptr, Pointer):
                raise UnsupportedConstruct("dereference of a non-pointer", e.line, e.column)
            return Pointer(ptr.block, ptr.offset, ptr.inner[1:] if ptr.inner else ())
        raise UnsupportedConstruct("assignment target", e.line, e.column)

    def eval(self, e: Expr) -> object:
        if isinstance(e, (IntLit, CharLit)):
            return e.value
        if isinstance(e, FloatLit):
            return e.value
        if isinstance(e, StringLit):
            return e.value
        if isinstance(e, MacroUse):
            return self.eval(e.expansion)
        if isinstance(e, Ident):
            if e.binding == EXTERNAL:
                if e.name == "NULL":
                    return NULL
                raise UnsupportedConstruct(f"'{e.name}' used as a value", e.line, e.column)
            var = self.lookup(e)
            if var.dims:
                return Pointer(var.block, 0, var.dims[1:])
            return self.load(Pointer(var.block))
        if isinstance(e, (Index, Deref)):
            return self.load(self.address(e))
        if isinstance(e, Assign):
            target = self.address(e.target)
            value = self.eval(e.value)
            if e.op != "=":
                value = self.binary(e.op[:-1], self.load(target), value, e)
            return self.store(target, value)
        if isinstance(e, (Prefix, Postfix)):
            target = self.address(e.operand)
            old = self.load(target)
            new = self.binary("+" if e.op == "++" else "-", old, 1, e)
            self.store(target, new)
            return new if isinstance(e, Prefix) else old
        if isinstance(e, Binary):
            if e.op == "&&":
                return int(self.truth(self.eval(e.left)) and self.truth(self.eval(e.right)))
            if e.op == "||":
                return int(self.truth(self.eval(e.left)) or self.truth(self.eval(e.right)))
            return self.binary(e.op, self.eval(e.left), self.eval(e.right), e)
        if isinstance(e, Unary):
            return self.unary(e.op, self.eval(e.operand), e)
        if isinstance(e, AddrOf):
            ptr = self.address(e.operand)
            return ptr
        if isinstance(e, Ternary):
            return self.eval(e.then) if self.truth(self.eval(e.cond)) else self.eval(e.other)
        if isinstance(e, Comma):
            value: object = None
            for item in e.items:
                value = self.eval(item)
            return value
        if isinstance(e, Cast):
            return self.cast(e.type, self.eval(e.operand))
        if isinstance(e, SizeofType):
            return self.type_size(e.type)
        if isinstance(e, SizeofExpr):
            return self.sizeof_expr(e.operand)
        if isinstance(e, Call):
            return self.eval_call(e)
        raise UnsupportedConstruct(type(e).__name__, e.line, e.column)

    def cast(self, t: TypeName, value: object) -> object:
        if t.pointer or isinstance(value, Pointer):
            return value
        if self.base_type(t.spec) in FLOAT_TYPES:
            return float(_as_number(value))
        return _truncate(value) if isinstance(value, float) else value

    def sizeof_expr(self, operand: Expr) -> int:
        if isinstance(operand, MacroUse):
            return self.sizeof_expr(operand.expansion)
        if isinstance(operand, Ident) and operand.binding != EXTERNAL:
            var = self.lookup(operand)
            elem = 8 if var.block.floating else 4
            if var.pointer and not var.dims:
                return POINTER_SIZE
            return elem * (math.prod(var.dims) if var.dims else 1)
        return 4

    def unary(self, op: str, v: object, e: Expr) -> object:
        if op == "!":
            return int(not self.truth(v))
        n = _as_number(v, e)
        if op == "-":
            return -n
        if op == "+":
            return n
        if op == "~":
            return ~_as_int(n)
        raise UnsupportedConstruct(f"operator {op}", e.line, e.column)

    def binary(self, op: str, a: object, b: object, e: Expr) -> object:
        if isinstance(a, Pointer) or isinstance(b, Pointer):
            return self.pointer_binary(op, a, b, e)
        x = _as_number(a, e)
        y = _as_number(b, e)
        if op == "+":
            return x + y
        if op == "-":
            return x - y
        if op == "*":
            return x * y
        if op in ("/", "%"):
            if y == 0:
                raise RuntimeFault("div_zero", f"at {e.line}:{e.column}")
            if isinstance(x, int) and isinstance(y, int):
                q = abs(x) // abs(y)
                q = q if (x >= 0) == (y >= 0) else -q
                return q if op == "/" else x - y * q
            if op == "%":
                raise UnsupportedConstruct("% on floating operands", e.line, e.column)
            return x / y
        if op == "<":
            return int(x < y)
        if op == ">":
            return int(x > y)
        if op == "<=":
            return int(x <= y)
        if op == ">=":
            return int(x >= y)
        if op == "==":
            return int(x == y)
        if op == "!=":
            return int(x != y)
        xi, yi = _as_int(x), _as_int(y)
        if op == "&":
            return xi & yi
        if op == "|":
            return xi | yi
        if op == "^":
            return xi ^ yi
        if op == "<<":
            return xi << yi
        if op == ">>":
            return xi >> yi
        raise UnsupportedConstruct(f"operator {op}", e.line, e.column)

    def pointer_binary(self, op: str, a: object, b: object, e: Expr) -> object:
        if op in ("==", "!="):
            same = _same_address(a, b)
            return int(same) if op == "==" else int(not same)
        if isinstance(a, Pointer) and isinstance(b, Pointer):
            if op == "-":
                return (a.offset - b.offset) // a.stride
            if op in ("<", ">", "<=", ">="):
                return self.binary(op, a.offset, b.offset, e)
        if isinstance(a, Pointer) and isinstance(b, int) and op in ("+", "-"):
            delta = b if op == "+" else -b
            return Pointer(a.block, a.offset + delta * a.stride, a.inner)
        if isinstance(b, Pointer) and isinstance(a, int) and op == "+":
            return Pointer(b.block, b.offset + a * b.stride, b.inner)
        raise UnsupportedConstruct(f"pointer operator {op}", e.line, e.column)

    # -- calls and intrinsics --------------------------------------------

    def eval_call(self, e: Call) -> object:
        name = e.func.name
        if e.func.binding != EXTERNAL:
            fn = self.functions.get(e.func.binding)
            if fn is None:
                raise UnsupportedConstruct(f"call to '{name}'", e.line, e.column)
            return self.call(fn, [self.eval(a) for a in e.args])
        if name == "printf":
            return self.printf(e)
        if name == "scanf":
            return self.scanf(e)
        if name == "malloc":
            return self.malloc(e)
        if name == "free":
            return self.free(e)
        raise UnsupportedConstruct(name, e.line, e.column)

    def format_string(self, e: Call) -> str:
        if not e.args:
            raise UnsupportedConstruct(f"{e.func.name} without a format", e.line, e.column)
        fmt = self.eval(e.args[0])
        if not isinstance(fmt, str):
            raise UnsupportedConstruct(f"{e.func.name} with a computed format", e.line, e.column)
        return fmt

    def printf(self, e: Call) -> int:
        fmt = self.format_string(e)
        args = iter(e.args[1:])
        pending = ""
        written = 0
        pos = 0
        for m in _CONVERSION_RE.finditer(fmt):
            pending += fmt[pos : m.start()]
            pos = m.end()
            flags, width, precision, _, conv = m.groups()
            if conv == "%":
                pending += "%"
                continue
            arg = next(args, None)
            if arg is None:
                raise UnsupportedConstruct("printf with too few arguments", e.line, e.column)
            value = self.eval(arg)
            if conv in "di" and not flags and not width and precision is None:
                if pending:
                    self.outputs.append(pending)
                    written += len(pending)
                    pending = ""
                item = _as_int(value)
                self.outputs.append(item)
                written += len(str(item))
                continue
            pending += self.convert(value, flags, width, precision, conv, arg)
        pending += fmt[pos:]
        if pending:
            self.outputs.append(pending)
            written += len(pending)
        return written

    def convert(self, value: object, flags: str, width: str | None, precision: str | None, conv: str, arg: Expr) -> str:
        if width == "*":
            raise UnsupportedConstruct("'*' field width", arg.line, arg.column)
        spec = "%" + flags + (width or "") + (f".{precision}" if precision is not None else "")
        if conv == "s":
            return (spec + "s") % self.c_string(value, arg)
        if conv == "c":
            return (spec + "c") % chr(_as_int(value) % 0x110000)
        if conv in _INT_CONVERSIONS:
            n = _as_int(value)
            if conv == "u" and n < 0:
                n += 1 << 32
            return (spec + ("d" if conv == "u" else conv)) % n
        return (spec + conv) % float(_as_number(value, arg))

    def c_string(self, value: object, arg: Expr) -> str:
        if isinstance(value, str):
            return value
        if not isinstance(value, Pointer):
            raise UnsupportedConstruct("%s with a non-string argument", arg.line, arg.column)
        chars = []
        offset = value.offset
        while True:
            c = self.load(Pointer(value.block, offset))
            if c == 0:
                return "".join(chars)
            chars.append(chr(_as_int(c)))
            offset += 1

    def scanf(self, e: Call) -> int:
        fmt = self.format_string(e)
        targets = iter(e.args[1:])
        count = 0
        for m in _CONVERSION_RE.finditer(fmt):
            conv = m.group(5)
            if conv == "%":
                continue
            if conv not in "diufeEgG":
                raise UnsupportedConstruct(f"scanf conversion %{conv}", e.line, e.column)
            target = next(targets, None)
            if target is None:
                raise UnsupportedConstruct("scanf with too few arguments", e.line, e.column)
            ptr = self.eval(target)
            if not isinstance(ptr, Pointer):
                raise UnsupportedConstruct("scanf target is not an address", target.line, target.column)
            if self.cursor >= len(self.inputs):
                raise RuntimeFault("read_past_input", f"input #{self.cursor + 1}")
            value = self.inputs[self.cursor]
            self.cursor += 1
            self.store(ptr, float(value) if conv in "feEgG" else _as_int(value))
            count += 1
        return count

    def malloc(self, e: Call) -> Pointer:
        if len(e.args) != 1:
            raise UnsupportedConstruct("malloc arity", e.line, e.column)
        size = _as_int(self.eval(e.args[0]))
        unit, floating = self.element_unit(e.args[0])
        count = size // unit
        if count <= 0:
            raise RuntimeFault("out_of_bounds", f"malloc of {size} bytes")
        block = Block([UNINIT] * count, floating=floating, heap=True, label=f"malloc@{e.line}")
        return Pointer(block)

    def element_unit(self, arg: Expr) -> tuple[int, bool]:
        for node in walk(arg, expansions=True):
            if isinstance(node, SizeofType):
                floating = node.type.pointer == 0 and self.base_type(node.type.spec) in FLOAT_TYPES
                return self.type_size(node.type), floating
            if isinstance(node, SizeofExpr):
                return self.sizeof_expr(node.operand), False
        return 1, False

    def free(self, e: Call) -> int:
        ptr = self.eval(e.args[0]) if len(e.args) == 1 else None
        if not isinstance(ptr, Pointer):
            raise UnsupportedConstruct("free of a non-pointer", e.line, e.column)
        if ptr.block is None:
            return 0
        if not ptr.block.heap or ptr.offset != 0 or ptr.block.freed:
            raise RuntimeFault("use_after_free", f"invalid free of {ptr.block.label}")
        ptr.block.freed = True
        return 0


def _flatten(init: InitList) -> Iterator[Expr]:
    for item in init.items:
        if isinstance(item, InitList):
            yield from _flatten(item)
        else:
            yield item


def _truncate(value: float) -> int:
    if math.isnan(value) or math.isinf(value):
        raise RuntimeFault("out_of_bounds", "non-finite value converted to integer")
    return int(value)


def _as_number(value: object, e: Expr | None = None) -> int | float:
    if isinstance(value, bool):
        return int(value)
    if isinstance(value, (int, float)):
        return value
    if value is None:
        raise RuntimeFault("uninitialized_read", "value of a void call")
    where = f" at {e.line}:{e.column}" if e is not None else ""
    raise UnsupportedConstruct(f"arithmetic on {type(value).__name__}{where}")


def _as_int(value: object) -> int:
    n = _as_number(value)
    return _truncate(n) if isinstance(n, float) else n


def _same_address(a: object, b: object) -> bool:
    if isinstance(a, Pointer) and isinstance(b, Pointer):
        return a.block is b.block and (a.block is None or a.offset == b.offset)
    other = b if isinstance(a, Pointer) else a
    ptr = a if isinstance(a, Pointer) else b
    return other == 0 and ptr.block is None


@contextmanager
def _recursion_headroom(limit: int = 50_000) -> Iterator[None]:
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, limit))
    try:
        yield
    finally:
        sys.setrecursionlimit(old)


def execute(program: Program, inputs: Sequence[int | float] = (), fuel: int = DEFAULT_FUEL) -> IoTrace:
    """Run ``program`` and capture faults and fuel exhaustion in the trace.

    Raises:
        UnsupportedConstruct: for constructs the interpreter cannot model
            (``freopen``, computed formats, ...).
    """
    if fuel <= 0:
        raise ValueError("fuel must be positive")
    machine = _Machine(program, inputs, fuel)
    status, fault, code = "ok", "", 0
    with _recursion_headroom():
        try:
            code = machine.run_main()
        except RuntimeFault as exc:
            status, fault = "fault", exc.kind
            logger.debug("fault in %s: %s", program.source_name, exc)
        except FuelExhausted:
            status = "fuel"
    return IoTrace(
        inputs=tuple(machine.inputs[: machine.cursor]),
        outputs=tuple(machine.outputs),
        status=status,
        fault=fault,
        exit_code=code,
        steps=machine.steps,
    )


def interpret(program: Program, inputs: Sequence[int | float] = (), fuel: int = DEFAULT_FUEL) -> IoTrace:
    """Run ``program`` on ``inputs``; a complete run returns its trace.

    Raises:
        FuelExhausted: when more than ``fuel`` steps are taken.
        RuntimeFault: on a detected runtime fault.
        UnsupportedConstruct: for constructs the interpreter cannot model.
    """
    trace = execute(program, inputs, fuel)
    if trace.status == "fuel":
        raise FuelExhausted(trace.steps)
    if trace.status == "fault":
        raise RuntimeFault(trace.fault)
    return trace
