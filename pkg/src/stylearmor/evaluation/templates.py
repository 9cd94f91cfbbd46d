"""Task templates: small I/O programs written out in a given archetype.

A template only decides *what* the program does; every stylistic choice
(naming, loops, increments, declarations, allocation, conditionals) goes
through :class:`Emitter`, which spells it the archetype's way.
"""

from __future__ import annotations

import re
from collections.abc import Callable, Iterator
from contextlib import contextmanager
from dataclasses import dataclass

from stylearmor.evaluation.archetypes import Archetype

CAPACITY = 100
WIDE = "wide"

_ATOM_RE = re.compile(r"^\w+$")


@dataclass(frozen=True)
class Var:
    name: str
    type: str = "int"
    init: str | None = None
    array: bool = False


def _atom(expr: str) -> str:
    return expr if _ATOM_RE.match(expr) else f"({expr})"


class Emitter:
    """Line-oriented C writer bound to one archetype."""

    def __init__(self, archetype: Archetype) -> None:
        self.archetype = archetype
        self.lines: list[str] = []
        self.depth = 0
        self.uses_wide = False
        self.uses_bound = False
        self._frees: list[list[str]] = []

    # -- names and expressions ---------------------------------------------

    def n(self, role: str) -> str:
        return self.archetype.name(role)

    @property
    def i(self) -> str:
        return self.archetype.indices[0]

    @property
    def j(self) -> str:
        return self.archetype.indices[1]

    @property
    def wide(self) -> str:
        self.uses_wide = True
        return self.archetype.wide_alias or "long long"

    @property
    def cap(self) -> str:
        if self.archetype.bound_macro is None:
            return str(CAPACITY)
        self.uses_bound = True
        return self.archetype.bound_macro

    def type_name(self, type_: str) -> str:
        return self.wide if type_ == WIDE else type_

    def at(self, array: str, index: str) -> str:
        if self.archetype.access == "index_form":
            return f"{array}[{index}]"
        return f"*({array} + {_atom(index)})"

    def addr(self, array: str, index: str) -> str:
        if self.archetype.access == "index_form":
            return f"&{array}[{index}]"
        return f"{array} + {_atom(index)}"

    def inc(self, var: str, op: str = "+") -> str:
        form = self.archetype.increment
        if form == "postfix":
            return f"{var}{op}{op}"
        if form == "prefix":
            return f"{op}{op}{var}"
        if form == "plus_assign":
            return f"{var} {op}= 1"
        return f"{var} = {var} {op} 1"

    # -- statements ----------------------------------------------------------

    def line(self, text: str) -> None:
        self.lines.append("    " * self.depth + text if text else "")

    @contextmanager
    def block(self, header: str) -> Iterator[None]:
        self.line(header + " {")
        self.depth += 1
        yield
        self.depth -= 1
        self.line("}")

    def declare(self, *variables: Var) -> None:
        """Declarations at the start of the current block, then any separate initializers."""
        later: list[str] = []
        groups: dict[str, list[str]] = {}
        for v in variables:
            type_ = self.type_name(v.type)
            init = v.init
            if v.array and self.archetype.allocation == "static_array":
                text = f"{v.name}[{self.cap}]"
            elif v.array:
                text, init = f"*{v.name}", f"malloc({self.cap} * sizeof({type_}))"
                self._frees[-1].append(v.name)
            else:
                text = v.name
            if init is not None and self.archetype.init == "init_in_decl":
                text += f" = {init}"
            elif init is not None:
                later.append(f"{v.name} = {init};")
            groups.setdefault(type_, []).append(text)
        for type_, declarators in groups.items():
            if self.archetype.same_type == "combined":
                self.line(f"{type_} {', '.join(declarators)};")
            else:
                for d in declarators:
                    self.line(f"{type_} {d};")
        for text in later:
            self.line(text)

    @contextmanager
    def function(self, signature: str, *, main: bool = False) -> Iterator[None]:
        self._frees.append([])
        with self.block(signature):
            yield
            for name in self._frees.pop():
                self.line(f"free({name});")
            if main and self.archetype.main_return == "explicit_return0":
                self.line("return 0;")
        self.line("")

    @contextmanager
    def loop(self, init: str, cond: str, step: str) -> Iterator[None]:
        if self.archetype.loop == "for_loop":
            with self.block(f"for ({init}; {cond}; {step})"):
                yield
            return
        self.line(f"{init};")
        with self.block(f"while ({cond})"):
            yield
            self.line(f"{step};")

    @contextmanager
    def when(self, cond: str) -> Iterator[None]:
        with self.block(f"if ({cond})"):
            yield

    @contextmanager
    def when_both(self, first: str, second: str) -> Iterator[None]:
        if self.archetype.compound_if == "logical_and_compound":
            with self.when(f"{first} && {second}"):
                yield
            return
        with self.when(first), self.when(second):
            yield

    def _if_else(self, cond: str, then: str, other: str) -> None:
        self.line(f"if ({cond}) {{")
        self.line(f"    {then}")
        self.line("} else {")
        self.line(f"    {other}")
        self.line("}")

    def choose(self, target: str, cond: str, then: str, other: str) -> None:
        if self.archetype.conditional == "ternary":
            self.line(f"{target} = {cond} ? {then} : {other};")
        else:
            self._if_else(cond, f"{target} = {then};", f"{target} = {other};")

    def choose_return(self, cond: str, then: str, other: str) -> None:
        if self.archetype.conditional == "ternary":
            self.line(f"return {cond} ? {then} : {other};")
        else:
            self._if_else(cond, f"return {then};", f"return {other};")

    def source(self) -> str:
        head = [f"#include <{h}>" for h in sorted(self.archetype.headers)]
        if self.uses_bound:
            head.append(f"#define {self.archetype.bound_macro} {CAPACITY}")
        if self.uses_wide and self.archetype.wide_alias:
            head.append(f"typedef long long {self.archetype.wide_alias};")
        return "\n".join([*head, "", *self.lines]).rstrip() + "\n"


# ---------------------------------------------------------------------------
# Tasks
# ---------------------------------------------------------------------------


def _read_count(e: Emitter, count: str, bound: int, *, at_least_one: bool = False) -> None:
    e.line(f'scanf("%d", &{count});')
    e.line(f"{count} = {count} % {bound}" + (" + 1;" if at_least_one else ";"))


def _read_array(e: Emitter, data: str, count: str) -> None:
    with e.loop(f"{e.i} = 0", f"{e.i} < {count}", e.inc(e.i)):
        e.line(f'scanf("%d", {e.addr(data, e.i)});')


def _array_sum(e: Emitter, bound: int) -> None:
    count, total, data, i = e.n("count"), e.n("total"), e.n("data"), e.i
    with e.function("int main()", main=True):
        e.declare(Var(count), Var(i), Var(data, array=True), Var(total, WIDE, "0"))
        _read_count(e, count, bound)
        _read_array(e, data, count)
        with e.loop(f"{i} = 0", f"{i} < {count}", e.inc(i)):
            e.line(f"{total} = {total} + {e.at(data, i)};")
        e.line(f'printf("%lld\\n", {total});')


def _max_spread(e: Emitter, bound: int) -> None:
    count, data, best, gap, spread, i = e.n("count"), e.n("data"), e.n("best"), e.n("gap"), e.n("spread"), e.i
    with e.function("int main()", main=True):
        e.declare(Var(count), Var(i), Var(best), Var(gap), Var(spread, init="0"), Var(data, array=True))
        _read_count(e, count, bound, at_least_one=True)
        _read_array(e, data, count)
        e.line(f"{best} = {e.at(data, '0')};")
        with e.loop(f"{i} = 0", f"{i} < {count}", e.inc(i)):
            item = e.at(data, i)
            with e.when(f"{item} > {best}"):
                e.line(f"{best} = {item};")
            e.choose(gap, f"{item} > 50", f"{item} - 50", f"50 - {item}")
            e.line(f"{spread} = {spread} + {gap};")
        e.line(f'printf("%d %d\\n", {best}, {spread});')


def _bubble_sort(e: Emitter, bound: int) -> None:
    count, data, swap, i, j = e.n("count"), e.n("data"), e.n("swap"), e.i, e.j
    with e.function("int main()", main=True):
        e.declare(Var(count), Var(i), Var(j), Var(data, array=True))
        _read_count(e, count, bound)
        _read_array(e, data, count)
        with e.loop(f"{i} = 0", f"{i} < {count}", e.inc(i)):
            with e.loop(f"{j} = 0", f"{j} < {count} - {i} - 1", e.inc(j)):
                here, there = e.at(data, j), e.at(data, f"{j} + 1")
                with e.when(f"{here} > {there}"):
                    e.declare(Var(swap, init=here))
                    e.line(f"{here} = {there};")
                    e.line(f"{there} = {swap};")
        with e.loop(f"{i} = 0", f"{i} < {count}", e.inc(i)):
            e.line(f'printf("%d ", {e.at(data, i)});')
        e.line('printf("\\n");')


def _gcd_pairs(e: Emitter, bound: int) -> None:
    fn, a, b, cases, i = e.n("gcd_fn"), e.n("value"), e.n("other"), e.n("cases"), e.i
    with e.function(f"int {fn}(int {a}, int {b})"):
        e.choose_return(f"{b} == 0", a, f"{fn}({b}, {a} % {b})")
    with e.function("int main()", main=True):
        e.declare(Var(cases), Var(i), Var(a), Var(b))
        _read_count(e, cases, bound)
        with e.loop(f"{i} = 0", f"{i} < {cases}", e.inc(i)):
            e.line(f'scanf("%d %d", &{a}, &{b});')
            e.line(f'printf("%d\\n", {fn}({a}, {b}));')


def _range_count(e: Emitter, bound: int) -> None:
    low, high, count, current, hits, i = e.n("low"), e.n("high"), e.n("count"), e.n("current"), e.n("hits"), e.i
    with e.function("int main()", main=True):
        e.declare(Var(low), Var(high), Var(count), Var(i), Var(current), Var(hits, init="0"))
        e.line(f'scanf("%d %d %d", &{low}, &{high}, &{count});')
        e.line(f"{count} = {count} % {bound};")
        with e.loop(f"{i} = 0", f"{i} < {count}", e.inc(i)):
            e.line(f'scanf("%d", &{current});')
            with e.when_both(f"{current} >= {low}", f"{current} <= {high}"):
                e.line(f"{e.inc(hits)};")
        e.line(f'printf("%d\\n", {hits});')


def _digit_sums(e: Emitter, bound: int) -> None:
    cases, current, digits, rest, i = e.n("cases"), e.n("current"), e.n("digits"), e.n("rest"), e.i
    with e.function("int main()", main=True):
        e.declare(Var(cases), Var(i), Var(current), Var(digits), Var(rest))
        _read_count(e, cases, bound)
        with e.loop(f"{i} = 0", f"{i} < {cases}", e.inc(i)):
            e.line(f'scanf("%d", &{current});')
            e.line(f"{digits} = 0;")
            with e.loop(f"{rest} = {current}", f"{rest} > 0", f"{rest} = {rest} / 10"):
                e.line(f"{digits} = {digits} + {rest} % 10;")
            e.line(f'printf("%d\\n", {digits});')


def _range_sums(e: Emitter, bound: int) -> None:
    count, queries, data, total = e.n("count"), e.n("queries"), e.n("data"), e.n("total")
    left, right, swap, i, j = e.n("left"), e.n("right"), e.n("swap"), e.i, e.j
    with e.function("int main()", main=True):
        e.declare(
            Var(count), Var(queries), Var(i), Var(j), Var(left), Var(right), Var(data, array=True), Var(total, WIDE)
        )
        _read_count(e, count, bound, at_least_one=True)
        _read_array(e, data, count)
        _read_count(e, queries, bound)
        with e.loop(f"{i} = 0", f"{i} < {queries}", e.inc(i)):
            e.line(f'scanf("%d %d", &{left}, &{right});')
            e.line(f"{left} = {left} % {count};")
            e.line(f"{right} = {right} % {count};")
            with e.when(f"{left} > {right}"):
                e.declare(Var(swap, init=left))
                e.line(f"{left} = {right};")
                e.line(f"{right} = {swap};")
            e.line(f"{total} = 0;")
            with e.loop(f"{j} = {left}", f"{j} <= {right}", e.inc(j)):
                e.line(f"{total} = {total} + {e.at(data, j)};")
            e.line(f'printf("%lld\\n", {total});')


def _prime_count(e: Emitter, bound: int) -> None:
    fn, cand, cases, current, found, i = e.n("prime_fn"), e.n("cand"), e.n("cases"), e.n("current"), e.n("found"), e.i
    with e.function(f"int {fn}(int {cand})"):
        e.declare(Var(i))
        with e.when(f"{cand} < 2"):
            e.line("return 0;")
        with e.loop(f"{i} = 2", f"{i} * {i} <= {cand}", e.inc(i)):
            with e.when(f"{cand} % {i} == 0"):
                e.line("return 0;")
        e.line("return 1;")
    with e.function("int main()", main=True):
        e.declare(Var(cases), Var(i), Var(current), Var(found, init="0"))
        _read_count(e, cases, bound)
        with e.loop(f"{i} = 0", f"{i} < {cases}", e.inc(i)):
            e.line(f'scanf("%d", &{current});')
            with e.when(f"{fn}({current})"):
                e.line(f"{e.inc(found)};")
        e.line(f'printf("%d\\n", {found});')


def _reverse(e: Emitter, bound: int) -> None:
    count, data, i = e.n("count"), e.n("data"), e.i
    with e.function("int main()", main=True):
        e.declare(Var(count), Var(i), Var(data, array=True))
        _read_count(e, count, bound)
        _read_array(e, data, count)
        with e.loop(f"{i} = {count} - 1", f"{i} >= 0", e.inc(i, "-")):
            e.line(f'printf("%d\\n", {e.at(data, i)});')


@dataclass(frozen=True)
class TaskTemplate:
    """``inputs`` are the reference vectors every rendering must run cleanly on."""

    name: str
    write: Callable[[Emitter, int], None]
    inputs: tuple[tuple[int, ...], ...]


TEMPLATES: tuple[TaskTemplate, ...] = (
    TaskTemplate("array_sum", _array_sum, ((5, 3, 1, 4, 1, 5), (0,), (3, 100, 0, 7))),
    TaskTemplate("max_spread", _max_spread, ((4, 10, 60, 30, 90, 5), (0, 50), (2, 0, 100, 49))),
    TaskTemplate("bubble_sort", _bubble_sort, ((5, 9, 3, 7, 1, 5), (1, 4), (3, 2, 2, 1))),
    TaskTemplate("gcd_pairs", _gcd_pairs, ((3, 12, 18, 7, 5, 0, 9), (1, 0, 0), (0,))),
    TaskTemplate("range_count", _range_count, ((10, 50, 5, 5, 10, 30, 50, 90), (0, 0, 2, 0, 1))),
    TaskTemplate("digit_sums", _digit_sums, ((3, 123, 0, 99), (1, 7))),
    TaskTemplate("range_sums", _range_sums, ((4, 1, 2, 3, 4, 5, 2, 0, 4, 3, 1), (0, 7, 1, 0, 0))),
    TaskTemplate("prime_count", _prime_count, ((5, 2, 3, 4, 17, 1), (0,))),
    TaskTemplate("reverse", _reverse, ((4, 1, 2, 3, 4), (0,))),
)


def bound_for(variant: int) -> int:
    """Input-size bound of a variant; distinct variants give distinct programs."""
    return 10 + variant


def render_task(template: TaskTemplate, archetype: Archetype, variant: int = 0) -> str:
    e = Emitter(archetype)
    template.write(e, bound_for(variant))
    return e.source()
