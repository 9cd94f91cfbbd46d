"""Unit tests for the Mini-C parser, renderer, interpreter and oracle."""

from __future__ import annotations

import pytest

from conftest import FIXTURES
from stylearmor.errors import CSyntaxError, FuelExhausted, RuntimeFault, UnsupportedConstruct
from stylearmor.lang.diff import diff_lines
from stylearmor.lang.interp import execute, interpret
from stylearmor.lang.oracle import check_equivalent, compare_traces, dump_trace, input_vectors, load_trace
from stylearmor.lang.parser import parse
from stylearmor.lang.render import render


def _main(body: str, prelude: str = "") -> str:
    return f"#include <stdio.h>\n{prelude}\nint main() {{\n{body}\n}}\n"


class TestParse:
    """Tests for parsing and rendering."""

    def test_render_is_canonical(self, pancakes):
        """The fixture is already in canonical layout, so rendering reproduces it."""
        source = (FIXTURES / "pancakes.c").read_text(encoding="utf-8")
        assert render(pancakes) == source

    def test_render_round_trip(self, target_programs):
        """Rendering then parsing gives an isomorphic tree."""
        for program in target_programs:
            again = parse(render(program))
            assert again.isomorphic(program)
            assert render(again) == render(program)

    def test_includes_and_macros(self):
        """Top-level directives are exposed in source order."""
        prelude = "#include <stdlib.h>\n#define N 10\n#define SQ(x) ((x) * (x))"
        program = parse(_main("    return SQ(N) - 100;", prelude))
        assert program.includes == ["stdio.h", "stdlib.h"]
        assert [m.name for m in program.macros] == ["N", "SQ"]
        assert program.macros[1].params == ("x",)
        assert interpret(program).exit_code == 0

    def test_typedefs(self):
        """Typedef aliases map to their base type."""
        program = parse("typedef long long ll;\nint main() {\n    ll x = 3;\n    return x;\n}\n")
        assert program.typedefs == [("ll", "long long")]
        assert interpret(program).exit_code == 3

    def test_syntax_error_position(self):
        """A missing semicolon is reported with its line."""
        with pytest.raises(CSyntaxError) as info:
            parse("int main() {\n    return 0\n}\n")
        assert info.value.line == 3

    @pytest.mark.parametrize("keyword", ["struct", "goto", "do", "static"])
    def test_unsupported_keywords(self, keyword):
        """Constructs outside the subset are rejected by name."""
        src = {
            "struct": "struct point { int x; };\nint main() { return 0; }\n",
            "goto": "int main() {\n    goto done;\n    return 0;\n}\n",
            "do": "int main() {\n    do { } while (0);\n    return 0;\n}\n",
            "static": "static int x;\nint main() { return 0; }\n",
        }[keyword]
        with pytest.raises(UnsupportedConstruct) as info:
            parse(src)
        assert info.value.name == keyword

    def test_oversized_source(self):
        """Sources over the byte limit are refused before tokenizing."""
        with pytest.raises(UnsupportedConstruct):
            parse(_main("    return 0;"), max_bytes=10)

    def test_undeclared_name(self):
        """Every identifier must resolve."""
        with pytest.raises(CSyntaxError):
            parse(_main("    return missing;"))

    def test_symbols(self, pancakes):
        """The symbol table records kind and block depth."""
        by_name = {}
        for sym in pancakes.symbols.values():
            by_name.setdefault(sym.name, []).append(sym)
        assert {s.kind for s in by_name["get_wrong_pos"]} == {"function"}
        assert {(s.kind, s.depth) for s in by_name["case_num"]} == {("local", 0)}
        assert {(s.kind, s.depth) for s in by_name["n"]} == {("param", 0), ("local", 1)}


class TestInterpreter:
    """Tests for the tree-walking interpreter."""

    def test_pancakes(self, pancakes):
        """Two test cases: three flips, then none."""
        trace = interpret(pancakes, [2, 3, 0, 1, 0, 1, 1])
        assert trace.status == "ok"
        assert trace.exit_code == 0
        assert trace.outputs == ("Case #", 1, ": ", 3, "\n", "Case #", 2, ": ", 0, "\n")
        assert trace.inputs == (2, 3, 0, 1, 0, 1, 1)

    def test_formatted_printf_is_text(self):
        """Only plain %d items are kept as integers."""
        trace = interpret(parse(_main('    printf("%3d|%d\\n", 7, 8);\n    return 0;')))
        assert trace.outputs == ("  7|", 8, "\n")

    @pytest.mark.parametrize(
        ("source", "fault"),
        [
            (_main("    int a = 0;\n    printf(\"%d\\n\", 1 / a);\n    return 0;"), "div_zero"),
            (_main("    int x;\n    scanf(\"%d\", &x);\n    return 0;"), "read_past_input"),
            (_main("    int a[3];\n    a[3] = 1;\n    return 0;"), "out_of_bounds"),
            (_main("    int x;\n    printf(\"%d\\n\", x);\n    return 0;"), "uninitialized_read"),
            (_main("    return f(0);", "int f(int n) {\n    return f(n + 1);\n}\n"), "stack_overflow"),
            (
                "#include <stdlib.h>\nint main() {\n    int *p = malloc(4 * sizeof(int));\n    free(p);\n"
                "    p[0] = 1;\n    return 0;\n}\n",
                "use_after_free",
            ),
        ],
    )
    def test_faults(self, source, fault):
        """Each runtime fault kind is detected and reported in the trace."""
        trace = execute(parse(source))
        assert trace.status == "fault"
        assert trace.fault == fault
        with pytest.raises(RuntimeFault) as info:
            interpret(parse(source))
        assert info.value.kind == fault

    def test_fuel(self):
        """An endless loop stops when the fuel runs out."""
        program = parse(_main("    while (1) {\n    }\n    return 0;"))
        assert execute(program, fuel=500).status == "fuel"
        with pytest.raises(FuelExhausted):
            interpret(program, fuel=500)

    def test_fuel_must_be_positive(self, pancakes):
        """Zero fuel is a parameter error."""
        with pytest.raises(ValueError):
            execute(pancakes, fuel=0)

    def test_missing_main(self):
        """A program without main cannot run."""
        with pytest.raises(UnsupportedConstruct):
            execute(parse("int f() {\n    return 1;\n}\n"))

    def test_exit_code(self):
        """main's return value is the exit code."""
        assert interpret(parse(_main("    return 7;"))).exit_code == 7

    def test_unknown_fault_kind(self):
        """RuntimeFault only accepts known kinds."""
        with pytest.raises(ValueError):
            RuntimeFault("segfault")


class TestOracle:
    """Tests for the semantics oracle."""

    def test_input_vectors_are_seeded(self):
        """Same seed, same vectors; values stay in range."""
        a = input_vectors(3, count=4, length=8, max_value=9)
        assert a == input_vectors(3, count=4, length=8, max_value=9)
        assert len(a) == 4 and all(len(v) == 8 for v in a)
        assert all(0 <= x <= 9 for v in a for x in v)
        assert a != input_vectors(4, count=4, length=8, max_value=9)

    def test_same_algorithm_is_equivalent(self, pancakes, target_programs):
        """A differently styled solution of the same task passes."""
        verdict = check_equivalent(pancakes, target_programs[0], seed=1)
        assert verdict.equivalent
        assert verdict.label == "equivalent"

    def test_divergence(self, pancakes):
        """Counting flips twice changes the output."""
        source = render(pancakes).replace("ans++;", "ans += 2;")
        verdict = check_equivalent(pancakes, parse(source), vectors=[[1, 3, 0, 1, 0]])
        assert not verdict.equivalent
        assert verdict.label.startswith("diverged:")

    def test_fuel_prefix_rule(self):
        """Two fuel-limited runs agree when one output is a prefix of the other."""
        a = load_trace('# status fuel\n# exit 0\n# inputs\n1\n"x"\n')
        b = load_trace("# status fuel\n# exit 0\n# inputs\n1\n")
        assert compare_traces(a, b).equivalent
        c = load_trace("# status fuel\n# exit 0\n# inputs\n2\n")
        assert not compare_traces(a, c).equivalent

    def test_fault_kinds_must_match(self):
        """Different fault kinds diverge even with equal outputs."""
        a = load_trace("# status fault div_zero\n# exit 0\n# inputs\n")
        b = load_trace("# status fault out_of_bounds\n# exit 0\n# inputs\n")
        assert compare_traces(a, b).reason == "fault div_zero vs out_of_bounds"

    def test_trace_file(self, pancakes):
        """A dumped trace loads back equal, apart from the step count."""
        trace = execute(pancakes, [1, 2, 0, 1])
        loaded = load_trace(dump_trace(trace))
        assert loaded.outputs == trace.outputs
        assert loaded.inputs == trace.inputs
        assert (loaded.status, loaded.fault, loaded.exit_code) == (trace.status, trace.fault, trace.exit_code)


class TestDiffLines:
    """Tests for the changed-line count."""

    def test_identical(self):
        assert diff_lines("a\nb\n", "a\nb\n") == 0

    def test_replacement_counts_once(self):
        """A modified line costs one, like an insertion."""
        assert diff_lines("a\nb\nc", "a\nx\nc") == 1
        assert diff_lines("a\nc", "a\nb\nc") == 1

    def test_symmetric(self):
        left, right = "a\nb\nc\nd", "x\na\nc\ny\nz"
        assert diff_lines(left, right) == diff_lines(right, left)

    def test_from_empty(self):
        assert diff_lines("", "a\nb") == 2
