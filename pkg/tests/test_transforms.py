"""Unit tests for transform families, the planner and plan files."""

from __future__ import annotations

import pytest

from stylearmor.errors import InternalRewriteFault, NotApplicable, PlanFormatError, UnknownKind
from stylearmor.evaluation import generate_corpus
from stylearmor.lang.interp import interpret
from stylearmor.lang.oracle import check_equivalent
from stylearmor.lang.parser import parse
from stylearmor.lang.render import render
from stylearmor.style.attrs import extract_profile
from stylearmor.style.profile import discrepancies, synthesize
from stylearmor.transforms import (
    TransformPlan,
    TransformStep,
    applicable,
    apply,
    build_plan,
    dump_plan,
    execute_plan,
    kinds,
    load_plan,
    plan_imitation,
    read_plan,
    write_plan,
)
from stylearmor.transforms.base import get_family
from stylearmor.transforms.planner import CONDITIONAL_KINDS, TO_CATEGORY, conversion, rename_step

LOOP = """int main() {
    int s = 0;
    for (int i = 0; i < 3; i++) {
        s += i;
    }
    return s;
}
"""

SWAP = """#include <stdio.h>

void swap_first(int *list) {
    int hold = *(list + 0);
    *(list + 0) = *(list + 1);
    *(list + 1) = hold;
}

int main() {
    int a[2];
    scanf("%d", &a[0]);
    scanf("%d", &a[1]);
    swap_first(a);
    printf("%d %d\\n", a[0], a[1]);
    return 0;
}
"""

CLEAR = """#include <stdio.h>

void clear(int *list) {
    list[0] = 0;
}

int first(int *list) {
    int hold = list[0];
    clear(list);
    return hold;
}

int main() {
    int a[1];
    scanf("%d", &a[0]);
    printf("%d\\n", first(a));
    return 0;
}
"""

SHOW = """#include <stdio.h>

void show(int *list, int n) {
    int hold = list[0];
    n = n + 1;
    printf("%d %d\\n", hold, n);
}

int main() {
    int a[1];
    scanf("%d", &a[0]);
    show(a, 2);
    return 0;
}
"""

PREPROC = """#include <stdio.h>
#define MAXN 100
typedef long long ll;

int limit = 7;

int main() {
    ll x = MAXN;
    printf("%d\\n", x + limit);
    return 0;
}
"""

EXPECTED_RENAME = "step 2 rename_temporaries map=i:j,case_it:k,n:len,st:cakes,ans:cur,pos:flips"


@pytest.fixture
def target(target_programs):
    return synthesize("target", [extract_profile(p) for p in target_programs])


@pytest.fixture
def imitation(pancakes, target):
    """The unverified imitation of the target by the pancake program."""
    disc = discrepancies(extract_profile(pancakes), target)
    return build_plan(pancakes, disc, target)


class TestSteps:
    """Tests for steps and plans."""

    def test_step_text(self):
        step = TransformStep.make(1, "rename_convention", to="camel", site=None)
        assert str(step) == "step 1 rename_convention to=camel"
        assert step.param("to") == "camel"
        assert step.param("site") is None

    def test_with_params(self):
        step = TransformStep.make(20, "while_to_for").with_params(seed=4)
        assert step.params == (("seed", "4"),)

    def test_plan_order(self):
        with pytest.raises(ValueError):
            TransformPlan((TransformStep.make(20, "while_to_for"), TransformStep.make(14, "add_return0")))

    def test_plan_budget(self):
        steps = (TransformStep.make(14, "add_return0"), TransformStep.make(20, "while_to_for"))
        with pytest.raises(ValueError):
            TransformPlan(steps, budget=1)
        plan = TransformPlan(steps)
        assert plan.truncated(1).steps == steps[:1]
        assert plan.truncated(1).budget == 1

    def test_attribute_ids_unique(self):
        remove = TransformStep.make(13, "remove_include", header="a.h")
        steps = (remove, TransformStep.make(13, "add_include", header="b.h"))
        plan = TransformPlan(steps)
        assert plan.attribute_ids == [13]

    def test_kinds_by_attribute(self):
        assert kinds(20) == ["for_to_while", "while_to_for"]
        assert "split_function" in kinds(23)
        assert set(kinds()) >= {"rename_convention", "increment_form", "static_to_dynamic"}

    def test_conversion(self):
        assert conversion(20, "while_loop", "for_loop") == TransformStep.make(20, "while_to_for")
        expected = TransformStep.make(10, "increment_form", to="prefix", **{"from": "postfix"})
        assert conversion(10, "postfix", "prefix") == expected
        assert conversion(20, "for_loop", "for_loop") is None
        assert conversion(21, "ternary", "switch") is None

    def test_rename_step(self):
        step, left = rename_step(2, ["a", "b", "c"], ["b", "x"], taken={"c"})
        assert str(step) == "step 2 rename_temporaries map=a:x"
        assert left == ["c"]


class TestApply:
    """Tests for checked application."""

    def test_unknown_kind(self, pancakes):
        with pytest.raises(UnknownKind):
            apply(pancakes, TransformStep.make(20, "loop_unroll"))

    def test_kind_must_match_attribute(self, pancakes):
        with pytest.raises(NotApplicable):
            apply(pancakes, TransformStep.make(3, "while_to_for"))

    def test_missing_parameter(self, pancakes):
        with pytest.raises(NotApplicable):
            apply(pancakes, TransformStep.make(2, "rename_temporaries"))

    def test_unknown_parameter(self, pancakes):
        with pytest.raises(NotApplicable):
            apply(pancakes, TransformStep.make(20, "while_to_for", speed="fast"))

    def test_site_out_of_range(self, pancakes):
        with pytest.raises(NotApplicable):
            apply(pancakes, TransformStep.make(20, "while_to_for", site=5))

    def test_name_collision(self, pancakes):
        """A rename never reuses a name already in the program."""
        assert not applicable(TransformStep.make(2, "rename_temporaries", map="pos:ans"), pancakes)

    def test_original_untouched(self, pancakes):
        before = render(pancakes)
        apply(pancakes, TransformStep.make(20, "while_to_for"))
        assert render(pancakes) == before

    def test_crash_becomes_rewrite_fault(self, pancakes, monkeypatch):
        """A family that crashes surfaces as InternalRewriteFault, never as a raw error."""

        def crash(ctx, site):
            raise AttributeError("'Ident' object has no attribute 'operand'")

        monkeypatch.setattr(get_family("while_to_for"), "rewrite", crash)
        step = TransformStep.make(20, "while_to_for")
        with pytest.raises(InternalRewriteFault, match="while_to_for: AttributeError"):
            apply(pancakes, step)
        assert not applicable(step, pancakes)


class TestFamilies:
    """Tests for individual rewrite families."""

    def test_for_to_while(self):
        program = parse(LOOP)
        after = apply(program, TransformStep.make(20, "for_to_while"))
        assert render(after) == (
            "int main() {\n    int s = 0;\n    int i = 0;\n    while (i < 3) {\n        s += i;\n        i++;\n"
            "    }\n    return s;\n}\n"
        )
        assert extract_profile(after).get(20).tokens == ["while_loop"]
        assert interpret(after).exit_code == 3

    def test_while_to_for_absorbs_the_step(self):
        program = apply(parse(LOOP), TransformStep.make(20, "for_to_while"))
        back = apply(program, TransformStep.make(20, "while_to_for"))
        assert "for (; i < 3; i++) {" in render(back)
        assert interpret(back).exit_code == 3

    def test_rename_locals_leaves_temporaries(self, pancakes):
        """Renaming the parameter st leaves main's array st alone."""
        after = apply(pancakes, TransformStep.make(3, "rename_locals", map="st:arr"))
        text = render(after)
        assert "int get_wrong_pos(int *arr, int n) {" in text
        assert "if (arr[i] == 0) {" in text
        assert "int st[100];" in text

    def test_rename_convention(self, pancakes):
        after = apply(pancakes, TransformStep.make(1, "rename_convention", to="camel"))
        assert extract_profile(after).get(1).tokens == ["camel"]
        assert "getWrongPos(st, n)" in render(after)

    def test_element_access_round_trip(self, pancakes):
        pointer = apply(pancakes, TransformStep.make(5, "index_to_pointer"))
        assert "if (*(st + i) == 0) {" in render(pointer)
        assert extract_profile(pointer).get(5).tokens == ["pointer_form"]
        back = apply(pointer, TransformStep.make(5, "pointer_to_index"))
        assert render(back) == render(pancakes)

    def test_increment_form(self, pancakes):
        after = apply(pancakes, TransformStep.make(10, "increment_form", to="prefix"))
        text = render(after)
        assert "for (i = n - 1; i >= 0; --i) {" in text
        assert "++ans;" in text
        assert extract_profile(after).get(10).tokens == ["prefix"]

    def test_declaration_lists(self):
        program = parse("int main() {\n    int a, b;\n    a = 1;\n    b = 2;\n    return a + b;\n}\n")
        split = apply(program, TransformStep.make(8, "split_decl_list"))
        assert "    int a;\n    int b;\n" in render(split)
        merged = apply(split, TransformStep.make(8, "merge_decl_list"))
        assert merged.isomorphic(program)

    def test_split_assign_chain(self):
        program = parse("int main() {\n    int a;\n    int b;\n    a = b = 5;\n    return a - b;\n}\n")
        after = apply(program, TransformStep.make(9, "split_assign_chain"))
        assert "    b = 5;\n    a = b;\n" in render(after)
        assert extract_profile(after).get(9).tokens == ["separate"]

    def test_header_in_use_stays(self, pancakes):
        with pytest.raises(NotApplicable):
            apply(pancakes, TransformStep.make(13, "remove_include", header="stdio.h"))

    def test_add_include(self, pancakes):
        after = apply(pancakes, TransformStep.make(13, "add_include", header="math.h"))
        assert render(after).startswith("#include <stdio.h>\n#include <math.h>\n")

    def test_remove_return0(self, pancakes):
        after = apply(pancakes, TransformStep.make(14, "remove_return0"))
        assert extract_profile(after).get(14).tokens == ["implicit_return"]
        assert interpret(after, [1, 1, 1]).exit_code == 0

    def test_split_function_lowers_depth(self, pancakes):
        after = apply(pancakes, TransformStep.make(23, "split_function"))
        assert extract_profile(after).get(23).number < 3
        assert "void split_main(" in render(after)
        assert check_equivalent(pancakes, after, vectors=[[2, 3, 0, 1, 0, 1, 1], [1, 4, 1, 0, 0, 1]]).equivalent


class TestPlanner:
    """Tests for planning an imitation."""

    def test_steps_follow_attribute_order(self, imitation):
        assert imitation.plan.attribute_ids == [2, 20, 23]
        assert [s.kind for s in imitation.plan] == ["rename_temporaries", "while_to_for", "split_function"]
        assert str(imitation.plan.steps[0]) == EXPECTED_RENAME
        assert imitation.skipped == []

    def test_planned_attributes_settled(self, imitation, target):
        """None of the planned attributes is still discrepant."""
        left = discrepancies(extract_profile(imitation.program), target).attribute_ids
        assert not {2, 20, 23} & set(left)

    def test_rendered_result(self, imitation):
        text = render(imitation.program)
        assert "void split_main(" in text
        assert text.index("void split_main(") < text.index("int main(")
        assert "for (*flips = get_wrong_pos(cakes, *len); *flips != -1;) {" in text
        assert "int get_wrong_pos(int *st, int n) {" in text

    def test_semantics_preserved(self, pancakes, imitation):
        inputs = [2, 3, 0, 1, 0, 1, 1]
        assert interpret(imitation.program, inputs).outputs == interpret(pancakes, inputs).outputs

    def test_budget(self, pancakes, target):
        disc = discrepancies(extract_profile(pancakes), target)
        result = build_plan(pancakes, disc, target, budget=1)
        assert result.plan.attribute_ids == [2]
        assert result.plan.budget == 1
        assert build_plan(pancakes, disc, target, budget=0).applied == 0

    def test_verifier_can_veto(self, pancakes, target):
        disc = discrepancies(extract_profile(pancakes), target)
        result = build_plan(pancakes, disc, target, verify=lambda before, after: "vetoed")
        assert result.applied == 0
        assert result.program is pancakes
        assert {a for a, _ in result.skipped} >= {2, 20, 23}

    def test_replay(self, pancakes, imitation):
        replay = execute_plan(pancakes, imitation.plan)
        assert replay.program.isomorphic(imitation.program)

    def test_plan_only(self, pancakes, target, imitation):
        disc = discrepancies(extract_profile(pancakes), target)
        assert plan_imitation(pancakes, disc, target) == imitation.plan


class TestPlanFiles:
    """Tests for plan file reading and writing."""

    def test_dump(self, imitation):
        assert dump_plan(imitation.plan) == f"{EXPECTED_RENAME}\nstep 20 while_to_for\nstep 23 split_function\n"

    def test_write_and_read(self, tmp_path, imitation):
        path = tmp_path / "plans" / "p.plan"
        write_plan(path, imitation.plan)
        assert read_plan(path) == imitation.plan

    def test_load_with_comments_and_skips(self):
        plan = load_plan(
            "# replayed\nbudget 2\nstep 14 remove_return0  # main only\nskip 23 split_function: statement jumps out\n"
        )
        assert plan.budget == 2
        assert plan.steps == (TransformStep(14, "remove_return0"),)
        assert plan.skipped == ((23, "split_function: statement jumps out"),)

    @pytest.mark.parametrize(
        "text",
        [
            "step x while_to_for",
            "step 20",
            "step 20 while_to_for seed",
            "budget 1\nbudget 2",
            "step 20 while_to_for\nstep 14 add_return0",
            "budget 1\nstep 14 add_return0\nstep 20 while_to_for",
            "skip x reason",
            "apply 20 while_to_for",
        ],
    )
    def test_malformed(self, text):
        with pytest.raises(PlanFormatError):
            load_plan(text)

    def test_unknown_kind_surfaces_on_apply(self, pancakes):
        plan = load_plan("step 20 loop_unroll\n")
        with pytest.raises(UnknownKind):
            execute_plan(pancakes, plan)


class TestMemoryOrder:
    """Declarations and initializers never move past a store to the memory they read."""

    def test_first_use_after_pointer_store(self):
        """``hold`` must keep the value read before ``*(list + 0)`` is overwritten."""
        with pytest.raises(NotApplicable):
            apply(parse(SWAP), TransformStep.make(6, "decl_to_first_use"))

    def test_first_use_after_call(self):
        """A call taking the pointer may store through it."""
        with pytest.raises(NotApplicable) as info:
            apply(parse(CLEAR), TransformStep.make(6, "decl_to_first_use"))
        assert "memory" in info.value.reason

    def test_first_use_past_scalar_write(self):
        """Writing an unrelated scalar does not pin a declaration that reads memory."""
        program = parse(SHOW)
        after = apply(program, TransformStep.make(6, "decl_to_first_use"))
        assert "    n = n + 1;\n    int hold = list[0];\n" in render(after)
        assert check_equivalent(program, after, vectors=[[4], [9]]).equivalent

    def test_merge_init_after_call(self):
        """``hold = a[0]`` cannot join its declaration across a call that may store to ``a``."""
        program = parse(
            "#include <stdio.h>\n\nint reset(int *list) {\n    list[0] = 0;\n    return 1;\n}\n\nint main() {\n"
            "    int a[1];\n    int n;\n    scanf(\"%d\", &a[0]);\n    int hold;\n    n = reset(a);\n"
            "    hold = a[0];\n    printf(\"%d %d\\n\", hold, n);\n    return 0;\n}\n"
        )
        with pytest.raises(NotApplicable):
            apply(program, TransformStep.make(7, "merge_init"))


class TestMoreFamilies:
    """Round trips and edge cases of the remaining rewrite families."""

    def test_ternary_and_if(self):
        program = parse(
            "#include <stdio.h>\n\nint main() {\n    int x;\n    int y;\n    scanf(\"%d\", &x);\n"
            "    y = x > 2 ? 1 : 0;\n    printf(\"%d\\n\", y);\n    return 0;\n}\n"
        )
        expanded = apply(program, TransformStep.make(21, "ternary_to_if"))
        assert "    if (x > 2) {\n        y = 1;\n    } else {\n        y = 0;\n    }\n" in render(expanded)
        assert check_equivalent(program, expanded, vectors=[[1], [5]]).equivalent
        back = apply(expanded, TransformStep.make(21, "if_to_ternary"))
        assert back.isomorphic(program)

    def test_if_chain_and_switch(self):
        program = parse(
            "#include <stdio.h>\n\nint main() {\n    int k;\n    scanf(\"%d\", &k);\n"
            "    if (k == 1) {\n        printf(\"%d\\n\", 10);\n    } else if (k == 2) {\n"
            "        printf(\"%d\\n\", 20);\n    } else {\n        printf(\"%d\\n\", 30);\n    }\n"
            "    return 0;\n}\n"
        )
        switched = apply(program, TransformStep.make(21, "if_chain_to_switch"))
        text = render(switched)
        assert "    switch (k) {\n        case 1:\n" in text
        assert "        default:\n" in text
        assert text.count("break;") == 3
        assert check_equivalent(program, switched, vectors=[[1], [2], [7]]).equivalent
        back = apply(switched, TransformStep.make(21, "switch_to_if_chain"))
        assert back.isomorphic(program)

    def test_if_chain_needs_one_variable(self):
        program = parse(
            "int main() {\n    int a = 1;\n    int b = 2;\n    if (a == 1) {\n        a = 3;\n"
            "    } else if (b == 2) {\n        a = 4;\n    }\n    return a;\n}\n"
        )
        with pytest.raises(NotApplicable):
            apply(program, TransformStep.make(21, "if_chain_to_switch"))

    def test_compound_condition(self):
        program = parse(
            "#include <stdio.h>\n\nint main() {\n    int a;\n    int b;\n    scanf(\"%d\", &a);\n"
            "    scanf(\"%d\", &b);\n    if (a > 0 && b > 0) {\n        printf(\"%d\\n\", a + b);\n    }\n"
            "    return 0;\n}\n"
        )
        nested = apply(program, TransformStep.make(22, "split_and_condition"))
        assert "    if (a > 0) {\n        if (b > 0) {\n" in render(nested)
        assert check_equivalent(program, nested, vectors=[[0, 1], [1, 0], [2, 3]]).equivalent
        merged = apply(nested, TransformStep.make(22, "merge_nested_ifs"))
        assert merged.isomorphic(program)

    def test_declaration_placement(self):
        program = parse(
            "#include <stdio.h>\n\nint main() {\n    int n;\n    scanf(\"%d\", &n);\n    int twice = n * 2;\n"
            "    printf(\"%d\\n\", twice);\n    return 0;\n}\n"
        )
        top = apply(program, TransformStep.make(6, "decl_to_scope_start"))
        assert "    int n;\n    int twice;\n    scanf(\"%d\", &n);\n    twice = n * 2;\n" in render(top)
        assert check_equivalent(program, top, vectors=[[3]]).equivalent
        down = apply(top, TransformStep.make(6, "decl_to_first_use"))
        assert "    scanf(\"%d\", &n);\n    int twice;\n    twice = n * 2;\n" in render(down)
        merged = apply(down, TransformStep.make(7, "merge_init"))
        assert merged.isomorphic(program)

    def test_split_init(self):
        program = parse("int main() {\n    int a = 2, b;\n    b = a + 1;\n    return b;\n}\n")
        after = apply(program, TransformStep.make(7, "split_init"))
        assert "    int a, b;\n    a = 2;\n" in render(after)
        assert interpret(after).exit_code == 3

    def test_const_stays_initialized(self):
        program = parse("int main() {\n    const int a = 2;\n    return a;\n}\n")
        with pytest.raises(NotApplicable):
            apply(program, TransformStep.make(7, "split_init"))

    def test_allocation_round_trip(self, pancakes):
        dynamic = apply(pancakes, TransformStep.make(19, "static_to_dynamic"))
        text = render(dynamic)
        assert "int *st = malloc(100 * sizeof(int));" in text
        assert "free(st);" in text
        assert "#include <stdlib.h>" in text
        inputs = [[2, 3, 0, 1, 0, 1, 1], [1, 4, 1, 0, 0, 1]]
        assert check_equivalent(pancakes, dynamic, vectors=inputs).equivalent
        static = apply(dynamic, TransformStep.make(19, "dynamic_to_static"))
        assert "int st[100];" in render(static)
        assert "free(" not in render(static)
        assert check_equivalent(pancakes, static, vectors=inputs).equivalent

    def test_eliminate_typedef(self):
        program = parse(PREPROC)
        after = apply(program, TransformStep.make(11, "eliminate_typedef", alias="ll"))
        text = render(after)
        assert "typedef" not in text
        assert "    long long x = MAXN;" in text
        assert interpret(after).outputs == interpret(program).outputs

    def test_eliminate_macro(self):
        program = parse(PREPROC)
        after = apply(program, TransformStep.make(12, "eliminate_macro", name="MAXN"))
        text = render(after)
        assert "#define" not in text
        assert "    ll x = 100;" in text
        assert interpret(after).outputs == interpret(program).outputs

    def test_rename_global(self):
        after = apply(parse(PREPROC), TransformStep.make(4, "rename_global", map="limit:bound"))
        text = render(after)
        assert "int bound = 7;" in text
        assert "x + bound" in text
        assert "limit" not in text

    def test_inline_constant(self):
        program = parse(PREPROC)
        after = apply(program, TransformStep.make(4, "inline_constant", name="limit"))
        assert "x + 7" in render(after)
        assert extract_profile(after).get(4) is None
        assert interpret(after).outputs == interpret(program).outputs

    def test_rename_typedef_and_macro(self):
        program = parse(PREPROC)
        renamed = apply(program, TransformStep.make(11, "rename_typedef", map="ll:i64"))
        renamed = apply(renamed, TransformStep.make(12, "rename_macro", map="MAXN:CAP"))
        text = render(renamed)
        assert "typedef long long i64;" in text
        assert "#define CAP 100" in text
        assert "    i64 x = CAP;" in text

    def test_hoist_literal(self, pancakes):
        after = apply(pancakes, TransformStep.make(4, "hoist_literal", name="LIMIT", value=1))
        text = render(after)
        assert "const int LIMIT = 1;" in text
        assert "return -LIMIT;" in text
        assert "LIMIT" in extract_profile(after).get(4).tokens
        inputs = [[2, 3, 0, 1, 0, 1, 1], [1, 4, 1, 0, 0, 1]]
        assert check_equivalent(pancakes, after, vectors=inputs).equivalent

    def test_array_sizes_keep_their_literals(self, pancakes):
        with pytest.raises(NotApplicable):
            apply(pancakes, TransformStep.make(12, "introduce_macro", name="CAP", value=100))

    def test_introduce_macro(self, pancakes):
        after = apply(pancakes, TransformStep.make(12, "introduce_macro", name="ZERO", value=0))
        text = render(after)
        assert "#define ZERO 0" in text
        assert "return ZERO;" in text
        assert "ZERO" in extract_profile(after).get(12).tokens
        inputs = [[2, 3, 0, 1, 0, 1, 1], [1, 4, 1, 0, 0, 1]]
        assert check_equivalent(pancakes, after, vectors=inputs).equivalent

    def test_introduce_typedef(self):
        program = apply(parse(PREPROC), TransformStep.make(11, "eliminate_typedef", alias="ll"))
        after = apply(program, TransformStep.make(11, "introduce_typedef", type="long_long", alias="i64"))
        text = render(after)
        assert "typedef long long i64;" in text
        assert "    i64 x = MAXN;" in text
        assert "i64" in extract_profile(after).get(11).tokens

    def test_void_cannot_be_aliased(self, pancakes):
        with pytest.raises(NotApplicable):
            apply(pancakes, TransformStep.make(11, "introduce_typedef", type="void", alias="nothing"))


class TestInline:
    """Tests for inlining split helpers."""

    def test_split_then_inline_restores(self, pancakes):
        split = apply(pancakes, TransformStep.make(23, "split_function"))
        back = apply(split, TransformStep.make(23, "inline_function", name="split_main"))
        assert back.isomorphic(pancakes)

    def test_called_twice(self):
        program = parse(
            "#include <stdio.h>\n\nvoid say(int v) {\n    printf(\"%d\\n\", v);\n}\n\nint main() {\n"
            "    say(1);\n    say(2);\n    return 0;\n}\n"
        )
        with pytest.raises(NotApplicable) as info:
            apply(program, TransformStep.make(23, "inline_function", name="say"))
        assert "called 2 times" in info.value.reason

    @pytest.mark.slow
    def test_generated_programs(self):
        """Split then inline on every generated program keeps its behavior."""
        corpus = generate_corpus(4, 3, 4, seed=2)
        for program, _ in corpus.items:
            try:
                split = apply(program, TransformStep.make(23, "split_function"))
            except (NotApplicable, InternalRewriteFault):
                continue
            helpers = {f.name for f in split.ast.functions} - {f.name for f in program.ast.functions}
            for name in sorted(helpers):
                try:
                    back = apply(split, TransformStep.make(23, "inline_function", name=name))
                except NotApplicable:
                    continue
                assert check_equivalent(program, back, seed=1).equivalent, name


@pytest.mark.slow
class TestGeneratedCorpus:
    """Every parameterless rewrite preserves behavior on generated programs."""

    @pytest.fixture(scope="class")
    def programs(self):
        corpus = generate_corpus(3, 3, 4, seed=0)
        return [p for p, _ in corpus.items]

    def test_render_round_trip(self, programs):
        for program in programs:
            assert parse(render(program)).isomorphic(program)

    @pytest.mark.parametrize(
        "kind", sorted({*TO_CATEGORY.values(), *CONDITIONAL_KINDS.values(), "split_function"})
    )
    def test_semantics_preserved(self, programs, kind):
        step = TransformStep.make(get_family(kind).attribute_id, kind)
        for program in programs:
            try:
                after = apply(program, step)
            except (NotApplicable, InternalRewriteFault):
                continue
            verdict = check_equivalent(program, after, seed=3)
            assert verdict.equivalent, f"{kind}: {verdict.reason}\n{render(after)}"
