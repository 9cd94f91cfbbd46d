"""Unit tests for style attributes, naming conventions and profiles."""

from __future__ import annotations

import numpy as np
import pytest

from stylearmor.errors import EmptyInput, ProfileFormatError
from stylearmor.lang.parser import parse
from stylearmor.style import naming
from stylearmor.style.attrs import (
    CATALOG,
    NAME_SET,
    NUMERIC,
    TRANSFORMABLE_IDS,
    AttributeValue,
    StyleProfile,
    applicable_attributes,
    extract_profile,
)
from stylearmor.style.formats import dump_profile, load_profile
from stylearmor.style.profile import (
    AuthorProfile,
    discrepancies,
    dump_author_profile,
    load_author_profile,
    synthesize,
)


@pytest.fixture
def target(target_programs):
    """Author profile synthesized from both target programs."""
    return synthesize("target", [extract_profile(p) for p in target_programs])


class TestCatalog:
    """Tests for the attribute catalog."""

    def test_ids(self):
        assert sorted(CATALOG) == [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 17, 19, 20, 21, 22, 23]

    def test_only_stream_redirection_is_fixed(self):
        assert set(CATALOG) - TRANSFORMABLE_IDS == {17}

    def test_depth_is_the_only_numeric(self):
        assert [a.id for a in CATALOG.values() if a.kind == NUMERIC] == [23]


class TestNaming:
    """Tests for naming convention classification and conversion."""

    @pytest.mark.parametrize(
        ("name", "expected"),
        [
            ("get_wrong_pos", naming.UNDERSCORE),
            ("getWrongPos", naming.CAMEL),
            ("GetWrongPos", naming.PASCAL),
            ("_tmp", naming.LEADING_UNDERSCORE),
            ("pos", None),
            ("MAX", None),
        ],
    )
    def test_classify(self, name, expected):
        assert naming.classify(name) == expected

    def test_convert(self):
        assert naming.convert("get_wrong_pos", naming.CAMEL) == "getWrongPos"
        assert naming.convert("getWrongPos", naming.UNDERSCORE) == "get_wrong_pos"
        assert naming.convert("caseNum", naming.PASCAL) == "CaseNum"
        assert naming.convert("caseNum", naming.LEADING_UNDERSCORE) == "_case_num"

    def test_single_word_cannot_carry_a_convention(self):
        assert naming.convert("pos", naming.CAMEL) is None

    def test_unknown_convention(self):
        with pytest.raises(ValueError):
            naming.convert("pos", "kebab")


class TestExtraction:
    """Tests for per-program extraction on the pancake program."""

    def test_applicable(self, pancakes):
        """Every attribute with at least one witness site counts.

        Besides names, loops and depth, the program shows declaration placement
        (#6), initialization (#7), declaration lists (#8), increments (#10), its
        header (#13), main's final return (#14) and a fixed-size array (#19).
        Globals, chained assignment, aliases, macros, stream redirection,
        conditionals and compound conditions have no sites.
        """
        assert applicable_attributes(pancakes) == {1, 2, 3, 5, 6, 7, 8, 10, 13, 14, 19, 20, 23}

    def test_values(self, pancakes):
        profile = extract_profile(pancakes)
        assert profile.get(23).number == 3.0
        assert profile.get(1).entries == (("underscore_separated", 3),)
        assert profile.get(2).entries == (("i", 2), ("case_it", 1), ("n", 1), ("st", 1), ("ans", 1), ("pos", 1))
        assert profile.get(3).token_set == {"st", "n", "i", "case_num", "get_wrong_pos"}
        assert profile.get(3).frequency("get_wrong_pos") == 2
        assert profile.get(20).entries == (("for_loop", 4), ("while_loop", 1))
        assert profile.get(13).tokens == ["stdio.h"]
        assert profile.get(14).tokens == ["explicit_return0"]
        assert profile.get(10).tokens == ["postfix"]
        assert profile.get(19).tokens == ["static_array"]

    def test_other_attributes(self):
        """Globals, macros, typedefs, chained assignment and compound ifs are found."""
        src = (
            "#include <stdio.h>\n#define N 4\ntypedef long long ll;\nint total, seen;\n"
            "int main() {\n    ll a;\n    ll b;\n    a = b = N;\n"
            "    if (a > 0 && b > 0) {\n        total = a > b ? a : b;\n    } else {\n        seen = 1;\n    }\n"
            "    freopen(\"in.txt\", \"r\", stdin);\n    return 0;\n}\n"
        )
        profile = extract_profile(parse(src))
        assert profile.get(4).token_set == {"total", "seen"}
        assert profile.get(8).token_set == {"combined", "separate"}
        assert profile.get(9).tokens == ["chained"]
        assert profile.get(11).token_set == {"ll"}
        assert profile.get(12).token_set == {"N"}
        assert profile.get(17).tokens == ["freopen"]
        assert profile.get(21).token_set == {"if_else", "ternary"}
        assert profile.get(22).tokens == ["logical_and_compound"]

    def test_ties_keep_first_occurrence(self):
        value = AttributeValue.from_sites(NAME_SET, ["b", "a", "b", "c", "a"])
        assert value.entries == (("b", 2), ("a", 2), ("c", 1))
        assert value.total == 5


class TestProfiles:
    """Tests for author profiles and discrepancy sets."""

    def test_synthesize(self, target):
        assert target.support == 2
        assert target.get(23).number == 2.0
        assert target.get(20).tokens == ["for_loop"]
        assert target.get(2).tokens == ["j", "k", "len", "cakes", "cur", "flips", "last", "total"]

    def test_synthesize_nothing(self):
        with pytest.raises(EmptyInput):
            synthesize("nobody", [])

    def test_discrepancies(self, pancakes, target):
        disc = discrepancies(extract_profile(pancakes), target)
        assert disc.attribute_ids == [2, 20, 23]

    def test_tau_tolerates_small_depth_gaps(self, pancakes, target):
        assert discrepancies(extract_profile(pancakes), target, tau=1.0).attribute_ids == [2, 20]

    def test_negative_tau(self, pancakes, target):
        with pytest.raises(ValueError):
            discrepancies(extract_profile(pancakes), target, tau=-0.5)

    def test_own_profile_has_no_discrepancies(self, pancakes):
        profile = extract_profile(pancakes)
        assert len(discrepancies(profile, synthesize("me", [profile]))) == 0

    def test_discrepancies_match_their_definition(self):
        """Random profiles: discrepant iff absent from the target, past tau, or not a subset."""
        rng = np.random.default_rng(0)
        ids = sorted(CATALOG)
        words = ("a", "b", "c", "d")

        def draw(attribute_id: int) -> AttributeValue:
            kind = CATALOG[attribute_id].kind
            if kind == NUMERIC:
                return AttributeValue.numeric(float(rng.integers(0, 4)))
            picked = [w for w in words if rng.random() < 0.5] or ["a"]
            return AttributeValue(kind, entries=tuple((w, int(rng.integers(1, 3))) for w in picked))

        for _ in range(1000):
            mine = StyleProfile({i: draw(i) for i in ids if rng.random() < 0.6})
            theirs = AuthorProfile("t", {i: draw(i) for i in ids if rng.random() < 0.6}, 1)
            tau = float(rng.choice([0.0, 0.5, 1.0, 2.0]))
            expected = []
            for i in sorted(mine.values):
                a, b = mine.get(i), theirs.get(i)
                if i == 17:
                    continue
                if b is None:
                    expected.append(i)
                elif a.kind == NUMERIC:
                    if abs(a.number - b.number) > tau:
                        expected.append(i)
                elif not set(a.tokens) <= set(b.tokens):
                    expected.append(i)
            assert discrepancies(mine, theirs, tau).attribute_ids == expected

    def test_stream_redirection_never_discrepant(self, target):
        program = parse('#include <stdio.h>\nint main() {\n    freopen("a", "r", stdin);\n    return 0;\n}\n')
        assert 17 not in discrepancies(extract_profile(program), target).attribute_ids


class TestProfileFiles:
    """Tests for profile file reading and writing."""

    def test_load(self):
        profile = load_profile("# program p.c\nattr 20 set for_loop:3,while_loop:1\nattr 23 numeric 2.5\n")
        assert profile.program_ref == "p.c"
        assert profile.get(20).entries == (("for_loop", 3), ("while_loop", 1))
        assert profile.get(23).number == 2.5

    def test_dump_format(self, pancakes):
        text = dump_profile(extract_profile(pancakes))
        assert "attr 20 set for_loop:4,while_loop:1" in text.splitlines()
        assert "attr 23 numeric 3" in text.splitlines()
        assert load_profile(text).values == extract_profile(pancakes).values

    @pytest.mark.parametrize(
        "text",
        [
            "attr 99 set a:1",
            "attr 20 set for_loop:0",
            "attr 20 set for_loop",
            "attr 23 set x:1",
            "attr 20 numeric 3",
            "attr 23 numeric deep",
            "attr 20 set for_loop:1\nattr 20 set while_loop:1",
            "profile 20",
        ],
    )
    def test_malformed(self, text):
        with pytest.raises(ProfileFormatError):
            load_profile(text)

    def test_author_profile_file(self, target):
        text = dump_author_profile(target)
        assert text.startswith("author target\nsupport 2\n")
        assert load_author_profile(text) == target

    def test_author_profile_needs_header(self):
        with pytest.raises(ProfileFormatError):
            load_author_profile("attr 23 numeric 1\n")
