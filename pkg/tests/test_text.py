"""Unit tests for text utility functions."""

from stylearmor.utils.text import one_line, short_hash, slugify, stable_hash


class TestStableHash:
    """Test cases for stable_hash function."""

    def test_basic_string(self) -> None:
        """Test hashing a basic string."""
        result = stable_hash("hello world")
        assert len(result) == 64
        assert result == "b94d27b9934d3e08a52e52d7da7dabfac484efe37a5380ee9088f7ace2efcde9"

    def test_empty_string(self) -> None:
        """Test hashing an empty string."""
        assert stable_hash("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"

    def test_unicode_string(self) -> None:
        """Test hashing a unicode string."""
        assert len(stable_hash("こんにちは世界")) == 64

    def test_different_inputs(self) -> None:
        """Test that different inputs produce different hashes."""
        assert stable_hash("abc") != stable_hash("abcd")


class TestShortHash:
    """Test cases for short_hash function."""

    def test_prefix(self) -> None:
        """Test that the short hash is a prefix of the full digest."""
        assert short_hash("hello world") == "b94d27b9934d"
        assert short_hash("hello world", 4) == "b94d"


class TestSlugify:
    """Test cases for slugify function."""

    def test_plain(self) -> None:
        """Test that safe names pass through."""
        assert slugify("a01") == "a01"
        assert slugify("author-7.b_c") == "author-7.b_c"

    def test_unsafe_characters(self) -> None:
        """Test that separators and spaces collapse to underscores."""
        assert slugify("author 7/b") == "author_7_b"
        assert slugify("  x  ") == "x"

    def test_empty(self) -> None:
        """Test that an empty name still gives a usable file name."""
        assert slugify("") == "_"
        assert slugify("   ") == "_"


class TestOneLine:
    """Test cases for one_line function."""

    def test_collapse(self) -> None:
        """Test that tabs and newlines become single spaces."""
        assert one_line("  fault\tdiv_zero\n on line 3 ") == "fault div_zero on line 3"

    def test_none_input(self) -> None:
        """Test that None gives an empty string."""
        assert one_line(None) == ""
