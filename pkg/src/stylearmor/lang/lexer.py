from __future__ import annotations

import re
from dataclasses import dataclass

from stylearmor.errors import CSyntaxError

KEYWORDS = frozenset(
    {
        "int",
        "long",
        "float",
        "double",
        "char",
        "void",
        "unsigned",
        "const",
        "typedef",
        "if",
        "else",
        "for",
        "while",
        "do",
        "switch",
        "case",
        "default",
        "return",
        "break",
        "continue",
        "sizeof",
        "struct",
        "union",
        "enum",
        "goto",
        "static",
    }
)

# Longest punctuators first so the alternation is greedy.
_PUNCTUATORS = [
    "<<=", ">>=", "...",
    "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=",
    "+", "-", "*", "/", "%", "<", ">", "=", "!", "~", "&", "|", "^",
    "?", ":", ";", ",", ".", "(", ")", "[", "]", "{", "}",
]

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<newline>\n)
  | (?P<line_comment>//[^\n]*)
  | (?P<block_comment>/\*.*?\*/)
  | (?P<directive>\#[^\n]*(?:\\\n[^\n]*)*)
  | (?P<float>(?:\d+\.\d*|\.\d+)(?:[eE][+-]?\d+)?[fFlL]?|\d+[eE][+-]?\d+[fFlL]?)
  | (?P<int>(?:0[xX][0-9a-fA-F]+|\d+)[uUlL]*)
  | (?P<char>'(?:\\.|[^\\'\n])')
  | (?P<string>"(?:\\.|[^\\"\n])*")
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>"""
    + "|".join(re.escape(p) for p in _PUNCTUATORS)
    + r""")
    """,
    re.VERBOSE | re.DOTALL,
)


@dataclass(frozen=True)
class Token:
    """One lexical token with its 1-based source position."""

    kind: str
    text: str
    line: int
    column: int

    def is_(self, text: str) -> bool:
        return self.kind in ("punct", "keyword") and self.text == text


def tokenize(source: str, *, line: int = 1, column: int = 1) -> list[Token]:
    """Split Mini-C source into tokens.

    Whitespace and comments are dropped. A preprocessor line becomes one
    ``directive`` token holding the whole line (continuations joined), so the
    parser sees directives in source order. The list ends with an ``eof`` token.

    Raises:
        CSyntaxError: on a character that starts no token.
    """
    tokens: list[Token] = []
    pos = 0
    at_line_start = True
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise CSyntaxError(line, column, "a token", source[pos])
        kind = m.lastgroup or ""
        text = m.group(0)
        if kind == "directive" and not at_line_start:
            raise CSyntaxError(line, column, "directive at start of line", "#")
        if kind == "ident" and text in KEYWORDS:
            kind = "keyword"
        if kind not in ("ws", "newline", "line_comment", "block_comment"):
            if kind == "directive":
                text = text.replace("\\\n", " ")
            tokens.append(Token(kind, text, line, column))
            at_line_start = False
        if kind == "newline":
            at_line_start = True
        newlines = m.group(0).count("\n")
        if newlines:
            line += newlines
            column = len(m.group(0)) - m.group(0).rfind("\n")
        else:
            column += len(text)
        pos = m.end()
    tokens.append(Token("eof", "", line, column))
    return tokens


def int_value(text: str) -> int:
    """Value of an integer literal, ignoring ``u``/``l`` suffixes."""
    body = text.rstrip("uUlL")
    return int(body, 16) if body[:2] in ("0x", "0X") else int(body, 10)


_ESCAPES = {"n": "\n", "t": "\t", "0": "\0", "\\": "\\", "'": "'", '"': '"', "r": "\r"}


def unescape(body: str) -> str:
    """Decode C escape sequences in a string or char literal body."""
    out: list[str] = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch == "\\" and i + 1 < len(body):
            out.append(_ESCAPES.get(body[i + 1], body[i + 1]))
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)
