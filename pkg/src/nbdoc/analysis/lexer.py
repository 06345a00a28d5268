"""Lexing of code cells: cleaning, raw tokens, and model sub-tokens."""

from __future__ import annotations

import re
from dataclasses import dataclass


class LexError(Exception):
    pass


# Raw token types consumed by the subset parser.
NAME, NUMBER, STRING, OP, NEWLINE, INDENT, DEDENT, END = (
    "NAME", "NUMBER", "STRING", "OP", "NEWLINE", "INDENT", "DEDENT", "END",
)

KEYWORDS = {
    "import", "from", "as", "def", "return", "for", "in", "if", "elif",
    "else", "lambda", "and", "or", "not", "is", "True", "False", "None",
    # recognized so the parser can reject them as unsupported
    "class", "while", "with", "try", "except", "finally", "async", "await",
    "yield", "global", "nonlocal", "del", "raise", "pass", "break",
    "continue", "assert",
}

_OPERATORS = [
    "**", "//", "==", "!=", "<=", ">=", "->",
    "+=", "-=", "*=", "/=", "%=",
    "+", "-", "*", "/", "%", "@", "<", ">", "=",
    "(", ")", "[", "]", "{", "}", ",", ":", ".", ";",
]

_NAME_RE = re.compile(r"[A-Za-z_]\w*")
_NUMBER_RE = re.compile(r"\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?")

_MAGIC_RE = re.compile(r"^\s*(%%?|!)")

# Unicode punctuation that sometimes leaks in from rich-text sources.
_NON_GRAMMAR = dict.fromkeys(map(ord, "‘’“”–—…·"))


@dataclass
class Tok:
    type: str
    text: str
    line: int


def clean_source(source: str) -> str:
    """Drop magic/shell-escape lines, trailing whitespace, and stray
    non-grammar unicode punctuation. Comments are kept."""
    lines = []
    for line in source.splitlines():
        if _MAGIC_RE.match(line):
            continue
        lines.append(line.translate(_NON_GRAMMAR).rstrip())
    while lines and not lines[-1]:
        lines.pop()
    return "\n".join(lines)


def _read_string(text: str, pos: int, line: int) -> tuple[str, int]:
    quote = text[pos]
    if text[pos:pos + 3] in ('"""', "'''"):
        terminator = text[pos:pos + 3]
        end = text.find(terminator, pos + 3)
        if end < 0:
            raise LexError(f"unterminated string at line {line}")
        return text[pos:end + 3], end + 3
    i = pos + 1
    while i < len(text):
        ch = text[i]
        if ch == "\\":
            i += 2
            continue
        if ch == quote:
            return text[pos:i + 1], i + 1
        if ch == "\n":
            break
        i += 1
    raise LexError(f"unterminated string at line {line}")


def lex(source: str) -> list[Tok]:
    """Tokenize cleaned source into a flat stream with INDENT/DEDENT
    bookkeeping. Comments and blank lines are skipped."""
    tokens: list[Tok] = []
    indents = [0]
    depth = 0  # bracket nesting; newlines inside brackets are implicit joins
    pos = 0
    line = 1
    text = source
    at_line_start = True
    while pos < len(text):
        ch = text[pos]
        if at_line_start and depth == 0:
            # measure indentation of the next logical line
            start = pos
            while pos < len(text) and text[pos] in " \t":
                pos += 1
            if pos >= len(text) or text[pos] in "\n#":
                # blank or comment-only line
                if pos < len(text) and text[pos] == "#":
                    pos = text.find("\n", pos)
                    pos = len(text) if pos < 0 else pos
                if pos < len(text):
                    pos += 1
                    line += 1
                continue
            width = pos - start
            if width > indents[-1]:
                indents.append(width)
                tokens.append(Tok(INDENT, "", line))
            while width < indents[-1]:
                indents.pop()
                tokens.append(Tok(DEDENT, "", line))
            if width != indents[-1]:
                raise LexError(f"inconsistent indentation at line {line}")
            at_line_start = False
            continue
        if ch == "\n":
            if depth == 0 and tokens and tokens[-1].type not in (NEWLINE, INDENT, DEDENT):
                tokens.append(Tok(NEWLINE, "\n", line))
            pos += 1
            line += 1
            if depth == 0:
                at_line_start = True
            continue
        at_line_start = False
        if ch in " \t":
            pos += 1
            continue
        if ch == "\\" and pos + 1 < len(text) and text[pos + 1] == "\n":
            pos += 2
            line += 1
            continue
        if ch == "#":
            pos = text.find("\n", pos)
            pos = len(text) if pos < 0 else pos
            continue
        # abstracted literals survive re-tokenization unchanged
        if text.startswith("<num>", pos):
            tokens.append(Tok(NUMBER, "<num>", line))
            pos += 5
            continue
        if text.startswith("<str>", pos):
            tokens.append(Tok(STRING, "<str>", line))
            pos += 5
            continue
        if ch in "\"'":
            literal, pos = _read_string(text, pos, line)
            line += literal.count("\n")
            tokens.append(Tok(STRING, literal, line))
            continue
        m = _NUMBER_RE.match(text, pos)
        if m and ch.isdigit() or (ch == "." and m):
            tokens.append(Tok(NUMBER, m.group(), line))
            pos = m.end()
            continue
        m = _NAME_RE.match(text, pos)
        if m:
            tokens.append(Tok(NAME, m.group(), line))
            pos = m.end()
            continue
        for op in _OPERATORS:
            if text.startswith(op, pos):
                if op in "([{":
                    depth += 1
                elif op in ")]}":
                    depth = max(0, depth - 1)
                tokens.append(Tok(OP, op, line))
                pos += len(op)
                break
        else:
            raise LexError(f"unexpected character {ch!r} at line {line}")
    if tokens and tokens[-1].type not in (NEWLINE, DEDENT):
        tokens.append(Tok(NEWLINE, "\n", line))
    while len(indents) > 1:
        indents.pop()
        tokens.append(Tok(DEDENT, "", line))
    tokens.append(Tok(END, "", line))
    return tokens


_CAMEL_RE = re.compile(r".+?(?:(?<=[a-z0-9])(?=[A-Z])|(?<=[A-Z])(?=[A-Z][a-z])|$)")


def split_identifier(name: str) -> list[str]:
    """Split an identifier on underscores and camel-case boundaries,
    lowercased. ``LassoCV`` -> [lasso, cv]; ``read_csv`` -> [read, csv]."""
    parts = []
    for chunk in name.split("_"):
        if not chunk:
            continue
        parts.extend(m.group().lower() for m in _CAMEL_RE.finditer(chunk))
    return parts or [name.lower()]


def tokenize_code(source: str) -> list[str]:
    """Model-facing token sequence: identifiers sub-token split, literals
    abstracted to <str>/<num>, operators kept, comments dropped."""
    out: list[str] = []
    for tok in lex(source):
        if tok.type == NAME:
            if tok.text in KEYWORDS:
                out.append(tok.text.lower())
            else:
                out.extend(split_identifier(tok.text))
        elif tok.type == NUMBER:
            out.append("<num>")
        elif tok.type == STRING:
            out.append("<str>")
        elif tok.type == OP:
            out.append(tok.text)
    return out
