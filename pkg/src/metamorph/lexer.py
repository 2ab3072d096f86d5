"""Tokenizer for MethodLang source text.

Comments and whitespace are discarded. Keywords lex with their own kind
(e.g. kind "if"); punctuation uses the operator text as its kind, so the
parser can match on literal token kinds.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


KEYWORDS = frozenset(
    {
        "if", "else", "while", "for", "switch", "case", "default",
        "break", "continue", "return", "try", "catch", "new", "assert",
        "int", "long", "double", "boolean", "void", "true", "false",
    }
)

# Longest first so "==" wins over "=".
_OPERATORS = (
    "==", "!=", "<=", ">=", "&&", "||", "++", "--",
    "+=", "-=", "*=", "/=", "%=",
    "(", ")", "{", "}", "[", "]", ";", ",", ".", "?", ":",
    "=", "<", ">", "+", "-", "*", "/", "%", "!",
)

_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", '"': '"', "\\": "\\", "'": "'", "0": "\0"}


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT, INT, LONG, DOUBLE, STRING, BOOL, EOF, keyword, or operator text
    text: str
    value: object
    line: int
    col: int
    offset: int


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    line = 1
    col = 1
    n = len(source)

    def error(msg: str) -> ParseError:
        return ParseError(msg, line, col)

    def advance(count: int) -> None:
        nonlocal i, line, col
        for _ in range(count):
            if source[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = source[i]
        if ch in " \t\r\n":
            advance(1)
            continue
        if ch == "/" and i + 1 < n and source[i + 1] == "/":
            while i < n and source[i] != "\n":
                advance(1)
            continue
        if ch == "/" and i + 1 < n and source[i + 1] == "*":
            start_line, start_col = line, col
            advance(2)
            while i + 1 < n and not (source[i] == "*" and source[i + 1] == "/"):
                advance(1)
            if i + 1 >= n:
                raise ParseError("unterminated block comment", start_line, start_col)
            advance(2)
            continue
        if ch.isdigit():
            start, start_line, start_col = i, line, col
            while i < n and source[i].isdigit():
                advance(1)
            is_double = False
            if i < n and source[i] == "." and i + 1 < n and source[i + 1].isdigit():
                is_double = True
                advance(1)
                while i < n and source[i].isdigit():
                    advance(1)
            if i < n and source[i] in "eE":
                j = i + 1
                if j < n and source[j] in "+-":
                    j += 1
                if j < n and source[j].isdigit():
                    is_double = True
                    advance(j - i)
                    while i < n and source[i].isdigit():
                        advance(1)
            if is_double:
                if i < n and source[i] in "dDfF":
                    advance(1)
                text = source[start:i]
                tokens.append(Token("DOUBLE", text, text, start_line, start_col, start))
            elif i < n and source[i] in "lL":
                advance(1)
                text = source[start:i]
                tokens.append(Token("LONG", text, int(text[:-1]), start_line, start_col, start))
            elif i < n and source[i] in "dDfF":
                advance(1)
                text = source[start:i]
                tokens.append(Token("DOUBLE", text, text, start_line, start_col, start))
            else:
                text = source[start:i]
                tokens.append(Token("INT", text, int(text), start_line, start_col, start))
            continue
        if ch.isalpha() or ch == "_":
            start, start_line, start_col = i, line, col
            while i < n and (source[i].isalnum() or source[i] == "_"):
                advance(1)
            text = source[start:i]
            if text in ("true", "false"):
                tokens.append(Token("BOOL", text, text == "true", start_line, start_col, start))
            elif text in KEYWORDS:
                tokens.append(Token(text, text, text, start_line, start_col, start))
            else:
                tokens.append(Token("IDENT", text, text, start_line, start_col, start))
            continue
        if ch == '"':
            start, start_line, start_col = i, line, col
            advance(1)
            chars: list[str] = []
            while i < n and source[i] != '"':
                if source[i] == "\n":
                    raise ParseError("unterminated string literal", start_line, start_col)
                if source[i] == "\\":
                    if i + 1 >= n or source[i + 1] not in _ESCAPES:
                        raise error("unsupported escape sequence")
                    chars.append(_ESCAPES[source[i + 1]])
                    advance(2)
                else:
                    chars.append(source[i])
                    advance(1)
            if i >= n:
                raise ParseError("unterminated string literal", start_line, start_col)
            advance(1)
            tokens.append(
                Token("STRING", source[start:i], "".join(chars), start_line, start_col, start)
            )
            continue
        op = _match_operator(source, i)
        if op is not None:
            tokens.append(Token(op, op, op, line, col, i))
            advance(len(op))
            continue
        raise error(f"unexpected character {ch!r}")

    tokens.append(Token("EOF", "", None, line, col, n))
    return tokens


def _match_operator(source: str, i: int) -> Optional[str]:
    for op in _OPERATORS:
        if source.startswith(op, i):
            return op
    return None
