"""Tokenizer for MiniC source text."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ParseError

KEYWORDS = {
    "int", "long", "float", "double", "char",
    "if", "else", "while", "for", "return",
}

# longest first so <= wins over <
OPERATORS = [
    "<=", ">=", "==", "!=", "&&", "||",
    "+", "-", "*", "/", "%", "<", ">", "=", "!",
    "(", ")", "{", "}", "[", "]", ",", ";",
]


@dataclass
class Token:
    kind: str  # ident | keyword | int | float | char | string | op
    text: str
    line: int
    col: int
    offset: int

    @property
    def end(self) -> int:
        return self.offset + len(self.text)


def lex(source: str) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    line = 1
    col = 1
    n = len(source)

    def error(msg):
        raise ParseError(msg, line, col)

    while i < n:
        c = source[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "/" and i + 1 < n and source[i + 1] == "/":
            while i < n and source[i] != "\n":
                i += 1
            continue
        start, start_line, start_col = i, line, col
        if c.isalpha() or c == "_":
            while i < n and (source[i].isalnum() or source[i] == "_"):
                i += 1
            text = source[start:i]
            kind = "keyword" if text in KEYWORDS else "ident"
            tokens.append(Token(kind, text, start_line, start_col, start))
            col += i - start
            continue
        if c.isdigit():
            while i < n and source[i].isdigit():
                i += 1
            if i < n and source[i] == "." and i + 1 < n and source[i + 1].isdigit():
                i += 1
                while i < n and source[i].isdigit():
                    i += 1
                tokens.append(Token("float", source[start:i], start_line, start_col, start))
            else:
                tokens.append(Token("int", source[start:i], start_line, start_col, start))
            col += i - start
            continue
        if c == "'":
            i += 1
            if i < n and source[i] == "\\":
                i += 2
            else:
                i += 1
            if i >= n or source[i] != "'":
                error("unterminated char literal")
            i += 1
            tokens.append(Token("char", source[start:i], start_line, start_col, start))
            col += i - start
            continue
        if c == '"':
            i += 1
            while i < n and source[i] != '"':
                if source[i] == "\n":
                    error("unterminated string literal")
                i += 2 if source[i] == "\\" else 1
            if i >= n:
                error("unterminated string literal")
            i += 1
            tokens.append(Token("string", source[start:i], start_line, start_col, start))
            col += i - start
            continue
        for op in OPERATORS:
            if source.startswith(op, i):
                tokens.append(Token("op", op, start_line, start_col, start))
                i += len(op)
                col += len(op)
                break
        else:
            error(f"unexpected character {c!r}")
    return tokens


_ESCAPES = {"n": 10, "t": 9, "0": 0, "\\": 92, "'": 39, '"': 34, "r": 13}


def char_literal_code(text: str) -> int:
    body = text[1:-1]
    if body.startswith("\\"):
        return _ESCAPES[body[1]]
    return ord(body)


def string_literal_value(text: str) -> str:
    body = text[1:-1]
    out = []
    i = 0
    while i < len(body):
        if body[i] == "\\" and i + 1 < len(body):
            out.append(chr(_ESCAPES[body[i + 1]]))
            i += 2
        else:
            out.append(body[i])
            i += 1
    return "".join(out)
