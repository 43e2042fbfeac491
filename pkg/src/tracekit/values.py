"""Runtime values and their wire representation.

A value pairs a static type string with a concrete payload:

    int / long      -> Python int (64-bit signed, wrapped)
    float / double  -> Python float
    char            -> int char code in [0, 255]
    char*           -> Python str
    T*              -> int cell id, or None for null
    T[N]            -> tuple of element RuntimeValues
    bool            -> Python bool (ingested traces only)
    struct ...      -> opaque pretty-printed str (ingested traces only)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

INT64_MIN = -(1 << 63)
INT64_MAX = (1 << 63) - 1

# payload kinds, derived from the static type string
K_INT = "int"
K_FLOAT = "float"
K_CHAR = "char"
K_STRING = "string"
K_POINTER = "pointer"
K_ARRAY = "array"
K_BOOL = "bool"
K_RECORD = "record"

_INT_TYPES = {"int", "long"}
_FLOAT_TYPES = {"float", "double"}
_BOOL_TYPES = {"bool", "_Bool"}


def type_kind(static_type: str) -> str:
    t = static_type.strip()
    if t in _INT_TYPES:
        return K_INT
    if t in _FLOAT_TYPES:
        return K_FLOAT
    if t == "char":
        return K_CHAR
    if t == "char*":
        return K_STRING
    if t.endswith("*"):
        return K_POINTER
    if t.endswith("]"):
        return K_ARRAY
    if t in _BOOL_TYPES:
        return K_BOOL
    if t.startswith("struct") or t == "record":
        return K_RECORD
    raise ValueError(f"unrecognized static type {static_type!r}")


def array_element_type(static_type: str) -> str:
    return static_type[: static_type.index("[")].strip()


@dataclass(frozen=True)
class RuntimeValue:
    static_type: str
    payload: object

    @property
    def kind(self) -> str:
        return type_kind(self.static_type)


def wrap_int64(v: int) -> int:
    return ((v - INT64_MIN) % (1 << 64)) + INT64_MIN


def make_int(v: int, static_type: str = "int") -> RuntimeValue:
    return RuntimeValue(static_type, wrap_int64(int(v)))


def make_float(v: float, static_type: str = "double") -> RuntimeValue:
    return RuntimeValue(static_type, float(v))


def make_char(code: int) -> RuntimeValue:
    return RuntimeValue("char", int(code) % 256)


def make_string(s: str) -> RuntimeValue:
    return RuntimeValue("char*", s)


def make_pointer(cell: int | None, static_type: str = "int*") -> RuntimeValue:
    return RuntimeValue(static_type, cell)


def make_array(elements, static_type: str) -> RuntimeValue:
    return RuntimeValue(static_type, tuple(elements))


def make_bool(v: bool) -> RuntimeValue:
    return RuntimeValue("bool", bool(v))


def make_record(pretty: str, static_type: str = "record") -> RuntimeValue:
    return RuntimeValue(static_type, pretty)


def _print_char(code: int) -> str:
    if 32 <= code <= 126:
        return chr(code)
    return f"\\x{code:02x}"


def _parse_char(s: str) -> int:
    if len(s) == 1:
        return ord(s)
    if s.startswith("\\x") and len(s) == 4:
        return int(s[2:], 16)
    raise ValueError(f"unparseable char value {s!r}")


def print_value(value: RuntimeValue) -> str:
    """Render a value the way the trace log prints it (decimal numerics,
    human-readable chars/strings, hex or null pointers)."""
    kind = value.kind
    p = value.payload
    if kind == K_INT:
        return str(p)
    if kind == K_FLOAT:
        f = float(p)
        if math.isnan(f):
            return "nan"
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        return repr(f)
    if kind == K_CHAR:
        return _print_char(p)
    if kind == K_STRING:
        return p
    if kind == K_POINTER:
        return "null" if p is None else f"0x{p:x}"
    if kind == K_ARRAY:
        # char elements always use the \xNN form so ", " stays an unambiguous separator
        parts = [
            f"\\x{e.payload:02x}" if e.kind == K_CHAR else print_value(e)
            for e in p
        ]
        return "{" + ", ".join(parts) + "}"
    if kind == K_BOOL:
        return "true" if p else "false"
    if kind == K_RECORD:
        return p
    raise ValueError(f"unprintable kind {kind}")


def parse_value(static_type: str, text: str) -> RuntimeValue:
    """Inverse of print_value for a known static type."""
    kind = type_kind(static_type)
    if kind == K_INT:
        return RuntimeValue(static_type, wrap_int64(int(text)))
    if kind == K_FLOAT:
        if text == "nan":
            return RuntimeValue(static_type, math.nan)
        if text == "inf":
            return RuntimeValue(static_type, math.inf)
        if text == "-inf":
            return RuntimeValue(static_type, -math.inf)
        return RuntimeValue(static_type, float(text))
    if kind == K_CHAR:
        return RuntimeValue(static_type, _parse_char(text))
    if kind == K_STRING:
        return RuntimeValue(static_type, text)
    if kind == K_POINTER:
        if text == "null":
            return RuntimeValue(static_type, None)
        if not text.startswith("0x"):
            raise ValueError(f"unparseable pointer value {text!r}")
        return RuntimeValue(static_type, int(text, 16))
    if kind == K_ARRAY:
        inner = text.strip()
        if not (inner.startswith("{") and inner.endswith("}")):
            raise ValueError(f"unparseable array value {text!r}")
        inner = inner[1:-1]
        elem_type = array_element_type(static_type)
        if inner == "":
            return RuntimeValue(static_type, ())
        elems = tuple(parse_value(elem_type, part) for part in inner.split(", "))
        return RuntimeValue(static_type, elems)
    if kind == K_BOOL:
        if text not in ("true", "false"):
            raise ValueError(f"unparseable bool value {text!r}")
        return RuntimeValue(static_type, text == "true")
    if kind == K_RECORD:
        return RuntimeValue(static_type, text)
    raise ValueError(f"unparseable kind {kind}")
