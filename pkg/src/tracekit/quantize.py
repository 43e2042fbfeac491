"""Quantization of runtime values into (data type, value type, bin) tuples.

The bin taxonomy has exactly 30 labels: seven signed magnitude tiers each
for integers and floats, three char classes, three string and three array
length classes, two pointer states, two booleans, a struct catch-all, an
``UnknownType`` for values with no meaningful magnitude (NaN), and
``Unknown``, reserved for occurrences on unexecuted lines.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

from .values import (
    K_ARRAY,
    K_BOOL,
    K_CHAR,
    K_FLOAT,
    K_INT,
    K_POINTER,
    K_RECORD,
    K_STRING,
    RuntimeValue,
    print_value,
    type_kind,
)

DATA_TYPES = ("Basic", "Pointer", "Array", "Struct")
VALUE_TYPES = ("Integer", "Float", "Char", "String", "Boolean", "Composite", "Void")

BINS = (
    "IntNegLarge", "IntNegRegular", "IntNegSmall", "IntZero",
    "IntPosSmall", "IntPosRegular", "IntPosLarge",
    "FloatNegLarge", "FloatNegRegular", "FloatNegSmall", "FloatZero",
    "FloatPosSmall", "FloatPosRegular", "FloatPosLarge",
    "NulChar", "PrintableChar", "NonPrintableChar",
    "EmptyString", "RegularString", "LargeString",
    "NullPointer", "ValidPointer",
    "EmptyArray", "RegularArray", "LargeArray",
    "BoolTrue", "BoolFalse",
    "StructValue",
    "UnknownType",
    "Unknown",
)

assert len(BINS) == 30

DATA_TYPE_IDS = {name: i for i, name in enumerate(DATA_TYPES)}
VALUE_TYPE_IDS = {name: i for i, name in enumerate(VALUE_TYPES)}
BIN_IDS = {name: i for i, name in enumerate(BINS)}

COVERAGE_LABELS = ("No", "Yes")


@dataclass(frozen=True)
class QuantizationThresholds:
    small_max: int = 10
    large_min: int = 10_000
    long_len: int = 64

    def __post_init__(self):
        if not 0 < self.small_max < self.large_min:
            raise ValueError("thresholds must satisfy 0 < small_max < large_min")
        if self.long_len <= 0:
            raise ValueError("long_len must be positive")


@dataclass(frozen=True)
class QuantizedTuple:
    data_type: str
    value_type: str
    bin: str

    def ids(self) -> tuple[int, int, int]:
        return (DATA_TYPE_IDS[self.data_type], VALUE_TYPE_IDS[self.value_type], BIN_IDS[self.bin])


_KIND_TO_TYPES = {
    K_INT: ("Basic", "Integer"),
    K_FLOAT: ("Basic", "Float"),
    K_CHAR: ("Basic", "Char"),
    K_STRING: ("Pointer", "String"),
    K_POINTER: ("Pointer", "Composite"),
    K_ARRAY: ("Array", "Composite"),
    K_BOOL: ("Basic", "Boolean"),
    K_RECORD: ("Struct", "Composite"),
}


def type_labels(static_type: str) -> tuple[str, str]:
    """(data type, value type) labels derived from the static type alone."""
    return _KIND_TO_TYPES[type_kind(static_type)]


def _magnitude_tier(mag, thr: QuantizationThresholds) -> str:
    if mag <= thr.small_max:
        return "Small"
    if mag < thr.large_min:
        return "Regular"
    return "Large"


def _numeric_bin(prefix: str, v, thr: QuantizationThresholds) -> str:
    if v == 0:
        return f"{prefix}Zero"
    sign = "Pos" if v > 0 else "Neg"
    return f"{prefix}{sign}{_magnitude_tier(abs(v), thr)}"


def _length_bin(length: int, prefix_empty: str, prefix_reg: str, prefix_large: str,
                thr: QuantizationThresholds) -> str:
    if length == 0:
        return prefix_empty
    if length >= thr.long_len:
        return prefix_large
    return prefix_reg


def quantize(static_type: str, value: RuntimeValue,
             thr: QuantizationThresholds = QuantizationThresholds()) -> QuantizedTuple:
    """Quantize a concrete traced value. Total: every well-typed value maps
    to exactly one bin, and never to ``Unknown``."""
    data_type, value_type = type_labels(static_type)
    kind = type_kind(static_type)
    p = value.payload
    if kind == K_INT:
        bin_label = _numeric_bin("Int", p, thr)
    elif kind == K_FLOAT:
        if math.isnan(p):
            bin_label = "UnknownType"
        elif math.isinf(p):
            bin_label = "FloatPosLarge" if p > 0 else "FloatNegLarge"
        else:
            bin_label = _numeric_bin("Float", p, thr)
    elif kind == K_CHAR:
        if p == 0:
            bin_label = "NulChar"
        elif 32 <= p <= 126:
            bin_label = "PrintableChar"
        else:
            bin_label = "NonPrintableChar"
    elif kind == K_STRING:
        bin_label = _length_bin(len(p), "EmptyString", "RegularString", "LargeString", thr)
    elif kind == K_POINTER:
        bin_label = "NullPointer" if p is None else "ValidPointer"
    elif kind == K_ARRAY:
        bin_label = _length_bin(len(p), "EmptyArray", "RegularArray", "LargeArray", thr)
    elif kind == K_BOOL:
        bin_label = "BoolTrue" if p else "BoolFalse"
    elif kind == K_RECORD:
        bin_label = "StructValue"
    else:
        bin_label = "UnknownType"
    return QuantizedTuple(data_type, value_type, bin_label)


def quantize_unexecuted(static_type: str) -> QuantizedTuple:
    """Label for an occurrence on a line the execution never reached: type
    labels are kept, the bin is ``Unknown``."""
    data_type, value_type = type_labels(static_type)
    return QuantizedTuple(data_type, value_type, "Unknown")


class AbstractionStrategy:
    """Pluggable value-to-label abstraction; label spaces are
    strategy-defined."""

    name: str

    def abstraction(self, static_type: str, value: RuntimeValue) -> str:
        raise NotImplementedError


class QuantizedAbstraction(AbstractionStrategy):
    """Default strategy: the 30-bin taxonomy."""

    name = "quantized"

    def __init__(self, thr: QuantizationThresholds = QuantizationThresholds()):
        self.thr = thr

    def abstraction(self, static_type: str, value: RuntimeValue) -> str:
        return quantize(static_type, value, self.thr).bin


class ConcreteAbstraction(AbstractionStrategy):
    """Identity strategy: the printed concrete value is the label."""

    name = "concrete"

    def abstraction(self, static_type: str, value: RuntimeValue) -> str:
        return print_value(value)


STRATEGIES = {
    QuantizedAbstraction.name: QuantizedAbstraction,
    ConcreteAbstraction.name: ConcreteAbstraction,
}


def taxonomy() -> dict:
    """Machine-readable label table: ids for bins, type labels, and the
    coverage classes. Consumed by head sizing and dataset serialization."""
    return {
        "data_types": {name: i for i, name in enumerate(DATA_TYPES)},
        "value_types": {name: i for i, name in enumerate(VALUE_TYPES)},
        "bins": {name: i for i, name in enumerate(BINS)},
        "coverage": {name: i for i, name in enumerate(COVERAGE_LABELS)},
        "null_id": -1,
        "unknown_bin": "Unknown",
    }


def taxonomy_json() -> str:
    return json.dumps(taxonomy(), sort_keys=True, indent=2) + "\n"


def taxonomy_hash() -> str:
    return hashlib.sha256(taxonomy_json().encode("utf-8")).hexdigest()
