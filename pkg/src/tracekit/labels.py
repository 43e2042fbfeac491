"""Occurrence labels and branch ground truth from finalized traces.

Occurrences are every read, write, declaration, and parameter mention of a
local variable. Each gets a (data type, value type, bin) state label plus a
Yes/No coverage label; lexical branch blocks get a ``[MASK]`` insertion
point and a taken flag derived from covered lines.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import MissingVariable
from .minic import ast
from .minic.scopes import ScopeAnalysis, VariableOccurrence
from .quantize import (
    BIN_IDS,
    DATA_TYPE_IDS,
    QuantizationThresholds,
    QuantizedTuple,
    VALUE_TYPE_IDS,
    quantize,
    quantize_unexecuted,
)
from .trace import FinalizedStates

MASK_MARKER = "[MASK]"

BRANCH_KINDS = ("IfThen", "IfElse", "WhileBody", "ForBody", "SwitchCase")


@dataclass(frozen=True)
class OccurrenceLabel:
    state: QuantizedTuple
    coverage: str  # "Yes" | "No"


@dataclass(frozen=True)
class BranchSite:
    kind: str
    insertion_offset: int  # just past the '{' in the normalized source
    taken: bool
    block_lines: tuple[int, ...]


@dataclass
class LabeledSample:
    problem_id: str
    exec_input_text: str
    code_text: str  # normalized source the spans index into
    occurrences: list[VariableOccurrence]
    labels: list[OccurrenceLabel]
    branches: list[BranchSite]


def find_occurrences(program: ast.Program, source: str) -> list[VariableOccurrence]:
    """All local/parameter variable occurrences in source order, with
    resolved static types (shadowing resolved by scope)."""
    return ScopeAnalysis(program, source).occurrences


def build_labels(
    occurrences: list[VariableOccurrence],
    finalized: FinalizedStates,
    thr: QuantizationThresholds = QuantizationThresholds(),
) -> list[OccurrenceLabel]:
    out = []
    for occ in occurrences:
        if occ.line in finalized.covered:
            state = finalized.states[occ.line]
            if occ.name not in state:
                raise MissingVariable(occ.name, occ.line)
            out.append(OccurrenceLabel(quantize(occ.static_type, state[occ.name], thr), "Yes"))
        else:
            out.append(OccurrenceLabel(quantize_unexecuted(occ.static_type), "No"))
    return out


def _stmt_lines(stmt: ast.Stmt) -> set[int]:
    lines = {stmt.line}
    if isinstance(stmt, ast.IfStmt):
        lines |= _block_lines(stmt.then_block)
        if isinstance(stmt.else_part, ast.Block):
            lines |= _block_lines(stmt.else_part)
        elif isinstance(stmt.else_part, ast.IfStmt):
            lines |= _stmt_lines(stmt.else_part)
    elif isinstance(stmt, (ast.WhileStmt, ast.ForStmt)):
        lines |= _block_lines(stmt.body)
    return lines


def _block_lines(block: ast.Block) -> set[int]:
    lines: set[int] = set()
    for stmt in block.stmts:
        lines |= _stmt_lines(stmt)
    return lines


def _collect_branch_blocks(block: ast.Block, found: list) -> None:
    for stmt in block.stmts:
        if isinstance(stmt, ast.IfStmt):
            found.append(("IfThen", stmt.then_block))
            _collect_branch_blocks(stmt.then_block, found)
            if isinstance(stmt.else_part, ast.Block):
                found.append(("IfElse", stmt.else_part))
                _collect_branch_blocks(stmt.else_part, found)
            elif isinstance(stmt.else_part, ast.IfStmt):
                _collect_branch_blocks(ast.Block([stmt.else_part], -2, -2), found)
        elif isinstance(stmt, ast.WhileStmt):
            found.append(("WhileBody", stmt.body))
            _collect_branch_blocks(stmt.body, found)
        elif isinstance(stmt, ast.ForStmt):
            found.append(("ForBody", stmt.body))
            _collect_branch_blocks(stmt.body, found)


def annotate_branches(
    program: ast.Program, source: str, covered: set[int]
) -> tuple[str, list[BranchSite]]:
    """Insert a literal ``[MASK]`` right after each branch block's opening
    brace; taken = some statement line of the block was covered.

    Requires normalized (fully braced) source.
    """
    if MASK_MARKER in source:
        raise ValueError("source already contains the branch marker literal")
    found: list[tuple[str, ast.Block]] = []
    for func in program.functions:
        _collect_branch_blocks(func.body, found)
    sites = []
    for kind, block in found:
        if block.open_offset < 0:
            raise ValueError("branch block is not braced; normalize the source first")
        lines = tuple(sorted(_block_lines(block)))
        taken = any(line in covered for line in lines)
        sites.append(BranchSite(kind, block.open_offset + 1, taken, lines))
    sites.sort(key=lambda s: s.insertion_offset)
    rewritten = insert_markers(source, [s.insertion_offset for s in sites])
    return rewritten, sites


def insert_markers(source: str, offsets: list[int]) -> str:
    out = []
    last = 0
    for off in sorted(offsets):
        out.append(source[last:off])
        out.append(MASK_MARKER)
        last = off
    out.append(source[last:])
    return "".join(out)


def strip_branch_markers(text: str) -> str:
    return text.replace(MASK_MARKER, "")


def marker_offsets_after_insertion(offsets: list[int]) -> list[int]:
    """Offsets of the inserted markers within the rewritten text."""
    width = len(MASK_MARKER)
    return [off + i * width for i, off in enumerate(sorted(offsets))]


def shift_spans(spans: list[tuple[int, int]], insert_offsets: list[int]) -> list[tuple[int, int]]:
    """Adjust spans in pre-insertion coordinates for marker insertions."""
    width = len(MASK_MARKER)
    ordered = sorted(insert_offsets)
    out = []
    for start, end in spans:
        shift = sum(width for off in ordered if off <= start)
        out.append((start + shift, end + shift))
    return out


def sample_to_record(sample: LabeledSample) -> dict:
    return {
        "problem_id": sample.problem_id,
        "exec_input": sample.exec_input_text,
        "code": sample.code_text,
        "occurrences": [
            {
                "name": occ.name,
                "line": occ.line,
                "span": [occ.span[0], occ.span[1]],
                "type": occ.static_type,
                "dtype": DATA_TYPE_IDS[label.state.data_type],
                "vtype": VALUE_TYPE_IDS[label.state.value_type],
                "bin": BIN_IDS[label.state.bin],
                "cov": 1 if label.coverage == "Yes" else 0,
            }
            for occ, label in zip(sample.occurrences, sample.labels)
        ],
        "branches": [
            {"kind": s.kind, "offset": s.insertion_offset, "taken": s.taken}
            for s in sample.branches
        ],
    }


def write_samples_jsonl(samples, fp) -> None:
    for sample in samples:
        fp.write(json.dumps(sample_to_record(sample), sort_keys=True))
        fp.write("\n")
