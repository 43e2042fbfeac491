"""Source normalization: wrap brace-less branch/loop bodies in braces.

Insertions never add newlines, so line numbers are stable; a second pass is
the identity. Downstream stages (tracing, occurrence spans, branch markers)
all operate on the normalized text.
"""

from __future__ import annotations

from . import ast
from .parser import parse


def _collect_unbraced(block: ast.Block, depth: int, edits: list) -> None:
    for stmt in block.stmts:
        _collect_stmt(stmt, depth, edits)


def _collect_body(body: ast.Block, depth: int, edits: list) -> None:
    if body.open_offset < 0:
        stmt = body.stmts[0]
        edits.append(("open", stmt.start_offset, depth))
        edits.append(("close", _stmt_end(stmt), depth))
    _collect_unbraced(body, depth + 1, edits)


def _stmt_end(stmt: ast.Stmt) -> int:
    return stmt.end_offset


def _collect_stmt(stmt: ast.Stmt, depth: int, edits: list) -> None:
    if isinstance(stmt, ast.IfStmt):
        _collect_body(stmt.then_block, depth, edits)
        if isinstance(stmt.else_part, ast.Block):
            _collect_body(stmt.else_part, depth, edits)
        elif isinstance(stmt.else_part, ast.IfStmt):
            _collect_stmt(stmt.else_part, depth, edits)
    elif isinstance(stmt, ast.WhileStmt):
        _collect_body(stmt.body, depth, edits)
    elif isinstance(stmt, ast.ForStmt):
        _collect_body(stmt.body, depth, edits)


def normalize(source: str) -> str:
    """Return the source with every branch/loop body braced."""
    program = parse(source)
    edits: list[tuple[str, int, int]] = []
    for func in program.functions:
        _collect_unbraced(func.body, 0, edits)
    if not edits:
        return source
    # group inserts per offset; outer opens precede inner opens, inner closes
    # precede outer closes
    inserts: dict[int, list[tuple[str, int]]] = {}
    for kind, offset, depth in edits:
        inserts.setdefault(offset, []).append((kind, depth))
    out = []
    last = 0
    for offset in sorted(inserts):
        out.append(source[last:offset])
        group = inserts[offset]
        closes = sorted((d for k, d in group if k == "close"), reverse=True)
        opens = sorted(d for k, d in group if k == "open")
        for _ in closes:
            out.append(" }")
        for _ in opens:
            out.append("{ ")
        last = offset
    out.append(source[last:])
    return "".join(out)
