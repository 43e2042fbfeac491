"""Static scope analysis: identifier occurrences and lexical visibility.

The walk mirrors the interpreter's scoping exactly (decl-point binding,
innermost-wins shadowing) so occurrence types and the visibility oracle agree
with runtime snapshots.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import ast


@dataclass(frozen=True)
class DeclSite:
    name: str
    static_type: str
    line: int
    decl_id: int  # unique per declaration, distinguishes shadowed names


@dataclass(frozen=True)
class VariableOccurrence:
    name: str
    line: int
    span: tuple[int, int]
    static_type: str
    decl_id: int


@dataclass
class _ScopedDecl:
    decl: DeclSite
    visible_from_line: int
    scope_end_line: int
    depth: int


class ScopeAnalysis:
    """Occurrences plus a per-line visibility table for one program."""

    def __init__(self, program: ast.Program, source: str):
        self.occurrences: list[VariableOccurrence] = []
        self._scoped: list[_ScopedDecl] = []
        self._next_id = 0
        self._line_starts = _line_starts(source)
        self._walk_program(program)
        self.occurrences.sort(key=lambda occ: occ.span[0])

    # -- visibility oracle ---------------------------------------------------

    def visible_at(self, line: int) -> dict[str, str]:
        """Map of variable name -> static type lexically visible at a line."""
        visible: dict[str, tuple[int, str]] = {}
        for sd in self._scoped:
            if sd.visible_from_line <= line <= sd.scope_end_line:
                cur = visible.get(sd.decl.name)
                if cur is None or sd.depth >= cur[0]:
                    visible[sd.decl.name] = (sd.depth, sd.decl.static_type)
        return {name: t for name, (_, t) in visible.items()}

    # -- walking ---------------------------------------------------------------

    def _line_of(self, offset: int) -> int:
        lo, hi = 0, len(self._line_starts) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if self._line_starts[mid] <= offset:
                lo = mid
            else:
                hi = mid - 1
        return lo + 1

    def _declare(self, env: list[dict], name: str, static_type: str, line: int,
                 scope_end_line: int, depth: int) -> DeclSite:
        decl = DeclSite(name, static_type, line, self._next_id)
        self._next_id += 1
        env[-1][name] = decl
        self._scoped.append(_ScopedDecl(decl, line, scope_end_line, depth))
        return decl

    def _resolve(self, env: list[dict], ref: ast.VarRef) -> None:
        for scope in reversed(env):
            if ref.name in scope:
                decl = scope[ref.name]
                self.occurrences.append(
                    VariableOccurrence(ref.name, ref.line, ref.span, decl.static_type, decl.decl_id)
                )
                return
        # unresolved names surface at runtime; they are not occurrences

    def _walk_program(self, program: ast.Program) -> None:
        for func in program.functions:
            env: list[dict] = [{}]
            body_end = self._line_of(func.body.close_offset) if func.body.close_offset >= 0 else func.line
            for param in func.params:
                decl = self._declare(env, param.name, param.type, func.line, body_end, 0)
                self.occurrences.append(
                    VariableOccurrence(param.name, param.line, param.span, param.type, decl.decl_id)
                )
            self._walk_block(func.body, env, depth=1)

    def _block_end_line(self, block: ast.Block, fallback: int) -> int:
        if block.close_offset >= 0:
            return self._line_of(block.close_offset)
        return fallback

    def _walk_block(self, block: ast.Block, env: list[dict], depth: int) -> None:
        env.append({})
        end_line = self._block_end_line(block, block.stmts[-1].line if block.stmts else 0)
        for stmt in block.stmts:
            self._walk_stmt(stmt, env, depth, end_line)
        env.pop()

    def _walk_stmt(self, stmt: ast.Stmt, env: list[dict], depth: int, scope_end_line: int) -> None:
        if isinstance(stmt, ast.DeclStmt):
            for d in stmt.decls:
                decl = self._declare(env, d.name, d.static_type, stmt.line, scope_end_line, depth)
                self.occurrences.append(
                    VariableOccurrence(d.name, stmt.line, d.span, d.static_type, decl.decl_id)
                )
                if d.init is not None:
                    self._walk_expr(d.init, env)
        elif isinstance(stmt, ast.AssignStmt):
            self._walk_expr(stmt.target, env)
            self._walk_expr(stmt.value, env)
        elif isinstance(stmt, ast.ExprStmt):
            self._walk_expr(stmt.expr, env)
        elif isinstance(stmt, ast.ReturnStmt):
            self._walk_expr(stmt.expr, env)
        elif isinstance(stmt, ast.IfStmt):
            self._walk_expr(stmt.cond, env)
            self._walk_block(stmt.then_block, env, depth + 1)
            if isinstance(stmt.else_part, ast.Block):
                self._walk_block(stmt.else_part, env, depth + 1)
            elif isinstance(stmt.else_part, ast.IfStmt):
                self._walk_stmt(stmt.else_part, env, depth, scope_end_line)
        elif isinstance(stmt, ast.WhileStmt):
            self._walk_expr(stmt.cond, env)
            self._walk_block(stmt.body, env, depth + 1)
        elif isinstance(stmt, ast.ForStmt):
            env.append({})
            for_end = self._block_end_line(stmt.body, stmt.line)
            if stmt.init is not None:
                self._walk_stmt(stmt.init, env, depth + 1, for_end)
            if stmt.cond is not None:
                self._walk_expr(stmt.cond, env)
            if stmt.update is not None:
                self._walk_stmt(stmt.update, env, depth + 1, for_end)
            self._walk_block(stmt.body, env, depth + 2)
            env.pop()

    def _walk_expr(self, expr: ast.Expr, env: list[dict]) -> None:
        if isinstance(expr, ast.VarRef):
            self._resolve(env, expr)
        elif isinstance(expr, ast.Index):
            self._resolve(env, expr.base)
            self._walk_expr(expr.index, env)
        elif isinstance(expr, ast.Unary):
            self._walk_expr(expr.operand, env)
        elif isinstance(expr, ast.Binary):
            self._walk_expr(expr.left, env)
            self._walk_expr(expr.right, env)
        elif isinstance(expr, ast.Call):
            for arg in expr.args:
                self._walk_expr(arg, env)


def _line_starts(source: str) -> list[int]:
    starts = [0]
    for i, ch in enumerate(source):
        if ch == "\n":
            starts.append(i + 1)
    return starts
