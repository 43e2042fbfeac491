"""Deterministic tree-walking executor for MiniC programs.

The stepping protocol mirrors a line-oriented debugger: one snapshot of all
in-scope variables after each executed source line, one parameter event at
each user-defined function entry, nothing for library built-ins. Runtime
failures flag the trace and keep the events collected so far.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass

from ..trace import RawTrace, TraceEvent
from ..values import RuntimeValue, make_string, wrap_int64
from . import ast

INT_TYPES = ("int", "long")
FLOAT_TYPES = ("float", "double")


@dataclass
class ExecConfig:
    step_budget: int = 100_000
    uninit_sentinel_int: int = 32767
    uninit_sentinel_float: float = 32767.0
    max_call_depth: int = 500

    def __post_init__(self):
        if self.step_budget <= 0:
            raise ValueError("step_budget must be positive")


@dataclass
class ExecInput:
    tokens: tuple[str, ...]

    @classmethod
    def from_text(cls, text: str) -> "ExecInput":
        return cls(tuple(text.split()))


class _Halt(Exception):
    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind
        self.message = message


class _Return(Exception):
    def __init__(self, value):
        self.value = value


@dataclass
class _ArrayRef:
    """Evaluation result of an array-typed variable: aliasable storage."""
    cell: int
    elem_type: str
    length: int


class Interpreter:
    def __init__(self, program: ast.Program, exec_input: ExecInput, config: ExecConfig | None = None):
        self.program = program
        self.input_tokens = list(exec_input.tokens)
        self.input_pos = 0
        self.config = config or ExecConfig()
        self.functions = {f.name: f for f in program.functions}
        self.events: list[TraceEvent] = []
        self.arrays: dict[int, list] = {}
        self.array_types: dict[int, str] = {}
        self.next_cell = 1
        self.step = 0
        self.line_events = 0
        self.call_depth = 0
        self.scopes: list[dict] = []
        self.current_function = ""
        self.probes_hit: set[int] = set()
        self.executed_lines: set[int] = set()  # independent coverage counter

    # -- driving ------------------------------------------------------------

    def run(self) -> RawTrace:
        old_limit = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old_limit, 20 * self.config.max_call_depth + 1000))
        try:
            self.call_function(self.functions["main"], [])
            return RawTrace(events=self.events)
        except _Halt as halt:
            return RawTrace(events=self.events, error=halt.kind, error_message=halt.message)
        finally:
            sys.setrecursionlimit(old_limit)

    # -- events -------------------------------------------------------------

    def snapshot(self) -> dict[str, RuntimeValue]:
        snap: dict[str, RuntimeValue] = {}
        for scope in self.scopes:
            for name, binding in scope.items():
                snap[name] = self.materialize(binding)
        return snap

    def materialize(self, binding) -> RuntimeValue:
        static_type, payload = binding
        if static_type.endswith("]"):
            elems = self.arrays[payload]
            elem_type = self.array_types[payload]
            return RuntimeValue(static_type, tuple(RuntimeValue(elem_type, e) for e in elems))
        return RuntimeValue(static_type, payload)

    def emit_line(self, line: int, merge_ok: bool) -> None:
        self.executed_lines.add(line)
        snap = self.snapshot()
        last = self.events[-1] if self.events else None
        if (
            merge_ok
            and last is not None
            and last.kind == "line"
            and last.line == line
            and last.function == self.current_function
        ):
            last.vars = snap
            return
        if self.line_events >= self.config.step_budget:
            raise _Halt("step_budget_exceeded", f"line budget of {self.config.step_budget} exhausted")
        self.step += 1
        self.line_events += 1
        self.events.append(TraceEvent(self.step, "line", line, self.current_function, snap))

    def emit_params(self, func: ast.FunctionDef) -> None:
        self.executed_lines.add(func.line)
        snap = {name: self.materialize(b) for name, b in self.scopes[0].items()}
        self.step += 1
        self.events.append(TraceEvent(self.step, "param", func.line, func.name, snap))

    # -- scoping ------------------------------------------------------------

    def lookup(self, name: str, line: int):
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        raise _Halt("name_error", f"undefined variable {name!r} at line {line}")

    def bind(self, name: str, static_type: str, payload) -> None:
        self.scopes[-1][name] = (static_type, payload)

    def rebind(self, name: str, static_type: str, payload, line: int) -> None:
        for scope in reversed(self.scopes):
            if name in scope:
                scope[name] = (static_type, payload)
                return
        raise _Halt("name_error", f"undefined variable {name!r} at line {line}")

    def sentinel(self, static_type: str):
        cfg = self.config
        if static_type in INT_TYPES:
            return cfg.uninit_sentinel_int
        if static_type in FLOAT_TYPES:
            return cfg.uninit_sentinel_float
        if static_type == "char":
            return cfg.uninit_sentinel_int % 256
        if static_type == "char*":
            return ""
        if static_type.endswith("*"):
            return None
        raise _Halt("type_error", f"no default for type {static_type}")

    # -- functions ----------------------------------------------------------

    def call_function(self, func: ast.FunctionDef, args: list):
        if self.call_depth >= self.config.max_call_depth:
            raise _Halt("call_depth_exceeded", f"call depth {self.config.max_call_depth} exceeded")
        saved_scopes, saved_function = self.scopes, self.current_function
        self.call_depth += 1
        self.scopes = [{}]
        self.current_function = func.name
        try:
            for param, arg in zip(func.params, args):
                self.scopes[0][param.name] = (param.type, self.coerce(arg, param.type, func.line).payload)
            self.emit_params(func)
            try:
                self.exec_block(func.body, seed_line=None)
            except _Return as ret:
                return self.coerce(ret.value, func.ret_type, func.line)
            # fell off the end: zero value of the return type
            return self.zero_of(func.ret_type)
        finally:
            self.call_depth -= 1
            self.scopes = saved_scopes
            self.current_function = saved_function

    def zero_of(self, static_type: str):
        if static_type in FLOAT_TYPES:
            return RuntimeValue(static_type, 0.0)
        if static_type == "char*":
            return make_string("")
        if static_type.endswith("*"):
            return RuntimeValue(static_type, None)
        return RuntimeValue(static_type, 0)

    # -- statements ----------------------------------------------------------

    def exec_block(self, block: ast.Block, seed_line: int | None) -> None:
        self.scopes.append({})
        try:
            prev_line = seed_line
            for stmt in block.stmts:
                self.exec_stmt(stmt, merge_ok=(prev_line == stmt.line))
                prev_line = stmt.line
        finally:
            self.scopes.pop()

    def exec_stmt(self, stmt: ast.Stmt, merge_ok: bool) -> None:
        if isinstance(stmt, ast.DeclStmt):
            self.exec_decl(stmt)
            self.emit_line(stmt.line, merge_ok)
        elif isinstance(stmt, ast.AssignStmt):
            self.exec_assign(stmt)
            self.emit_line(stmt.line, merge_ok)
        elif isinstance(stmt, ast.ExprStmt):
            self.eval(stmt.expr)
            self.emit_line(stmt.line, merge_ok)
        elif isinstance(stmt, ast.ReturnStmt):
            value = self.eval(stmt.expr)
            self.emit_line(stmt.line, merge_ok)
            raise _Return(value)
        elif isinstance(stmt, ast.IfStmt):
            taken = self.truthy(self.eval(stmt.cond))
            self.emit_line(stmt.line, merge_ok)
            if taken:
                self.exec_block(stmt.then_block, seed_line=stmt.line)
            elif isinstance(stmt.else_part, ast.Block):
                self.exec_block(stmt.else_part, seed_line=stmt.line)
            elif isinstance(stmt.else_part, ast.IfStmt):
                self.exec_stmt(stmt.else_part, merge_ok=False)
        elif isinstance(stmt, ast.WhileStmt):
            taken = self.truthy(self.eval(stmt.cond))
            self.emit_line(stmt.line, merge_ok)
            while taken:
                self.exec_block(stmt.body, seed_line=stmt.line)
                taken = self.truthy(self.eval(stmt.cond))
                self.emit_line(stmt.line, merge_ok=False)
        elif isinstance(stmt, ast.ForStmt):
            self.scopes.append({})
            try:
                if isinstance(stmt.init, ast.DeclStmt):
                    self.exec_decl(stmt.init)
                elif isinstance(stmt.init, ast.AssignStmt):
                    self.exec_assign(stmt.init)
                taken = True if stmt.cond is None else self.truthy(self.eval(stmt.cond))
                self.emit_line(stmt.line, merge_ok)
                while taken:
                    self.exec_block(stmt.body, seed_line=stmt.line)
                    if isinstance(stmt.update, ast.AssignStmt):
                        self.exec_assign(stmt.update)
                    elif isinstance(stmt.update, ast.ExprStmt):
                        self.eval(stmt.update.expr)
                    taken = True if stmt.cond is None else self.truthy(self.eval(stmt.cond))
                    self.emit_line(stmt.line, merge_ok=False)
            finally:
                self.scopes.pop()
        else:
            raise _Halt("type_error", f"unexecutable statement {type(stmt).__name__}")

    def exec_decl(self, stmt: ast.DeclStmt) -> None:
        for decl in stmt.decls:
            if decl.array_len is not None:
                cell = self.next_cell
                self.next_cell += 1
                self.arrays[cell] = [self.sentinel(decl.type)] * decl.array_len
                self.array_types[cell] = decl.type
                self.bind(decl.name, decl.static_type, cell)
            else:
                self.bind(decl.name, decl.type, self.sentinel(decl.type))
                if decl.init is not None:
                    value = self.eval(decl.init)
                    self.bind(decl.name, decl.type, self.coerce(value, decl.type, stmt.line).payload)

    def exec_assign(self, stmt: ast.AssignStmt) -> None:
        value = self.eval(stmt.value)
        if isinstance(stmt.target, ast.VarRef):
            static_type, _ = self.lookup(stmt.target.name, stmt.line)
            self.rebind(stmt.target.name, static_type, self.coerce(value, static_type, stmt.line).payload, stmt.line)
        else:
            cell, elem_type, length = self.resolve_indexable(stmt.target.base, stmt.line)
            idx = self.int_of(self.eval(stmt.target.index), stmt.line)
            if not 0 <= idx < length:
                raise _Halt("index_out_of_bounds", f"index {idx} out of bounds at line {stmt.line}")
            self.arrays[cell][idx] = self.coerce(value, elem_type, stmt.line).payload

    # -- expressions ----------------------------------------------------------

    def eval(self, expr: ast.Expr):
        if isinstance(expr, ast.IntLit):
            return RuntimeValue("int", expr.value)
        if isinstance(expr, ast.FloatLit):
            return RuntimeValue("double", expr.value)
        if isinstance(expr, ast.CharLit):
            return RuntimeValue("char", expr.code)
        if isinstance(expr, ast.StrLit):
            return make_string(expr.value)
        if isinstance(expr, ast.VarRef):
            static_type, payload = self.lookup(expr.name, expr.line)
            if static_type.endswith("]"):
                return _ArrayRef(payload, self.array_types[payload], len(self.arrays[payload]))
            return RuntimeValue(static_type, payload)
        if isinstance(expr, ast.Index):
            cell, elem_type, length = self.resolve_indexable(expr.base, expr.line)
            idx = self.int_of(self.eval(expr.index), expr.line)
            if not 0 <= idx < length:
                raise _Halt("index_out_of_bounds", f"index {idx} out of bounds at line {expr.line}")
            return RuntimeValue(elem_type, self.arrays[cell][idx])
        if isinstance(expr, ast.Unary):
            return self.eval_unary(expr)
        if isinstance(expr, ast.Binary):
            return self.eval_binary(expr)
        if isinstance(expr, ast.Call):
            return self.eval_call(expr)
        raise _Halt("type_error", f"unevaluable expression {type(expr).__name__}")

    def resolve_indexable(self, base: ast.VarRef, line: int):
        static_type, payload = self.lookup(base.name, line)
        if static_type.endswith("]"):
            return payload, self.array_types[payload], len(self.arrays[payload])
        if static_type.endswith("*") and static_type != "char*":
            if payload is None:
                raise _Halt("null_dereference", f"null pointer {base.name!r} dereferenced at line {line}")
            cell = payload
            return cell, self.array_types[cell], len(self.arrays[cell])
        if static_type == "char*":
            raise _Halt("type_error", f"cannot index char* {base.name!r} at line {line}")
        raise _Halt("type_error", f"cannot index {static_type} {base.name!r} at line {line}")

    def eval_unary(self, expr: ast.Unary):
        value = self.eval(expr.operand)
        if expr.op == "!":
            return RuntimeValue("int", 0 if self.truthy(value) else 1)
        num = self.numeric(value, expr.line)
        if isinstance(num, float):
            return RuntimeValue("double", -num)
        return RuntimeValue(self.int_result_type(value), wrap_int64(-num))

    def eval_binary(self, expr: ast.Binary):
        op = expr.op
        if op == "&&":
            if not self.truthy(self.eval(expr.left)):
                return RuntimeValue("int", 0)
            return RuntimeValue("int", 1 if self.truthy(self.eval(expr.right)) else 0)
        if op == "||":
            if self.truthy(self.eval(expr.left)):
                return RuntimeValue("int", 1)
            return RuntimeValue("int", 1 if self.truthy(self.eval(expr.right)) else 0)
        left = self.eval(expr.left)
        right = self.eval(expr.right)
        if op in ("==", "!=", "<", "<=", ">", ">="):
            return self.compare(op, left, right, expr.line)
        ln = self.numeric(left, expr.line)
        rn = self.numeric(right, expr.line)
        if isinstance(ln, float) or isinstance(rn, float):
            return RuntimeValue("double", self.float_arith(op, float(ln), float(rn), expr.line))
        result_type = "long" if "long" in (getattr(left, "static_type", ""), getattr(right, "static_type", "")) else "int"
        return RuntimeValue(result_type, self.int_arith(op, ln, rn, expr.line))

    def int_arith(self, op: str, a: int, b: int, line: int) -> int:
        if op == "+":
            return wrap_int64(a + b)
        if op == "-":
            return wrap_int64(a - b)
        if op == "*":
            return wrap_int64(a * b)
        if b == 0 and op in ("/", "%"):
            raise _Halt("division_by_zero", f"division by zero at line {line}")
        if op == "/":
            q = abs(a) // abs(b)
            return wrap_int64(q if (a >= 0) == (b >= 0) else -q)
        if op == "%":
            q = abs(a) // abs(b)
            q = q if (a >= 0) == (b >= 0) else -q
            return wrap_int64(a - q * b)
        raise _Halt("type_error", f"unknown operator {op}")

    def float_arith(self, op: str, a: float, b: float, line: int) -> float:
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op in ("/", "%"):
            if b == 0.0:
                raise _Halt("division_by_zero", f"division by zero at line {line}")
            if op == "/":
                return a / b
            return math.fmod(a, b)
        raise _Halt("type_error", f"unknown operator {op}")

    def compare(self, op: str, left, right, line: int):
        if isinstance(left, RuntimeValue) and isinstance(right, RuntimeValue) \
                and left.static_type == "char*" and right.static_type == "char*":
            a, b = left.payload, right.payload
        else:
            a = self.numeric(left, line)
            b = self.numeric(right, line)
        table = {
            "==": a == b, "!=": a != b,
            "<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b,
        }
        return RuntimeValue("int", 1 if table[op] else 0)

    def eval_call(self, expr: ast.Call):
        name = expr.name
        if name == "read_int":
            return RuntimeValue("int", self.read_atom(expr.line, int))
        if name == "read_float":
            return RuntimeValue("double", self.read_atom(expr.line, float))
        if name == "read_char":
            return RuntimeValue("char", ord(self.read_atom(expr.line, str)[0]))
        if name == "read_str":
            return make_string(self.read_atom(expr.line, str))
        if name == "print":
            for arg in expr.args:
                self.eval(arg)  # side effects only; output is discarded
            return RuntimeValue("int", 0)
        if name == "probe":
            for arg in expr.args:
                self.probes_hit.add(self.int_of(self.eval(arg), expr.line))
            return RuntimeValue("int", 0)
        func = self.functions[name]
        if len(expr.args) != len(func.params):
            raise _Halt("type_error", f"{name} expects {len(func.params)} args at line {expr.line}")
        args = [self.eval(a) for a in expr.args]
        return self.call_function(func, args)

    def read_atom(self, line: int, conv):
        if self.input_pos >= len(self.input_tokens):
            raise _Halt("input_exhausted", f"read past end of input at line {line}")
        atom = self.input_tokens[self.input_pos]
        self.input_pos += 1
        try:
            return conv(atom)
        except ValueError:
            raise _Halt("input_format", f"cannot parse input atom {atom!r} at line {line}")

    # -- coercion helpers -----------------------------------------------------

    def truthy(self, value) -> bool:
        if isinstance(value, _ArrayRef):
            return True
        if value.static_type == "char*":
            return value.payload != ""
        if value.static_type.endswith("*"):
            return value.payload is not None
        return self.numeric(value, 0) != 0

    def numeric(self, value, line: int):
        if isinstance(value, _ArrayRef):
            raise _Halt("type_error", f"array used as a number at line {line}")
        if value.static_type in INT_TYPES or value.static_type == "char":
            return value.payload
        if value.static_type in FLOAT_TYPES:
            return value.payload
        raise _Halt("type_error", f"{value.static_type} used as a number at line {line}")

    def int_of(self, value, line: int) -> int:
        num = self.numeric(value, line)
        return int(num)

    def int_result_type(self, value) -> str:
        return "long" if getattr(value, "static_type", "") == "long" else "int"

    def coerce(self, value, target_type: str, line: int) -> RuntimeValue:
        if isinstance(value, _ArrayRef):
            if target_type.endswith("*") and target_type != "char*":
                return RuntimeValue(target_type, value.cell)
            raise _Halt("type_error", f"array cannot convert to {target_type} at line {line}")
        if target_type in INT_TYPES:
            num = self.numeric(value, line)
            return RuntimeValue(target_type, wrap_int64(int(num)))
        if target_type in FLOAT_TYPES:
            return RuntimeValue(target_type, float(self.numeric(value, line)))
        if target_type == "char":
            return RuntimeValue("char", int(self.numeric(value, line)) % 256)
        if target_type == "char*":
            if value.static_type != "char*":
                raise _Halt("type_error", f"{value.static_type} cannot convert to char* at line {line}")
            return value
        if target_type.endswith("*"):
            if value.static_type.endswith("*") and value.static_type != "char*":
                return RuntimeValue(target_type, value.payload)
            raise _Halt("type_error", f"{value.static_type} cannot convert to {target_type} at line {line}")
        raise _Halt("type_error", f"cannot convert to {target_type} at line {line}")


def execute(program: ast.Program, exec_input: ExecInput, config: ExecConfig | None = None) -> RawTrace:
    """Run a parsed program against an input stream, returning its trace.

    Runtime failures (budget, exhausted input, division by zero, null
    dereference, ...) flag the trace instead of raising; the events
    collected before the failure are kept.
    """
    return Interpreter(program, exec_input, config).run()
