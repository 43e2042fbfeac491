"""AST node definitions for the MiniC subset.

Every node carries the 1-based source line it starts on; identifier nodes
also carry the character span of the identifier text so downstream label
building can slice the source exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Expr:
    line: int


@dataclass
class IntLit(Expr):
    value: int


@dataclass
class FloatLit(Expr):
    value: float


@dataclass
class CharLit(Expr):
    code: int


@dataclass
class StrLit(Expr):
    value: str


@dataclass
class VarRef(Expr):
    name: str
    span: tuple[int, int]


@dataclass
class Index(Expr):
    base: VarRef
    index: Expr


@dataclass
class Unary(Expr):
    op: str
    operand: Expr


@dataclass
class Binary(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass
class Call(Expr):
    name: str
    args: list[Expr]


@dataclass
class Stmt:
    line: int
    start_offset: int = -1


@dataclass
class Block:
    stmts: list[Stmt]
    open_offset: int   # offset of '{' (or -1 when braces were elided)
    close_offset: int  # offset of '}' (or -1)


@dataclass
class Declarator:
    type: str
    name: str
    span: tuple[int, int]
    array_len: int | None = None
    init: Expr | None = None

    @property
    def static_type(self) -> str:
        if self.array_len is not None:
            return f"{self.type}[{self.array_len}]"
        return self.type


@dataclass
class DeclStmt(Stmt):
    decls: list[Declarator] = field(default_factory=list)
    end_offset: int = -1


@dataclass
class AssignStmt(Stmt):
    target: VarRef | Index = None
    value: Expr = None
    end_offset: int = -1


@dataclass
class ExprStmt(Stmt):
    expr: Expr = None
    end_offset: int = -1


@dataclass
class IfStmt(Stmt):
    cond: Expr = None
    then_block: Block = None
    else_part: "Block | IfStmt | None" = None
    end_offset: int = -1


@dataclass
class WhileStmt(Stmt):
    cond: Expr = None
    body: Block = None
    end_offset: int = -1


@dataclass
class ForStmt(Stmt):
    init: Stmt | None = None
    cond: Expr | None = None
    update: Stmt | None = None
    body: Block = None
    end_offset: int = -1


@dataclass
class ReturnStmt(Stmt):
    expr: Expr = None
    end_offset: int = -1


@dataclass
class Param:
    type: str
    name: str
    span: tuple[int, int]
    line: int


@dataclass
class FunctionDef:
    ret_type: str
    name: str
    params: list[Param]
    body: Block
    line: int


@dataclass
class Program:
    functions: list[FunctionDef]

    def function(self, name: str) -> FunctionDef:
        for f in self.functions:
            if f.name == name:
                return f
        raise KeyError(name)
