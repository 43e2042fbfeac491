"""Recursive-descent parser for MiniC.

Produces the AST consumed by the interpreter, the scope analyzer, and the
source rewriters. Statement end offsets and block brace offsets are kept so
rewrites can splice text without re-lexing.
"""

from __future__ import annotations

from ..errors import MissingMain, ParseError
from . import ast
from .lexer import Token, char_literal_code, lex, string_literal_value

TYPE_KEYWORDS = {"int", "long", "float", "double", "char"}

BUILTINS = {"read_int", "read_float", "read_char", "read_str", "print", "probe"}


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = lex(source)
        self.pos = 0

    # -- token plumbing ----------------------------------------------------

    def peek(self, ahead: int = 0) -> Token | None:
        idx = self.pos + ahead
        return self.tokens[idx] if idx < len(self.tokens) else None

    def at_end(self) -> bool:
        return self.pos >= len(self.tokens)

    def error(self, msg: str):
        if self.pos < len(self.tokens):
            tok = self.tokens[self.pos]
        elif self.tokens:
            tok = self.tokens[-1]
        else:
            raise ParseError(msg, 1, 1)
        raise ParseError(f"{msg}, got {tok.text!r}" if self.pos < len(self.tokens) else f"{msg} at end of input", tok.line, tok.col)

    def advance(self) -> Token:
        if self.at_end():
            self.error("unexpected end of input")
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, text: str) -> Token:
        if self.at_end() or self.tokens[self.pos].text != text:
            self.error(f"expected {text!r}")
        return self.advance()

    def check(self, text: str) -> bool:
        return not self.at_end() and self.tokens[self.pos].text == text

    def accept(self, text: str) -> Token | None:
        if self.check(text):
            return self.advance()
        return None

    # -- grammar -----------------------------------------------------------

    def parse_program(self) -> ast.Program:
        functions = []
        while not self.at_end():
            functions.append(self.parse_function())
        program = ast.Program(functions)
        self._validate(program)
        return program

    def parse_type(self) -> str:
        tok = self.peek()
        if tok is None or tok.text not in TYPE_KEYWORDS:
            self.error("expected a type")
        base = self.advance().text
        if self.accept("*"):
            return base + "*"
        return base

    def parse_function(self) -> ast.FunctionDef:
        start = self.peek()
        ret_type = self.parse_type()
        name_tok = self.advance()
        if name_tok.kind != "ident":
            raise ParseError(f"expected function name, got {name_tok.text!r}", name_tok.line, name_tok.col)
        self.expect("(")
        params = []
        if not self.check(")"):
            while True:
                ptype = self.parse_type()
                ptok = self.advance()
                if ptok.kind != "ident":
                    raise ParseError("expected parameter name", ptok.line, ptok.col)
                params.append(ast.Param(ptype, ptok.text, (ptok.offset, ptok.end), ptok.line))
                if not self.accept(","):
                    break
        self.expect(")")
        body = self.parse_block()
        return ast.FunctionDef(ret_type, name_tok.text, params, body, start.line)

    def parse_block(self) -> ast.Block:
        open_tok = self.expect("{")
        stmts = []
        while not self.check("}"):
            if self.at_end():
                self.error("expected '}'")
            stmts.append(self.parse_statement())
        close_tok = self.expect("}")
        return ast.Block(stmts, open_tok.offset, close_tok.offset)

    def parse_body(self) -> ast.Block:
        """A braced block, or a single statement wrapped in a brace-less one."""
        if self.check("{"):
            return self.parse_block()
        stmt = self.parse_statement()
        return ast.Block([stmt], -1, -1)

    def parse_statement(self) -> ast.Stmt:
        tok = self.peek()
        if tok is None:
            self.error("expected a statement")
        if tok.text in TYPE_KEYWORDS:
            stmt = self.parse_declaration()
        elif tok.text == "if":
            stmt = self.parse_if()
        elif tok.text == "while":
            stmt = self.parse_while()
        elif tok.text == "for":
            stmt = self.parse_for()
        elif tok.text == "return":
            start = self.advance()
            expr = self.parse_expr()
            end = self.expect(";")
            stmt = ast.ReturnStmt(start.line, expr=expr, end_offset=end.end)
        else:
            stmt = self.parse_simple(require_semi=True)
        stmt.start_offset = tok.offset
        return stmt

    def parse_declaration(self) -> ast.DeclStmt:
        start = self.peek()
        base = self.parse_type()
        decls = []
        while True:
            name_tok = self.advance()
            if name_tok.kind != "ident":
                raise ParseError("expected variable name", name_tok.line, name_tok.col)
            array_len = None
            init = None
            if self.accept("["):
                len_tok = self.advance()
                if len_tok.kind != "int" or int(len_tok.text) < 1:
                    raise ParseError("array length must be a positive integer literal", len_tok.line, len_tok.col)
                array_len = int(len_tok.text)
                self.expect("]")
            elif self.accept("="):
                init = self.parse_expr()
            decls.append(ast.Declarator(base, name_tok.text, (name_tok.offset, name_tok.end), array_len, init))
            if not self.accept(","):
                break
        end = self.expect(";")
        return ast.DeclStmt(start.line, decls=decls, end_offset=end.end)

    def parse_simple(self, require_semi: bool) -> ast.Stmt:
        start = self.peek()
        expr = self.parse_expr()
        if self.check("="):
            if not isinstance(expr, (ast.VarRef, ast.Index)):
                self.error("invalid assignment target")
            self.advance()
            value = self.parse_expr()
            end_off = self.expect(";").end if require_semi else (self.tokens[self.pos - 1].end)
            return ast.AssignStmt(start.line, target=expr, value=value, end_offset=end_off)
        end_off = self.expect(";").end if require_semi else (self.tokens[self.pos - 1].end)
        return ast.ExprStmt(start.line, expr=expr, end_offset=end_off)

    def parse_if(self) -> ast.IfStmt:
        start = self.expect("if")
        self.expect("(")
        cond = self.parse_expr()
        self.expect(")")
        then_block = self.parse_body()
        else_part = None
        if self.accept("else"):
            if self.check("if"):
                else_part = self.parse_if()
            else:
                else_part = self.parse_body()
        end = self._block_end(else_part) if else_part is not None else self._block_end(then_block)
        return ast.IfStmt(start.line, cond=cond, then_block=then_block, else_part=else_part, end_offset=end)

    def parse_while(self) -> ast.WhileStmt:
        start = self.expect("while")
        self.expect("(")
        cond = self.parse_expr()
        self.expect(")")
        body = self.parse_body()
        return ast.WhileStmt(start.line, cond=cond, body=body, end_offset=self._block_end(body))

    def parse_for(self) -> ast.ForStmt:
        start = self.expect("for")
        self.expect("(")
        init = None
        if not self.check(";"):
            init_tok = self.peek()
            if init_tok.text in TYPE_KEYWORDS:
                init = self.parse_declaration()
            else:
                init = self.parse_simple(require_semi=True)
            init.start_offset = init_tok.offset
        else:
            self.expect(";")
        cond = None
        if not self.check(";"):
            cond = self.parse_expr()
        self.expect(";")
        update = None
        if not self.check(")"):
            update_tok = self.peek()
            update = self.parse_simple(require_semi=False)
            update.start_offset = update_tok.offset
        self.expect(")")
        body = self.parse_body()
        return ast.ForStmt(start.line, init=init, cond=cond, update=update, body=body,
                           end_offset=self._block_end(body))

    def _block_end(self, part) -> int:
        if isinstance(part, ast.Block):
            if part.close_offset >= 0:
                return part.close_offset + 1
            return part.stmts[-1].end_offset
        if isinstance(part, ast.IfStmt):
            return part.end_offset
        return -1

    # expression precedence, lowest first
    def parse_expr(self) -> ast.Expr:
        return self.parse_or()

    def parse_or(self) -> ast.Expr:
        left = self.parse_and()
        while self.check("||"):
            self.advance()
            right = self.parse_and()
            left = ast.Binary(left.line, "||", left, right)
        return left

    def parse_and(self) -> ast.Expr:
        left = self.parse_equality()
        while self.check("&&"):
            self.advance()
            right = self.parse_equality()
            left = ast.Binary(left.line, "&&", left, right)
        return left

    def parse_equality(self) -> ast.Expr:
        left = self.parse_relational()
        while not self.at_end() and self.peek().text in ("==", "!="):
            op = self.advance().text
            right = self.parse_relational()
            left = ast.Binary(left.line, op, left, right)
        return left

    def parse_relational(self) -> ast.Expr:
        left = self.parse_additive()
        while not self.at_end() and self.peek().text in ("<", "<=", ">", ">="):
            op = self.advance().text
            right = self.parse_additive()
            left = ast.Binary(left.line, op, left, right)
        return left

    def parse_additive(self) -> ast.Expr:
        left = self.parse_multiplicative()
        while not self.at_end() and self.peek().text in ("+", "-"):
            op = self.advance().text
            right = self.parse_multiplicative()
            left = ast.Binary(left.line, op, left, right)
        return left

    def parse_multiplicative(self) -> ast.Expr:
        left = self.parse_unary()
        while not self.at_end() and self.peek().text in ("*", "/", "%"):
            op = self.advance().text
            right = self.parse_unary()
            left = ast.Binary(left.line, op, left, right)
        return left

    def parse_unary(self) -> ast.Expr:
        tok = self.peek()
        if tok is not None and tok.text in ("-", "!"):
            self.advance()
            operand = self.parse_unary()
            return ast.Unary(tok.line, tok.text, operand)
        return self.parse_postfix()

    def parse_postfix(self) -> ast.Expr:
        expr = self.parse_primary()
        if self.check("["):
            if not isinstance(expr, ast.VarRef):
                self.error("only variables can be indexed")
            self.advance()
            index = self.parse_expr()
            self.expect("]")
            return ast.Index(expr.line, expr, index)
        return expr

    def parse_primary(self) -> ast.Expr:
        tok = self.peek()
        if tok is None:
            self.error("expected an expression")
        if tok.kind == "int":
            self.advance()
            return ast.IntLit(tok.line, int(tok.text))
        if tok.kind == "float":
            self.advance()
            return ast.FloatLit(tok.line, float(tok.text))
        if tok.kind == "char":
            self.advance()
            return ast.CharLit(tok.line, char_literal_code(tok.text))
        if tok.kind == "string":
            self.advance()
            return ast.StrLit(tok.line, string_literal_value(tok.text))
        if tok.kind == "ident":
            self.advance()
            if self.check("("):
                self.advance()
                args = []
                if not self.check(")"):
                    while True:
                        args.append(self.parse_expr())
                        if not self.accept(","):
                            break
                self.expect(")")
                return ast.Call(tok.line, tok.text, args)
            return ast.VarRef(tok.line, tok.text, (tok.offset, tok.end))
        if tok.text == "(":
            self.advance()
            expr = self.parse_expr()
            self.expect(")")
            return expr
        self.error("expected an expression")

    # -- validation ---------------------------------------------------------

    def _validate(self, program: ast.Program) -> None:
        names = [f.name for f in program.functions]
        if len(set(names)) != len(names):
            dupe = next(n for n in names if names.count(n) > 1)
            raise ParseError(f"duplicate function {dupe!r}", 1, 1)
        if "main" not in names:
            raise MissingMain("program has no main function")
        main = program.function("main")
        if main.params:
            raise ParseError("main takes no parameters", main.line, 1)
        defined = set(names) | BUILTINS
        for func in program.functions:
            for call in _walk_calls(func.body):
                if call.name not in defined:
                    raise ParseError(f"call to undefined function {call.name!r}", call.line, 1)


def _walk_calls(block: ast.Block):
    for stmt in block.stmts:
        yield from _stmt_calls(stmt)


def _stmt_calls(stmt):
    if isinstance(stmt, ast.DeclStmt):
        for d in stmt.decls:
            if d.init is not None:
                yield from _expr_calls(d.init)
    elif isinstance(stmt, ast.AssignStmt):
        yield from _expr_calls(stmt.target)
        yield from _expr_calls(stmt.value)
    elif isinstance(stmt, ast.ExprStmt):
        yield from _expr_calls(stmt.expr)
    elif isinstance(stmt, ast.IfStmt):
        yield from _expr_calls(stmt.cond)
        yield from _walk_calls(stmt.then_block)
        if isinstance(stmt.else_part, ast.Block):
            yield from _walk_calls(stmt.else_part)
        elif isinstance(stmt.else_part, ast.IfStmt):
            yield from _stmt_calls(stmt.else_part)
    elif isinstance(stmt, ast.WhileStmt):
        yield from _expr_calls(stmt.cond)
        yield from _walk_calls(stmt.body)
    elif isinstance(stmt, ast.ForStmt):
        if stmt.init is not None:
            yield from _stmt_calls(stmt.init)
        if stmt.cond is not None:
            yield from _expr_calls(stmt.cond)
        if stmt.update is not None:
            yield from _stmt_calls(stmt.update)
        yield from _walk_calls(stmt.body)
    elif isinstance(stmt, ast.ReturnStmt):
        yield from _expr_calls(stmt.expr)


def _expr_calls(expr):
    if isinstance(expr, ast.Call):
        yield expr
        for a in expr.args:
            yield from _expr_calls(a)
    elif isinstance(expr, ast.Binary):
        yield from _expr_calls(expr.left)
        yield from _expr_calls(expr.right)
    elif isinstance(expr, ast.Unary):
        yield from _expr_calls(expr.operand)
    elif isinstance(expr, ast.Index):
        yield from _expr_calls(expr.index)


def parse(source: str) -> ast.Program:
    """Parse MiniC source into a Program (requires a main function)."""
    return _Parser(source).parse_program()
